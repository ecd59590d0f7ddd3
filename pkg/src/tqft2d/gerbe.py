"""Rank-one bundles: 2-cocycles, scalar transport, and scalar holonomy.

When every fiber is a line, fusion is a normalized 2-cocycle theta on the
group, fission is forced to 1/(c * theta), and transport is a scalar
function tau compatible with conjugation.  Holonomy of a closed labeled
surface reduces to a product of these scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bordism import ARITY, Gen
from .crossed import CrossedBundle, LabeledBordism, LabelError
from .groups import FiniteGroup, LoopWord, klein_four_group, parse_group
from .report import ValidationReport
from .tensor import Tensor, parse_scalar, format_scalar


class CocycleError(ValueError):
    """Malformed cocycle data (missing entries, zero values, bad file)."""


def _complete(group, data, default):
    out = {}
    for g in group.elements():
        for h in group.elements():
            out[g, h] = data.get((g, h), default)
    return out


@dataclass
class ScalarBundle:
    group: FiniteGroup
    theta: dict          # (g, h) -> scalar, the fusion cocycle
    tau: dict            # (k, g) -> scalar transport A_g -> A_{kgk^-1}
    counit_scalar: object = Fraction(1)

    def __post_init__(self):
        G = self.group
        for g in G.elements():
            for h in G.elements():
                if (g, h) not in self.theta:
                    raise CocycleError("missing theta(%d,%d)" % (g, h))
                if self.theta[g, h] == 0:
                    raise CocycleError("theta(%d,%d) is zero" % (g, h))
                if (g, h) not in self.tau:
                    raise CocycleError("missing tau(%d,%d)" % (g, h))
                if self.tau[g, h] == 0:
                    raise CocycleError("tau(%d,%d) is zero" % (g, h))
        if self.counit_scalar == 0:
            raise CocycleError("counit scalar must be nonzero")

    @property
    def exact(self):
        return not isinstance(self.counit_scalar, complex)


def check_theta(group: FiniteGroup, theta) -> ValidationReport:
    """Cocycle identity and normalization for a fusion scalar table."""
    report = ValidationReport()
    report.check("cocycle")
    report.check("normalization")
    e = group.identity
    for g in group.elements():
        if theta[g, e] != 1:
            report.fail("normalization", (g, e))
        if theta[e, g] != 1:
            report.fail("normalization", (e, g))
    for g in group.elements():
        for h in group.elements():
            for k in group.elements():
                lhs = theta[g, h] * theta[group.mul(g, h), k]
                rhs = theta[h, k] * theta[g, group.mul(h, k)]
                if lhs != rhs:
                    report.fail("cocycle", (g, h, k))
    return report


def check_cocycle(sb: ScalarBundle) -> ValidationReport:
    """Cocycle identity plus transport compatibility and flatness."""
    G = sb.group
    e = G.identity
    report = check_theta(G, sb.theta)
    report.check("transport-compatibility")
    report.check("transport-flatness")
    for k in G.elements():
        for g in G.elements():
            if sb.tau[e, g] != 1:
                report.fail("transport-flatness", (e, g))
            for h in G.elements():
                gc, hc = G.conj(k, g), G.conj(k, h)
                lhs = sb.tau[k, g] * sb.tau[k, h] * sb.theta[gc, hc]
                rhs = sb.tau[k, G.mul(g, h)] * sb.theta[g, h]
                if lhs != rhs:
                    report.fail("transport-compatibility", (k, g, h))
            for l in G.elements():
                lhs = sb.tau[G.mul(k, l), g]
                rhs = sb.tau[k, G.conj(l, g)] * sb.tau[l, g]
                if lhs != rhs:
                    report.fail("transport-flatness", (k, l, g))
    return report


def induced_transport(group: FiniteGroup, theta) -> dict:
    """Transport by twisted conjugation: tau(k,g) = theta(k,g)/theta(kgk^-1,k)."""
    tau = {}
    for k in group.elements():
        for g in group.elements():
            tau[k, g] = theta[k, g] / theta[group.conj(k, g), k]
    return tau


def from_cocycle(group: FiniteGroup, theta, tau=None, counit_scalar=Fraction(1)):
    """Build a scalar bundle; transport defaults to twisted conjugation."""
    theta = _complete(group, theta, Fraction(1))
    rep = check_theta(group, theta)
    if not rep.passed:
        raise CocycleError(
            "not a normalized cocycle (%s); dividing by the coboundary of "
            "beta(g) = theta(g,e) normalizes the unit values"
            % ", ".join(rep.failed_axioms()))
    if tau is None:
        tau = induced_transport(group, theta)
    else:
        tau = _complete(group, tau, Fraction(1))
    return ScalarBundle(group=group, theta=theta, tau=tau,
                        counit_scalar=counit_scalar)


def coboundary(group: FiniteGroup, theta, beta) -> dict:
    """Twist a cocycle by a normalized 1-cochain beta (beta(e) = 1)."""
    if beta[group.identity] != 1:
        raise CocycleError("coboundary cochain must send the identity to 1")
    out = {}
    for g in group.elements():
        for h in group.elements():
            out[g, h] = theta[g, h] * beta[g] * beta[h] / beta[group.mul(g, h)]
    return out


def klein_anticommuting_cocycle():
    """The nontrivial bilinear cocycle on Z/2 x Z/2 (labels '00'..'11')."""
    K = klein_four_group()
    bits = {K.index(lbl): (int(lbl[0]), int(lbl[1])) for lbl in K.labels}
    theta = {}
    for g in K.elements():
        for h in K.elements():
            theta[g, h] = Fraction(-1) ** (bits[g][1] * bits[h][0])
    return K, theta


def to_crossed_bundle(sb: ScalarBundle) -> CrossedBundle:
    """Inflate the scalar data to a rank-one crossed bundle."""
    G = sb.group
    c = sb.counit_scalar
    exact = sb.exact

    def t3(x):
        return Tensor(np.array([[[x]]], dtype=object), exact=exact)

    def t2(x):
        return Tensor(np.array([[x]], dtype=object), exact=exact)

    fusion = {k: t3(v) for k, v in sb.theta.items()}
    fission = {k: t3(1 / (c * v)) for k, v in sb.theta.items()}
    transport = {k: t2(v) for k, v in sb.tau.items()}
    one = Fraction(1) if exact else complex(1)
    return CrossedBundle(group=G, dims=(1,) * G.order,
                         fusion=fusion, fission=fission, transport=transport,
                         unit=Tensor(np.array([one], dtype=object), exact=exact),
                         counit=Tensor(np.array([c], dtype=object), exact=exact))


def scalar_surface_product(b: LabeledBordism, sb: ScalarBundle):
    """Holonomy of a closed labeled surface as a plain product of scalars."""
    if not b.is_closed():
        raise LabelError("holonomy needs a closed labeled surface")
    acc = Fraction(1) if sb.exact else complex(1)
    for t, (layer, ann_row) in enumerate(zip(b.word.layers, b.annotations)):
        qi = 0
        for gen, ann in zip(layer, ann_row):
            ins = b.boundaries[t][qi:qi + ARITY[gen][0]]
            qi += ARITY[gen][0]
            if gen is Gen.ID:
                acc = acc * sb.tau[ann, ins[0]]
            elif gen is Gen.PANTS:
                acc = acc * sb.theta[ins[0], ins[1]]
            elif gen is Gen.COPANTS:
                acc = acc / (sb.counit_scalar * sb.theta[ann])
            elif gen is Gen.CUP:
                acc = acc * sb.counit_scalar
            # CAP and SWAP contribute 1
    return acc


def gerbe_holonomy(sb: ScalarBundle, genus: int, handles=()):
    """Holonomy of the closed genus-g surface with handle labels (a_i, b_i).

    Computed twice, as the scalar product along a fixed pants decomposition
    and through the general rank-one bundle evaluator, and the two values
    are required to agree.
    """
    from .crossed import closed_surface_word, holonomy as bundle_holonomy
    b = closed_surface_word(sb.group, genus, handles)
    direct = scalar_surface_product(b, sb)
    via_bundle = bundle_holonomy(b, to_crossed_bundle(sb))
    if direct != via_bundle:
        raise CocycleError("scalar walk %s disagrees with the evaluator %s"
                           % (direct, via_bundle))
    return direct


def fusion_lambda_check(sb: ScalarBundle, words) -> ValidationReport:
    """Associativity of the fusion scalars between four loop words.

    Word i fuses with word j through the scalar on the grading
    (w_i w_j^-1, w_j w_k^-1); the square lambda_134 . lambda_123 =
    lambda_124 . lambda_234 is exactly one instance of the cocycle identity.
    """
    G = sb.group
    pts = [w.evaluate(G) if isinstance(w, LoopWord) else w for w in words]
    if len(pts) != 4:
        raise ValueError("need exactly four loop words")
    report = ValidationReport()
    report.check("lambda-associativity")

    def lam(i, j, k):
        g = G.mul(pts[i], G.inverse(pts[j]))
        h = G.mul(pts[j], G.inverse(pts[k]))
        return sb.theta[g, h]

    if lam(0, 2, 3) * lam(0, 1, 2) != lam(0, 1, 3) * lam(1, 2, 3):
        report.fail("lambda-associativity", tuple(pts))
    return report


# ---------------------------------------------------------------------------
# cocycle file format

def parse_cocycle(text: str, group: FiniteGroup, exact=True) -> ScalarBundle:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    one = Fraction(1) if exact else complex(1)
    theta_raw, tau_raw = {}, {}
    counit = one
    explicit_tau = False
    for ln in lines:
        if ln.startswith("cocycle over"):
            continue
        head, _, rhs = ln.partition("=")
        toks = head.split()
        if not rhs.strip():
            raise CocycleError("missing value in line %r" % ln)
        val = parse_scalar(rhs.strip(), exact)
        if toks[0] == "theta" and len(toks) == 3:
            theta_raw[group.index(toks[1]), group.index(toks[2])] = val
        elif toks[0] == "tau" and len(toks) == 3:
            tau_raw[group.index(toks[1]), group.index(toks[2])] = val
            explicit_tau = True
        elif toks[0] == "counit" and len(toks) == 1:
            counit = val
        else:
            raise CocycleError("unexpected line %r" % ln)
    theta = _complete(group, theta_raw, one)
    tau = _complete(group, tau_raw, one) if explicit_tau else None
    rep = check_theta(group, theta)
    if not rep.passed:
        raise CocycleError("not a normalized cocycle: %s" % rep.failed_axioms())
    if tau is None:
        tau = induced_transport(group, theta)
    return ScalarBundle(group=group, theta=theta, tau=tau, counit_scalar=counit)


def format_cocycle(sb: ScalarBundle, group_filename: str) -> str:
    G = sb.group
    lines = ["cocycle over %s" % group_filename]
    for g in G.elements():
        for h in G.elements():
            if sb.theta[g, h] != 1:
                lines.append("theta %s %s = %s"
                             % (G.labels[g], G.labels[h],
                                format_scalar(sb.theta[g, h])))
    for k in G.elements():
        for g in G.elements():
            if sb.tau[k, g] != 1:
                lines.append("tau %s %s = %s"
                             % (G.labels[k], G.labels[g],
                                format_scalar(sb.tau[k, g])))
    if sb.counit_scalar != 1:
        lines.append("counit = %s" % format_scalar(sb.counit_scalar))
    return "\n".join(lines) + "\n"


def load_cocycle(path: str, exact=True):
    import os
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    group = None
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln.startswith("cocycle over"):
            gpath = ln[len("cocycle over"):].strip()
            if not os.path.isabs(gpath):
                gpath = os.path.join(os.path.dirname(os.path.abspath(path)), gpath)
            with open(gpath, "r", encoding="utf-8") as gh:
                group = parse_group(gh.read())
            break
    if group is None:
        raise CocycleError("cocycle file must start with 'cocycle over <groupfile>'")
    return parse_cocycle(text, group, exact=exact)
