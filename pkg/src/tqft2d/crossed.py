"""G-graded Frobenius bundles with flat transport over the loops of BG.

Fibers are indexed by group elements (the holonomy of the loop), fusion and
fission move between concatenated loops, and parallel transport conjugates
the grading.  Both directions of the correspondence with labeled-bordism
evaluators live here: `evaluate_labeled` turns a bundle into an evaluator,
`tft_to_bundle` extracts a bundle from an evaluator oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bordism import ARITY, BordismWord, Gen, layer_arity
from .frobenius import FrobeniusAlgebra, comultiplication
from .groups import FiniteGroup, LoopWord
from .report import ValidationReport
from .tensor import Tensor, equal, invert_matrix, parse_scalar, format_scalar, tensordot


class BundleError(ValueError):
    """Structural problem with bundle data (shapes, missing blocks)."""


class LabelError(ValueError):
    """Inconsistent G-labels on a bordism word."""


class ExtractionError(ValueError):
    """The oracle violates a field-theory axiom during bundle extraction."""


@dataclass
class CrossedBundle:
    group: FiniteGroup
    dims: tuple                 # fiber dimension per group element
    fusion: dict                # (g, h) -> Tensor (d_g, d_h, d_gh)
    fission: dict               # (g, h) -> Tensor (d_gh, d_g, d_h)
    transport: dict             # (k, g) -> Tensor (d_g, d_{kgk^-1})
    unit: Tensor                # shape (d_e,)
    counit: Tensor              # shape (d_e,)

    def __post_init__(self):
        G = self.group
        if len(self.dims) != G.order or any(d <= 0 for d in self.dims):
            raise BundleError("need a positive fiber dimension per group element")
        e = G.identity
        if self.unit.shape != (self.dims[e],):
            raise BundleError("unit must live in the identity fiber")
        if self.counit.shape != (self.dims[e],):
            raise BundleError("counit must live on the identity fiber")
        for g in G.elements():
            for h in G.elements():
                gh = G.mul(g, h)
                want = (self.dims[g], self.dims[h], self.dims[gh])
                if (g, h) not in self.fusion:
                    raise BundleError("missing fusion block (%d,%d)" % (g, h))
                if self.fusion[g, h].shape != want:
                    raise BundleError("fusion (%d,%d) has shape %s, want %s"
                                      % (g, h, self.fusion[g, h].shape, want))
                want = (self.dims[gh], self.dims[g], self.dims[h])
                if (g, h) not in self.fission:
                    raise BundleError("missing fission block (%d,%d)" % (g, h))
                if self.fission[g, h].shape != want:
                    raise BundleError("fission (%d,%d) has shape %s, want %s"
                                      % (g, h, self.fission[g, h].shape, want))
        for k in G.elements():
            for g in G.elements():
                want = (self.dims[g], self.dims[G.conj(k, g)])
                if (k, g) not in self.transport:
                    raise BundleError("missing transport block (%d,%d)" % (k, g))
                if self.transport[k, g].shape != want:
                    raise BundleError("transport (%d,%d) has shape %s, want %s"
                                      % (k, g, self.transport[k, g].shape, want))

    @property
    def exact(self):
        return self.unit.exact

    def fiber_dim(self, g):
        return self.dims[g]

    def __eq__(self, other):
        if not isinstance(other, CrossedBundle):
            return NotImplemented
        if self.group != other.group or self.dims != other.dims:
            return False
        return (all(equal(self.fusion[k], other.fusion[k]) for k in self.fusion)
                and all(equal(self.fission[k], other.fission[k]) for k in self.fission)
                and all(equal(self.transport[k], other.transport[k]) for k in self.transport)
                and equal(self.unit, other.unit) and equal(self.counit, other.counit))


def _zero_like(bundle, shape):
    zero = Fraction(0) if bundle.exact else complex(0)
    return np.full(shape, zero, dtype=object)


def _first_mismatch(a, b, exact, tol=1e-9):
    """First differing multi-index between two equal-shaped object arrays."""
    for idx in np.ndindex(a.shape):
        d = a[idx] - b[idx]
        if (d != 0) if exact else (abs(d) > tol):
            return idx
    return None


# ---------------------------------------------------------------------------
# validation

def validate_bundle(bundle: CrossedBundle) -> ValidationReport:
    """Enumerate every defining condition over all gradings."""
    G = bundle.group
    e = G.identity
    mu = {k: t.array for k, t in bundle.fusion.items()}
    nu = {k: t.array for k, t in bundle.fission.items()}
    P = {k: t.array for k, t in bundle.transport.items()}
    exact = bundle.exact
    report = ValidationReport()

    def mismatch(axiom, grading, lhs, rhs):
        idx = _first_mismatch(lhs, rhs, exact)
        if idx is not None:
            report.fail(axiom, grading + idx)

    report.check("fusion-transport")
    report.check("fission-transport")
    for k in G.elements():
        for g in G.elements():
            for h in G.elements():
                gc, hc = G.conj(k, g), G.conj(k, h)
                gh = G.mul(g, h)
                ghc = G.conj(k, gh)
                # P_k . mu_{g,h} = mu_{g',h'} . (P_k x P_k)
                lhs = np.tensordot(mu[g, h], P[k, gh], axes=([2], [0]))
                tmp = np.tensordot(P[k, g], mu[gc, hc], axes=([1], [0]))
                rhs = np.tensordot(P[k, h], tmp, axes=([1], [1]))
                rhs = np.transpose(rhs, (1, 0, 2))
                mismatch("fusion-transport", (k, g, h), lhs, rhs)
                # nu_{g',h'} . P_k = (P_k x P_k) . nu_{g,h}
                lhs = np.tensordot(P[k, gh], nu[gc, hc], axes=([1], [0]))
                tmp = np.tensordot(nu[g, h], P[k, g], axes=([1], [0]))
                rhs = np.tensordot(tmp, P[k, h], axes=([1], [0]))
                mismatch("fission-transport", (k, g, h), lhs, rhs)

    report.check("associativity")
    report.check("coassociativity")
    report.check("frobenius")
    for g in G.elements():
        for h in G.elements():
            for k in G.elements():
                gh, hk = G.mul(g, h), G.mul(h, k)
                lhs = np.tensordot(mu[g, h], mu[gh, k], axes=([2], [0]))
                rhs = np.tensordot(mu[h, k], mu[g, hk], axes=([2], [1]))
                rhs = np.transpose(rhs, (2, 0, 1, 3))
                mismatch("associativity", (g, h, k), lhs, rhs)

                lhs = np.tensordot(nu[gh, k], nu[g, h], axes=([1], [0]))
                # legs (x, c, a, b) -> (x, a, b, c)
                lhs = np.transpose(lhs, (0, 2, 3, 1))
                rhs = np.tensordot(nu[g, hk], nu[h, k], axes=([2], [0]))
                mismatch("coassociativity", (g, h, k), lhs, rhs)

                # nu_{g,hk} . mu_{gh,k} = (id x mu_{h,k}) . (nu_{g,h} x id)
                lhs = np.tensordot(mu[gh, k], nu[g, hk], axes=([2], [0]))
                rhs = np.tensordot(nu[g, h], mu[h, k], axes=([2], [0]))
                # legs (x, a, y, m) -> (x, y, a, m)
                rhs = np.transpose(rhs, (0, 2, 1, 3))
                mismatch("frobenius", (g, h, k), lhs, rhs)
                # nu_{gh,k} . mu_{g,hk} = (mu_{g,h} x id) . (id x nu_{h,k})
                lhs = np.tensordot(mu[g, hk], nu[gh, k], axes=([2], [0]))
                rhs = np.tensordot(nu[h, k], mu[g, h], axes=([1], [1]))
                # legs (y, c, x, a) -> (x, y, a, c)
                rhs = np.transpose(rhs, (2, 0, 3, 1))
                mismatch("frobenius", (g, h, k, "rev"), lhs, rhs)

    report.check("unit-transport")
    u = bundle.unit.array
    eps = bundle.counit.array
    de = bundle.dims[e]
    for k in G.elements():
        lhs = np.tensordot(u, P[k, e], axes=([0], [0]))
        mismatch("unit-transport", (k,), lhs, u)
        lhs = np.tensordot(P[k, e], eps, axes=([1], [0]))
        mismatch("unit-transport", (k, "counit"), lhs, eps)

    report.check("unit")
    report.check("counit")
    for g in G.elements():
        ident = Tensor.identity(bundle.dims[g], exact=exact).array
        lhs = np.tensordot(mu[g, e], u, axes=([1], [0]))
        mismatch("unit", (g,), lhs, ident)
        lhs = np.tensordot(nu[g, e], eps, axes=([2], [0]))
        mismatch("counit", (g,), lhs, ident)

    report.check("nondegeneracy")
    pair = np.tensordot(mu[e, e], eps, axes=([2], [0]))
    if invert_matrix(Tensor(pair, exact=exact)) is None:
        report.fail("nondegeneracy", ())

    report.check("flatness")
    for g in G.elements():
        ident = Tensor.identity(bundle.dims[g], exact=exact).array
        mismatch("flatness", (e, g), P[e, g], ident)
    for k in G.elements():
        for l in G.elements():
            for g in G.elements():
                gl = G.conj(l, g)
                lhs = np.tensordot(P[l, g], P[k, gl], axes=([1], [0]))
                mismatch("flatness", (k, l, g), lhs, P[G.mul(k, l), g])
    return report


# ---------------------------------------------------------------------------
# constructors

def from_group_algebra(group: FiniteGroup, exact=True) -> CrossedBundle:
    """All fibers one-dimensional with trivial structure scalars."""
    one = Fraction(1) if exact else complex(1)
    scalar3 = Tensor(np.full((1, 1, 1), one, dtype=object), exact=exact)
    scalar2 = Tensor(np.full((1, 1), one, dtype=object), exact=exact)
    vec = Tensor(np.array([one], dtype=object), exact=exact)
    fusion = {(g, h): scalar3 for g in group.elements() for h in group.elements()}
    fission = dict(fusion)
    transport = {(k, g): scalar2 for k in group.elements() for g in group.elements()}
    return CrossedBundle(group=group, dims=(1,) * group.order,
                         fusion=fusion, fission=fission, transport=transport,
                         unit=vec, counit=vec)


def from_frobenius_algebra(group: FiniteGroup, algebra: FrobeniusAlgebra) -> CrossedBundle:
    """Constant bundle: every fiber is the given algebra, transport identity."""
    n = algebra.dim
    delta = comultiplication(algebra)
    ident = Tensor.identity(n, exact=algebra.exact)
    els = list(group.elements())
    fusion = {(g, h): algebra.mul for g in els for h in els}
    fission = {(g, h): delta for g in els for h in els}
    transport = {(k, g): ident for k in els for g in els}
    return CrossedBundle(group=group, dims=(n,) * group.order,
                         fusion=fusion, fission=fission, transport=transport,
                         unit=algebra.unit, counit=algebra.counit)


def derive_fission(bundle: CrossedBundle) -> dict:
    """Derive fission from fusion and the graded pairing, when invertible.

    Returns a fission dict; raises BundleError if some needed pairing block
    between A_h and A_{h^-1} is singular.
    """
    G = bundle.group
    eps = bundle.counit.array
    out = {}
    copair = {}
    for h in G.elements():
        hi = G.inverse(h)
        # pairing A_{h^-1} x A_h -> k through mu and counit
        pair = np.tensordot(bundle.fusion[hi, h].array, eps, axes=([2], [0]))
        inv = invert_matrix(Tensor(pair, exact=bundle.exact))
        if inv is None:
            raise BundleError("pairing between fibers %d and %d is singular" % (hi, h))
        copair[h] = inv.array
    for g in G.elements():
        for h in G.elements():
            gh = G.mul(g, h)
            hi = G.inverse(h)
            # nu[g,h][x,i,j] = sum_a mu_{gh,h^-1}[x,a,i] copair_h[a,j]
            arr = np.tensordot(bundle.fusion[gh, hi].array, copair[h], axes=([1], [0]))
            out[g, h] = Tensor(np.asarray(arr, dtype=object), exact=bundle.exact)
    return out


# ---------------------------------------------------------------------------
# labeled bordisms

@dataclass(frozen=True)
class LabeledBordism:
    group: FiniteGroup
    word: BordismWord
    boundaries: tuple   # per boundary, tuple of circle labels (group indices)
    annotations: tuple  # per layer, per generator: conjugator for ID,
                        # (g, h) split for COPANTS, None otherwise

    @property
    def in_labels(self):
        return self.boundaries[0]

    @property
    def out_labels(self):
        return self.boundaries[-1]

    def is_closed(self):
        return self.word.arity_in == 0 and self.word.arity_out == 0


def label_word(group: FiniteGroup, word: BordismWord, in_labels,
               annotations=None) -> LabeledBordism:
    """Propagate labels through the word, checking consistency.

    ``annotations``: per layer, per generator; conjugator element for ID
    (default identity), (g, h) output split for COPANTS (required), None
    for the rest.
    """
    e = group.identity
    in_labels = tuple(in_labels)
    if len(in_labels) != word.arity_in:
        raise LabelError("expected %d input labels, got %d"
                         % (word.arity_in, len(in_labels)))
    if annotations is None:
        annotations = tuple(tuple(None for _ in layer) for layer in word.layers)
    annotations = tuple(tuple(layer) for layer in annotations)
    if len(annotations) != len(word.layers) or any(
            len(a) != len(layer) for a, layer in zip(annotations, word.layers)):
        raise LabelError("annotation shape does not match the word")

    norm_annots = []
    boundaries = [in_labels]
    cur = list(in_labels)
    for t, (layer, annot) in enumerate(zip(word.layers, annotations)):
        nxt = []
        norm_layer = []
        qi = 0
        for g_idx, (gen, ann) in enumerate(zip(layer, annot)):
            a_in = ARITY[gen][0]
            ins = cur[qi:qi + a_in]
            qi += a_in
            if gen is Gen.ID:
                k = e if ann is None else int(ann)
                nxt.append(group.conj(k, ins[0]))
                norm_layer.append(k)
            elif gen is Gen.SWAP:
                nxt.extend([ins[1], ins[0]])
                norm_layer.append(None)
            elif gen is Gen.CAP:
                nxt.append(e)
                norm_layer.append(None)
            elif gen is Gen.CUP:
                if ins[0] != e:
                    raise LabelError(
                        "cup on a non-identity label %r (layer %d)"
                        % (group.labels[ins[0]], t))
                norm_layer.append(None)
            elif gen is Gen.PANTS:
                nxt.append(group.mul(ins[0], ins[1]))
                norm_layer.append(None)
            elif gen is Gen.COPANTS:
                if ann is None:
                    raise LabelError("copants at layer %d needs a (g,h) split" % t)
                sg, sh = int(ann[0]), int(ann[1])
                if group.mul(sg, sh) != ins[0]:
                    raise LabelError(
                        "copants split (%s,%s) does not multiply to %s (layer %d)"
                        % (group.labels[sg], group.labels[sh],
                           group.labels[ins[0]], t))
                nxt.extend([sg, sh])
                norm_layer.append((sg, sh))
        boundaries.append(tuple(nxt))
        norm_annots.append(tuple(norm_layer))
        cur = nxt
    return LabeledBordism(group=group, word=word,
                          boundaries=tuple(boundaries),
                          annotations=tuple(norm_annots))


def conjugate_labeled(b: LabeledBordism, k) -> LabeledBordism:
    """Relabel the whole surface by simultaneous conjugation with k."""
    G = b.group
    new_in = tuple(G.conj(k, g) for g in b.in_labels)
    annots = []
    for layer, ann in zip(b.word.layers, b.annotations):
        row = []
        for gen, a in zip(layer, ann):
            if gen is Gen.ID:
                row.append(G.mul(G.mul(k, a), G.inverse(k)))
            elif gen is Gen.COPANTS:
                row.append((G.conj(k, a[0]), G.conj(k, a[1])))
            else:
                row.append(None)
        annots.append(tuple(row))
    return label_word(G, b.word, new_in, tuple(annots))


def insert_identity_layer(b: LabeledBordism, at: int) -> LabeledBordism:
    """Insert an all-identity-cylinder layer at boundary `at`."""
    G = b.group
    width = len(b.boundaries[at])
    new_layers = b.word.layers[:at] + (tuple([Gen.ID] * width),) + b.word.layers[at:]
    new_annots = (b.annotations[:at] + (tuple([G.identity] * width),)
                  + b.annotations[at:])
    return label_word(G, BordismWord(new_layers), b.in_labels, new_annots)


def insert_conjugation_pair(b: LabeledBordism, at: int, k) -> LabeledBordism:
    """Insert transport by k then by k^-1 at boundary `at` (a homotopy)."""
    G = b.group
    width = len(b.boundaries[at])
    lay = tuple([Gen.ID] * width)
    new_layers = b.word.layers[:at] + (lay, lay) + b.word.layers[at:]
    new_annots = (b.annotations[:at]
                  + (tuple([k] * width), tuple([G.inverse(k)] * width))
                  + b.annotations[at:])
    return label_word(G, BordismWord(new_layers), b.in_labels, new_annots)


# ---------------------------------------------------------------------------
# labeled surface text format

def parse_labeled(text: str, group: FiniteGroup) -> LabeledBordism:
    """Parse `pants[g,h] ; id[k] ; cup[]`-style labeled words.

    First-layer factors must determine their input labels: `pants[g,h]` and
    `swap[g,h]` list inputs, `copants[g,h]` lists its output split (input is
    the product), `id[k,g]` gives conjugator and input, `id[g]` means plain
    cylinder on label g.  In later layers labels propagate; `id[k]` is the
    conjugating cylinder and `pants[g,h]` / `swap[g,h]` act as assertions.
    """
    src = " ".join(ln.split("#", 1)[0] for ln in text.splitlines())
    layer_texts = [lt.strip() for lt in src.split(";")]
    layers = []
    raw = []
    for lt in layer_texts:
        if not lt:
            raise LabelError("empty layer in labeled word")
        factors = [f.strip() for f in lt.split("*")]
        gens = []
        anns = []
        for f in factors:
            name, _, rest = f.partition("[")
            name = name.strip()
            args = []
            if rest:
                if not rest.endswith("]"):
                    raise LabelError("missing ']' in %r" % f)
                body = rest[:-1].strip()
                if body:
                    args = [group.index(tok.strip()) for tok in body.split(",")]
            try:
                gen = {g.value: g for g in Gen}[name]
            except KeyError:
                raise LabelError("unknown generator %r" % name) from None
            gens.append(gen)
            anns.append(tuple(args))
        layers.append(tuple(gens))
        raw.append(tuple(anns))
    word = BordismWord(tuple(layers))

    # first-layer annotations fix the word inputs
    in_labels = []
    e = group.identity
    for gen, args in zip(layers[0], raw[0]):
        if gen is Gen.ID:
            if len(args) == 2:
                in_labels.append(args[1])
            elif len(args) == 1:
                in_labels.append(args[0])
            else:
                raise LabelError("first-layer id needs [k,g] or [g]")
        elif gen in (Gen.PANTS, Gen.SWAP):
            if len(args) != 2:
                raise LabelError("first-layer %s needs [g,h]" % gen.value)
            in_labels.extend(args)
        elif gen is Gen.COPANTS:
            if len(args) != 2:
                raise LabelError("copants needs a [g,h] split")
            in_labels.append(group.mul(args[0], args[1]))
        elif gen is Gen.CUP:
            in_labels.append(e)
        # CAP adds no inputs

    annotations = []
    for t, (layer, anns) in enumerate(zip(layers, raw)):
        row = []
        for gen, args in zip(layer, anns):
            if gen is Gen.ID:
                if t == 0:
                    row.append(args[0] if len(args) == 2 else e)
                else:
                    if len(args) > 1:
                        raise LabelError("id takes at most one conjugator")
                    row.append(args[0] if args else e)
            elif gen is Gen.COPANTS:
                if len(args) != 2:
                    raise LabelError("copants needs a [g,h] split")
                row.append((args[0], args[1]))
            else:
                row.append(None)
        annotations.append(tuple(row))
    b = label_word(group, word, tuple(in_labels), tuple(annotations))

    # check assertion-style annotations on later layers
    for t in range(1, len(layers)):
        qi = 0
        for gen, args in zip(layers[t], raw[t]):
            ins = b.boundaries[t][qi:qi + ARITY[gen][0]]
            qi += ARITY[gen][0]
            if gen in (Gen.PANTS, Gen.SWAP) and args:
                if tuple(args) != tuple(ins):
                    raise LabelError(
                        "%s[%s] disagrees with propagated labels %s (layer %d)"
                        % (gen.value,
                           ",".join(group.labels[a] for a in args),
                           tuple(group.labels[i] for i in ins), t))
    return b


def format_labeled(b: LabeledBordism) -> str:
    G = b.group
    parts = []
    for t, (layer, ann) in enumerate(zip(b.word.layers, b.annotations)):
        qi = 0
        factors = []
        for gen, a in zip(layer, ann):
            ins = b.boundaries[t][qi:qi + ARITY[gen][0]]
            qi += ARITY[gen][0]
            if gen is Gen.ID:
                if t == 0:
                    factors.append("id[%s,%s]" % (G.labels[a], G.labels[ins[0]]))
                else:
                    factors.append("id[%s]" % G.labels[a])
            elif gen is Gen.COPANTS:
                factors.append("copants[%s,%s]" % (G.labels[a[0]], G.labels[a[1]]))
            elif gen in (Gen.PANTS, Gen.SWAP) and t == 0:
                factors.append("%s[%s,%s]" % (gen.value,
                                              G.labels[ins[0]], G.labels[ins[1]]))
            elif gen is Gen.CAP:
                factors.append("cap[]")
            elif gen is Gen.CUP:
                factors.append("cup[]")
            else:
                factors.append(gen.value)
        parts.append(" * ".join(factors))
    return " ; ".join(parts)


# ---------------------------------------------------------------------------
# evaluation

def _labeled_generator_tensor(bundle, gen, ann, in_labels, out_labels):
    G = bundle.group
    if gen is Gen.ID:
        return bundle.transport[ann, in_labels[0]]
    if gen is Gen.SWAP:
        dg, dh = bundle.dims[in_labels[0]], bundle.dims[in_labels[1]]
        t = Tensor.zeros((dg, dh, dh, dg), exact=bundle.exact)
        one = Fraction(1) if bundle.exact else complex(1)
        for i in range(dg):
            for j in range(dh):
                t.array[i, j, j, i] = one
        return t
    if gen is Gen.CAP:
        return bundle.unit
    if gen is Gen.CUP:
        return bundle.counit
    if gen is Gen.PANTS:
        return bundle.fusion[in_labels[0], in_labels[1]]
    if gen is Gen.COPANTS:
        return bundle.fission[ann]
    raise AssertionError(gen)


def evaluate_labeled(b: LabeledBordism, bundle: CrossedBundle) -> Tensor:
    """Linear map between the labeled boundary fibers; legs [ins..., outs...]."""
    if b.group != bundle.group:
        raise BundleError("bordism and bundle are over different groups")
    cur = None
    cur_in = cur_bound = 0
    for t, (layer, ann_row) in enumerate(zip(b.word.layers, b.annotations)):
        ins_all = b.boundaries[t]
        outs_all = b.boundaries[t + 1]
        lt = None
        slots = []
        qi = qo = 0
        for gen, ann in zip(layer, ann_row):
            a, o = ARITY[gen]
            gt = _labeled_generator_tensor(bundle, gen, ann,
                                           ins_all[qi:qi + a], outs_all[qo:qo + o])
            qi += a
            qo += o
            lt = gt if lt is None else tensordot(lt, gt, [], [])
            slots.append((a, o))
        if lt is None:
            lt = Tensor.scalar(1, exact=bundle.exact)
        perm_in, perm_out = [], []
        off = 0
        for a, o in slots:
            perm_in.extend(range(off, off + a))
            perm_out.extend(range(off + a, off + a + o))
            off += a + o
        if perm_in or perm_out:
            lt = Tensor(np.transpose(lt.array, perm_in + perm_out),
                        exact=lt.exact, tol=lt.tol)
        l_in, l_out = len(perm_in), len(perm_out)
        if cur is None:
            cur, cur_in, cur_bound = lt, l_in, l_out
        else:
            cur = tensordot(cur, lt, list(range(cur_in, cur_in + cur_bound)),
                            list(range(l_in)))
            cur_bound = l_out
    return cur


def holonomy(b: LabeledBordism, bundle: CrossedBundle):
    """Scalar a closed labeled surface evaluates to."""
    if not b.is_closed():
        raise LabelError("holonomy needs a closed labeled surface")
    return evaluate_labeled(b, bundle).item()


# ---------------------------------------------------------------------------
# the two directions of the correspondence

@dataclass
class TftOracle:
    """A black-box evaluator of labeled bordisms with known fiber dimensions."""

    group: FiniteGroup
    dims: tuple
    evaluate: object  # callable LabeledBordism -> Tensor

    @classmethod
    def from_bundle(cls, bundle: CrossedBundle):
        return cls(group=bundle.group, dims=bundle.dims,
                   evaluate=lambda b: evaluate_labeled(b, bundle))


def _single(group, gens, in_labels, annots):
    return label_word(group, BordismWord((tuple(gens),)), in_labels, (tuple(annots),))


def tft_to_bundle(oracle: TftOracle, group: FiniteGroup = None) -> CrossedBundle:
    """Extract fusion, fission, transport and (co)units from an oracle."""
    G = oracle.group if group is None else group
    e = G.identity
    for g in G.elements():
        t = oracle.evaluate(_single(G, [Gen.ID], (g,), [e]))
        if not equal(t, Tensor.identity(oracle.dims[g], exact=t.exact, tol=t.tol)):
            raise ExtractionError(
                "identity-preservation fails: the plain cylinder on label %r "
                "is not the identity map" % G.labels[g])
    transport = {}
    for k in G.elements():
        for g in G.elements():
            transport[k, g] = oracle.evaluate(_single(G, [Gen.ID], (g,), [k]))
    fusion = {}
    fission = {}
    for g in G.elements():
        for h in G.elements():
            fusion[g, h] = oracle.evaluate(
                _single(G, [Gen.PANTS], (g, h), [None]))
            fission[g, h] = oracle.evaluate(
                _single(G, [Gen.COPANTS], (G.mul(g, h),), [(g, h)]))
    unit = oracle.evaluate(_single(G, [Gen.CAP], (), [None]))
    counit = oracle.evaluate(_single(G, [Gen.CUP], (e,), [None]))
    try:
        return CrossedBundle(group=G, dims=tuple(oracle.dims), fusion=fusion,
                             fission=fission, transport=transport,
                             unit=unit, counit=counit)
    except BundleError as exc:
        raise ExtractionError("oracle produced inconsistent shapes: %s" % exc) from exc


def roundtrip_check(bundle: CrossedBundle, test_words) -> ValidationReport:
    """Bundle -> evaluator -> bundle must be the identity, and the rebuilt
    evaluator must agree with the original on every test word."""
    report = ValidationReport()
    report.check("bundle-reconstruction")
    report.check("evaluator-agreement")
    oracle = TftOracle.from_bundle(bundle)
    rebuilt = tft_to_bundle(oracle)
    if rebuilt.dims != bundle.dims:
        report.fail("bundle-reconstruction", ("dims",))
    for key in bundle.fusion:
        if not equal(rebuilt.fusion[key], bundle.fusion[key]):
            report.fail("bundle-reconstruction", ("fusion",) + key)
    for key in bundle.fission:
        if not equal(rebuilt.fission[key], bundle.fission[key]):
            report.fail("bundle-reconstruction", ("fission",) + key)
    for key in bundle.transport:
        if not equal(rebuilt.transport[key], bundle.transport[key]):
            report.fail("bundle-reconstruction", ("transport",) + key)
    if not equal(rebuilt.unit, bundle.unit):
        report.fail("bundle-reconstruction", ("unit",))
    if not equal(rebuilt.counit, bundle.counit):
        report.fail("bundle-reconstruction", ("counit",))
    for i, b in enumerate(test_words):
        if not equal(evaluate_labeled(b, rebuilt), evaluate_labeled(b, bundle)):
            report.fail("evaluator-agreement", (i,))
    return report


# ---------------------------------------------------------------------------
# Frobenius actions, rotations, higher (co)associativity

def frobenius_action(bundle: CrossedBundle, g):
    """Module/comodule structure of the identity fiber on fiber g."""
    G = bundle.group
    e = G.identity
    act = bundle.fusion[e, g].array
    coact = bundle.fission[e, g].array
    mu_e = bundle.fusion[e, e].array
    nu_e = bundle.fission[e, e].array
    exact = bundle.exact
    report = ValidationReport()

    report.check("module")
    lhs = np.tensordot(mu_e, act, axes=([2], [0]))
    rhs = np.tensordot(act, act, axes=([2], [1]))   # (y, v, x, o)
    rhs = np.transpose(rhs, (2, 0, 1, 3))
    idx = _first_mismatch(lhs, rhs, exact)
    if idx is not None:
        report.fail("module", (g,) + idx)

    report.check("comodule")
    lhs = np.tensordot(coact, coact, axes=([2], [0]))  # (v, x, y, o)
    rhs = np.tensordot(coact, nu_e, axes=([1], [0]))   # (v, o, x, y)
    rhs = np.transpose(rhs, (0, 2, 3, 1))
    idx = _first_mismatch(lhs, rhs, exact)
    if idx is not None:
        report.fail("comodule", (g,) + idx)

    report.check("compatibility-square")
    lhs = np.tensordot(act, coact, axes=([2], [0]))    # (x, v, y, o)
    rhs = np.tensordot(coact, mu_e, axes=([1], [1]))   # (v, o, x, y)
    rhs = np.transpose(rhs, (2, 0, 3, 1))
    idx = _first_mismatch(lhs, rhs, exact)
    if idx is not None:
        report.fail("compatibility-square", (g,) + idx)

    return (Tensor(act, exact=exact), Tensor(coact, exact=exact), report)


def rotation_transport(w: LoopWord, j: int, bundle: CrossedBundle) -> Tensor:
    """Transport realizing rotation of the loop word by j positions."""
    n = len(w)
    if not 0 <= j <= n:
        raise ValueError("rotation offset %d out of range for length %d" % (j, n))
    G = bundle.group
    k = G.inverse(w.prefix_product(G, j))
    return bundle.transport[k, w.evaluate(G)]


def _binary_trees(lo, hi):
    """All binary trees over leaves lo..hi-1, as nested tuples."""
    if hi - lo == 1:
        return [lo]
    out = []
    for mid in range(lo + 1, hi):
        for left in _binary_trees(lo, mid):
            for right in _binary_trees(mid, hi):
                out.append((left, right))
    return out


def nfold_fission_check(bundle: CrossedBundle, gs) -> ValidationReport:
    """All bracketings of n-fold fusion and fission towers must agree."""
    gs = list(gs)
    n = len(gs)
    if n > 5:
        raise ValueError("towers are checked for n <= 5")
    G = bundle.group
    report = ValidationReport()
    report.check("higher-associativity")
    report.check("higher-coassociativity")
    if n < 2:
        return report

    def mu_tower(tree):
        """Tensor with legs [leaves..., out]; returns (tensor, product)."""
        if isinstance(tree, int):
            d = bundle.dims[gs[tree]]
            return Tensor.identity(d, exact=bundle.exact), gs[tree]
        tl, pl = mu_tower(tree[0])
        tr, pr = mu_tower(tree[1])
        mu = bundle.fusion[pl, pr]
        t = tensordot(tl, mu, [tl.rank - 1], [0])        # [leavesL, b, c]
        t = tensordot(t, tr, [tl.rank - 1], [tr.rank - 1])
        # legs now [leavesL, c, leavesR]; move c to the end
        r = t.rank
        nl = tl.rank - 1
        perm = list(range(nl)) + list(range(nl + 1, r)) + [nl]
        return Tensor(np.transpose(t.array, perm), exact=t.exact), G.mul(pl, pr)

    def nu_tower(tree):
        """Tensor with legs [in, leaves...]; returns (tensor, product)."""
        if isinstance(tree, int):
            d = bundle.dims[gs[tree]]
            return Tensor.identity(d, exact=bundle.exact), gs[tree]
        tl, pl = nu_tower(tree[0])
        tr, pr = nu_tower(tree[1])
        nu = bundle.fission[pl, pr]
        t = tensordot(nu, tl, [1], [0])                  # [in, right_in, leavesL]
        t = tensordot(t, tr, [1], [0])                   # [in, leavesL, leavesR]
        return t, G.mul(pl, pr)

    trees = _binary_trees(0, n)
    ref_mu, _ = mu_tower(trees[0])
    ref_nu, _ = nu_tower(trees[0])
    for i, tree in enumerate(trees[1:], start=1):
        t, _ = mu_tower(tree)
        if not equal(t, ref_mu):
            report.fail("higher-associativity", (tuple(gs), 0, i))
        t, _ = nu_tower(tree)
        if not equal(t, ref_nu):
            report.fail("higher-coassociativity", (tuple(gs), 0, i))
    return report


# ---------------------------------------------------------------------------
# closed surfaces

def closed_surface_word(group: FiniteGroup, genus: int, handles=()) -> LabeledBordism:
    """Closed genus-g surface with handle labels (a_i, b_i).

    Requires the product of commutators [a_i, b_i] to be the identity.
    """
    e = group.identity
    handles = [tuple(h) for h in handles]
    if len(handles) != genus:
        raise LabelError("genus %d needs %d handle label pairs" % (genus, genus))
    total = group.product([group.commutator(a, b) for a, b in handles])
    if total != e:
        raise LabelError("commutator product is not the identity")
    if genus == 0:
        return label_word(group, BordismWord(((Gen.CAP,), (Gen.CUP,))), ())

    layers = [(Gen.CAP,)]
    annots = [(None,)]
    commutators = [group.commutator(a, b) for a, b in handles]
    # split off circles c_1 .. c_{g-1}; the last circle carries c_g
    for i in range(genus - 1):
        width = i + 1
        rest = group.product(commutators[i + 1:])
        pads = [Gen.ID] * i
        layers.append(tuple(pads + [Gen.COPANTS]))
        annots.append(tuple([e] * i + [(commutators[i], rest)]))
        # keep the split-off circle at position i, continue on the last one
        # reorder so finished circles stay left: copants output is (c_i, rest)
    # now boundary is (c_1, ..., c_{g-1}, c_g); cap each with a handle gadget
    for i in reversed(range(genus)):
        a, b = handles[i]
        aba = group.conj(a, b)
        bi = group.inverse(b)
        pads = [Gen.ID] * i
        pad_ann = [e] * i
        layers.append(tuple(pads + [Gen.COPANTS]))
        annots.append(tuple(pad_ann + [(aba, bi)]))
        layers.append(tuple(pads + [Gen.ID, Gen.ID]))
        annots.append(tuple(pad_ann + [group.inverse(a), e]))
        layers.append(tuple(pads + [Gen.SWAP]))
        annots.append(tuple(pad_ann + [None]))
        layers.append(tuple(pads + [Gen.PANTS]))
        annots.append(tuple(pad_ann + [None]))
        layers.append(tuple(pads + [Gen.CUP]))
        annots.append(tuple(pad_ann + [None]))
    return label_word(group, BordismWord(tuple(layers)), (), tuple(annots))


# ---------------------------------------------------------------------------
# enumeration of small labeled words

def _enumerate_shapes(max_gens):
    all_gens = list(Gen)

    def layers_from(prev_out, budget):
        """All single layers with the given input arity and size <= budget."""
        out = []

        def build(layer, need):
            if need == 0 and layer:
                out.append(tuple(layer))
            if len(layer) >= budget:
                return
            for g in all_gens:
                a = ARITY[g][0]
                if a <= need:
                    build(layer + [g], need - a)

        build([], prev_out)
        return out

    results = []

    def extend(layers, used):
        if layers:
            results.append(BordismWord(tuple(layers)))
        if used >= max_gens:
            return
        prev_out = layer_arity(layers[-1])[1] if layers else None
        if layers:
            candidates = layers_from(prev_out, max_gens - used)
        else:
            candidates = []
            for size in range(1, max_gens + 1):
                for combo in itertools.product(Gen, repeat=size):
                    candidates.append(tuple(combo))
        for layer in candidates:
            if len(layer) + used > max_gens:
                continue
            extend(layers + [layer], used + len(layer))

    extend([], 0)
    # dedupe
    seen = set()
    uniq = []
    for w in results:
        if w.layers not in seen:
            seen.add(w.layers)
            uniq.append(w)
    return uniq


def enumerate_labeled_words(group: FiniteGroup, max_gens: int,
                            budget_per_shape: int = 50):
    """All (budgeted) consistent labelings of all words with <= max_gens
    generators; deterministic order."""
    e = group.identity
    out = []
    for shape in _enumerate_shapes(max_gens):
        n_in = shape.arity_in
        free_slots = []
        for layer in shape.layers:
            for g in layer:
                if g is Gen.ID:
                    free_slots.append("id")
                elif g is Gen.COPANTS:
                    free_slots.append("split")
        total = group.order ** (n_in + len(free_slots))
        step = max(1, -(-total // budget_per_shape))
        count = 0
        for combo in itertools.product(group.elements(),
                                       repeat=n_in + len(free_slots)):
            count += 1
            if (count - 1) % step:
                continue
            in_labels = combo[:n_in]
            frees = list(combo[n_in:])
            annots = []
            try:
                cur = list(in_labels)
                for layer in shape.layers:
                    row = []
                    qi = 0
                    for g in layer:
                        ins = cur[qi:qi + ARITY[g][0]]
                        qi += ARITY[g][0]
                        if g is Gen.ID:
                            row.append(frees.pop(0))
                        elif g is Gen.COPANTS:
                            first = frees.pop(0)
                            row.append((first, group.mul(group.inverse(first),
                                                         ins[0])))
                        else:
                            row.append(None)
                    annots.append(tuple(row))
                    cur = _propagate(group, layer, annots[-1], cur)
                out.append(label_word(group, shape, in_labels, tuple(annots)))
            except LabelError:
                continue
    return out


def _propagate(group, layer, annots, cur):
    e = group.identity
    nxt = []
    qi = 0
    for g, ann in zip(layer, annots):
        ins = cur[qi:qi + ARITY[g][0]]
        qi += ARITY[g][0]
        if g is Gen.ID:
            nxt.append(group.conj(ann, ins[0]))
        elif g is Gen.SWAP:
            nxt.extend([ins[1], ins[0]])
        elif g is Gen.CAP:
            nxt.append(e)
        elif g is Gen.CUP:
            if ins[0] != e:
                raise LabelError("cup on non-identity label")
        elif g is Gen.PANTS:
            nxt.append(group.mul(ins[0], ins[1]))
        elif g is Gen.COPANTS:
            nxt.extend([ann[0], ann[1]])
    return nxt


# ---------------------------------------------------------------------------
# bundle file format

def parse_bundle(text: str, group: FiniteGroup, exact=True) -> CrossedBundle:
    """Parse the bundle block format against a known group."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    dims = {}
    fusion_raw, fission_raw, transport_raw = {}, {}, {}
    unit = counit = None
    for ln in lines:
        if ln.startswith("bundle over"):
            continue
        if ln.startswith("fiber "):
            toks = ln.split()
            if len(toks) != 4 or toks[2] != "dim":
                raise BundleError("bad fiber line %r" % ln)
            dims[group.index(toks[1])] = int(toks[3])
            continue
        head, _, body = ln.partition(":")
        toks = head.split()
        vals = [parse_scalar(t, exact) for t in body.split()]
        if toks[0] == "fusion" and len(toks) == 3:
            fusion_raw[group.index(toks[1]), group.index(toks[2])] = vals
        elif toks[0] == "fission" and len(toks) == 3:
            fission_raw[group.index(toks[1]), group.index(toks[2])] = vals
        elif toks[0] == "transport" and len(toks) == 3:
            transport_raw[group.index(toks[1]), group.index(toks[2])] = vals
        elif toks[0] == "unit" and len(toks) == 1:
            unit = vals
        elif toks[0] == "counit" and len(toks) == 1:
            counit = vals
        else:
            raise BundleError("unexpected line %r" % ln)
    if len(dims) != group.order:
        raise BundleError("need a fiber line for every group element")
    if unit is None or counit is None:
        raise BundleError("unit and counit blocks are required")
    e = group.identity
    dims_t = tuple(dims[g] for g in group.elements())

    def block(raw, key, shape, default_zero):
        if key in raw:
            vals = raw[key]
            if len(vals) != int(np.prod(shape)):
                raise BundleError("block %s has %d entries, want %d"
                                  % (key, len(vals), int(np.prod(shape))))
            return Tensor(np.array(vals, dtype=object).reshape(shape), exact=exact)
        if not default_zero:
            raise BundleError("missing required block %s" % (key,))
        zero = Fraction(0) if exact else complex(0)
        return Tensor(np.full(shape, zero, dtype=object), exact=exact)

    fusion, fission, transport = {}, {}, {}
    for g in group.elements():
        for h in group.elements():
            gh = group.mul(g, h)
            fusion[g, h] = block(fusion_raw, (g, h),
                                 (dims[g], dims[h], dims[gh]), True)
            fission[g, h] = block(fission_raw, (g, h),
                                  (dims[gh], dims[g], dims[h]), True)
    for k in group.elements():
        for g in group.elements():
            transport[k, g] = block(transport_raw, (k, g),
                                    (dims[g], dims[group.conj(k, g)]), False)
    return CrossedBundle(group=group, dims=dims_t, fusion=fusion, fission=fission,
                         transport=transport,
                         unit=Tensor(np.array(unit, dtype=object), exact=exact),
                         counit=Tensor(np.array(counit, dtype=object), exact=exact))


def format_bundle(bundle: CrossedBundle, group_filename: str) -> str:
    G = bundle.group
    lines = ["bundle over %s" % group_filename]
    for g in G.elements():
        lines.append("fiber %s dim %d" % (G.labels[g], bundle.dims[g]))

    def emit(tag, key_pair, tensor):
        vals = " ".join(format_scalar(x) for x in tensor.array.reshape(-1))
        lines.append("%s %s %s : %s" % (tag, G.labels[key_pair[0]],
                                        G.labels[key_pair[1]], vals))

    for key, t in sorted(bundle.fusion.items()):
        if any(x != 0 for x in t.array.reshape(-1)):
            emit("fusion", key, t)
    for key, t in sorted(bundle.fission.items()):
        if any(x != 0 for x in t.array.reshape(-1)):
            emit("fission", key, t)
    for key, t in sorted(bundle.transport.items()):
        emit("transport", key, t)
    lines.append("unit : " + " ".join(format_scalar(x) for x in bundle.unit.array))
    lines.append("counit : " + " ".join(format_scalar(x) for x in bundle.counit.array))
    return "\n".join(lines) + "\n"


def load_bundle(path: str, exact=True):
    """Load a bundle file; the header references the group file by path."""
    import os
    from .groups import parse_group
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    group = None
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln.startswith("bundle over"):
            gpath = ln[len("bundle over"):].strip()
            if not os.path.isabs(gpath):
                gpath = os.path.join(os.path.dirname(os.path.abspath(path)), gpath)
            with open(gpath, "r", encoding="utf-8") as gh:
                group = parse_group(gh.read())
            break
    if group is None:
        raise BundleError("bundle file must start with 'bundle over <groupfile>'")
    return parse_bundle(text, group, exact=exact)
