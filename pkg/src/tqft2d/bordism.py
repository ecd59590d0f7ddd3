"""The bordism word DSL: parsing, typing, classification and evaluation.

A word is a sequence of layers; a layer is a parallel row of generators.
Equivalence of words is decided by the complete diffeomorphism invariant of
compact oriented surfaces: genus plus boundary-circle positions, per
connected component.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import numpy as np

from .frobenius import FrobeniusAlgebra, comultiplication
from .tensor import Tensor, permute, tensordot


class WordSyntaxError(ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = "%s (at position %d)" % (message, position)
        super().__init__(message)
        self.position = position


class ArityError(ValueError):
    def __init__(self, message, layer=None):
        if layer is not None:
            message = "%s (between layers %d and %d)" % (message, layer, layer + 1)
        super().__init__(message)
        self.layer = layer


class Gen(enum.Enum):
    ID = "id"
    SWAP = "swap"
    CAP = "cap"
    CUP = "cup"
    PANTS = "pants"
    COPANTS = "copants"


ARITY = {
    Gen.ID: (1, 1),
    Gen.SWAP: (2, 2),
    Gen.CAP: (0, 1),
    Gen.CUP: (1, 0),
    Gen.PANTS: (2, 1),
    Gen.COPANTS: (1, 2),
}

EULER = {
    Gen.ID: 0,
    Gen.SWAP: 0,
    Gen.CAP: 1,
    Gen.CUP: 1,
    Gen.PANTS: -1,
    Gen.COPANTS: -1,
}


def layer_arity(layer):
    return (sum(ARITY[g][0] for g in layer), sum(ARITY[g][1] for g in layer))


@dataclass(frozen=True)
class BordismWord:
    layers: tuple  # tuple of tuples of Gen

    def __post_init__(self):
        if not self.layers:
            raise ArityError("a word needs at least one layer")
        for t in range(len(self.layers) - 1):
            out_a = layer_arity(self.layers[t])[1]
            in_b = layer_arity(self.layers[t + 1])[0]
            if out_a != in_b:
                raise ArityError(
                    "layer outputs %d circles but next layer expects %d"
                    % (out_a, in_b), layer=t)

    @property
    def arity_in(self):
        return layer_arity(self.layers[0])[0]

    @property
    def arity_out(self):
        return layer_arity(self.layers[-1])[1]

    @property
    def euler_characteristic(self):
        return sum(EULER[g] for layer in self.layers for g in layer)

    def pretty(self):
        return " ; ".join(" * ".join(g.value for g in layer) for layer in self.layers)

    def __str__(self):
        return self.pretty()


def word(*layer_specs) -> BordismWord:
    """Build a word from layers given as iterables of Gen."""
    return BordismWord(tuple(tuple(layer) for layer in layer_specs))


def identity_word(arity: int) -> BordismWord:
    return word([Gen.ID] * arity) if arity > 0 else word([])


def seq(a: BordismWord, b: BordismWord) -> BordismWord:
    if a.arity_out != b.arity_in:
        raise ArityError("cannot compose %d outputs with %d inputs"
                         % (a.arity_out, b.arity_in))
    return BordismWord(a.layers + b.layers)


def par(a: BordismWord, b: BordismWord) -> BordismWord:
    """Parallel composition; the shorter word is padded with identity layers."""
    la, lb = len(a.layers), len(b.layers)
    a_layers = list(a.layers) + [tuple([Gen.ID] * a.arity_out)] * (lb - la)
    b_layers = list(b.layers) + [tuple([Gen.ID] * b.arity_out)] * (la - lb)
    return BordismWord(tuple(tuple(x) + tuple(y) for x, y in zip(a_layers, b_layers)))


# ---------------------------------------------------------------------------
# parsing

_NAMES = {g.value: g for g in Gen}


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in ";*()":
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and text[j].isalpha():
                j += 1
            tokens.append((text[i:j], i))
            i = j
            continue
        raise WordSyntaxError("unexpected character %r" % ch, position=i)
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def word(self) -> BordismWord:
        w = self.layer()
        while self.peek() == ";":
            self.next()
            w = seq(w, self.layer())
        return w

    def layer(self) -> BordismWord:
        w = self.factor()
        while self.peek() == "*":
            self.next()
            w = par(w, self.factor())
        return w

    def factor(self) -> BordismWord:
        if self.peek() is None:
            raise WordSyntaxError("unexpected end of input",
                                  position=self.tokens[-1][1] if self.tokens else 0)
        tok, at = self.next()
        if tok == "(":
            w = self.word()
            if self.peek() != ")":
                raise WordSyntaxError("missing ')'", position=at)
            self.next()
            return w
        if tok in _NAMES:
            return word([_NAMES[tok]])
        raise WordSyntaxError("unknown generator %r" % tok, position=at)


def parse_word(text: str) -> BordismWord:
    tokens = _tokenize(text)
    if not tokens:
        raise WordSyntaxError("empty word", position=0)
    parser = _Parser(tokens)
    w = parser.word()
    if parser.peek() is not None:
        raise WordSyntaxError("trailing input %r" % parser.peek(),
                              position=parser.tokens[parser.pos][1])
    return w


# ---------------------------------------------------------------------------
# topological classification

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


def _generator_slots(layer):
    """Yield (gen, in_positions, out_positions) with layer-local offsets."""
    qi = qo = 0
    for g in layer:
        a, b = ARITY[g]
        yield g, list(range(qi, qi + a)), list(range(qo, qo + b))
        qi += a
        qo += b


@dataclass(frozen=True)
class TopologicalType:
    """Sorted tuple of (genus, in-positions, out-positions) per component."""

    components: tuple

    def __str__(self):
        parts = ["genus=%d in=%s out=%s" % (g, list(i), list(o))
                 for g, i, o in self.components]
        return "; ".join(parts) if parts else "empty"


def topological_type(w: BordismWord) -> TopologicalType:
    uf = _UnionFind()
    # nodes: (boundary index, circle position); boundary t sits above layer t
    chi = {}

    def add_chi(node, val):
        chi[node] = val

    gen_nodes = []
    for t, layer in enumerate(w.layers):
        for g, ins, outs in _generator_slots(layer):
            nodes_in = [(t, p) for p in ins]
            nodes_out = [(t + 1, p) for p in outs]
            if g is Gen.SWAP:
                uf.union(nodes_in[0], nodes_out[1])
                uf.union(nodes_in[1], nodes_out[0])
            else:
                touched = nodes_in + nodes_out
                for a, b in zip(touched, touched[1:]):
                    uf.union(a, b)
            gen_nodes.append((EULER[g], (nodes_in + nodes_out)[0]))
    n_layers = len(w.layers)
    comps = {}

    def comp(node):
        return uf.find(node)

    for contribution, node in gen_nodes:
        root = comp(node)
        comps.setdefault(root, {"chi": 0, "in": set(), "out": set()})
        comps[root]["chi"] += contribution
    for p in range(w.arity_in):
        root = comp((0, p))
        comps.setdefault(root, {"chi": 0, "in": set(), "out": set()})
        comps[root]["in"].add(p)
    for p in range(w.arity_out):
        root = comp((n_layers, p))
        comps.setdefault(root, {"chi": 0, "in": set(), "out": set()})
        comps[root]["out"].add(p)
    out = []
    for data in comps.values():
        b = len(data["in"]) + len(data["out"])
        genus2 = 2 - data["chi"] - b
        assert genus2 % 2 == 0 and genus2 >= 0, "bad component genus"
        out.append((genus2 // 2, tuple(sorted(data["in"])), tuple(sorted(data["out"]))))
    return TopologicalType(tuple(sorted(out)))


def equivalent(w1: BordismWord, w2: BordismWord) -> bool:
    if (w1.arity_in, w1.arity_out) != (w2.arity_in, w2.arity_out):
        raise ArityError("cannot compare words of different arities")
    return topological_type(w1) == topological_type(w2)


# ---------------------------------------------------------------------------
# evaluation against a Frobenius algebra

def _generator_tensors(algebra: FrobeniusAlgebra):
    n = algebra.dim
    ident = Tensor.identity(n, exact=algebra.exact, tol=algebra.tol)
    swap = Tensor.zeros((n, n, n, n), exact=algebra.exact, tol=algebra.tol)
    one = ident.array[0, 0]
    for i in range(n):
        for j in range(n):
            swap.array[i, j, j, i] = one
    delta = comultiplication(algebra)
    return {
        Gen.ID: ident,
        Gen.SWAP: swap,
        Gen.CAP: algebra.unit,
        Gen.CUP: algebra.counit,
        Gen.PANTS: algebra.mul,
        Gen.COPANTS: delta,
    }


def _layer_tensor(layer, gens):
    """Tensor of one layer with legs ordered [all inputs..., all outputs...]."""
    cur = None
    slots = []  # (n_in, n_out) per factor
    for g in layer:
        t = gens[g]
        cur = t if cur is None else tensordot(cur, t, [], [])
        slots.append(ARITY[g])
    if cur is None:
        return Tensor.scalar(1), 0, 0
    # legs currently grouped per factor: in0.. out0.. in1.. out1.. ; regroup
    perm_in, perm_out = [], []
    offset = 0
    for a, b in slots:
        perm_in.extend(range(offset, offset + a))
        perm_out.extend(range(offset + a, offset + a + b))
        offset += a + b
    cur = permute(cur, perm_in + perm_out)
    return cur, len(perm_in), len(perm_out)


def evaluate(w: BordismWord, algebra: FrobeniusAlgebra) -> Tensor:
    """Linear map A^(x)in -> A^(x)out; legs ordered [inputs..., outputs...]."""
    gens = _generator_tensors(algebra)
    cur = None
    cur_in = cur_bound = 0
    for layer in w.layers:
        lt, l_in, l_out = _layer_tensor(layer, gens)
        if cur is None:
            cur, cur_in, cur_bound = lt, l_in, l_out
        else:
            axes_cur = list(range(cur_in, cur_in + cur_bound))
            axes_l = list(range(l_in))
            cur = tensordot(cur, lt, axes_cur, axes_l)
            cur_bound = l_out
    return cur


def as_matrix(t: Tensor, arity_in: int, dim: int):
    """Reshape an evaluated map to (dim^out, dim^in), row-major bases."""
    arity_out = t.rank - arity_in
    rows = dim ** arity_out
    cols = dim ** arity_in
    flat = t.array.reshape(cols, rows)
    return np.transpose(flat)


# ---------------------------------------------------------------------------
# random equivalent pairs (fuzz driver for diffeomorphism invariance)

def _random_layer(rng, arity_in, widen_bias=0.0, max_width=4):
    # max_width keeps intermediate boundaries small; evaluation cost is
    # exponential in the widest layer
    layer = []
    remaining = arity_in
    outs = 0
    while remaining > 0:
        choices = [Gen.ID, Gen.PANTS, Gen.CUP]
        weights = [4, 2, 1]
        if outs + remaining < max_width:
            choices.append(Gen.COPANTS)
            weights.append(2)
        if remaining >= 2:
            choices.append(Gen.SWAP)
            weights.append(2)
        g = rng.choices(choices, weights=weights)[0]
        if ARITY[g][0] > remaining:
            g = Gen.ID
        layer.append(g)
        remaining -= ARITY[g][0]
        outs += ARITY[g][1]
    if (not layer or rng.random() < widen_bias) and outs < max_width:
        layer.insert(rng.randrange(len(layer) + 1), Gen.CAP)
    if not layer:
        layer = [Gen.CAP]
    return tuple(layer)


def _random_word(rng, arity, max_layers):
    a_in, a_out = arity
    d = abs(a_in - a_out)
    if d > max_layers:
        raise ValueError("arity change %d cannot fit in %d layers" % (d, max_layers))
    layers = []
    cur = a_in
    free = max_layers - d
    if free > 0:
        n_free = rng.randint(0 if d else 1, free)
        for _ in range(n_free):
            if len(layers) + abs(cur - a_out) >= max_layers:
                break
            layer = _random_layer(rng, cur, widen_bias=0.3 if cur < 4 else 0.0)
            new_cur = layer_arity(layer)[1]
            if len(layers) + 1 + abs(new_cur - a_out) > max_layers:
                continue
            layers.append(layer)
            cur = new_cur
    # steer to the requested output arity
    while cur > a_out:
        layers.append((Gen.PANTS,) + (Gen.ID,) * (cur - 2) if cur >= 2 else (Gen.CUP,))
        cur = layer_arity(layers[-1])[1]
    while cur < a_out:
        layers.append(((Gen.COPANTS,) + (Gen.ID,) * (cur - 1)) if cur >= 1 else (Gen.CAP,))
        cur = layer_arity(layers[-1])[1]
    if not layers:
        layers.append(tuple([Gen.ID] * a_in))
    return BordismWord(tuple(layers))


def _insert_layers(w, at, new_layers):
    return BordismWord(w.layers[:at] + tuple(new_layers) + w.layers[at:])


def _boundary_arity(w, at):
    if at == 0:
        return w.arity_in
    return layer_arity(w.layers[at - 1])[1]


def _rewrite_once(rng, w, max_layers):
    """Apply one equivalence-preserving local rewrite, if room permits."""
    candidates = []
    n_layers = len(w.layers)
    for at in range(n_layers + 1):
        a = _boundary_arity(w, at)
        if n_layers + 1 <= max_layers and a > 0:
            candidates.append(("id", at, None))
        if n_layers + 2 <= max_layers and a >= 2:
            for p in range(a - 1):
                candidates.append(("swap2", at, p))
        if n_layers + 2 <= max_layers and a >= 1:
            for p in range(a):
                candidates.append(("unit", at, p))
                candidates.append(("counit", at, p))
    if n_layers + 1 <= max_layers:
        for t, layer in enumerate(w.layers):
            for g, ins, _outs in _generator_slots(layer):
                if g is Gen.PANTS:
                    candidates.append(("comm", t, ins[0]))
    if not candidates:
        return w
    kind, at, p = rng.choice(candidates)
    if kind == "id":
        a = _boundary_arity(w, at)
        return _insert_layers(w, at, [tuple([Gen.ID] * a)])
    if kind == "swap2":
        a = _boundary_arity(w, at)
        layer = tuple([Gen.ID] * p + [Gen.SWAP] + [Gen.ID] * (a - p - 2))
        return _insert_layers(w, at, [layer, layer])
    if kind == "unit":
        a = _boundary_arity(w, at)
        grow = tuple([Gen.ID] * p + [Gen.CAP] + [Gen.ID] * (a - p))
        shrink = tuple([Gen.ID] * p + [Gen.PANTS] + [Gen.ID] * (a - p - 1))
        return _insert_layers(w, at, [grow, shrink])
    if kind == "counit":
        a = _boundary_arity(w, at)
        grow = tuple([Gen.ID] * p + [Gen.COPANTS] + [Gen.ID] * (a - p - 1))
        shrink = tuple([Gen.ID] * (p + 1) + [Gen.CUP] + [Gen.ID] * (a - p - 1))
        return _insert_layers(w, at, [grow, shrink])
    if kind == "comm":
        t, q = at, p
        a = _boundary_arity(w, t)
        layer = tuple([Gen.ID] * q + [Gen.SWAP] + [Gen.ID] * (a - q - 2))
        return _insert_layers(w, t, [layer])
    return w


def random_equivalent_pair(arity, max_layers, seed):
    """Two topologically equal words, deterministic in the seed."""
    if max_layers < 1:
        raise ValueError("max_layers must be >= 1")
    rng = random.Random(seed)
    w1 = _random_word(rng, arity, max_layers)
    w2 = w1
    for _ in range(rng.randint(1, 4)):
        w2 = _rewrite_once(rng, w2, max_layers)
    assert equivalent(w1, w2)
    return w1, w2
