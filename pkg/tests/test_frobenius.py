import random
from fractions import Fraction

import numpy as np
import pytest

from tqft2d.bordism import parse_word, evaluate
from tqft2d.frobenius import (FrobeniusAlgebra, DegeneratePairingError,
                              validate, pairing, comultiplication,
                              handle_operator, closed_invariant, ground_field,
                              dual_numbers, diagonal, group_center,
                              standard_algebra, change_of_basis,
                              rescale_counit, parse_algebra, format_algebra,
                              load_algebra)
from tqft2d.groups import cyclic_group, symmetric_group
from tqft2d.tensor import Tensor, equal, tensordot, invert_matrix

LIBRARY = [
    ground_field(),
    dual_numbers(),
    diagonal([Fraction(1), Fraction(1)]),
    diagonal([Fraction(2), Fraction(1, 3), Fraction(-1)]),
    group_center(cyclic_group(2)),
    group_center(symmetric_group(3)),
]


def _copy_with(algebra, **kw):
    fields = dict(dim=algebra.dim, basis=algebra.basis, mul=algebra.mul,
                  unit=algebra.unit, counit=algebra.counit)
    fields.update(kw)
    return FrobeniusAlgebra(**fields)


def test_library_validates():
    for a in LIBRARY:
        report = validate(a)
        assert report.passed, report.summary()
        assert set(report.checked) == {"associativity", "commutativity",
                                       "unit", "nondegeneracy"}


def test_dual_numbers_pairing():
    p = pairing(dual_numbers())
    assert [list(row) for row in p.array] == [[0, 1], [1, 0]]


def test_degenerate_counit_fails_nondegeneracy():
    bad = _copy_with(dual_numbers(),
                     counit=Tensor(np.array([Fraction(1), Fraction(0)],
                                            dtype=object)))
    report = validate(bad)
    assert report.failed_axioms() == ["nondegeneracy"]
    assert [list(row) for row in pairing(bad).array] == [[1, 0], [0, 0]]


def test_planted_associativity_failure():
    a = diagonal([Fraction(1)] * 3)
    mul = Tensor(a.mul.array.copy())
    # add a symmetric product e1*e2 = e0 so commutativity survives but
    # (e1 e1) e2 = e0 while e1 (e1 e2) = e1 e0 = 0
    mul.array[1, 2, 0] = Fraction(1)
    mul.array[2, 1, 0] = Fraction(1)
    bad = _copy_with(a, mul=mul)
    report = validate(bad)
    assert "associativity" in report.failed_axioms()
    assert "commutativity" not in report.failed_axioms()


def test_planted_commutativity_failure():
    a = diagonal([Fraction(1), Fraction(1)])
    mul = Tensor(a.mul.array.copy())
    mul.array[0, 1, 0] = Fraction(1)
    bad = _copy_with(a, mul=mul)
    assert "commutativity" in validate(bad).failed_axioms()


def test_planted_unit_failure():
    a = dual_numbers()
    bad = _copy_with(a, unit=Tensor(np.array([Fraction(2), Fraction(0)],
                                             dtype=object)))
    assert "unit" in validate(bad).failed_axioms()


def test_comultiplication_dual_numbers():
    d = comultiplication(dual_numbers())
    # delta(1) = 1 x x + x x 1, delta(x) = x x x
    assert d.array[0, 0, 1] == 1 and d.array[0, 1, 0] == 1
    assert d.array[0, 0, 0] == 0 and d.array[0, 1, 1] == 0
    assert d.array[1, 1, 1] == 1 and d.array[1, 0, 0] == 0


def test_comultiplication_diagonal():
    a = diagonal([Fraction(1), Fraction(1)])
    d = comultiplication(a)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert d.array[k, i, j] == (1 if i == j == k else 0)


def test_comultiplication_degenerate_raises():
    bad = _copy_with(dual_numbers(),
                     counit=Tensor(np.array([Fraction(1), Fraction(0)],
                                            dtype=object)))
    with pytest.raises(DegeneratePairingError):
        comultiplication(bad)


def test_handle_operator_values():
    h = handle_operator(dual_numbers())
    assert h.array[0, 1] == 2 and h.array[0, 0] == 0
    assert h.array[1, 0] == 0 and h.array[1, 1] == 0
    h = handle_operator(diagonal([Fraction(1), Fraction(1)]))
    assert equal(h, Tensor.identity(2))
    assert equal(handle_operator(ground_field()), Tensor.identity(1))


def test_closed_invariants_dual_numbers():
    a = dual_numbers()
    assert [closed_invariant(a, g) for g in range(4)] == [0, 2, 0, 0]


def test_torus_is_dimension():
    for a in LIBRARY:
        assert closed_invariant(a, 1) == a.dim


def test_counit_and_frobenius_relations():
    for a in LIBRARY:
        d = comultiplication(a)
        n = a.dim
        left = tensordot(d, a.counit, [1], [0])
        right = tensordot(d, a.counit, [2], [0])
        assert equal(left, Tensor.identity(n))
        assert equal(right, Tensor.identity(n))
        # delta . mu = (mu x id) . (id x delta)
        lhs = tensordot(a.mul, d, [2], [0])
        tmp = tensordot(d, a.mul, [1], [1])   # (j, out2, i, out1)
        rhs = Tensor(np.transpose(tmp.array, (2, 0, 3, 1)))
        assert equal(lhs, rhs)


def test_cocommutativity():
    for a in LIBRARY:
        d = comultiplication(a)
        assert equal(d, Tensor(np.transpose(d.array, (0, 2, 1))))


def test_rescaling_law():
    a = group_center(symmetric_group(3))
    lam = Fraction(3, 2)
    b = rescale_counit(a, lam)
    for g in range(4):
        assert closed_invariant(b, g) == lam ** (1 - g) * closed_invariant(a, g)


def test_s3_center_pairing_and_invariant():
    a = group_center(symmetric_group(3))
    p = pairing(a)
    diag = [p.array[i, i] for i in range(3)]
    assert diag == [Fraction(1, 6), Fraction(1, 2), Fraction(1, 3)]
    assert closed_invariant(a, 2) == 81


def _random_invertible(rng, n):
    while True:
        rows = [[Fraction(rng.randint(-3, 3)) for _ in range(n)]
                for _ in range(n)]
        m = Tensor(np.array(rows, dtype=object))
        if invert_matrix(m) is not None:
            return m


def test_random_basis_changes_stay_valid():
    rng = random.Random(7)
    for trial in range(20):
        n = rng.randint(1, 3)
        weights = [Fraction(rng.randint(1, 4)) for _ in range(n)]
        a = diagonal(weights)
        b = change_of_basis(a, _random_invertible(rng, n))
        report = validate(b)
        assert report.passed, report.summary()
        assert closed_invariant(b, 1) == n


def test_standard_algebra_dispatch():
    assert standard_algebra("ground_field").dim == 1
    assert standard_algebra("dual_numbers").dim == 2
    with pytest.raises(ValueError):
        standard_algebra("no_such_algebra")


def test_algebra_file_roundtrip():
    for a in LIBRARY:
        b = parse_algebra(format_algebra(a))
        assert b.dim == a.dim and b.basis == a.basis
        assert equal(b.mul, a.mul)
        assert equal(b.unit, a.unit) and equal(b.counit, a.counit)


def test_algebra_file_parsing_details():
    text = """\
# the algebra of dual numbers
dim 2
basis 1 x

unit 1 0
counit 0 2/2
mul 1 1 -> 1:1
mul 1 2 -> 2:1
mul 2 1 -> 2:3/3
"""
    a = parse_algebra(text)
    assert validate(a).passed
    assert a.counit.array[1] == 1


def test_load_algebra_builtin_names(tmp_path):
    assert load_algebra("dual_numbers").dim == 2
    p = tmp_path / "gf.fa"
    p.write_text(format_algebra(ground_field()))
    assert load_algebra(str(p)).dim == 1


def test_invariant_matches_word_evaluation():
    for a in LIBRARY:
        t = evaluate(parse_word("cap ; copants ; pants ; cup"), a)
        assert t.item() == closed_invariant(a, 1)
