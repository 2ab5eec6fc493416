import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqds.poly import Poly, multi_binom, multi_factorial, multi_indices


def small_polys(dim=2, deg=3):
    coeff = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)
    expo = st.tuples(*([st.integers(0, deg)] * dim))
    return st.dictionaries(expo, coeff, max_size=5).map(lambda t: Poly(dim, t))


def test_zero_and_const():
    assert Poly.zero(3).is_zero()
    assert Poly.const(2, 0.0).is_zero()
    p = Poly.const(2, 2.5)
    assert p.eval([7.0, -1.0]) == 2.5


def test_mul_matches_eval():
    rng = np.random.default_rng(0)
    a = Poly(2, {(1, 0): 2.0, (0, 2): -1.0 + 1j})
    b = Poly(2, {(1, 1): 3.0, (0, 0): 0.5})
    z = rng.normal(size=2)
    assert a.mul(b).eval(z) == pytest.approx(a.eval(z) * b.eval(z))


def test_diff_monomial():
    p = Poly(2, {(2, 1): 1.0})          # x^2 p
    assert p.diff(0).terms == {(1, 1): 2.0}
    assert p.diff(1).terms == {(2, 0): 1.0}
    assert p.diff(0).diff(0).diff(0).is_zero()


def test_affine_sub_rotation():
    # x^2 + p^2 is invariant under rotations
    p = Poly(2, {(2, 0): 1.0, (0, 2): 1.0})
    th = 0.37
    M = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    q = p.affine_sub(M)
    assert (q - p).max_abs_coeff() < 1e-14


def test_affine_sub_shift():
    p = Poly(1, {(2,): 1.0})
    q = p.affine_sub(np.eye(1), np.array([1.0]))   # (z+1)^2
    assert q.terms == {(0,): 1.0, (1,): 2.0, (2,): 1.0}


def test_embed():
    p = Poly(1, {(2,): 3.0})
    q = p.embed(3, [1])
    assert q.terms == {(0, 2, 0): 3.0}


def test_canonical_order_graded_lex():
    p = Poly(2, {(0, 2): 1.0, (1, 0): 1.0, (0, 0): 1.0, (2, 0): 1.0})
    keys = [e for e, _ in p.canonical_items()]
    assert keys == [(0, 0), (1, 0), (0, 2), (2, 0)]


def test_multi_indices_count():
    # number of 2-variable multi-indices with |a| <= 3 is C(5,2) = 10
    assert len(list(multi_indices(2, 3))) == 10
    assert multi_factorial((3, 2)) == 12
    assert multi_binom((3, 2), (1, 2)) == 3
    assert multi_binom((1, 0), (2, 0)) == 0


@settings(max_examples=60, deadline=None)
@given(small_polys(), small_polys())
def test_addition_commutes(a, b):
    assert ((a + b) - (b + a)).max_abs_coeff() == 0


@settings(max_examples=60, deadline=None)
@given(small_polys(), small_polys())
def test_product_rule(a, b):
    lhs = a.mul(b).diff(0)
    rhs = a.diff(0).mul(b) + a.mul(b.diff(0))
    scale = max(a.max_abs_coeff() * b.max_abs_coeff(), 1.0)
    assert (lhs - rhs).max_abs_coeff() <= 1e-12 * scale
