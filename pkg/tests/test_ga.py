import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ga3ph.errors import ZeroDivisor
from ga3ph.ga import (
    E0,
    E1,
    E2,
    E12,
    MV4,
    GaTf,
    cnorm,
    conj,
    dual,
    gp,
    mat2_to_mv,
    mv_inverse,
    mv_to_mat2,
)
from ga3ph.polyrat import Poly, RatFun

from helpers import random_gatf, random_real_mv, ratfun_value_close

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
mvs = st.builds(MV4, finite, finite, finite, finite)


def mv_close(a, b, tol=1e-12):
    scale = max(1.0, *(abs(c) for c in b.coeffs))
    return all(abs(x - y) <= tol * scale for x, y in zip(a.coeffs, b.coeffs))


# -- Cayley table -------------------------------------------------------------
@pytest.mark.parametrize(
    "a,b,expected",
    [
        (E1, E1, E0),
        (E2, E2, E0),
        (E12, E12, -E0),
        (E1, E2, E12),
        (E2, E1, -E12),
        (E1, E12, E2),
        (E12, E1, -E2),
        (E2, E12, -E1),
        (E12, E2, E1),
    ],
)
def test_cayley_table(a, b, expected):
    assert mv_close(gp(a, b), expected)


def test_noncommutative_example():
    a, b = MV4(0, 1, 0, 0), MV4(0, 0, 1, 0)
    assert not mv_close(gp(a, b), gp(b, a))


def test_conj_and_cnorm_example():
    x = MV4(1.0, 2.0, 3.0, 4.0)
    assert conj(x).coeffs == (1.0, -2.0, -3.0, -4.0)
    assert cnorm(x) == 1 - 4 - 9 + 16
    assert mv_close(gp(conj(x), x), MV4(4.0, 0, 0, 0))


def test_inverse_examples():
    assert mv_close(mv_inverse(E12), -E12)
    with pytest.raises(ZeroDivisor):
        mv_inverse(E0 + E1)  # (1 + e1)(1 - e1) = 0


def test_dual():
    assert mv_close(dual(E1), E2)
    assert mv_close(dual(E0), E12)


# -- property tests -------------------------------------------------------
@given(mvs, mvs, mvs)
def test_associative(a, b, c):
    assert mv_close(gp(gp(a, b), c), gp(a, gp(b, c)), 1e-9)


@given(mvs, mvs)
def test_matrix_isomorphism(a, b):
    lhs = mv_to_mat2(gp(a, b))
    rhs = mv_to_mat2(a) @ mv_to_mat2(b)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)
    assert mv_close(mat2_to_mv(mv_to_mat2(a)), a)


@given(mvs)
def test_conj_is_adjugate_and_cnorm_is_det(a):
    m = mv_to_mat2(a)
    adj = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    assert np.allclose(mv_to_mat2(conj(a)), adj)
    assert cnorm(a) == pytest.approx(np.linalg.det(m), abs=1e-9 * max(1.0, np.abs(m).max() ** 2))
    s = gp(conj(a), a)
    assert abs(s.c1) + abs(s.c2) + abs(s.c12) <= 1e-9 * max(1.0, np.abs(m).max() ** 2)


@given(mvs, mvs)
def test_conj_antihomomorphism(a, b):
    assert mv_close(conj(gp(a, b)), gp(conj(b), conj(a)), 1e-9)


@given(mvs)
def test_inverse_both_sides(a):
    if abs(cnorm(a)) < 1e-3:
        return
    inv = mv_inverse(a)
    assert mv_close(gp(a, inv), E0, 1e-9)
    assert mv_close(gp(inv, a), E0, 1e-9)


def test_ratfun_coefficients_work_in_the_product():
    f = RatFun([1.0], [1.0, 1.0])
    x = MV4(f, f, RatFun(), RatFun())
    y = gp(x, x)
    assert ratfun_value_close(y.c0, f * f * 2.0)


# -- GaTf -----------------------------------------------------------------
def test_gatf_pointwise_product_matches_mv_product(rng):
    for _ in range(30):
        a, b = random_gatf(rng), random_gatf(rng)
        s = complex(rng.uniform(-3, 3), rng.uniform(0.5, 20))
        lhs = (a * b)(s)
        rhs = gp(a(s), b(s))
        assert all(abs(x - y) <= 1e-8 * max(1.0, abs(y)) for x, y in zip(lhs.coeffs, rhs.coeffs))


def test_gatf_sum_and_difference(rng):
    for _ in range(30):
        a, b = random_gatf(rng), random_gatf(rng, den_deg=1)
        s = complex(0.3, 7.0)
        for got, want in (((a + b)(s), a(s) + b(s)), ((a - b)(s), a(s) - b(s))):
            assert all(abs(x - y) <= 1e-8 * max(1.0, abs(y)) for x, y in zip(got.coeffs, want.coeffs))


def test_gatf_inverse_is_two_sided(rng):
    for _ in range(20):
        a = random_gatf(rng, den_deg=1)
        inv = a.inverse()
        for prod in (a * inv, inv * a):
            for s in (1j, 3.0 + 5j, 40j):
                v = prod(s)
                assert abs(v.c0 - 1) < 1e-7 and abs(v.c1) + abs(v.c2) + abs(v.c12) < 1e-7


def test_gatf_scalar_inverse():
    g = GaTf.scalar(RatFun([2.0], [1.0, 1.0]))
    inv = g.inverse()
    assert inv.n.c1.is_zero()
    assert ratfun_value_close(inv.coeff(0), RatFun([0.5, 0.5], [1.0]))


def test_gatf_zero_divisor():
    with pytest.raises(ZeroDivisor):
        GaTf.const(E0 + E1).inverse()
    with pytest.raises(ZeroDivisor):
        GaTf.zero().inverse()
    with pytest.raises(ZeroDivisor):
        GaTf(MV4(Poly([1.0])), Poly())


def test_gatf_from_ratfuns_uses_common_denominator():
    f = RatFun([1.0], [1.0, 1.0])
    g = RatFun([2.0], Poly.from_roots([-1.0, -2.0]))
    t = GaTf.from_ratfuns(f, g, 0.0, 0.0)
    assert t.d.degree == 2
    assert ratfun_value_close(t.coeff(0), f) and ratfun_value_close(t.coeff(1), g)


def test_gatf_reduce_cancels_common_factor():
    d = Poly.from_roots([-1.0, -5.0])
    t = GaTf(MV4(Poly([1.0, 1.0]), Poly([2.0, 2.0]), Poly(), Poly()), d).reduce()
    assert t.d.degree == 1
    assert abs(t.d(-5.0)) < 1e-12


def test_gatf_mat2_is_the_matrix_image(rng):
    a = random_gatf(rng)
    m = a.to_mat2()
    s = 2.0 + 3j
    num = np.array([[m[i][j](s) for j in range(2)] for i in range(2)])
    assert np.allclose(num, a.mat2_at(s), rtol=1e-9)


def test_gatf_noncommutative_transfer_functions(plant):
    c = GaTf.const(E0 + E2)
    s = 100j
    assert not np.allclose(mv_to_mat2((plant * c)(s)), mv_to_mat2((c * plant)(s)))


def test_gatf_real_scaling_and_conj(rng):
    a = random_gatf(rng)
    s = 1.0 + 1j
    assert (a * 2.5)(s).c2 == pytest.approx(2.5 * a(s).c2)
    assert a.conj()(s).c1 == pytest.approx(-a(s).c1)
    assert a.cnorm()(s) == pytest.approx(cnorm(a(s)), rel=1e-9)


@given(st.integers(0, 10_000))
def test_random_real_mv_roundtrip_through_matrix(seed):
    x = random_real_mv(np.random.default_rng(seed))
    assert mv_close(mat2_to_mv(mv_to_mat2(x)), x)
