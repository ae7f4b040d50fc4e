import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import three_point_h, make_rng
from polyexp.algebra import (
    GRLEX,
    MomentSequence,
    MonomialOrder,
    Poly,
    border,
    divides,
    divisor_closure,
    falling_ratio,
    index_factorial,
    inner_product,
    is_connected_to_one,
    is_downward_closed,
    monomials_of_degree,
    monomials_up_to,
    pairing,
    star_shift,
)
from polyexp.errors import EmptyResult, OutOfSupport, ParseError, PreconditionViolation


# ---------------------------------------------------------------------------
# multi-indices and orders
# ---------------------------------------------------------------------------

def test_divisibility_and_factorials():
    assert divides((1, 0), (2, 3))
    assert not divides((0, 4), (2, 3))
    assert index_factorial((3, 2)) == 12
    # alpha! / (alpha - beta)!
    assert falling_ratio((4, 2), (2, 1)) == 12 * 2


def test_monomial_counts():
    for n in range(1, 4):
        for d in range(5):
            assert len(monomials_up_to(n, d)) == math.comb(n + d, n)
            assert len(monomials_of_degree(n, d)) == math.comb(n + d - 1, d)


def test_graded_orders():
    mons = monomials_up_to(2, 2)
    assert GRLEX.sort(mons) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    grevlex = MonomialOrder("grevlex").sort(monomials_of_degree(3, 2))
    # ties are broken on the reversed exponent tuple
    assert grevlex == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    lex = MonomialOrder("lex")
    assert lex.less((5, 0), (0, 1)) and not lex.less((0, 5), (1, 0))
    assert MonomialOrder("grlex", perm=(1, 0)).sort([(1, 0), (0, 1)]) == [(0, 1), (1, 0)]


def test_order_is_compatible_with_multiplication():
    rng = make_rng("order")
    for kind in ("grlex", "grevlex"):
        order = MonomialOrder(kind)
        for _ in range(200):
            a, b, c = (tuple(int(v) for v in rng.integers(0, 4, 3)) for _ in range(3))
            if order.less(a, b):
                ac = tuple(x + y for x, y in zip(a, c))
                bc = tuple(x + y for x, y in zip(b, c))
                assert order.less(ac, bc)


def test_border_and_closure():
    b = [(0, 0), (1, 0), (0, 1)]
    assert border(b, 2) == {(2, 0), (1, 1), (0, 2)}
    assert is_connected_to_one(b, 2)
    assert not is_connected_to_one([(0, 0), (2, 0)], 2)
    assert divisor_closure([(1, 1)]) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert is_downward_closed(b)
    assert not is_downward_closed([(0, 0), (1, 1)])


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def test_poly_arithmetic_and_drop_tolerance():
    x1, x2 = Poly.variables(2)
    p = (x1 + 1) * (x2 - 2)
    assert p.coeff((1, 1)) == 1 and p.coeff((0, 0)) == -2
    assert (p - p).is_zero()
    tiny = x1 + 1e-14
    assert tiny.support() == [(1, 0)]
    assert Poly(1, {(0,): 1e-14}, drop_tol=0.0).support() == [(0,)]
    assert ((x1 + x2) ** 2).coeff((1, 1)) == 2


def test_poly_rejects_bad_indices():
    with pytest.raises(PreconditionViolation):
        Poly(2, {(1,): 1.0})
    with pytest.raises(PreconditionViolation):
        Poly(1, {(-1,): 1.0})


def test_poly_evaluation_derivative_shift():
    x1, x2 = Poly.variables(2)
    p = x1 ** 2 * x2 + 3 * x2
    assert p((2, 5)) == pytest.approx(35)
    assert p.derivative((1, 0)).allclose(2 * x1 * x2)
    assert p.derivative((2, 1)).allclose(Poly.constant(2, 2.0))
    t = (0.5, -1.0)
    q = p.shift(t)
    rng = make_rng("shift")
    for _ in range(5):
        z = rng.standard_normal(2)
        assert q(z) == pytest.approx(p(z + np.array(t)))


def test_poly_json_round_trip():
    x1, x2 = Poly.variables(2)
    p = (1 + 2j) * x1 * x2 - 0.5 * x2 ** 3
    items = json.loads(json.dumps(p.to_list()))
    assert Poly.from_list(2, items) == p
    with pytest.raises(ParseError):
        Poly.from_list(2, items + items[:1])


coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
exps2 = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys2 = st.dictionaries(exps2, coef, max_size=6).map(lambda d: Poly(2, d, drop_tol=0.0))


@settings(max_examples=50, deadline=None)
@given(polys2, polys2, polys2)
def test_poly_ring_axioms(p, q, r):
    assert ((p * q) * r).allclose(p * (q * r), 1e-8)
    assert (p * (q + r)).allclose(p * q + p * r, 1e-8)
    assert (p * q).allclose(q * p, 1e-9)


# ---------------------------------------------------------------------------
# moment sequences
# ---------------------------------------------------------------------------

def test_moment_sequence_validation():
    with pytest.raises(PreconditionViolation):
        MomentSequence(2, {(0, 0): 1, (1, 1): 2})
    s = MomentSequence(1, {(0,): 1, (1,): 2})
    with pytest.raises(OutOfSupport):
        s[(2,)]
    assert s.get((2,)) is None


def test_moment_json_round_trip(three_point_sigma):
    doc = json.loads(json.dumps(three_point_sigma.to_dict()))
    assert MomentSequence.from_dict(doc) == three_point_sigma
    doc["moments"].append(doc["moments"][0])
    with pytest.raises(ParseError):
        MomentSequence.from_dict(doc)
    with pytest.raises(ParseError):
        MomentSequence.from_dict({"nvars": 2, "moments": [{"alpha": [1, 0], "re": 1, "im": 0}]})
    with pytest.raises(ParseError):
        MomentSequence.from_dict({"nvars": 0, "moments": []})


def test_example_matrix_entries(three_point_sigma):
    assert three_point_sigma[(0, 0)] == 4
    assert three_point_sigma[(4, 0)] == -31
    assert three_point_sigma[(0, 4)] == 49


def test_pairing_examples(three_point_sigma):
    x1, x2 = Poly.variables(2)
    assert pairing(three_point_sigma, x1 * x2) == 11
    assert pairing(three_point_sigma, 2 + x1) == 13
    assert pairing(three_point_sigma, Poly.monomial((3, 1))) == three_point_sigma[(3, 1)]
    with pytest.raises(OutOfSupport):
        pairing(three_point_sigma, Poly.monomial((5, 0)))


def test_pairing_duality():
    # sigma_alpha = alpha! delta_{alpha, beta} pairs with x^beta to beta!
    beta = (2, 1)
    s = MomentSequence(2, {a: float(index_factorial(a)) * (a == beta) for a in monomials_up_to(2, 4)})
    assert pairing(s, Poly.monomial(beta)) == index_factorial(beta)


def test_star_shift_examples(three_point_sigma):
    x1, x2 = Poly.variables(2)
    assert star_shift(three_point_sigma, Poly.constant(2, 1.0)) == three_point_sigma
    shifted = star_shift(three_point_sigma, x1)
    assert shifted[(0, 0)] == 5
    assert shifted.max_degree == 3
    s11 = star_shift(three_point_sigma, x1 * x2)
    for a in s11.support:
        assert s11[a] == three_point_h((a[0] + 1, a[1] + 1))
    with pytest.raises(EmptyResult):
        star_shift(three_point_sigma, Poly.monomial((5, 0)))


def test_inner_product_examples(three_point_sigma):
    one = Poly.constant(2, 1.0)
    x1, x2 = Poly.variables(2)
    assert inner_product(three_point_sigma, one, one) == 4
    assert inner_product(three_point_sigma, one, x1 ** 2) == 5


def _random_sequence(rng, n, deg):
    return MomentSequence(n, {a: complex(*rng.standard_normal(2)) for a in monomials_up_to(n, deg)})


def test_star_is_an_action_and_pairing_is_bilinear():
    rng = make_rng("action")
    s = _random_sequence(rng, 2, 6)
    x1, x2 = Poly.variables(2)
    p = 1 + 2 * x1 - x2
    q = x1 * x2 + 0.5
    lhs = star_shift(s, p * q)
    rhs = star_shift(star_shift(s, q), p)
    common = lhs.support & rhs.support
    assert common
    assert all(abs(lhs[a] - rhs[a]) < 1e-12 for a in common)
    # <p * sigma | q> = <sigma | p q>
    assert pairing(star_shift(s, p), q) == pytest.approx(pairing(s, p * q))
    a, b = 2 - 1j, 0.5
    assert pairing(s, a * p + b * q) == pytest.approx(a * pairing(s, p) + b * pairing(s, q))


@settings(max_examples=40, deadline=None)
@given(polys2, polys2, st.integers(0, 2 ** 31))
def test_inner_product_symmetric(p, q, seed):
    s = _random_sequence(np.random.Generator(np.random.Philox(seed)), 2, 12)
    assert inner_product(s, p, q) == pytest.approx(inner_product(s, q, p), rel=1e-10, abs=1e-10)


def test_rescaled_sequence():
    s = MomentSequence(2, {a: three_point_h(a) for a in monomials_up_to(2, 3)})
    c = (2.0, 0.5)
    r = s.rescaled(c)
    for a in s.support:
        assert r[a] == pytest.approx(s[a] * c[0] ** -a[0] * c[1] ** -a[1])
