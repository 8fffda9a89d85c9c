from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from dimerlab.exactmath import (
    DSeries,
    PPolynomial,
    collect_d_coefficient,
    poly_add,
    poly_eval,
    rat_add,
    rat_from_json,
    rat_to_json,
)
from dimerlab.expansions import A_ROWS

fractions = st.fractions(max_denominator=10_000)
polys = st.dictionaries(st.integers(0, 8), fractions, max_size=6).map(PPolynomial)


def test_rat_add():
    assert rat_add(F(1, 8), F(1, 48)) == F(7, 48)
    assert rat_add(F(1, 128), F(-5, 1536)) == F(7, 1536)
    assert rat_add(F(3, 7), 0) == F(3, 7)


def test_rational_json_roundtrip():
    x = F(-757, 344064)
    assert rat_to_json(x) == {"num": "-757", "den": "344064"}
    assert rat_from_json(rat_to_json(x)) == x


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_normalization_idempotent(n, d):
    x = F(n, d)
    y = F(x.numerator, x.denominator)
    assert y == x and (y.numerator, y.denominator) == (x.numerator, x.denominator)
    assert x.denominator > 0


def test_poly_add():
    a = PPolynomial({2: F(1, 8)})
    assert poly_add(a, PPolynomial({3: F(1, 48)})).coeffs == {2: F(1, 8), 3: F(1, 48)}
    assert poly_add(a, -a) == PPolynomial()
    assert not poly_add(a, -a).coeffs
    assert poly_add(PPolynomial({4: F(1, 32)}), PPolynomial({4: F(-5, 192)})).coeffs == {4: F(1, 192)}


def test_zero_coefficients_pruned():
    assert PPolynomial({0: 0, 3: F(0, 5), 2: 1}).coeffs == {2: 1}


def test_poly_eval():
    assert poly_eval(PPolynomial({2: F(1, 8)}), 1) == F(1, 8)
    assert poly_eval(PPolynomial({2: F(1, 8), 3: F(1, 48)}), F(1, 2)) == F(13, 384)
    assert poly_eval(PPolynomial({0: F(5, 3), 4: 7}), 0) == F(5, 3)
    assert poly_eval(PPolynomial(), F(2, 3)) == 0


@given(polys, polys, fractions)
def test_eval_is_ring_homomorphism(a, b, p):
    assert poly_eval(a + b, p) == poly_eval(a, p) + poly_eval(b, p)
    assert poly_eval(a * b, p) == poly_eval(a, p) * poly_eval(b, p)


@given(polys, fractions)
def test_horner_matches_naive_sum(a, p):
    assert poly_eval(a, p) == sum((c * p**k for k, c in a.coeffs.items()), F(0))


def test_collect_d_coefficient():
    series = DSeries.from_rows(A_ROWS)
    assert collect_d_coefficient(series, 1) == PPolynomial({2: F(1, 8)})
    assert collect_d_coefficient(series, 2) == PPolynomial({3: F(2, 96), 4: F(3, 96)})
    assert collect_d_coefficient(series, 3) == PPolynomial(
        {4: F(-5, 192), 5: F(12, 192), 6: F(8, 192)}
    )
    assert collect_d_coefficient(series, 9) == PPolynomial()


def test_dseries_evaluate_agrees_with_rows():
    series = DSeries.from_rows(A_ROWS)
    d, p = 3, F(2, 5)
    direct = sum((c / F(d) ** j * p**k for k, row in A_ROWS.items() for j, c in row.items()), F(0))
    assert series.evaluate(d, p) == direct


def test_negative_powers_rejected():
    with pytest.raises(ValueError):
        PPolynomial({-1: 1})
