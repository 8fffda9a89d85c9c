import math
from fractions import Fraction as F

import mpmath as mp
import pytest

from dimerlab import expansions as ex
from dimerlab.estimator import (
    EstimatePoint,
    FitError,
    compare_report,
    dimer_number,
    extrapolate_lambda,
    finite_lambda,
    fit_surface_model,
    log_count,
)
from dimerlab.lattice import LatticeSpec


@pytest.mark.parametrize("n", [1, 2, 3, 2**53 + 1, 3**500, 12988816, 10**300 + 7])
def test_log_count(n):
    assert log_count(n) == pytest.approx(float(mp.log(n)), rel=1e-13)


def test_log_count_rejects_zero():
    with pytest.raises(ValueError):
        log_count(0)


@pytest.mark.parametrize(
    "p, V, k",
    [(1, 64, 32), (0.5, 4, 1), (0.25, 196, 24), (0.25, 100, 12), (0.5, 9, 2), (0.75, 10, 4), (1, 27, 13), (0, 50, 0)],
)
def test_dimer_number_half_down(p, V, k):
    assert dimer_number(p, V) == k


def test_dimer_number_is_exact_on_binary_fractions():
    # p*V/2 = 24.5 exactly; ties resolve down regardless of float noise elsewhere.
    assert dimer_number(F(1, 4), 196) == 24
    # 0.1 as a binary double is slightly above 1/10; the decimal reading makes this a tie.
    assert dimer_number(0.1, 10) == 0


def test_finite_lambda_examples():
    assert finite_lambda(LatticeSpec((2, 2)), 1) == (2, pytest.approx(math.log(2) / 4))
    assert finite_lambda(LatticeSpec((2, 2)), 0.5) == (1, pytest.approx(math.log(4) / 4))
    k, v = finite_lambda(LatticeSpec((8, 8)), 1)
    assert k == 32
    assert v == pytest.approx(math.log(12988816) / 64, rel=1e-14)
    assert v == pytest.approx(0.2559312381, abs=1e-10)


def test_finite_lambda_domain():
    with pytest.raises(ex.DomainError):
        finite_lambda(LatticeSpec((2, 2)), 1.2)


def test_d1_paths_have_zero_raw_values():
    series = extrapolate_lambda(1, 1, [4, 6, 8])
    assert [pt.raw for pt in series.points] == [0.0, 0.0, 0.0]
    assert series.extrapolated == 0.0
    assert not series.surface_term


def test_p0_gives_zero():
    series = extrapolate_lambda(2, 0, [2, 3, 4])
    assert series.extrapolated == 0.0
    assert all(pt.k_used == 0 for pt in series.points)


def test_validation():
    with pytest.raises(ValueError, match="at least 3"):
        extrapolate_lambda(2, 1, [4, 6])
    with pytest.raises(ValueError, match="increasing"):
        extrapolate_lambda(2, 1, [4, 6, 6])
    with pytest.raises(ValueError):
        extrapolate_lambda(0, 1, [2, 4, 6])


def test_collinear_design_is_a_fit_error():
    pts = [EstimatePoint(LatticeSpec((n, n)), 0, 0.0) for n in (2, 2, 3)]
    with pytest.raises(FitError):
        fit_surface_model(pts)


def test_fit_recovers_planted_model():
    lam, beta, gamma = 0.3, -0.05, 0.2
    pts = []
    for n in (3, 5, 7, 9):
        spec = LatticeSpec((n, n))
        A = spec.volume - (n - 2) ** 2
        pts.append(EstimatePoint(spec, 0, lam * spec.volume + beta * A + gamma))
    got, residual, coef, surface = fit_surface_model(pts)
    assert surface
    assert got == pytest.approx(lam, abs=1e-12)
    assert coef["surface"] == pytest.approx(beta, abs=1e-12)
    assert residual < 1e-12


def test_workers_do_not_change_result():
    a = extrapolate_lambda(2, 0.5, [3, 4, 5, 6])
    b = extrapolate_lambda(2, 0.5, [3, 4, 5, 6], workers=2)
    assert a == b


def test_rows():
    series = extrapolate_lambda(1, 1, [4, 6, 8])
    assert series.rows()[0] == {"spec": "4", "k": 2, "raw": 0.0, "extrapolated": 0.0, "residual": 0.0}


def test_compare_report_shapes():
    c = compare_report(1, 1, [4, 6, 8])
    assert c.estimate == 0.0
    assert set(c.bounds) == {"eq4", "eq3"}
    assert c.bounds["eq4"].lower == pytest.approx(-0.153426, abs=1e-6)
    assert all(c.contained().values())
    assert set(c.references) == {"eq9"}
    c0 = compare_report(2, 0, [2, 3, 4])
    assert c0.estimate == 0 and all(c0.contained().values())
    assert c0.references == {"eq9": 0.0, "eq16": 0.0}
    assert c0.deltas() == {"eq9": 0.0, "eq16": 0.0}


def test_compare_report_d2_p1():
    c = compare_report(2, 1, [8, 10, 12, 14])
    assert c.contained() == {"eq4": True, "eq3": True}
    assert abs(c.estimate - ex.LAMBDA2_REFERENCE) < 3e-3


GRID = [
    (1, 0.25, [20, 40, 60, 80], [20, 40, 60, 100]),
    (1, 0.5, [20, 40, 60, 80], [20, 40, 60, 100]),
    (1, 1, [4, 6, 8, 10], [4, 6, 8, 12]),
    (2, 1, [8, 10, 12, 14], [8, 10, 12, 16]),
    pytest.param(2, 0.25, [8, 10, 12, 14], [8, 10, 12, 16], marks=pytest.mark.slow),
    pytest.param(2, 0.5, [8, 10, 12, 14], [8, 10, 12, 16], marks=pytest.mark.slow),
]


@pytest.mark.parametrize("d, p, sizes, larger", GRID)
def test_residual_regression_guard(d, p, sizes, larger, factor=2.0):
    before = extrapolate_lambda(d, p, sizes).fit_residual
    after = extrapolate_lambda(d, p, larger).fit_residual
    assert after <= factor * before or after < 1e-12
