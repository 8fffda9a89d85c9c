"""Bounds and asymptotic expansions for the dimer and monomer-dimer free energies.

Every published coefficient is an exact rational. Evaluation computes the
rational correction exactly and adds the logarithmic mean-field part in
double precision at the very end.

Conventions: ``mean_field(d, p) = (p ln 2d - p ln p - 2(1-p) ln(1-p) - p) / 2``
with ``0 ln 0 = 0``; ``d`` is the lattice dimension, ``p`` the fraction of
sites covered by dimers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import DSeries, PPolynomial, collect_d_coefficient, poly_eval, rat_to_json

F = Fraction


class DomainError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    """Requested truncation goes past the coefficients that are known."""


# 1/d expansion of the dimer free energy, terms c_1..c_3.
C_COEFFS: dict[int, Fraction] = {1: F(1, 8), 2: F(5, 96), 3: F(5, 64)}

# 1/d expansion of the monomer-dimer free energy: order j -> polynomial in p.
DP_CORRECTIONS: dict[int, PPolynomial] = {
    1: PPolynomial({2: F(1, 8)}),
    2: PPolynomial({3: F(2, 96), 4: F(3, 96)}),
    3: PPolynomial({4: F(-5, 192), 5: F(12, 192), 6: F(8, 192)}),
}

# p-power series: a_k(d) = sum_j A_ROWS[k][j] / d**j.
A_ROWS: dict[int, dict[int, Fraction]] = {
    2: {1: F(1, 8)},
    3: {2: F(1, 48)},
    4: {2: F(1, 32), 3: F(-5, 192)},
    5: {3: F(1, 16), 4: F(-39, 640)},
    6: {3: F(1, 24), 4: F(-1, 32), 5: F(-19, 1920)},
}

# Two-dimensional p-series: term k is 2 * n_k / (k (k-1)) * (p/4)**k.
# The numerator-7 term is typeset with exponent 3; it is taken as 4 here, the
# only reading consistent with a_4(2) (see d2_consistency_check).
EQ16_NUMERATORS: dict[int, int] = {2: 1, 3: 1, 4: 7, 5: 41, 6: 181, 7: 757}
EQ16_EXPONENT_NOTE = "numerator-7 term uses (p/4)^4, not the typeset (p/4)^3"

LAMBDA2_REFERENCE = 0.291560904


@dataclass(frozen=True)
class CoefficientTable:
    c: dict[int, Fraction]
    a: dict[int, dict[int, Fraction]]
    eq16_numerators: dict[int, int]

    def a_series(self) -> DSeries:
        return DSeries.from_rows(self.a)

    def to_json(self) -> dict:
        return {
            "c": {str(k): rat_to_json(v) for k, v in self.c.items()},
            "a": {
                str(k): {str(j): rat_to_json(v) for j, v in row.items()}
                for k, row in self.a.items()
            },
            "eq16_numerators": {str(k): n for k, n in self.eq16_numerators.items()},
            "eq16_note": EQ16_EXPONENT_NOTE,
        }


TABLE = CoefficientTable(C_COEFFS, A_ROWS, EQ16_NUMERATORS)


@dataclass(frozen=True)
class BoundsPair:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def _check_d(d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")


def _check_p(p) -> None:
    if not 0 <= p <= 1:
        raise DomainError(f"dimer density p must lie in [0, 1], got {p!r}")


def mean_field(d: int, p: float) -> float:
    _check_d(d)
    _check_p(p)
    p = float(p)
    p_log_p = p * math.log(p) if p > 0 else 0.0
    q_log_q = (1 - p) * math.log1p(-p) if p < 1 else 0.0
    return 0.5 * (p * math.log(2 * d) - p_log_p - 2 * q_log_q - p)


def minc_bounds(d: int) -> BoundsPair:
    _check_d(d)
    lower = 0.5 * math.log(2 * d) - 0.5
    upper = lower + math.log(4 * math.pi * d) / (4 * d) + 1 / (48 * d * d)
    return BoundsPair(lower, upper)


def fklm_bounds(d: int, p: float) -> BoundsPair:
    lower = mean_field(d, p)
    upper = lower + p * (math.log(4 * math.pi * d) / (4 * d) - 1 / (48 * d * d))
    return BoundsPair(lower, upper)


# ---------------------------------------------------------------- 1/d series


def dimer_correction(d: int, order: int) -> Fraction:
    """Exact sum of c_j / d**j for j = 1..order."""
    _check_d(d)
    if not 0 <= order <= max(C_COEFFS):
        raise UnsupportedOrderError(f"order {order} unsupported; known through {max(C_COEFFS)}")
    return sum((C_COEFFS[j] / F(d) ** j for j in range(1, order + 1)), F(0))


def lambda_d_asymptotic(d: int, order: int = 3) -> float:
    correction = dimer_correction(d, order)
    return 0.5 * math.log(2 * d) - 0.5 + float(correction)


def monomer_dimer_correction(d: int, p, order: int) -> Fraction:
    """Exact correction polynomials of the monomer-dimer 1/d series at (d, p)."""
    _check_d(d)
    _check_p(p)
    if not 0 <= order <= max(DP_CORRECTIONS):
        raise UnsupportedOrderError(
            f"order {order} unsupported; known through {max(DP_CORRECTIONS)}"
        )
    p = F(p)
    return sum((poly_eval(DP_CORRECTIONS[j], p) / F(d) ** j for j in range(1, order + 1)), F(0))


def lambda_dp_asymptotic(d: int, p: float, order: int = 3) -> float:
    return mean_field(d, p) + float(monomer_dimer_correction(d, p, order))


# ------------------------------------------------------------ p-power series


def a_coefficient(k: int, d: int) -> Fraction:
    _check_d(d)
    if k not in A_ROWS:
        raise UnsupportedOrderError(f"a_{k}(d) unknown; known for k = 2..6")
    return sum((c / F(d) ** j for j, c in A_ROWS[k].items()), F(0))


def pseries_correction(d: int, p, kmax: int) -> Fraction:
    _check_d(d)
    _check_p(p)
    if not 2 <= kmax <= max(A_ROWS):
        raise UnsupportedOrderError(f"kmax {kmax} outside 2..{max(A_ROWS)}")
    p = F(p)
    return sum((a_coefficient(k, d) * p**k for k in range(2, kmax + 1)), F(0))


def lambda_dp_pseries(d: int, p: float, kmax: int = 6) -> float:
    return mean_field(d, p) + float(pseries_correction(d, p, kmax))


def eq16_coefficient(k: int) -> Fraction:
    """Coefficient of p**k in the two-dimensional series (prefactor included)."""
    if k not in EQ16_NUMERATORS:
        raise UnsupportedOrderError(f"k={k} outside 2..{max(EQ16_NUMERATORS)}")
    return 2 * F(EQ16_NUMERATORS[k], k * (k - 1)) / 4**k


def lambda_2p_correction(p, kmax: int) -> Fraction:
    _check_p(p)
    if not 2 <= kmax <= max(EQ16_NUMERATORS):
        raise UnsupportedOrderError(f"kmax {kmax} outside 2..{max(EQ16_NUMERATORS)}")
    p = F(p)
    return sum((eq16_coefficient(k) * p**k for k in range(2, kmax + 1)), F(0))


def lambda_2p_series(p: float, kmax: int = 7) -> float:
    return mean_field(2, p) + float(lambda_2p_correction(p, kmax))


# --------------------------------------------------------------- exact lambda_2


def lambda2_terms(tol: float) -> int:
    """Index K of the last term kept: the first K whose next term is below tol."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    K = max(0, math.ceil((math.sqrt(1 / (math.pi * tol)) - 3) / 2) - 1)
    while 1 / (math.pi * (2 * K + 3) ** 2) >= tol:
        K += 1
    return K


def lambda2_exact(tol: float = 1e-9) -> float:
    """Partial sum of (1/pi) sum_k (-1)^k / (2k+1)^2, accurate to ``tol``.

    The series alternates with decreasing terms, so the truncation error is
    below the first omitted term.
    """
    K = lambda2_terms(tol)
    return math.fsum((-1) ** k / (2 * k + 1) ** 2 for k in range(K + 1)) / math.pi


# ------------------------------------------------------------ identity checks


@dataclass(frozen=True)
class RearrangementRow:
    j: int
    expected: PPolynomial
    collected: PPolynomial
    equal: bool


@dataclass(frozen=True)
class D2Row:
    k: int
    a_k_at_2: Fraction | None
    eq16: Fraction
    equal: bool | None
    note: str = ""


@dataclass(frozen=True)
class ReductionRow:
    j: int
    c_j: Fraction
    at_p1: Fraction
    equal: bool


def rearrangement_check(max_p_degree: int = 6) -> list[RearrangementRow]:
    series = TABLE.a_series()
    rows = []
    for j, expected in DP_CORRECTIONS.items():
        expected = expected.truncate(max_p_degree)
        collected = collect_d_coefficient(series, j).truncate(max_p_degree)
        rows.append(RearrangementRow(j, expected, collected, expected == collected))
    return rows


def d2_consistency_check() -> list[D2Row]:
    rows = []
    for k in EQ16_NUMERATORS:
        coeff = eq16_coefficient(k)
        if k in A_ROWS:
            a2 = a_coefficient(k, 2)
            rows.append(D2Row(k, a2, coeff, a2 == coeff, EQ16_EXPONENT_NOTE if k == 4 else ""))
        else:
            rows.append(D2Row(k, None, coeff, None, "d=2 only"))
    return rows


def p1_reduction_check() -> list[ReductionRow]:
    """At p = 1 the monomer-dimer corrections must reduce to the dimer ones."""
    return [
        ReductionRow(j, C_COEFFS[j], poly_eval(DP_CORRECTIONS[j], 1), C_COEFFS[j] == poly_eval(DP_CORRECTIONS[j], 1))
        for j in sorted(C_COEFFS)
    ]
