"""Finite-box free energies and their extrapolation to the bulk limit."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import expansions as ex
from .lattice import LatticeSpec, boundary_sites
from .matchgen import check_guards, matching_polynomial, perfect_matching_count

_LN2 = math.log(2)


class InfeasibleDensityError(ValueError):
    pass


class FitError(ValueError):
    pass


def log_count(n: int) -> float:
    """Natural log of a positive big integer via bit length and a 64-bit mantissa."""
    if n <= 0:
        raise ValueError(f"log of nonpositive count {n}")
    shift = max(n.bit_length() - 64, 0)
    return math.log(n >> shift) + shift * _LN2


def dimer_number(p, volume: int) -> int:
    """Nearest integer to p*V/2, ties going down.

    Floats are read through their shortest repr, so ``0.1`` means 1/10.
    """
    if isinstance(p, float):
        p = Fraction(repr(p))
    x = Fraction(p) * volume / 2
    return math.ceil(x - Fraction(1, 2))


def _count_at(spec: LatticeSpec, k: int) -> int:
    if 2 * k == spec.volume:
        return perfect_matching_count(spec)
    return matching_polynomial(spec, max_k=k).counts[k]


def finite_lambda(spec: LatticeSpec, p: float) -> tuple[int, float]:
    ex._check_p(p)
    k = dimer_number(p, spec.volume)
    n = _count_at(spec, k)
    if n == 0:
        raise InfeasibleDensityError(f"no {k}-dimer configurations on {spec} (p={p})")
    return k, log_count(n) / spec.volume


@dataclass(frozen=True)
class EstimatePoint:
    spec: LatticeSpec
    k_used: int
    log_count: float

    @property
    def raw(self) -> float:
        return self.log_count / self.spec.volume


@dataclass(frozen=True)
class EstimateSeries:
    d: int
    p: float
    points: tuple[EstimatePoint, ...]
    extrapolated: float
    fit_residual: float
    surface_term: bool = True
    coefficients: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {
                "spec": str(pt.spec),
                "k": pt.k_used,
                "raw": pt.raw,
                "extrapolated": self.extrapolated,
                "residual": self.fit_residual,
            }
            for pt in self.points
        ]


def _point(args) -> EstimatePoint:
    d, size, p = args
    spec = LatticeSpec.hypercube(d, size)
    k = dimer_number(p, spec.volume)
    n = _count_at(spec, k)
    if n == 0:
        raise InfeasibleDensityError(f"no {k}-dimer configurations on {spec} (p={p})")
    return EstimatePoint(spec, k, log_count(n))


def fit_surface_model(points: Sequence[EstimatePoint]) -> tuple[float, float, dict, bool]:
    """Least-squares fit of ln N = lam*V + beta*A + gamma, A the boundary-site count.

    When A is the same for every box (paths longer than one site) it cannot be
    told apart from gamma and is dropped. Returns (lam, max residual,
    coefficients, surface term used).
    """
    V = np.array([pt.spec.volume for pt in points], dtype=float)
    A = np.array([boundary_sites(pt.spec) for pt in points], dtype=float)
    y = np.array([pt.log_count for pt in points])
    ones = np.ones_like(V)
    use_surface = len(set(A.tolist())) > 1
    columns = [V, A, ones] if use_surface else [V, ones]
    X = np.column_stack(columns)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise FitError("collinear design matrix; choose sizes with distinct volumes")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    residual = float(np.max(np.abs(X @ coef - y)))
    names = ["volume", "surface", "constant"] if use_surface else ["volume", "constant"]
    return float(coef[0]), residual, dict(zip(names, map(float, coef))), use_surface


def extrapolate_lambda(
    d: int, p: float, sizes: Sequence[int], *, workers: int = 1
) -> EstimateSeries:
    ex._check_d(d)
    ex._check_p(p)
    sizes = list(sizes)
    if len(sizes) < 3:
        raise ValueError(f"need at least 3 sizes for the fit, got {sizes}")
    if any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be positive and strictly increasing, got {sizes}")
    for s in sizes:
        check_guards(LatticeSpec.hypercube(d, s))
    jobs = [(d, s, p) for s in sizes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_point, jobs))
    else:
        points = [_point(job) for job in jobs]
    lam, residual, coef, surface = fit_surface_model(points)
    return EstimateSeries(d, p, tuple(points), lam, residual, surface, coef)


@dataclass(frozen=True)
class Comparison:
    series: EstimateSeries
    references: dict[str, float]
    bounds: dict[str, ex.BoundsPair]

    @property
    def estimate(self) -> float:
        return self.series.extrapolated

    def contained(self) -> dict[str, bool]:
        return {name: b.contains(self.estimate) for name, b in self.bounds.items()}

    def deltas(self) -> dict[str, float]:
        return {name: self.estimate - v for name, v in self.references.items()}


def compare_report(d: int, p: float, sizes: Sequence[int], *, workers: int = 1) -> Comparison:
    series = extrapolate_lambda(d, p, sizes, workers=workers)
    bounds = {"eq4": ex.fklm_bounds(d, p)}
    if p == 1:
        bounds["eq3"] = ex.minc_bounds(d)
    references = {"eq9": ex.lambda_dp_pseries(d, p, 6)}
    if d == 2:
        references["eq16"] = ex.lambda_2p_series(p, 7)
    return Comparison(series, references, bounds)
