"""Exact rationals, sparse polynomials in p, and tables indexed by powers of 1/d.

Rationals are :class:`fractions.Fraction`; they are already normalized
(coprime, positive denominator) on construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

Rational = Fraction
Number = Union[int, Fraction]


def rat_add(a: Number, b: Number) -> Fraction:
    return Fraction(a) + Fraction(b)


def rat_to_json(x: Number) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rat_from_json(obj: Mapping[str, str]) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


class PPolynomial:
    """Polynomial in p with exact rational coefficients, stored sparsely.

    Zero coefficients are never stored, so two polynomials are equal iff their
    coefficient maps are equal.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, Number] | None = None):
        clean = {}
        for power, c in (coeffs or {}).items():
            if power < 0:
                raise ValueError(f"negative power {power}")
            c = Fraction(c)
            if c:
                clean[int(power)] = c
        self._coeffs = dict(sorted(clean.items()))

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def degree(self) -> int:
        return max(self._coeffs, default=-1)

    def __getitem__(self, power: int) -> Fraction:
        return self._coeffs.get(power, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PPolynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.items()))

    def __add__(self, other: PPolynomial) -> PPolynomial:
        out = dict(self._coeffs)
        for power, c in other._coeffs.items():
            out[power] = out.get(power, 0) + c
        return PPolynomial(out)

    def __neg__(self) -> PPolynomial:
        return PPolynomial({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: PPolynomial) -> PPolynomial:
        return self + (-other)

    def __mul__(self, other: PPolynomial | Number) -> PPolynomial:
        if not isinstance(other, PPolynomial):
            return PPolynomial({k: c * other for k, c in self._coeffs.items()})
        out: dict[int, Fraction] = {}
        for i, a in self._coeffs.items():
            for j, b in other._coeffs.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return PPolynomial(out)

    __rmul__ = __mul__

    def truncate(self, max_degree: int) -> PPolynomial:
        return PPolynomial({k: c for k, c in self._coeffs.items() if k <= max_degree})

    def __call__(self, p: Number) -> Fraction:
        return poly_eval(self, p)

    def __repr__(self) -> str:
        if not self._coeffs:
            return "PPolynomial(0)"
        terms = " + ".join(f"({c})p^{k}" for k, c in self._coeffs.items())
        return f"PPolynomial({terms})"

    def to_json(self) -> dict:
        return {str(k): rat_to_json(c) for k, c in self._coeffs.items()}


def poly_add(a: PPolynomial, b: PPolynomial) -> PPolynomial:
    return a + b


def poly_eval(poly: PPolynomial, p: Number) -> Fraction:
    """Exact Horner evaluation at a rational point."""
    p = Fraction(p)
    acc = Fraction(0)
    for power in range(poly.degree(), -1, -1):
        acc = acc * p + poly[power]
    return acc


class DSeries:
    """Finite table of p-polynomials keyed by the power of 1/d they multiply.

    Term 0 holds the d-independent part.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, PPolynomial] | None = None):
        clean = {}
        for j, poly in (terms or {}).items():
            if j < 0:
                raise ValueError(f"negative 1/d power {j}")
            if poly:
                clean[int(j)] = poly
        self._terms = dict(sorted(clean.items()))

    @classmethod
    def from_rows(cls, rows: Mapping[int, Mapping[int, Number]]) -> DSeries:
        """Build from ``{k: {j: coeff}}``, i.e. sum_k (sum_j coeff/d^j) p^k.

        This regroups a p-power series whose coefficients are polynomials in
        1/d into a 1/d-power series whose coefficients are polynomials in p.
        """
        acc: dict[int, PPolynomial] = {}
        for k, row in rows.items():
            for j, c in row.items():
                acc[j] = acc.get(j, PPolynomial()) + PPolynomial({k: c})
        return cls(acc)

    @property
    def terms(self) -> dict[int, PPolynomial]:
        return dict(self._terms)

    def support(self) -> list[int]:
        return list(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DSeries):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        return f"DSeries({self._terms!r})"

    def evaluate(self, d: int, p: Number) -> Fraction:
        d_inv = Fraction(1, d)
        return sum((poly_eval(poly, p) * d_inv**j for j, poly in self._terms.items()), Fraction(0))


def collect_d_coefficient(series: DSeries, j: int) -> PPolynomial:
    """The polynomial in p multiplying (1/d)**j; empty outside the support."""
    return series.terms.get(j, PPolynomial())
