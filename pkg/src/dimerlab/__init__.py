"""Exact matching polynomials of lattice boxes and the dimer/monomer-dimer expansions."""

from .lattice import LatticeSpec, parse_spec
from .matchgen import (
    CapacityError,
    MatchingPolynomial,
    brute_force_matchings,
    matching_polynomial,
    perfect_matching_count,
)

__all__ = [
    "CapacityError",
    "LatticeSpec",
    "MatchingPolynomial",
    "brute_force_matchings",
    "matching_polynomial",
    "parse_spec",
    "perfect_matching_count",
]
