"""Finite rectangular boxes with free boundary.

Cells are indexed lexicographically by coordinate with the last axis
varying fastest, so the stride of axis ``i`` is the product of the edge
lengths after it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    dims: tuple[int, ...]
    boundary: str = "free"

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims:
            raise LatticeError("a box needs at least one dimension")
        for n in dims:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise LatticeError(f"edge lengths must be positive integers, got {self.dims!r}")
        if self.boundary != "free":
            raise LatticeError(f"only free boundary is supported, got {self.boundary!r}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def hypercube(cls, d: int, size: int) -> LatticeSpec:
        return cls((size,) * d)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def volume(self) -> int:
        return math.prod(self.dims)

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        step = 1
        for n in reversed(self.dims):
            out.append(step)
            step *= n
        return tuple(reversed(out))

    @property
    def cross_section(self) -> int:
        """Cells per slab orthogonal to axis 0 (the transfer-matrix width)."""
        return self.volume // self.dims[0]

    def coords(self, cell: int) -> tuple[int, ...]:
        _check_cell(self, cell)
        out = []
        for n in reversed(self.dims):
            cell, r = divmod(cell, n)
            out.append(r)
        return tuple(reversed(out))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.d or any(not 0 <= c < n for c, n in zip(coords, self.dims)):
            raise IndexError(f"coordinates {tuple(coords)} outside box {self}")
        return sum(c * s for c, s in zip(coords, self.strides))

    def __str__(self) -> str:
        return "x".join(str(n) for n in self.dims)


def parse_spec(text: str) -> LatticeSpec:
    """Parse ``"LxMxN"`` (e.g. ``"8x8"``, ``"2x2x2"``)."""
    parts = text.strip().lower().split("x")
    try:
        dims = tuple(int(part) for part in parts)
    except ValueError:
        raise LatticeError(f"cannot parse lattice spec {text!r}; expected e.g. '8x8'") from None
    return LatticeSpec(dims)


def volume(spec: LatticeSpec) -> int:
    return spec.volume


def edge_count(spec: LatticeSpec) -> int:
    V = spec.volume
    return sum((n - 1) * (V // n) for n in spec.dims)


def boundary_sites(spec: LatticeSpec) -> int:
    return spec.volume - math.prod(max(n - 2, 0) for n in spec.dims)


def _check_cell(spec: LatticeSpec, cell: int) -> None:
    if not 0 <= cell < spec.volume:
        raise IndexError(f"cell {cell} out of range for box {spec} (volume {spec.volume})")


def neighbors(spec: LatticeSpec, cell: int) -> list[int]:
    coords = spec.coords(cell)
    out = []
    for axis, stride in enumerate(spec.strides):
        if coords[axis] > 0:
            out.append(cell - stride)
        if coords[axis] < spec.dims[axis] - 1:
            out.append(cell + stride)
    return sorted(out)


def bonds(spec: LatticeSpec) -> list[tuple[int, int]]:
    """All nearest-neighbour bonds as ``(a, b)`` with ``a < b``."""
    return [(a, b) for a in range(spec.volume) for b in neighbors(spec, a) if a < b]
