"""Exact matching polynomials of boxes by broken-profile transfer matrix.

The sweep visits cells in index order. The frontier is the window of the
next ``C = V / dims[0]`` cells; bit ``t`` of a state says cell ``current + t``
is already covered by a dimer reaching forward from a processed cell. At each
cell we either leave it alone (monomer, or already covered) or anchor a dimer
toward one of its forward neighbours, which sit at offsets equal to the axis
strides (all at most ``C``). Each dimer is therefore placed exactly once, from
its lower endpoint.

Per-state counts are polynomials in the dimer number. They are kept packed
into a single Python int (coefficient ``k`` in bits ``[k*B, (k+1)*B)``), so
merging two states is one bigint addition and adding a dimer is a shift by
``B``. ``B`` is taken from the injection "every cell picks nothing or one of
its <= d forward partners", which bounds every coefficient by ``(d+1)**V``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

from .lattice import LatticeSpec, neighbors

MAX_VOLUME = 10_000
DEFAULT_FRONTIER_BITS = 22
FRONTIER_BITS_CEILING = 26
FRONTIER_BITS_ENV = "DIMERLAB_MAX_FRONTIER_BITS"
BRUTE_FORCE_MAX_VOLUME = 24


class CapacityError(RuntimeError):
    """A size guard was exceeded; the message names the bound."""


@dataclass(frozen=True)
class MatchingPolynomial:
    volume: int
    counts: tuple[int, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(self.counts))

    @property
    def max_k(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class FrontierLayer:
    """Frontier states after ``cells_done`` cells, with packed count vectors."""

    cells_done: int
    width: int
    coeff_bits: int
    kcap: int
    states: dict[int, int]

    def counts(self, state: int) -> list[int]:
        return unpack(self.states.get(state, 0), self.coeff_bits, self.kcap)

    def mass(self) -> list[int]:
        """Per-dimer-number totals over all states."""
        return unpack(sum(self.states.values()), self.coeff_bits, self.kcap)


def max_frontier_bits() -> int:
    raw = os.environ.get(FRONTIER_BITS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_FRONTIER_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise CapacityError(f"{FRONTIER_BITS_ENV}={raw!r} is not an integer") from None
    if not 1 <= bits <= FRONTIER_BITS_CEILING:
        raise CapacityError(
            f"{FRONTIER_BITS_ENV}={bits} outside 1..{FRONTIER_BITS_CEILING} (hard ceiling)"
        )
    return bits


def check_guards(spec: LatticeSpec) -> None:
    if spec.volume > MAX_VOLUME:
        raise CapacityError(f"volume {spec.volume} exceeds the volume bound {MAX_VOLUME}")
    limit = max_frontier_bits()
    if spec.cross_section > limit:
        raise CapacityError(
            f"cross-section {spec.cross_section} bits exceeds the frontier bound {limit} bits"
            f" (set {FRONTIER_BITS_ENV}, max {FRONTIER_BITS_CEILING})"
        )


def coefficient_bits(spec: LatticeSpec) -> int:
    return ((spec.d + 1) ** spec.volume).bit_length() + 1


def unpack(packed: int, bits: int, kcap: int) -> list[int]:
    mask = (1 << bits) - 1
    return [(packed >> (k * bits)) & mask for k in range(kcap + 1)]


def _forward_offsets(spec: LatticeSpec) -> list[tuple[int, ...]]:
    # Offsets of in-box neighbours with a larger index; reuses the coordinate
    # walk directly rather than the neighbour lists so that the oracle and the
    # sweep share nothing beyond the box definition.
    strides = spec.strides
    out = []
    coords = [0] * spec.d
    for _ in range(spec.volume):
        out.append(tuple(s for axis, s in enumerate(strides) if coords[axis] < spec.dims[axis] - 1))
        for axis in range(spec.d - 1, -1, -1):
            coords[axis] += 1
            if coords[axis] < spec.dims[axis]:
                break
            coords[axis] = 0
    return out


def frontier_layers(
    spec: LatticeSpec, max_k: int | None = None, *, perfect_only: bool = False
) -> Iterator[FrontierLayer]:
    """Yield the frontier after every processed cell (the first yield is the empty box).

    With ``perfect_only`` the monomer branch is dropped and the packed width is
    zero, so each state's value is a plain count of partial perfect coverings.
    """
    check_guards(spec)
    if max_k is not None and max_k < 0:
        raise ValueError(f"max_k must be nonnegative, got {max_k}")
    V = spec.volume
    C = spec.cross_section
    kcap = V // 2 if max_k is None else min(max_k, V // 2)
    if perfect_only:
        bits, kcap = 0, 0
    else:
        bits = coefficient_bits(spec)
    step = bits
    mask = (1 << ((kcap + 1) * bits)) - 1 if max_k is not None and not perfect_only else None

    layer: dict[int, int] = {0: 1}
    yield FrontierLayer(0, C, bits, kcap, layer)
    for cell, offsets in enumerate(_forward_offsets(spec)):
        new: dict[int, int] = {}
        get = new.get
        for state, poly in layer.items():
            rest = state >> 1
            if state & 1:
                new[rest] = get(rest, 0) + poly
                continue
            if not perfect_only:
                new[rest] = get(rest, 0) + poly
            placed = poly << step
            if mask is not None:
                placed &= mask
                if not placed:
                    continue
            for s in offsets:
                if not (state >> s) & 1:
                    key = rest | (1 << (s - 1))
                    new[key] = get(key, 0) + placed
        layer = new
        yield FrontierLayer(cell + 1, C, bits, kcap, layer)


def _sweep(spec: LatticeSpec, max_k: int | None, perfect_only: bool = False) -> FrontierLayer:
    last = None
    for last in frontier_layers(spec, max_k, perfect_only=perfect_only):
        pass
    return last


def matching_polynomial(spec: LatticeSpec, max_k: int | None = None) -> MatchingPolynomial:
    """Exact numbers of k-dimer configurations of ``spec`` for k = 0..floor(V/2).

    With ``max_k`` only k <= max_k are computed and the result is flagged
    truncated if that cuts anything off.
    """
    final = _sweep(spec, max_k)
    # Every dimer lies inside the box, so the only surviving state is empty.
    counts = final.counts(0)
    truncated = max_k is not None and max_k < spec.volume // 2
    return MatchingPolynomial(spec.volume, counts, truncated)


def perfect_matching_count(spec: LatticeSpec) -> int:
    check_guards(spec)
    if spec.volume % 2:
        return 0
    return _sweep(spec, None, perfect_only=True).states.get(0, 0)


def brute_force_matchings(spec: LatticeSpec) -> MatchingPolynomial:
    """Exhaustive recursion over bonds, memoised on the covered-site set.

    Takes the lowest uncovered site and either leaves it as a monomer or pairs
    it with each uncovered neighbour. Independent of the transfer-matrix path.
    """
    V = spec.volume
    if V > BRUTE_FORCE_MAX_VOLUME:
        raise CapacityError(f"volume {V} exceeds the brute-force bound {BRUTE_FORCE_MAX_VOLUME}")
    adj = [neighbors(spec, v) for v in range(V)]
    full = (1 << V) - 1
    memo: dict[int, list[int]] = {}

    def count(covered: int) -> list[int]:
        if covered == full:
            return [1]
        if covered in memo:
            return memo[covered]
        v = (~covered & (covered + 1)).bit_length() - 1
        out = list(count(covered | (1 << v)))
        for u in adj[v]:
            if not (covered >> u) & 1:
                sub = count(covered | (1 << v) | (1 << u))
                if len(out) < len(sub) + 1:
                    out.extend([0] * (len(sub) + 1 - len(out)))
                for k, n in enumerate(sub):
                    out[k + 1] += n
        memo[covered] = out
        return out

    counts = count(0)
    counts = counts + [0] * (V // 2 + 1 - len(counts))
    return MatchingPolynomial(V, counts)
