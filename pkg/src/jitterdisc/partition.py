"""Geometry of the jittered partition of the unit cube.

The cube ``[0,1)^d`` is cut into ``m**d`` half-open boxes

    Omega_i = prod_j [(i_j - 1)/m, i_j/m),   i in {1, ..., m}^d.

Box indices are 1-based d-tuples; the linear rank of a box is row-major with
coordinate 1 varying fastest, ``rank = sum_j (i_j - 1) * m**(j-1)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, ResourceLimitError

MAX_POINTS = 2**53


@dataclass(frozen=True)
class PartitionSpec:
    """Jittered partition with ``m`` boxes per axis in ``d`` dimensions."""

    m: int
    d: int

    def __post_init__(self):
        for name in ("m", "d"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ParameterError(f"{name} must be >= 1, got {value}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "d", int(self.d))
        if self.m ** self.d > MAX_POINTS:
            raise ResourceLimitError(
                f"m**d = {self.m}**{self.d} exceeds the point-count guard 2**53"
            )

    @property
    def n(self) -> int:
        """Number of boxes (and points of a jittered sample), ``m**d``."""
        return self.m**self.d

    def indices(self) -> Iterator[tuple[int, ...]]:
        """All box indices in rank order."""
        for rev in product(range(1, self.m + 1), repeat=self.d):
            yield rev[::-1]

    def index_array(self) -> np.ndarray:
        """``(n, d)`` integer array of all box indices in rank order."""
        ranks = np.arange(self.n, dtype=np.int64)
        out = np.empty((self.n, self.d), dtype=np.int64)
        for j in range(self.d):
            out[:, j] = ranks % self.m + 1
            ranks //= self.m
        return out


def check_index(spec: PartitionSpec, i: Sequence[int]) -> tuple[int, ...]:
    i = tuple(int(v) for v in i)
    if len(i) != spec.d:
        raise ParameterError(f"index {i} has {len(i)} components, expected d={spec.d}")
    for v in i:
        if not 1 <= v <= spec.m:
            raise ParameterError(f"index component {v} outside 1..{spec.m}")
    return i


def index_to_rank(spec: PartitionSpec, i: Sequence[int]) -> int:
    i = check_index(spec, i)
    rank = 0
    for v in reversed(i):
        rank = rank * spec.m + (v - 1)
    return rank


def rank_to_index(spec: PartitionSpec, rank: int) -> tuple[int, ...]:
    if not 0 <= rank < spec.n:
        raise ParameterError(f"rank {rank} outside 0..{spec.n - 1}")
    out = []
    for _ in range(spec.d):
        rank, r = divmod(rank, spec.m)
        out.append(r + 1)
    return tuple(out)


@dataclass(frozen=True)
class SubsetMask:
    """Nonempty subset of the axes ``{1, ..., d}`` stored as a bitmask.

    Bit ``j - 1`` is set when axis ``j`` belongs to the subset.
    """

    bits: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError(f"d must be >= 1, got {self.d}")
        if self.bits <= 0:
            raise ParameterError("subset mask must be nonempty")
        if self.bits >> self.d:
            raise ParameterError(f"mask {self.bits:#b} has axes beyond d={self.d}")

    @classmethod
    def from_axes(cls, axes: Sequence[int], d: int) -> "SubsetMask":
        """Build from 1-based axis numbers."""
        bits = 0
        for a in axes:
            a = int(a)
            if not 1 <= a <= d:
                raise ParameterError(f"axis {a} outside 1..{d}")
            bits |= 1 << (a - 1)
        return cls(bits, d)

    @classmethod
    def full(cls, d: int) -> "SubsetMask":
        return cls((1 << d) - 1, d)

    @property
    def axes(self) -> tuple[int, ...]:
        """1-based axes in ascending order."""
        return tuple(j + 1 for j in range(self.d) if self.bits >> j & 1)

    @property
    def positions(self) -> list[int]:
        """0-based column positions in ascending order."""
        return [j for j in range(self.d) if self.bits >> j & 1]

    @property
    def size(self) -> int:
        return bin(self.bits).count("1")

    def __len__(self) -> int:
        return self.size

    def __contains__(self, axis: int) -> bool:
        return 1 <= axis <= self.d and bool(self.bits >> (axis - 1) & 1)

    @property
    def is_full(self) -> bool:
        return self.bits == (1 << self.d) - 1

    def require_strict(self) -> "SubsetMask":
        if self.is_full:
            raise ParameterError("region subsets must be strict subsets of the axes")
        return self


def all_subsets(d: int, *, strict: bool = False) -> Iterator[SubsetMask]:
    """Nonempty subsets of ``{1..d}`` in ascending bitmask order."""
    top = (1 << d) - 1
    for bits in range(1, top if strict else top + 1):
        yield SubsetMask(bits, d)


def box_bounds(spec: PartitionSpec, i: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper corners of the half-open box ``Omega_i``."""
    idx = np.asarray(check_index(spec, i), dtype=np.float64)
    return (idx - 1) / spec.m, idx / spec.m


def box_index_of(spec: PartitionSpec, x) -> tuple[int, ...]:
    """Index of the box containing ``x`` (points on ``x_j = 1`` go to the last box)."""
    x = np.asarray(x, dtype=np.float64)
    k = np.clip(np.floor(x * spec.m).astype(np.int64), 0, spec.m - 1)
    # floor(x*m) can be off by one next to a box face; settle it against the float bounds
    k = np.where(x < k / spec.m, k - 1, k)
    k = np.where((x >= (k + 1) / spec.m) & (k < spec.m - 1), k + 1, k)
    return tuple(int(v) + 1 for v in k)


def _cut_fractions(spec: PartitionSpec, i, x) -> np.ndarray:
    idx = np.asarray(check_index(spec, i), dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.d:
        raise ParameterError(f"point has {x.shape[-1]} coordinates, expected d={spec.d}")
    return spec.m * x - (idx - 1)


def q(spec: PartitionSpec, i: Sequence[int], x) -> float | np.ndarray:
    """Fraction of ``Omega_i`` covered by the anchored box ``[0, x)``.

    ``x`` may be a single point or an array of points with trailing axis ``d``.
    """
    t = np.clip(_cut_fractions(spec, i, x), 0.0, 1.0)
    out = np.prod(t, axis=-1)
    return float(out) if out.ndim == 0 else out


class RegionKind(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    BOX = "box"
    REGION = "region"


class Region(NamedTuple):
    kind: RegionKind
    u: SubsetMask | None = None


ZERO_CODE = -1
ONE_CODE = -2
BOX_CODE = 0


def region_codes(spec: PartitionSpec, i: Sequence[int], x) -> np.ndarray:
    """Vectorised classification: ``-1`` ZERO, ``-2`` ONE, ``0`` BOX, else the bits of ``u``.

    Uses the same per-axis cut fractions as :func:`q`, so ``q*(1-q) != 0``
    exactly where the code is ``>= 0``.
    """
    t = _cut_fractions(spec, i, x)
    weights = 1 << np.arange(spec.d, dtype=np.int64)
    beyond = t >= 1.0
    codes = (beyond * weights).sum(axis=-1)
    codes = np.where(beyond.all(axis=-1), ONE_CODE, codes)
    return np.where((t <= 0.0).any(axis=-1), ZERO_CODE, codes)


def region_classify(spec: PartitionSpec, i: Sequence[int], x) -> Region:
    """Locate ``x`` relative to box ``Omega_i``.

    ZERO when ``[0,x)`` misses the box, ONE when it swallows it, BOX when ``x``
    lies in the box, otherwise REGION(u) with ``u`` the axes along which ``x``
    lies beyond the box.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("region_classify takes a single point")
    code = int(region_codes(spec, i, x))
    if code == ZERO_CODE:
        return Region(RegionKind.ZERO)
    if code == ONE_CODE:
        return Region(RegionKind.ONE)
    if code == BOX_CODE:
        return Region(RegionKind.BOX)
    return Region(RegionKind.REGION, SubsetMask(code, spec.d))


def region_bounds(
    spec: PartitionSpec, i: Sequence[int], u: SubsetMask | None
) -> tuple[np.ndarray, np.ndarray]:
    """Closure of the region ``I_i^u``; ``u=None`` gives the box itself."""
    lo, hi = box_bounds(spec, i)
    if u is not None:
        if u.d != spec.d:
            raise ParameterError(f"subset is over d={u.d}, partition has d={spec.d}")
        u.require_strict()
        for j in u.positions:
            lo[j], hi[j] = hi[j], 1.0
    return lo, hi
