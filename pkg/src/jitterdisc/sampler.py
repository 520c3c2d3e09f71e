"""Jittered and plain Monte Carlo point sets.

Randomness comes from a counter-based Philox4x64 generator whose 128-bit key
is ``(replicate_index << 64) | master_seed``. Inside a stream draw number
``rank * d + j`` is coordinate ``j`` of the point in box ``rank``, one 64-bit
output per coordinate, so every (seed, replicate, box, coordinate) tuple maps
to a fixed draw.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import ParameterError, PointSetParseError
from .partition import PartitionSpec, SubsetMask

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    replicate_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < _U64:
            raise ParameterError(f"master_seed must fit in an unsigned 64-bit integer, got {self.master_seed}")
        if not 0 <= self.replicate_index < _U64:
            raise ParameterError(f"replicate_index must be in [0, 2**64), got {self.replicate_index}")

    @property
    def key(self) -> int:
        return (self.replicate_index << 64) | self.master_seed

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key))

    def replicate(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index)


def _as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


class PointSet:
    """Immutable ordered collection of ``n`` points in ``[0,1]^d``."""

    __slots__ = ("_x", "seed")

    def __init__(self, points, seed: int | None = None):
        x = np.array(points, dtype=np.float64, copy=True)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ParameterError(f"point set must be a nonempty (n, d) array, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > 1.0:
            raise ParameterError("point coordinates must lie in [0, 1]")
        x.setflags(write=False)
        self._x = x
        self.seed = seed

    @property
    def points(self) -> np.ndarray:
        """Read-only ``(n, d)`` coordinate array."""
        return self._x

    @property
    def n(self) -> int:
        return self._x.shape[0]

    @property
    def d(self) -> int:
        return self._x.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, k) -> np.ndarray:
        return self._x[k]

    def coordinate(self, axis: int) -> np.ndarray:
        """All values of the 1-based ``axis``."""
        if not 1 <= axis <= self.d:
            raise ParameterError(f"axis {axis} outside 1..{self.d}")
        return self._x[:, axis - 1]

    def project(self, s: SubsetMask) -> "PointSet":
        return project(self, s)

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and np.array_equal(self._x, other._x)

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, d={self.d})"


def _jittered_coordinates(spec: PartitionSpec, u: np.ndarray) -> np.ndarray:
    lower = spec.index_array().astype(np.float64) - 1.0
    x = (lower + u) / spec.m
    # keep each point inside its half-open box despite rounding of (k + u) / m
    lo = lower / spec.m
    hi = np.nextafter((lower + 1.0) / spec.m, -np.inf)
    return np.clip(x, lo, hi)


def jittered_sample(spec: PartitionSpec, seed=0) -> PointSet:
    """One uniform point in each box, stored in box-rank order."""
    seed = _as_seed(seed)
    u = seed.generator().random((spec.n, spec.d))
    return PointSet(_jittered_coordinates(spec, u), seed=seed.master_seed)


def jittered_batch(spec: PartitionSpec, master_seed: int, start: int, count: int) -> np.ndarray:
    """``(count, n, d)`` array of replicates ``start .. start+count-1``.

    Replicate ``r`` of the batch equals ``jittered_sample(spec, SeedSpec(master_seed, r))``.
    """
    base = SeedSpec(master_seed, start)
    u = np.empty((count, spec.n, spec.d))
    for k in range(count):
        u[k] = base.replicate(start + k).generator().random((spec.n, spec.d))
    return _jittered_coordinates(spec, u)


def uniform_sample(n: int, d: int, seed=0) -> PointSet:
    """``n`` i.i.d. uniform points in ``[0,1)^d``."""
    if n < 1 or d < 1:
        raise ParameterError(f"n and d must be >= 1, got n={n}, d={d}")
    seed = _as_seed(seed)
    return PointSet(seed.generator().random((n, d)), seed=seed.master_seed)


def project(ps: PointSet, s: SubsetMask) -> PointSet:
    """Keep the axes in ``s`` (ascending); all ``n`` points are retained."""
    if s is None:
        raise ParameterError("projection needs a nonempty subset")
    if s.d != ps.d:
        raise ParameterError(f"subset is over d={s.d}, point set has d={ps.d}")
    return PointSet(ps.points[:, s.positions], seed=ps.seed)


# point-set text format ------------------------------------------------------

def format_point_set(ps: PointSet) -> str:
    seed = "none" if ps.seed is None else str(ps.seed)
    buf = io.StringIO()
    buf.write(f"# d={ps.d} n={ps.n} seed={seed}\n")
    for row in ps.points:
        buf.write(" ".join(format(float(v), ".17g") for v in row))
        buf.write("\n")
    return buf.getvalue()


def write_point_set(ps: PointSet, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_point_set(ps))


def _parse_header(line: str) -> dict[str, str]:
    body = line[1:].split()
    fields = {}
    for item in body:
        key, sep, value = item.partition("=")
        if not sep:
            raise PointSetParseError(f"bad header field {item!r}", 1)
        fields[key] = value
    for key in ("d", "n"):
        if key not in fields:
            raise PointSetParseError(f"header lacks {key}=", 1)
    return fields


def parse_point_set(lines: Iterable[str]) -> PointSet:
    """Parse the text format; errors carry the offending 1-based line number."""
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise PointSetParseError("empty file", 1) from None
    if not header.startswith("#"):
        raise PointSetParseError("missing '# d=<d> n=<N> seed=<seed>' header", 1)
    fields = _parse_header(header)
    try:
        d, n = int(fields["d"]), int(fields["n"])
    except ValueError:
        raise PointSetParseError("d and n must be integers", 1) from None
    if d < 1 or n < 1:
        raise PointSetParseError("d and n must be positive", 1)
    seed_text = fields.get("seed", "none")
    try:
        seed = None if seed_text == "none" else int(seed_text)
    except ValueError:
        raise PointSetParseError(f"bad seed {seed_text!r}", 1) from None

    rows = []
    for lineno, line in enumerate(it, start=2):
        text = line.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != d:
            raise PointSetParseError(f"expected {d} coordinates, found {len(parts)}", lineno)
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise PointSetParseError(f"non-numeric coordinate in {text!r}", lineno) from None
        if not all(0.0 <= v <= 1.0 for v in row):
            raise PointSetParseError("coordinate outside [0, 1]", lineno)
        rows.append(row)
    if len(rows) != n:
        raise PointSetParseError(f"header announces n={n} points, found {len(rows)}")
    return PointSet(np.array(rows), seed=seed)


def read_point_set(path: str | os.PathLike | TextIO) -> PointSet:
    if hasattr(path, "read"):
        return parse_point_set(path)
    with open(path, encoding="ascii") as fh:
        return parse_point_set(fh)
