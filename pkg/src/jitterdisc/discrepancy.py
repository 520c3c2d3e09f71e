"""Exact L2-type discrepancies of finite point sets.

All three quantities are built on Warnock's formula for the squared anchored
L2-discrepancy,

    L2^2(P) = 3^-d - (2/N) sum_n prod_j (1 - x_nj^2)/2
              + (1/N^2) sum_{m,n} prod_j min(1 - x_mj, 1 - x_nj),

with exactly ``d`` factors per product.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ResourceLimitError
from .partition import SubsetMask, all_subsets
from .sampler import PointSet

MAX_HICKERNELL_DIM = 20
_BLOCK_ELEMENTS = 1 << 22


class Kind(enum.Enum):
    L2 = "l2"
    PROJECTED_L2 = "projected"
    HICKERNELL_L2 = "hickernell"


@dataclass(frozen=True)
class DiscrepancyValue:
    squared_value: float
    kind: Kind
    subset: SubsetMask | None = None

    @property
    def value(self) -> float:
        return math.sqrt(self.squared_value)


def _coords(ps) -> np.ndarray:
    if isinstance(ps, PointSet):
        return ps.points
    return PointSet(ps).points


def _pair_sum(y: np.ndarray) -> float:
    """``sum_{m,n} prod_j min(y_mj, y_nj)`` over the upper triangle, off-diagonal doubled."""
    n, d = y.shape
    rows = max(1, _BLOCK_ELEMENTS // (n * d))
    partials = []
    for a in range(0, n, rows):
        b = min(n, a + rows)
        block = np.minimum(y[a:b, None, :], y[None, a:, :]).prod(axis=2)
        head = block[:, : b - a]
        diag = np.diagonal(head).sum()
        block[:, : b - a] = np.triu(head, k=1)
        partials.append(diag + 2.0 * block.sum())
    return float(np.sum(partials))


def warnock_l2_squared(ps) -> float:
    """Squared anchored L2-discrepancy of ``ps`` (``PointSet`` or ``(n, d)`` array).

    Points are put into lexicographic order first so the floating-point
    result does not depend on the input order.
    """
    x = _coords(ps)
    n, d = x.shape
    x = x[np.lexsort(x.T[::-1])]
    single = np.prod((1.0 - x * x) / 2.0, axis=1).sum()
    pairs = _pair_sum(1.0 - x)
    value = 3.0**-d - 2.0 * single / n + pairs / (n * n)
    # exact value is >= 0; only rounding can push it below
    return max(float(value), 0.0)


def projected_l2_squared(ps, s: SubsetMask) -> float:
    """Squared L2-discrepancy of the projection of ``ps`` onto the axes in ``s``."""
    if s is None:
        raise ParameterError("projected discrepancy needs a nonempty subset")
    x = _coords(ps)
    if s.d != x.shape[1]:
        raise ParameterError(f"subset is over d={s.d}, point set has d={x.shape[1]}")
    return warnock_l2_squared(PointSet(x[:, s.positions]))


def hickernell_terms(ps) -> dict[SubsetMask, float]:
    """Projected terms of the Hickernell sum keyed by subset, ascending bitmask."""
    x = _coords(ps)
    d = x.shape[1]
    if d > MAX_HICKERNELL_DIM:
        raise ResourceLimitError(
            f"Hickernell discrepancy in d={d} needs 2**{d} - 1 = {2**d - 1} projections "
            f"(limit d <= {MAX_HICKERNELL_DIM})"
        )
    return {s: warnock_l2_squared(x[:, s.positions]) for s in all_subsets(d)}


def hickernell_l2_squared(ps) -> float:
    """Squared Hickernell L2-discrepancy: sum over every nonempty projection."""
    total = 0.0
    for value in hickernell_terms(ps).values():
        total += value
    return total


def discrepancy(ps, kind: Kind, s: SubsetMask | None = None) -> DiscrepancyValue:
    kind = Kind(kind)
    if kind is Kind.L2:
        return DiscrepancyValue(warnock_l2_squared(ps), kind)
    if kind is Kind.PROJECTED_L2:
        return DiscrepancyValue(projected_l2_squared(ps, s), kind, s)
    return DiscrepancyValue(hickernell_l2_squared(ps), kind)
