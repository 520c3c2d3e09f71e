"""Independent routes to the quantities computed in ``discrepancy`` and ``expectation``.

* per-box summation of the integrals of ``q_i (1 - q_i)`` over each box and
  each region ``I_i^u`` (direct enumeration, or with the sum over boxes
  collapsed axis by axis);
* the L2-discrepancy of a small point set by integrating the discrepancy
  function cell by cell;
* tensor Gauss-Legendre quadrature of ``q_i (1 - q_i)`` over a region;
* Monte Carlo estimates of expected squared discrepancies over replicated
  jittered samples.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .discrepancy import Kind, hickernell_l2_squared, projected_l2_squared, warnock_l2_squared
from .errors import ParameterError, ResourceLimitError
from .expectation import expectation
from .partition import PartitionSpec, SubsetMask, all_subsets, check_index, q, region_bounds
from .sampler import jittered_batch

MAX_ENUMERATED_BOXES = 10**6
MAX_COLLAPSED_DIM = 12
DEFAULT_BUDGET = 10**10
BUDGET_ENV = "JITTERDISC_BUDGET"


# per-region integrals -------------------------------------------------------

def _region_size(u, d: int) -> int:
    if u is None:
        return 0
    if u.d != d:
        raise ParameterError(f"subset is over d={u.d}, expected d={d}")
    u.require_strict()
    return u.size


def q_integral_per_region(m: int, d: int, i, u: SubsetMask | None, *, exact: bool = False):
    """Closed-form integral of ``q_i (1 - q_i)`` over ``I_i^u`` (``u=None``: the box).

    Equals ``(3**r - 2**r) / (6m)**r * prod_{j in u} (1 - i_j/m)`` with
    ``r = d - |u|``.
    """
    spec = PartitionSpec(m, d)
    i = check_index(spec, i)
    r = d - _region_size(u, d)
    axes = u.positions if u is not None else []
    if exact:
        value = Fraction(3**r - 2**r, (6 * m) ** r)
        for j in axes:
            value *= Fraction(m - i[j], m)
        return value
    value = (3**r - 2**r) / (6 * m) ** r
    for j in axes:
        value *= 1.0 - i[j] / m
    return value


def region_quadrature(m: int, d: int, i, u: SubsetMask | None, nodes: int = 16) -> float:
    """Tensor Gauss-Legendre quadrature of ``q_i (1 - q_i)`` over ``I_i^u``.

    The integrand has degree at most 2 in each variable on a region, so 16
    nodes per axis integrate it exactly up to rounding.
    """
    spec = PartitionSpec(m, d)
    lo, hi = region_bounds(spec, i, u)
    t, w = np.polynomial.legendre.leggauss(nodes)
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    axes_x = [mid[j] + half[j] * t for j in range(d)]
    axes_w = [half[j] * w for j in range(d)]
    grid = np.stack(np.meshgrid(*axes_x, indexing="ij"), axis=-1)
    weights = reduce(np.multiply.outer, axes_w)
    qx = q(spec, i, grid)
    return float(np.sum(weights * qx * (1.0 - qx)))


# per-box summation ----------------------------------------------------------

def _scaled_box_terms(m: int, d: int, exact: bool) -> np.ndarray:
    """Per-box bracket of the box sum, one entry per box in rank order.

    Exact mode returns integers scaled by ``6**d * m**d``; float mode returns
    the unscaled bracket.
    """
    spec = PartitionSpec(m, d)
    idx = spec.index_array()
    if exact:
        # per-box total is at most (6m - 3)**d
        dtype = np.int64 if (6 * m - 3) ** d < 2**62 else object
        rest = (m - idx).astype(dtype)
        totals = np.full(spec.n, 3**d - 2**d, dtype=dtype)
        for u in all_subsets(d, strict=True):
            k = u.size
            coef = (3 ** (d - k) - 2 ** (d - k)) * 6**k
            totals += coef * np.prod(rest[:, u.positions], axis=1)
        return totals
    frac = 1.0 - idx / m
    totals = np.full(spec.n, (3**d - 2**d) / (6 * m) ** d)
    for u in all_subsets(d, strict=True):
        r = d - u.size
        totals += (3**r - 2**r) / (6 * m) ** r * np.prod(frac[:, u.positions], axis=1)
    return totals


def _box_sum_direct(m: int, d: int, exact: bool):
    if m**d > MAX_ENUMERATED_BOXES:
        raise ResourceLimitError(
            f"direct enumeration of m**d = {m**d} boxes exceeds {MAX_ENUMERATED_BOXES}"
        )
    totals = _scaled_box_terms(m, d, exact)
    if exact:
        if totals.dtype == np.int64 and m**d * (6 * m - 3) ** d < 2**62:
            numerator = int(totals.sum())
        else:
            numerator = sum(int(v) for v in totals.tolist())
        return Fraction(numerator, 6**d * m ** (3 * d))
    return float(np.sum(totals)) / m ** (2 * d)


def _box_sum_collapsed(m: int, d: int, exact: bool):
    if d > MAX_COLLAPSED_DIM:
        raise ResourceLimitError(f"collapsed box sum supports d <= {MAX_COLLAPSED_DIM}, got {d}")
    # sum over boxes of prod_{j in u} (1 - i_j/m) = m**(d-k) * (sum_i (1 - i/m))**k
    if exact:
        axis_sum = sum((Fraction(m - i, m) for i in range(1, m + 1)), Fraction(0))
        total = Fraction(0)
        for k in range(d + 1):
            r = d - k
            total += math.comb(d, k) * Fraction(3**r - 2**r, (6 * m) ** r) * m**r * axis_sum**k
        return total / m ** (2 * d)
    axis_sum = math.fsum(1.0 - i / m for i in range(1, m + 1))
    terms = []
    for k in range(d + 1):
        r = d - k
        terms.append(math.comb(d, k) * (3**r - 2**r) / (6 * m) ** r * m**r * axis_sum**k)
    return math.fsum(terms) / m ** (2 * d)


def expected_l2_squared_by_box_sum(m: int, d: int, *, method: str = "auto", exact: bool = False):
    """Expected squared L2-discrepancy assembled box by box from the region integrals.

    ``method`` is ``"direct"`` (enumerate every box and region), ``"collapsed"``
    (sum each axis once) or ``"auto"`` (direct when ``m**d <= 10**6``).
    """
    PartitionSpec(m, d)
    if method == "auto":
        method = "direct" if m**d <= MAX_ENUMERATED_BOXES else "collapsed"
    if method == "direct":
        return _box_sum_direct(m, d, exact)
    if method == "collapsed":
        return _box_sum_collapsed(m, d, exact)
    raise ParameterError(f"unknown method {method!r}")


def oracle_expectation(kind, m: int, d: int, s: SubsetMask | None = None, *, exact: bool = False):
    """Box-sum route to any of the three expected squared discrepancies.

    The projection onto ``k`` axes is a jittered partition of ``[0,1]^k``
    holding ``m**(d-k)`` points per box, which scales the ``k``-dimensional
    box sum by ``m**(k-d)``.
    """
    kind = Kind(kind)

    def projected(k):
        base = expected_l2_squared_by_box_sum(m, k, exact=exact)
        return base * (Fraction(m) ** (k - d) if exact else float(m) ** (k - d))

    if kind is Kind.L2:
        return expected_l2_squared_by_box_sum(m, d, exact=exact)
    if kind is Kind.PROJECTED_L2:
        if s is None:
            raise ParameterError("projected kind needs a subset")
        return projected(s.size)
    terms = [math.comb(d, k) * projected(k) for k in range(1, d + 1)]
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)


# cell decomposition ---------------------------------------------------------

def l2_squared_by_cell_decomposition(points, *, max_points: int = 8, max_dim: int = 3) -> float:
    """Integrate the squared discrepancy function over the grid cut by the points.

    Each axis is cut at 0, 1 and the distinct point coordinates. On a cell
    ``prod [t_a, t_{a+1})`` the counting function is the number of points with
    every coordinate ``<= t_a``, and the integral of ``(c/N - prod x_j)**2``
    splits into per-axis moments.
    """
    x = np.asarray(points.points if hasattr(points, "points") else points, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    n, d = x.shape
    if n > max_points or d > max_dim:
        raise ResourceLimitError(
            f"cell decomposition limited to N <= {max_points}, d <= {max_dim}; "
            f"got N={n}, d={d} ({(n + 1) ** d} cells)"
        )
    if x.min() < 0.0 or x.max() > 1.0:
        raise ParameterError("point coordinates must lie in [0, 1]")

    lengths, first, second, indicators = [], [], [], []
    for j in range(d):
        cuts = np.unique(np.concatenate(([0.0, 1.0], x[:, j])))
        a, b = cuts[:-1], cuts[1:]
        lengths.append(b - a)
        first.append((b * b - a * a) / 2)
        second.append((b**3 - a**3) / 3)
        indicators.append((x[:, j][:, None] <= a[None, :]).astype(np.float64))

    outer = lambda arrays: reduce(np.multiply.outer, arrays)  # noqa: E731
    subscripts = "".join(chr(ord("a") + j) for j in range(d))
    operands = ",".join("z" + c for c in subscripts)
    counts = np.einsum(f"{operands}->{subscripts}", *indicators)
    frac = counts / n
    value = np.sum(frac**2 * outer(lengths)) - 2 * np.sum(frac * outer(first)) + np.sum(outer(second))
    return max(float(value), 0.0)


# Monte Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    std_error: float
    replicates: int
    master_seed: int

    def z_score(self, target: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.mean == target else math.inf
        return (self.mean - target) / self.std_error

    def covers(self, target: float, sigmas: float = 4.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.std_error

    def as_dict(self) -> dict:
        return asdict(self)


def compute_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        raise ParameterError(f"{BUDGET_ENV} must be a number, got {raw!r}") from None
    if value < 1:
        raise ParameterError(f"{BUDGET_ENV} must be positive, got {raw!r}")
    return value


def estimated_cost(spec: PartitionSpec, kind, replicates: int) -> int:
    """Point-pair evaluations needed by the Monte Carlo estimator."""
    projections = 2**spec.d - 1 if Kind(kind) is Kind.HICKERNELL_L2 else 1
    return replicates * spec.n * spec.n * projections


def _replicate_value(kind: Kind, x: np.ndarray, s: SubsetMask | None) -> float:
    if kind is Kind.L2:
        return warnock_l2_squared(x)
    if kind is Kind.PROJECTED_L2:
        return projected_l2_squared(x, s)
    return hickernell_l2_squared(x)


def mc_expected_discrepancy(
    spec: PartitionSpec,
    kind,
    replicates: int,
    master_seed: int = 0,
    s: SubsetMask | None = None,
    *,
    first_replicate: int = 0,
    budget: int | None = None,
    batch: int = 512,
) -> EstimateWithCI:
    """Mean squared discrepancy over independent jittered samples.

    Replicate ``r`` uses the stream ``(master_seed, first_replicate + r)``.
    Values are folded into a running mean and variance in replicate order, so
    the result is a deterministic function of the arguments.
    """
    kind = Kind(kind)
    if replicates < 2:
        raise ParameterError("at least 2 replicates are needed for a standard error")
    if kind is Kind.PROJECTED_L2:
        if s is None:
            raise ParameterError("projected kind needs a subset")
        if s.d != spec.d:
            raise ParameterError(f"subset is over d={s.d}, partition has d={spec.d}")
    budget = compute_budget() if budget is None else budget
    cost = estimated_cost(spec, kind, replicates)
    if cost > budget:
        raise ResourceLimitError(
            f"estimated cost {cost} point-pair evaluations exceeds the budget {budget} "
            f"(set {BUDGET_ENV} to raise it)"
        )

    count, mean, m2 = 0, 0.0, 0.0
    for start in range(0, replicates, batch):
        size = min(batch, replicates - start)
        samples = jittered_batch(spec, master_seed, first_replicate + start, size)
        for x in samples:
            value = _replicate_value(kind, x, s)
            count += 1
            delta = value - mean
            mean += delta / count
            m2 += delta * (value - mean)
    std_error = math.sqrt(m2 / (count - 1) / count)
    return EstimateWithCI(mean, std_error, replicates, master_seed)


def verification_report(
    spec: PartitionSpec,
    kind,
    replicates: int,
    master_seed: int = 0,
    s: SubsetMask | None = None,
    *,
    sigmas: float = 4.0,
    budget: int | None = None,
) -> dict:
    """Closed form, box-sum oracle and Monte Carlo estimate side by side.

    ``passed`` requires the Monte Carlo mean within ``sigmas`` standard errors
    of the closed form and the oracle within 1e-12 relative of it.
    """
    kind = Kind(kind)
    if kind is Kind.PROJECTED_L2 and s is None:
        raise ParameterError("projected kind needs a subset")
    closed = expectation(kind, spec.m, spec.d, s).value
    estimate = mc_expected_discrepancy(spec, kind, replicates, master_seed, s, budget=budget)
    try:
        oracle_value = float(oracle_expectation(kind, spec.m, spec.d, s))
    except ResourceLimitError:
        oracle_value = None
    oracle_ok = oracle_value is None or abs(oracle_value - closed) <= 1e-12 * closed
    mc_ok = estimate.covers(closed, sigmas)
    return {
        "schema": 1,
        "kind": kind.value,
        "subset": list(s.axes) if s is not None else None,
        "m": spec.m,
        "d": spec.d,
        "n": spec.n,
        "closed_form": closed,
        "oracle": oracle_value,
        "mc_mean": estimate.mean,
        "mc_std_error": estimate.std_error,
        "z_score": estimate.z_score(closed),
        "replicates": replicates,
        "seed": master_seed,
        "sigmas": sigmas,
        "status": "PASS" if mc_ok and oracle_ok else "FAIL",
    }
