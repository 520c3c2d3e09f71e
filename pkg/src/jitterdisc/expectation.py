"""Closed-form expected discrepancies of jittered samples.

With ``a = (m-1)/2 + 1/2 = 3m/6`` and ``b = (m-1)/2 + 1/3 = (3m-1)/6`` every
formula is built from the bracket ``a**k - b**k = ((3m)**k - (3m-1)**k) / 6**k``:

* full L2:         m**(-2d)      * bracket(d)
* projection on s: m**(-(d+|s|)) * bracket(|s|)
* Hickernell:      sum_j C(d, j) * m**(-(d+j)) * bracket(j)

The numerators are exact integers, so the float results are correctly rounded
values of the exact rationals. Inputs whose rationals would be huge fall back
to a log-space evaluation.

The formulas are derived for m >= 2; they are also accepted at m = 1, where
they reduce to the Monte Carlo value for a single uniform point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .discrepancy import Kind
from .errors import ParameterError
from .partition import SubsetMask

# above this many bits in the exact denominator, switch to log-space
_EXACT_BITS = 1 << 14


def _check_md(m: int, d: int) -> None:
    for name, value in (("m", m), ("d", d)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ParameterError(f"{name} must be a positive integer, got {value!r}")


def _subset_size(s, d: int) -> int:
    if isinstance(s, SubsetMask):
        if s.d != d:
            raise ParameterError(f"subset is over d={s.d}, expected d={d}")
        return s.size
    if s is None:
        raise ParameterError("projected expectation needs a nonempty subset")
    k = int(s)
    if not 1 <= k <= d:
        raise ParameterError(f"subset size must be in 1..{d}, got {k}")
    return k


def _bracket(m: int, k: int) -> Fraction:
    return Fraction((3 * m) ** k - (3 * m - 1) ** k, 6**k)


def _log_bracket(m: int, k: int) -> float:
    # a**k - b**k = a**k * (1 - (b/a)**k) with b/a = 1 - 1/(3m)
    return k * math.log(m / 2) + math.log(-math.expm1(k * math.log1p(-1.0 / (3 * m))))


def _use_exact(m: int, d: int) -> bool:
    return 2 * d * math.log2(6 * m) <= _EXACT_BITS


def _logsumexp(logs: list[float]) -> float:
    top = max(logs)
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))


@dataclass(frozen=True)
class ExpectationResult:
    """Expected squared discrepancy together with the parameters that produced it.

    ``exact`` holds the rational value when it was computed; otherwise the
    float ``value`` came from log space (relative accuracy around 1e-13, and
    it may underflow to 0 while ``log_value`` stays finite).
    """

    m: int
    d: int
    kind: Kind
    value: float
    log_value: float
    exact: Fraction | None = None
    s: SubsetMask | None = None

    @property
    def correctly_rounded(self) -> bool:
        return self.exact is not None


def expected_l2_squared_exact(m: int, d: int) -> Fraction:
    _check_md(m, d)
    return _bracket(m, d) / m ** (2 * d)


def expected_projected_l2_squared_exact(m: int, d: int, s) -> Fraction:
    _check_md(m, d)
    k = _subset_size(s, d)
    return _bracket(m, k) / m ** (d + k)


def expected_hickernell_squared_exact(m: int, d: int) -> Fraction:
    _check_md(m, d)
    return sum(
        (math.comb(d, j) * _bracket(m, j) / m ** (d + j) for j in range(1, d + 1)),
        Fraction(0),
    )


def _l2_log(m, d):
    return _log_bracket(m, d) - 2 * d * math.log(m)


def _projected_log(m, d, k):
    return _log_bracket(m, k) - (d + k) * math.log(m)


def _hickernell_log(m, d):
    return _logsumexp(
        [math.log(math.comb(d, j)) + _projected_log(m, d, j) for j in range(1, d + 1)]
    )


def expected_l2_squared(m: int, d: int) -> float:
    """Expected squared L2-discrepancy of a jittered sample with ``m**d`` points."""
    return expectation(Kind.L2, m, d).value


def expected_l2_squared_d2(m: int) -> float:
    """Planar case, ``(6m - 1) / (36 m**4)``."""
    _check_md(m, 2)
    return (6 * m - 1) / (36 * m**4)


def expected_projected_l2_squared(m: int, d: int, s) -> float:
    """Expected squared L2-discrepancy of the projection onto ``s``.

    ``s`` is a :class:`SubsetMask` or just its size; only ``|s|`` matters.
    """
    return expectation(Kind.PROJECTED_L2, m, d, s).value


def expected_hickernell_squared(m: int, d: int) -> float:
    return expectation(Kind.HICKERNELL_L2, m, d).value


def expectation(kind, m: int, d: int, s=None) -> ExpectationResult:
    kind = Kind(kind)
    _check_md(m, d)
    mask = s if isinstance(s, SubsetMask) else None
    k = _subset_size(s, d) if kind is Kind.PROJECTED_L2 else d

    if _use_exact(m, d):
        if kind is Kind.L2:
            exact = expected_l2_squared_exact(m, d)
        elif kind is Kind.PROJECTED_L2:
            exact = expected_projected_l2_squared_exact(m, d, k)
        else:
            exact = expected_hickernell_squared_exact(m, d)
        log_value = math.log(exact.numerator) - math.log(exact.denominator)
        return ExpectationResult(m, d, kind, float(exact), log_value, exact, mask)

    if kind is Kind.L2:
        log_value = _l2_log(m, d)
    elif kind is Kind.PROJECTED_L2:
        log_value = _projected_log(m, d, k)
    else:
        log_value = _hickernell_log(m, d)
    return ExpectationResult(m, d, kind, math.exp(log_value), log_value, None, mask)


def expected_l2_squared_binomial(m: int, d: int, *, exact: bool = False):
    """Expanded form ``m**(-2d) sum_k C(d,k) ((m-1)/2)**k [2**(k-d) - 3**(k-d)]``.

    With ``exact=True`` the sum is carried out over rationals; otherwise each
    term is a float and the terms are summed with ``math.fsum``.
    """
    _check_md(m, d)
    if exact:
        half = Fraction(m - 1, 2)
        total = sum(
            (
                math.comb(d, k) * half**k * (Fraction(1, 2 ** (d - k)) - Fraction(1, 3 ** (d - k)))
                for k in range(d + 1)
            ),
            Fraction(0),
        )
        return total / m ** (2 * d)
    half = (m - 1) / 2
    terms = [
        math.comb(d, k) * half**k * (0.5 ** (d - k) - 3.0 ** (k - d)) for k in range(d + 1)
    ]
    return math.fsum(terms) / m ** (2 * d)


class Envelope(NamedTuple):
    lower: float
    order_exponent: float


def asymptotic_envelope_l2(m: int, d: int) -> Envelope:
    """Explicit lower bound on the expected squared L2-discrepancy and its order.

    ``lower`` keeps only the ``k = d-1`` term of the expanded sum,
    ``m**(-2d) * d/6 * ((m-1)/2)**(d-1)``. ``order_exponent`` is the exponent
    of ``N = m**d`` in the rate of the (unsquared) expected L2-discrepancy,
    ``-(1/2 + 1/(2d))``.
    """
    _check_md(m, d)
    if m < 2:
        raise ParameterError("the asymptotic envelope needs m >= 2")
    lower = d / 6 * ((m - 1) / 2) ** (d - 1) / m ** (2 * d)
    return Envelope(lower, -(0.5 + 0.5 / d))
