import math
from fractions import Fraction

import pytest

from jitterdisc.discrepancy import Kind
from jitterdisc.errors import ParameterError
from jitterdisc.expectation import (
    _hickernell_log,
    _l2_log,
    asymptotic_envelope_l2,
    expectation,
    expected_hickernell_squared,
    expected_hickernell_squared_exact,
    expected_l2_squared,
    expected_l2_squared_binomial,
    expected_l2_squared_d2,
    expected_l2_squared_exact,
    expected_projected_l2_squared,
    expected_projected_l2_squared_exact,
)
from jitterdisc.partition import SubsetMask, all_subsets


def naive_closed_form(m, d, k=None):
    """Direct substitution into the bracket with Fractions, no rewriting."""
    k = d if k is None else k
    half = Fraction(m - 1, 2)
    bracket = (half + Fraction(1, 2)) ** k - (half + Fraction(1, 3)) ** k
    return bracket / m ** (d + k)


@pytest.mark.parametrize("m", range(1, 11))
def test_one_dimension(m):
    assert expected_l2_squared_exact(m, 1) == Fraction(1, 6 * m * m)
    assert expected_l2_squared(m, 1) == 1 / (6 * m * m)


def test_frozen_values():
    assert expected_l2_squared_exact(2, 2) == Fraction(11, 576)
    assert expected_l2_squared_exact(2, 3) == Fraction(91, 13824)
    assert expected_l2_squared(2, 3) == pytest.approx(6.5827e-3, rel=1e-4)
    assert expected_projected_l2_squared_exact(2, 2, 1) == Fraction(1, 48)
    assert expected_projected_l2_squared_exact(3, 3, 2) == Fraction(17, 243 * 36)
    assert expected_projected_l2_squared(3, 3, 2) == pytest.approx(1.9433e-3, rel=1e-4)
    assert expected_hickernell_squared_exact(2, 2) == Fraction(35, 576)
    assert expected_l2_squared_exact(1, 3) == Fraction(19, 216)


@pytest.mark.parametrize("m, value", [(2, Fraction(11, 576)), (3, Fraction(17, 2916)), (1, Fraction(5, 36))])
def test_planar_formula(m, value):
    assert expected_l2_squared_d2(m) == float(value)
    assert expected_l2_squared_exact(m, 2) == value


@pytest.mark.parametrize("m", range(1, 65))
def test_planar_agreement(m):
    assert expected_l2_squared(m, 2) == pytest.approx(expected_l2_squared_d2(m), rel=1e-15)
    assert expected_l2_squared_exact(m, 2) == Fraction(6 * m - 1, 36 * m**4)


@pytest.mark.parametrize("m", range(1, 11))
@pytest.mark.parametrize("d", range(1, 9))
def test_binomial_expansion_identity(m, d):
    exact = expected_l2_squared_exact(m, d)
    assert expected_l2_squared_binomial(m, d, exact=True) == exact
    assert exact == naive_closed_form(m, d)
    assert expected_l2_squared_binomial(m, d) == pytest.approx(float(exact), rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 7, 10])
@pytest.mark.parametrize("d", range(1, 8))
def test_subset_sum_identity(m, d):
    by_subsets = sum(
        (expected_projected_l2_squared_exact(m, d, s) for s in all_subsets(d)), Fraction(0)
    )
    assert by_subsets == expected_hickernell_squared_exact(m, d)
    floats = math.fsum(expected_projected_l2_squared(m, d, s) for s in all_subsets(d))
    assert floats == pytest.approx(expected_hickernell_squared(m, d), rel=1e-13)


def test_hickernell_two_by_three_term_by_term():
    terms = [
        Fraction(1, 2 ** (3 + j)) * math.comb(3, j) * (1 - Fraction(5, 6) ** j) for j in (1, 2, 3)
    ]
    assert expected_hickernell_squared_exact(2, 3) == sum(terms)
    assert expected_hickernell_squared_exact(2, 3) == Fraction(919, 13824)


@pytest.mark.parametrize("m", range(1, 8))
def test_hickernell_in_one_dimension(m):
    assert expected_hickernell_squared(m, 1) == expected_l2_squared(m, 1)


def test_projected_depends_only_on_size():
    a = expected_projected_l2_squared(4, 5, SubsetMask.from_axes([1, 2], 5))
    b = expected_projected_l2_squared(4, 5, SubsetMask.from_axes([3, 5], 5))
    assert a == b == expected_projected_l2_squared(4, 5, 2)
    assert expected_projected_l2_squared(4, 5, SubsetMask.full(5)) == expected_l2_squared(4, 5)


@pytest.mark.parametrize("d", range(1, 9))
def test_strictly_decreasing_in_m(d):
    values = [expected_l2_squared(m, d) for m in range(1, 65)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("m", [2, 3, 5, 10, 33])
@pytest.mark.parametrize("d", range(1, 9))
def test_lower_envelope(m, d):
    env = asymptotic_envelope_l2(m, d)
    assert env.lower <= expected_l2_squared(m, d)
    assert Fraction(d, 6) * Fraction(m - 1, 2) ** (d - 1) / m ** (2 * d) <= expected_l2_squared_exact(m, d)


def test_envelope_examples():
    env = asymptotic_envelope_l2(2, 2)
    assert env.lower == pytest.approx(1 / 96, rel=1e-15)
    assert env.lower <= 11 / 576
    assert asymptotic_envelope_l2(10, 3).lower <= expected_l2_squared(10, 3)
    assert env.order_exponent == -0.75
    assert asymptotic_envelope_l2(4, 1).order_exponent == -1.0
    with pytest.raises(ParameterError):
        asymptotic_envelope_l2(1, 2)


@pytest.mark.parametrize("m, d", [(2, 5), (7, 12), (100, 30), (3, 200)])
def test_log_space_path_matches_exact(m, d):
    exact = expected_l2_squared_exact(m, d)
    log_exact = math.log(exact.numerator) - math.log(exact.denominator)
    assert _l2_log(m, d) == pytest.approx(log_exact, rel=1e-13, abs=1e-12)
    hick = expected_hickernell_squared_exact(m, d)
    assert _hickernell_log(m, d) == pytest.approx(
        math.log(hick.numerator) - math.log(hick.denominator), abs=1e-12
    )


def test_huge_dimension_falls_back_to_log_space():
    res = expectation(Kind.L2, 10, 5000)
    assert not res.correctly_rounded
    assert res.value == 0.0  # underflows
    assert math.isfinite(res.log_value) and res.log_value < -700
    small = expectation(Kind.L2, 3, 4)
    assert small.correctly_rounded and small.exact == expected_l2_squared_exact(3, 4)


def test_expectation_result_fields():
    s = SubsetMask(0b011, 3)
    res = expectation("projected", 3, 3, s)
    assert (res.m, res.d, res.kind, res.s) == (3, 3, Kind.PROJECTED_L2, s)
    assert res.value > 0


def test_parameter_errors():
    with pytest.raises(ParameterError):
        expected_l2_squared(0, 2)
    with pytest.raises(ParameterError):
        expected_l2_squared(2, 0)
    with pytest.raises(ParameterError):
        expected_projected_l2_squared(2, 3, None)
    with pytest.raises(ParameterError):
        expected_projected_l2_squared(2, 3, 4)
    with pytest.raises(ParameterError):
        expected_projected_l2_squared(2, 3, SubsetMask(1, 2))
