"""Jittered sampling in the unit cube and exact L2-type discrepancies."""

__version__ = "0.1.0"

from .discrepancy import (
    DiscrepancyValue,
    Kind,
    hickernell_l2_squared,
    projected_l2_squared,
    warnock_l2_squared,
)
from .errors import JitterDiscError, ParameterError, PointSetParseError, ResourceLimitError
from .expectation import (
    ExpectationResult,
    asymptotic_envelope_l2,
    expected_hickernell_squared,
    expected_l2_squared,
    expected_l2_squared_d2,
    expected_projected_l2_squared,
)
from .oracle import (
    EstimateWithCI,
    expected_l2_squared_by_box_sum,
    l2_squared_by_cell_decomposition,
    mc_expected_discrepancy,
    q_integral_per_region,
)
from .partition import PartitionSpec, SubsetMask, box_bounds, q, region_classify
from .sampler import PointSet, SeedSpec, jittered_sample, project, uniform_sample

__all__ = [
    "DiscrepancyValue",
    "EstimateWithCI",
    "ExpectationResult",
    "JitterDiscError",
    "Kind",
    "ParameterError",
    "PartitionSpec",
    "PointSet",
    "PointSetParseError",
    "ResourceLimitError",
    "SeedSpec",
    "SubsetMask",
    "asymptotic_envelope_l2",
    "box_bounds",
    "expected_hickernell_squared",
    "expected_l2_squared",
    "expected_l2_squared_by_box_sum",
    "expected_l2_squared_d2",
    "expected_projected_l2_squared",
    "hickernell_l2_squared",
    "jittered_sample",
    "l2_squared_by_cell_decomposition",
    "mc_expected_discrepancy",
    "project",
    "projected_l2_squared",
    "q",
    "q_integral_per_region",
    "region_classify",
    "uniform_sample",
]
