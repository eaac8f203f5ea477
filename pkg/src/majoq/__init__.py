"""Majorization analysis of quantum algorithm trajectories."""

__version__ = "0.1.0"

from .majorization import (  # noqa: E402
    CumulantVector,
    DimensionError,
    MajorizationVerdict,
    ProbDist,
    Relation,
    compare,
    doubly_stochastic_witness,
    natural_majorization_check,
    sorted_cumulants,
)
from .trajectory import detect_cycle, step_verdicts  # noqa: E402

__all__ = [
    "CumulantVector",
    "DimensionError",
    "MajorizationVerdict",
    "ProbDist",
    "Relation",
    "compare",
    "detect_cycle",
    "doubly_stochastic_witness",
    "natural_majorization_check",
    "sorted_cumulants",
    "step_verdicts",
    "__version__",
]
