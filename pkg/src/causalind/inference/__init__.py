from ._kernels import HAVE_NUMBA, current_backend, set_backend, use_backend
from .common import CostReport, Distribution, Evidence
from .elimination import (
    CaseSeriesResult,
    case_series,
    eliminate,
    fill_in_trace,
    min_fill_ordering,
)
from .enumeration import DEFAULT_CAP, Enumerator, enumerate_posterior, joint_size
from .factor import Factor, sum_product

__all__ = [
    "HAVE_NUMBA",
    "CaseSeriesResult",
    "CostReport",
    "DEFAULT_CAP",
    "Distribution",
    "Enumerator",
    "Evidence",
    "Factor",
    "case_series",
    "current_backend",
    "eliminate",
    "enumerate_posterior",
    "fill_in_trace",
    "joint_size",
    "min_fill_ordering",
    "set_backend",
    "sum_product",
    "use_backend",
]
