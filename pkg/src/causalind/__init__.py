"""Causal-independence belief networks with instrumented exact inference."""

from .netcore import (
    BeliefNetwork,
    ConditionalTable,
    ProblemCycles,
    ValidationReport,
    Variable,
    d_separated,
    has_problem_cycles,
    moral_graph,
    topological_order,
    validate,
)
from .models import (
    NoisyAdderSpec,
    NoisyOrSpec,
    apply_permutation,
    build_atemporal_noisy_adder,
    build_atemporal_noisy_or,
    build_explicit_temporal_adder,
    build_temporal_noisy_adder,
    build_temporal_noisy_or,
    reorder_causes,
)
from .inference import CostReport, Distribution, case_series, eliminate, enumerate_posterior, min_fill_ordering

__version__ = "0.1.0"

__all__ = [
    "BeliefNetwork",
    "ConditionalTable",
    "CostReport",
    "Distribution",
    "NoisyAdderSpec",
    "NoisyOrSpec",
    "ProblemCycles",
    "ValidationReport",
    "Variable",
    "apply_permutation",
    "build_atemporal_noisy_adder",
    "build_atemporal_noisy_or",
    "build_explicit_temporal_adder",
    "build_temporal_noisy_adder",
    "build_temporal_noisy_or",
    "case_series",
    "d_separated",
    "eliminate",
    "enumerate_posterior",
    "has_problem_cycles",
    "min_fill_ordering",
    "moral_graph",
    "reorder_causes",
    "topological_order",
    "validate",
]
