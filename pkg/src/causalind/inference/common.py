from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import UnknownVariableError
from ..netcore import BeliefNetwork

Evidence = Mapping[str, str]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Posterior over one variable; ``evidence_probability`` is the normaliser."""

    variable: str
    states: tuple[str, ...]
    probs: np.ndarray
    evidence_probability: float = 1.0

    def __getitem__(self, state: str) -> float:
        return float(self.probs[self.states.index(str(state))])

    def as_dict(self) -> dict[str, float]:
        return {s: float(p) for s, p in zip(self.states, self.probs)}


@dataclass(frozen=True)
class CostReport:
    multiply_add_count: int
    max_factor_entries: int
    elimination_order: tuple[str, ...]


def evidence_indices(net: BeliefNetwork, evidence: Evidence | None) -> dict[str, int]:
    """Map evidence labels to state indices, checking names and states."""
    out = {}
    for name, state in (evidence or {}).items():
        out[name] = net.var(name).index(state)
    return out


def check_query(net: BeliefNetwork, query: str) -> None:
    if query not in net.rank:
        raise UnknownVariableError(f"unknown variable {query!r}")
