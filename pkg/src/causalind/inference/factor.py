from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..netcore import BeliefNetwork
from . import _kernels


@dataclass(frozen=True, eq=False)
class Factor:
    """Non-negative dense table over ``scope``; ``values.shape`` follows scope order."""

    scope: tuple[str, ...]
    values: np.ndarray

    @property
    def size(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_table(cls, net: BeliefNetwork, name: str) -> "Factor":
        return cls(net.parents(name) + (name,), net.cpt_array(name))

    def reduce(self, evidence: Mapping[str, int]) -> "Factor":
        """Slice observed variables out of the scope."""
        if not any(v in evidence for v in self.scope):
            return self
        index = tuple(evidence.get(v, slice(None)) for v in self.scope)
        scope = tuple(v for v in self.scope if v not in evidence)
        # np.array keeps a fully sliced table 0-d; ascontiguousarray would promote it to (1,)
        return Factor(scope, np.array(self.values[index], dtype=np.float64))


def sum_product(factors: Sequence[Factor], eliminate: str | None, cards: Mapping[str, int]) -> tuple[Factor, int, int]:
    """Multiply ``factors`` and sum out ``eliminate`` (None keeps every variable).

    Returns the new factor, the multiply-add count and the size of the
    product table.  Each product entry costs one operation per input
    factor: k-1 multiplies and one accumulate.
    """
    union: list[str] = []
    for f in factors:
        for v in f.scope:
            if v not in union:
                union.append(v)
    pos = {v: i for i, v in enumerate(union)}
    ucards = [cards[v] for v in union]
    keep = [pos[v] for v in union if v != eliminate]
    values = _kernels.sum_product(
        [f.values for f in factors], [[pos[v] for v in f.scope] for f in factors], ucards, keep
    )
    product_size = int(np.prod(ucards, dtype=np.int64))
    scope = tuple(v for v in union if v != eliminate)
    return Factor(scope, np.asarray(values, dtype=np.float64)), product_size * len(factors), product_size
