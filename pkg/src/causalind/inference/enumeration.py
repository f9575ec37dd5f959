"""Brute-force posteriors from the full joint table.

Deliberately shares no code with variable elimination: the joint is built
by broadcasting every conditional table over one array whose axes follow
declaration order.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from ..errors import ImpossibleEvidenceError, JointTooLargeError
from ..netcore import BeliefNetwork
from .common import Distribution, Evidence, check_query, evidence_indices

DEFAULT_CAP = 2**22


def joint_size(net: BeliefNetwork) -> int:
    size = 1
    for v in net.variables:
        size *= v.card
    return size


class Enumerator:
    """Holds one network's joint table so repeated queries skip rebuilding it."""

    def __init__(self, net: BeliefNetwork, cap: int = DEFAULT_CAP):
        net.require_valid()
        size = joint_size(net)
        if size > cap:
            raise JointTooLargeError(f"joint too large: {size} entries exceeds cap {cap}")
        self.net = net

    @cached_property
    def joint(self) -> np.ndarray:
        net = self.net
        axis = net.rank
        shape = [v.card for v in net.variables]
        joint = np.ones(shape)
        for name in net.names:
            cpt = net.cpt_array(name)
            axes = [axis[p] for p in net.parents(name)] + [axis[name]]
            order = np.argsort(axes)
            bshape = [1] * len(shape)
            for a in axes:
                bshape[a] = shape[a]
            joint *= np.transpose(cpt, order).reshape(bshape)
        return joint

    def posterior(self, query: str, evidence: Evidence | None = None) -> Distribution:
        net = self.net
        check_query(net, query)
        ev = evidence_indices(net, evidence)
        index = tuple(ev.get(n, slice(None)) for n in net.names)
        sliced = self.joint[index]
        free = [n for n in net.names if n not in ev]
        var = net.var(query)
        if query in ev:
            z = float(sliced.sum())
            probs = np.zeros(var.card)
            probs[ev[query]] = 1.0
        else:
            q_axis = free.index(query)
            other = tuple(a for a in range(len(free)) if a != q_axis)
            unnorm = sliced.sum(axis=other) if other else sliced
            z = float(unnorm.sum())
            probs = unnorm / z if z > 0 else unnorm
        if z <= 0.0:
            raise ImpossibleEvidenceError()
        return Distribution(query, var.states, np.asarray(probs, dtype=np.float64), z)

    def probability(self, assignment: Evidence) -> float:
        ev = evidence_indices(self.net, assignment)
        index = tuple(ev.get(n, slice(None)) for n in self.net.names)
        return float(self.joint[index].sum())


def enumerate_posterior(
    net: BeliefNetwork, query: str, evidence: Evidence | None = None, cap: int = DEFAULT_CAP
) -> Distribution:
    return Enumerator(net, cap).posterior(query, evidence)
