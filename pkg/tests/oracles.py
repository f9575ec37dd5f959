"""Independent reference computations used by the test-suite.

Nothing here calls the elimination engine or the network builders'
internals: the adder oracles work straight from spec parameters, and the
d-separation oracle enumerates simple paths.
"""

from __future__ import annotations

import itertools

import numpy as np

from causalind.netcore import BeliefNetwork, ConditionalTable, Variable, ancestors


def convolve_effect(spec, active=None):
    """Distribution of the adder effect over ``spec.effect_range()``.

    ``active`` maps cause index -> bool for observed causes; unobserved
    causes are mixed by their priors.  Saturation is applied at the end,
    which equals stepwise saturation for non-negative contributions.
    """
    active = active or {}
    l = spec.l
    dist = np.array(spec.leak, dtype=float)  # over -l..l
    lo = -l
    for j in range(1, spec.n + 1):
        q = np.array(spec.q[j - 1], dtype=float)
        point = np.zeros(2 * l + 1)
        point[l] = 1.0
        if j in active:
            step = q if active[j] else point
        else:
            p = spec.cause_priors[j - 1]
            step = (1 - p) * point + p * q
        dist = np.convolve(dist, step)
        lo -= l
    values = np.arange(lo, lo + dist.size)
    e_lo, e_hi = spec.effect_range()
    out = np.zeros(e_hi - e_lo + 1)
    for v, p in zip(values, dist):
        v = min(v, l) if spec.nonneg else v
        if p:
            out[v - e_lo] += p
    return out


def adder_cause_posterior(spec, query, evidence_causes, effect_value):
    """p(c_query = true | observed causes, effect = effect_value) by cause enumeration."""
    free = [j for j in range(1, spec.n + 1) if j not in evidence_causes]
    e_lo, _ = spec.effect_range()
    num = den = 0.0
    for bits in itertools.product((False, True), repeat=len(free)):
        config = dict(evidence_causes)
        config.update(zip(free, bits))
        w = 1.0
        for j, on in zip(free, bits):
            p = spec.cause_priors[j - 1]
            w *= p if on else 1 - p
        like = convolve_effect(spec, config)[effect_value - e_lo]
        den += w * like
        if config[query]:
            num += w * like
    return num / den, den


def noisy_or_closed_form(spec, on):
    off = 1.0 - spec.leak
    for j in on:
        off *= 1.0 - spec.q[j - 1]
    return 1.0 - off


def random_network(rng, n_nodes, max_card=3, edge_prob=0.4, max_parents=3):
    names = [f"x{k}" for k in range(n_nodes)]
    cards = [int(rng.integers(2, max_card + 1)) for _ in names]
    variables = [Variable(nm, tuple(f"s{i}" for i in range(c))) for nm, c in zip(names, cards)]
    tables = []
    for k, nm in enumerate(names):
        cands = [i for i in range(k) if rng.random() < edge_prob]
        if len(cands) > max_parents:
            cands = sorted(rng.choice(cands, max_parents, replace=False).tolist())
        parents = tuple(names[i] for i in cands)
        rows = int(np.prod([cards[i] for i in cands])) if cands else 1
        table = rng.dirichlet(np.ones(cards[k]), size=rows)
        tables.append(ConditionalTable(nm, parents, table))
    # shuffle declaration order so topological order is not trivial
    perm = rng.permutation(n_nodes)
    return BeliefNetwork([variables[i] for i in perm], [tables[i] for i in perm])


def dsep_by_paths(net: BeliefNetwork, x, y, z) -> bool:
    """d-separation by enumerating every simple undirected path."""
    x, y, z = set(x), set(y), set(z)
    anc_z = ancestors(net, z)
    adj = {n: set(net.parents(n)) | set(net.children(n)) for n in net.names}

    def is_edge(a, b):
        return a in net.parents(b)

    def active(path):
        for a, b, c in zip(path, path[1:], path[2:]):
            collider = is_edge(a, b) and is_edge(c, b)
            if collider and b not in anc_z:
                return False
            if not collider and b in z:
                return False
        return True

    def walk(path):
        last = path[-1]
        if last in y:
            return active(path)
        for nb in adj[last]:
            if nb not in path and nb not in x:
                if walk(path + [nb]):
                    return True
        return False

    return not any(walk([s]) for s in x)


def conditional_gap(joint_axes, joint, x, y, z):
    """max over z-assignments of |p(x,y|z) - p(x|z) p(y|z)| from a full joint."""
    names = list(joint_axes)
    keep = x + y + z
    drop = tuple(i for i, n in enumerate(names) if n not in keep)
    marg = joint.sum(axis=drop) if drop else joint
    order = [n for n in names if n in keep]
    marg = np.transpose(marg, [order.index(n) for n in keep])
    sx = marg.shape[: len(x)]
    sy = marg.shape[len(x): len(x) + len(y)]
    sz = marg.shape[len(x) + len(y):]
    m = marg.reshape(int(np.prod(sx)), int(np.prod(sy)), int(np.prod(sz)) if sz else 1)
    gap = 0.0
    for k in range(m.shape[2]):
        block = m[:, :, k]
        pz = block.sum()
        if pz <= 1e-300:
            continue
        pxy = block / pz
        px = pxy.sum(axis=1, keepdims=True)
        py = pxy.sum(axis=0, keepdims=True)
        gap = max(gap, float(np.abs(pxy - px * py).max()))
    return gap
