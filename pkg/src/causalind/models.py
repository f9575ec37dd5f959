"""Builders for noisy-OR and noisy-adder causal-independence networks.

Every family comes in two encodings.  The atemporal one routes each cause
c_j through an unobservable contribution i_j into a deterministic combiner
e.  The temporal one is a chain e_0 -> e_1 -> ... -> e_n where step j
absorbs the (possibly trivial) transition of cause c_j; e_0 carries the
leak.  Cause state "false" is the distinguished (off) state throughout.

Variable names are fixed: causes ``c1..cn``, contributions ``i0..in``
(``i0`` and its clamped cause ``c0`` carry the leak atemporally), chain
nodes ``e0..en``, and ``e`` for the atemporal effect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .errors import SpecError
from .netcore import BeliefNetwork, ConditionalTable, boolean, integer_range

TOL = 1e-9


def _prob(x, what):
    x = float(x)
    if not 0.0 <= x <= 1.0 or not np.isfinite(x):
        raise SpecError(f"{what} must be in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class NoisyOrSpec:
    q: tuple[float, ...]
    leak: float
    cause_priors: tuple[float, ...]

    def __post_init__(self):
        q = tuple(_prob(v, f"q_{j + 1}") for j, v in enumerate(self.q))
        priors = tuple(_prob(v, f"prior of c{j + 1}") for j, v in enumerate(self.cause_priors))
        if not q:
            raise SpecError("a noisy-OR spec needs at least one cause")
        if len(priors) != len(q):
            raise SpecError(f"{len(q)} activation probabilities but {len(priors)} cause priors")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "cause_priors", priors)
        object.__setattr__(self, "leak", _prob(self.leak, "leak"))

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True)
class NoisyAdderSpec:
    """Noisy adder parameters.

    Row j of ``q`` (and ``leak``) is a distribution over the contribution
    values ``-l..+l``.  With ``nonneg`` set, contributions are restricted to
    ``0..l`` and the effect saturates at ``l`` so every e_j stays in ``0..l``.
    """

    l: int
    q: tuple[tuple[float, ...], ...]
    leak: tuple[float, ...]
    cause_priors: tuple[float, ...]
    nonneg: bool = False

    def __post_init__(self):
        l = self.l
        if isinstance(l, bool) or int(l) != l or l < 1:
            raise SpecError(f"l must be an integer >= 1, got {l!r}")
        l = int(l)
        width = 2 * l + 1
        rows = tuple(self._row(r, width, f"q row {j + 1}") for j, r in enumerate(self.q))
        if not rows:
            raise SpecError("a noisy-adder spec needs at least one cause")
        leak = self._row(self.leak, width, "leak")
        priors = tuple(_prob(v, f"prior of c{j + 1}") for j, v in enumerate(self.cause_priors))
        if len(priors) != len(rows):
            raise SpecError(f"{len(rows)} q rows but {len(priors)} cause priors")
        nonneg = bool(self.nonneg)
        if nonneg:
            for what, r in [("leak", leak)] + [(f"q row {j + 1}", r) for j, r in enumerate(rows)]:
                if any(v != 0.0 for v in r[:l]):
                    raise SpecError(f"{what} puts mass on negative values in nonneg mode")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "q", rows)
        object.__setattr__(self, "leak", leak)
        object.__setattr__(self, "cause_priors", priors)
        object.__setattr__(self, "nonneg", nonneg)

    @staticmethod
    def _row(row, width, what):
        row = tuple(_prob(v, f"{what} entry") for v in row)
        if len(row) != width:
            raise SpecError(f"{what} has {len(row)} entries, expected {width}")
        if abs(sum(row) - 1.0) > TOL:
            raise SpecError(f"{what} sums to {sum(row):.12g}")
        return row

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def contribution_values(self) -> range:
        return range(0 if self.nonneg else -self.l, self.l + 1)

    def row(self, j: int) -> np.ndarray:
        """Contribution distribution of cause j (0 = leak) over contribution_values."""
        r = self.leak if j == 0 else self.q[j - 1]
        return np.array(r[self.l:] if self.nonneg else r)

    def chain_range(self, j: int) -> tuple[int, int]:
        if self.nonneg:
            return 0, self.l
        return -(j + 1) * self.l, (j + 1) * self.l

    def effect_range(self) -> tuple[int, int]:
        return self.chain_range(self.n)

    def combine(self, total: int) -> int:
        return min(total, self.l) if self.nonneg else total


Spec = Union[NoisyOrSpec, NoisyAdderSpec]


def _table(child, parents, rows):
    return ConditionalTable(child, tuple(parents), np.asarray(rows, dtype=np.float64).ravel())


def _prior(name, p_true):
    return _table(name, (), [1.0 - p_true, p_true])


def _annotate(spec, encoding, effect, causes):
    family = "noisy-or" if isinstance(spec, NoisyOrSpec) else "noisy-adder"
    return {"family": family, "encoding": encoding, "effect": effect, "causes": list(causes)}


def build_naive_noisy_or(spec: NoisyOrSpec) -> BeliefNetwork:
    """Causes wired straight into e with the full 2^n-row noisy-OR table."""
    n = spec.n
    causes = [f"c{j}" for j in range(1, n + 1)]
    rows = []
    for states in itertools.product((0, 1), repeat=n):
        off = 1.0 - spec.leak
        for s, qj in zip(states, spec.q):
            if s:
                off *= 1.0 - qj
        rows.append([off, 1.0 - off])
    variables = [boolean(c) for c in causes] + [boolean("e")]
    tables = [_prior(c, p) for c, p in zip(causes, spec.cause_priors)]
    tables.append(_table("e", causes, rows))
    return BeliefNetwork(variables, tables, _annotate(spec, "naive", "e", causes))


def build_atemporal_noisy_or(spec: NoisyOrSpec) -> BeliefNetwork:
    n = spec.n
    variables = [boolean(f"c{j}") for j in range(n + 1)]
    variables += [boolean(f"i{j}") for j in range(n + 1)]
    variables.append(boolean("e"))
    tables = [_prior("c0", 1.0)]
    tables += [_prior(f"c{j}", spec.cause_priors[j - 1]) for j in range(1, n + 1)]
    for j, qj in enumerate((spec.leak,) + spec.q):
        tables.append(_table(f"i{j}", [f"c{j}"], [[1.0, 0.0], [1.0 - qj, qj]]))
    size = 2 ** (n + 1)
    rows = np.zeros((size, 2))
    rows[0, 0] = 1.0
    rows[1:, 1] = 1.0
    tables.append(_table("e", [f"i{j}" for j in range(n + 1)], rows))
    causes = [f"c{j}" for j in range(1, n + 1)]
    return BeliefNetwork(variables, tables, _annotate(spec, "atemporal", "e", causes))


def build_temporal_noisy_or(spec: NoisyOrSpec) -> BeliefNetwork:
    n = spec.n
    causes = [f"c{j}" for j in range(1, n + 1)]
    variables = [boolean(c) for c in causes] + [boolean(f"e{j}") for j in range(n + 1)]
    tables = [_prior(c, p) for c, p in zip(causes, spec.cause_priors)]
    tables.append(_prior("e0", spec.leak))
    for j, qj in enumerate(spec.q, start=1):
        # parents (e_{j-1}, c_j): FF, FT, TF, TT
        rows = [[1.0, 0.0], [1.0 - qj, qj], [0.0, 1.0], [0.0, 1.0]]
        tables.append(_table(f"e{j}", [f"e{j - 1}", f"c{j}"], rows))
    return BeliefNetwork(variables, tables, _annotate(spec, "temporal", f"e{n}", causes))


def _contribution_table(spec: NoisyAdderSpec, j: int) -> np.ndarray:
    vals = spec.contribution_values
    off = np.zeros(len(vals))
    off[vals.index(0)] = 1.0
    return np.stack([off, spec.row(j)])


def _sum_rows(spec: NoisyAdderSpec, parent_ranges, child_range) -> np.ndarray:
    """Deterministic rows of ``child = combine(sum(parents))``."""
    lo, hi = child_range
    grids = [np.arange(a, b + 1) for a, b in parent_ranges]
    totals = np.zeros([len(g) for g in grids], dtype=np.int64)
    for axis, g in enumerate(grids):
        shape = [1] * len(grids)
        shape[axis] = len(g)
        totals = totals + g.reshape(shape)
    totals = totals.ravel()
    if spec.nonneg:
        totals = np.minimum(totals, spec.l)
    rows = np.zeros((totals.size, hi - lo + 1))
    rows[np.arange(totals.size), totals - lo] = 1.0
    return rows


def _contribution_range(spec):
    vals = spec.contribution_values
    return vals[0], vals[-1]


def build_atemporal_noisy_adder(spec: NoisyAdderSpec) -> BeliefNetwork:
    n = spec.n
    lo_i, hi_i = _contribution_range(spec)
    e_lo, e_hi = (0, spec.l) if spec.nonneg else (-(n + 1) * spec.l, (n + 1) * spec.l)
    variables = [boolean(f"c{j}") for j in range(n + 1)]
    variables += [integer_range(f"i{j}", lo_i, hi_i) for j in range(n + 1)]
    variables.append(integer_range("e", e_lo, e_hi))
    tables = [_prior("c0", 1.0)]
    tables += [_prior(f"c{j}", spec.cause_priors[j - 1]) for j in range(1, n + 1)]
    for j in range(n + 1):
        tables.append(_table(f"i{j}", [f"c{j}"], _contribution_table(spec, j)))
    rows = _sum_rows(spec, [(lo_i, hi_i)] * (n + 1), (e_lo, e_hi))
    tables.append(_table("e", [f"i{j}" for j in range(n + 1)], rows))
    causes = [f"c{j}" for j in range(1, n + 1)]
    return BeliefNetwork(variables, tables, _annotate(spec, "atemporal", "e", causes))


def build_temporal_noisy_adder(spec: NoisyAdderSpec) -> BeliefNetwork:
    n = spec.n
    causes = [f"c{j}" for j in range(1, n + 1)]
    variables = [boolean(c) for c in causes]
    variables += [integer_range(f"e{j}", *spec.chain_range(j)) for j in range(n + 1)]
    tables = [_prior(c, p) for c, p in zip(causes, spec.cause_priors)]

    lo0, hi0 = spec.chain_range(0)
    leak = np.zeros(hi0 - lo0 + 1)
    for k, p in zip(spec.contribution_values, spec.row(0)):
        leak[k - lo0] += p
    tables.append(_table("e0", [], leak))

    vals = list(spec.contribution_values)
    for j in range(1, n + 1):
        plo, phi = spec.chain_range(j - 1)
        clo, chi = spec.chain_range(j)
        qj = spec.row(j)
        rows = np.zeros((phi - plo + 1, 2, chi - clo + 1))
        for m in range(plo, phi + 1):
            rows[m - plo, 0, spec.combine(m) - clo] = 1.0
            for k, p in zip(vals, qj):
                rows[m - plo, 1, spec.combine(m + k) - clo] += p
        np.clip(rows, 0.0, 1.0, out=rows)
        tables.append(_table(f"e{j}", [f"e{j - 1}", f"c{j}"], rows))
    return BeliefNetwork(variables, tables, _annotate(spec, "temporal", f"e{n}", causes))


def build_explicit_temporal_adder(spec: NoisyAdderSpec) -> BeliefNetwork:
    """Temporal adder with the contributions i_j reintroduced and each sum made explicit."""
    n = spec.n
    lo_i, hi_i = _contribution_range(spec)
    causes = [f"c{j}" for j in range(1, n + 1)]
    variables = [boolean(c) for c in causes]
    variables += [integer_range(f"i{j}", lo_i, hi_i) for j in range(1, n + 1)]
    variables += [integer_range(f"e{j}", *spec.chain_range(j)) for j in range(n + 1)]
    tables = [_prior(c, p) for c, p in zip(causes, spec.cause_priors)]
    for j in range(1, n + 1):
        tables.append(_table(f"i{j}", [f"c{j}"], _contribution_table(spec, j)))
    lo0, hi0 = spec.chain_range(0)
    leak = np.zeros(hi0 - lo0 + 1)
    for k, p in zip(spec.contribution_values, spec.row(0)):
        leak[k - lo0] += p
    tables.append(_table("e0", [], leak))
    for j in range(1, n + 1):
        rows = _sum_rows(spec, [spec.chain_range(j - 1), (lo_i, hi_i)], spec.chain_range(j))
        tables.append(_table(f"e{j}", [f"e{j - 1}", f"i{j}"], rows))
    return BeliefNetwork(variables, tables, _annotate(spec, "explicit", f"e{n}", causes))


def build_two_effect_temporal(spec_a: NoisyOrSpec, spec_b: NoisyOrSpec) -> BeliefNetwork:
    """Two temporal noisy-OR chains ``a0..an`` and ``b0..bn`` sharing causes ``c1..cn``.

    Cause priors come from ``spec_a``.
    """
    if spec_a.n != spec_b.n:
        raise SpecError("both effects need the same number of causes")
    n = spec_a.n
    causes = [f"c{j}" for j in range(1, n + 1)]
    variables = [boolean(c) for c in causes]
    tables = [_prior(c, p) for c, p in zip(causes, spec_a.cause_priors)]
    for tag, spec in (("a", spec_a), ("b", spec_b)):
        variables += [boolean(f"{tag}{j}") for j in range(n + 1)]
        tables.append(_prior(f"{tag}0", spec.leak))
        for j, qj in enumerate(spec.q, start=1):
            rows = [[1.0, 0.0], [1.0 - qj, qj], [0.0, 1.0], [0.0, 1.0]]
            tables.append(_table(f"{tag}{j}", [f"{tag}{j - 1}", f"c{j}"], rows))
    ann = {"family": "noisy-or", "encoding": "temporal-two-effect",
           "effect": f"a{n}", "effects": [f"a{n}", f"b{n}"], "causes": causes}
    return BeliefNetwork(variables, tables, ann)


BUILDERS = {
    ("noisy-or", "atemporal"): build_atemporal_noisy_or,
    ("noisy-or", "temporal"): build_temporal_noisy_or,
    ("noisy-or", "naive"): build_naive_noisy_or,
    ("noisy-adder", "atemporal"): build_atemporal_noisy_adder,
    ("noisy-adder", "temporal"): build_temporal_noisy_adder,
    ("noisy-adder", "explicit"): build_explicit_temporal_adder,
}


def family_of(spec: Spec) -> str:
    return "noisy-or" if isinstance(spec, NoisyOrSpec) else "noisy-adder"


def encodings_for(spec: Spec) -> list[str]:
    fam = family_of(spec)
    return [enc for (f, enc) in BUILDERS if f == fam]


def build(spec: Spec, encoding: str) -> BeliefNetwork:
    try:
        builder = BUILDERS[family_of(spec), encoding]
    except KeyError:
        raise SpecError(f"encoding {encoding!r} is not defined for the {family_of(spec)} family") from None
    return builder(spec)


def effect_extreme(net: BeliefNetwork) -> str:
    """Label of the effect's non-distinguished extreme state (its last state)."""
    return net.var(net.annotations["effect"]).states[-1]


def reorder_causes(spec: Spec, evidence_causes) -> list[int]:
    """Permutation (1-based original indices) moving evidence causes to the chain's end.

    Both groups keep their original relative order.
    """
    ev = set(evidence_causes)
    bad = sorted(j for j in ev if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or not 1 <= j <= spec.n)
    if bad:
        raise IndexError(f"cause index out of range 1..{spec.n}: {bad}")
    rest = [j for j in range(1, spec.n + 1) if j not in ev]
    return rest + sorted(ev)


def apply_permutation(spec: Spec, perm: Sequence[int]) -> Spec:
    """Spec whose k-th cause is the original cause ``perm[k]``."""
    perm = list(perm)
    if sorted(perm) != list(range(1, spec.n + 1)):
        raise SpecError(f"not a permutation of 1..{spec.n}: {perm}")
    idx = [p - 1 for p in perm]
    return replace(
        spec,
        q=tuple(spec.q[i] for i in idx),
        cause_priors=tuple(spec.cause_priors[i] for i in idx),
    )


def random_noisy_or_spec(rng: np.random.Generator, n: int) -> NoisyOrSpec:
    return NoisyOrSpec(
        q=tuple(rng.uniform(0.05, 0.95, n)),
        leak=float(rng.uniform(0.0, 0.3)),
        cause_priors=tuple(rng.uniform(0.1, 0.9, n)),
    )


def random_adder_spec(rng: np.random.Generator, n: int, l: int, nonneg: bool = False) -> NoisyAdderSpec:
    width = l + 1 if nonneg else 2 * l + 1
    pad = (0.0,) * l if nonneg else ()

    def row():
        r = rng.dirichlet(np.ones(width))
        return pad + tuple(r)

    return NoisyAdderSpec(
        l=l,
        q=tuple(row() for _ in range(n)),
        leak=row(),
        cause_priors=tuple(rng.uniform(0.1, 0.9, n)),
        nonneg=nonneg,
    )


def blood_disorder_fixture() -> NoisyAdderSpec:
    """Synthetic stand-in for the WBC / drug interaction model.

    Seven drug causes shift a white-blood-cell count index by -2..+2.  All
    numbers are invented for demonstration; none come from a real study.
    """
    return NoisyAdderSpec(
        l=2,
        q=(
            (0.05, 0.15, 0.60, 0.15, 0.05),
            (0.40, 0.35, 0.20, 0.05, 0.00),
            (0.00, 0.10, 0.70, 0.15, 0.05),
            (0.10, 0.20, 0.40, 0.20, 0.10),
            (0.00, 0.05, 0.50, 0.30, 0.15),
            (0.20, 0.30, 0.40, 0.10, 0.00),
            (0.00, 0.00, 0.30, 0.40, 0.30),
        ),
        leak=(0.05, 0.20, 0.50, 0.20, 0.05),
        cause_priors=(0.30, 0.15, 0.25, 0.40, 0.20, 0.10, 0.35),
    )
