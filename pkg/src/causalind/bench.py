"""Complexity sweeps: build a family at growing size, count elimination work, fit growth.

Growth is judged on operation counts, never on wall-clock time, so the
results are deterministic and identical across machines and kernels.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError
from .inference import CostReport, eliminate
from .models import (
    build_atemporal_noisy_adder,
    build_atemporal_noisy_or,
    build_temporal_noisy_adder,
    build_temporal_noisy_or,
    random_adder_spec,
    random_noisy_or_spec,
)

FAMILIES = ("noisy-or-temporal", "noisy-or-atemporal", "adder-temporal", "adder-atemporal", "adder-nonneg")
ATEMPORAL_MAX_N = 16
ATEMPORAL_MAX_ENTRIES = 2**24

# family -> (metric, growth model, band on the n axis)
_DEFAULTS = {
    "noisy-or-temporal": ("multiply_adds", "exponential", (1.8, 2.2)),
    "noisy-or-atemporal": ("max_factor_entries", "exponential", (1.8, 2.2)),
    "adder-temporal": ("multiply_adds", "polynomial", (2.5, 3.5)),
    "adder-atemporal": ("max_factor_entries", "exponential", None),
    "adder-nonneg": ("multiply_adds", "polynomial", (0.8, 1.3)),
}
_L_AXIS_BAND = (1.5, 2.5)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep.  ``axis`` picks what varies: ``n`` over ``n_values`` at fixed ``l``,
    or ``l`` over ``l_values`` at fixed ``n``.  Unset metric/growth/band take the
    family defaults.
    """

    family: str
    n_values: tuple[int, ...] = ()
    l: int = 2
    seed: int = 0
    axis: str = "n"
    l_values: tuple[int, ...] = ()
    n: int = 8
    metric: str | None = None
    growth: str | None = None
    band: tuple[float, float] | None = None
    query_cause: int = 1
    evidence: str = "effect-extreme"
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.axis not in ("n", "l"):
            raise ValueError("axis must be 'n' or 'l'")
        if self.axis == "l" and self.family.startswith("noisy-or"):
            raise ValueError("an l sweep needs an adder family")
        values = self.values
        if len(values) < 1 or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"{self.axis}_values must be non-empty and strictly increasing")
        if any(v < 1 for v in values):
            raise ValueError(f"{self.axis}_values must be >= 1")
        if self.evidence not in ("effect-extreme", "none"):
            raise ValueError("evidence pattern must be 'effect-extreme' or 'none'")
        if self.metric not in (None, "multiply_adds", "max_factor_entries"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.growth not in (None, "polynomial", "exponential"):
            raise ValueError(f"unknown growth model {self.growth!r}")

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(self.n_values if self.axis == "n" else self.l_values)

    def resolved(self) -> tuple[str, str, tuple[float, float] | None]:
        metric, growth, band = _DEFAULTS[self.family]
        if self.axis == "l":
            growth, band = "polynomial", _L_AXIS_BAND
        if self.family == "adder-atemporal" and band is None:
            width = 2 * self.l + 1
            band = (0.9 * width, 1.1 * width)
        return self.metric or metric, self.growth or growth, tuple(self.band) if self.band else band


@dataclass(frozen=True)
class SweepRow:
    n: int
    l: int | None
    cost: CostReport

    def metric(self, name: str) -> int:
        if name == "multiply_adds":
            return self.cost.multiply_add_count
        return self.cost.max_factor_entries


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple[SweepRow, ...]
    metric: str
    growth: str
    descriptor: float | None
    band: tuple[float, float] | None = None
    passed: bool | None = field(default=None)

    def points(self) -> list[tuple[int, int]]:
        key = "n" if self.config.axis == "n" else "l"
        return [(getattr(r, key), r.metric(self.metric)) for r in self.rows]


def fit_growth(points, model: str) -> float:
    """Log-log least-squares slope (polynomial) or mean successive ratio (exponential)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("fit_growth needs at least 3 points")
    if any(y <= 0 for _, y in pts) or any(x <= 0 for x, _ in pts):
        raise ValueError("fit_growth needs positive sizes and costs")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if model == "polynomial":
        lx, ly = np.log(xs), np.log(ys)
        lx_c = lx - lx.mean()
        return float((lx_c * (ly - ly.mean())).sum() / (lx_c**2).sum())
    if model == "exponential":
        return float(np.mean(ys[1:] / ys[:-1]))
    raise ValueError(f"unknown growth model {model!r}")


def _build(config: SweepConfig, n: int, l: int):
    rng = np.random.default_rng([config.seed, n, l])
    fam = config.family
    if fam.endswith("atemporal"):
        if n > ATEMPORAL_MAX_N:
            raise CapExceededError(f"atemporal sweeps are capped at n <= {ATEMPORAL_MAX_N}, got n={n}")
        width = 2 if fam.startswith("noisy-or") else 2 * l + 1
        if width ** (n + 1) > ATEMPORAL_MAX_ENTRIES:
            raise CapExceededError(
                f"atemporal combiner for n={n}, l={l} needs {width ** (n + 1)} entries (cap {ATEMPORAL_MAX_ENTRIES})"
            )
    if fam == "noisy-or-temporal":
        return build_temporal_noisy_or(random_noisy_or_spec(rng, n))
    if fam == "noisy-or-atemporal":
        return build_atemporal_noisy_or(random_noisy_or_spec(rng, n))
    spec = random_adder_spec(rng, n, l, nonneg=fam == "adder-nonneg")
    if fam == "adder-atemporal":
        return build_atemporal_noisy_adder(spec)
    return build_temporal_noisy_adder(spec)


def measure(config: SweepConfig, n: int, l: int) -> SweepRow:
    net = _build(config, n, l)
    if not 1 <= config.query_cause <= n:
        raise ValueError(f"query cause {config.query_cause} out of range for n={n}")
    query = f"c{config.query_cause}"
    evidence = {}
    if config.evidence == "effect-extreme":
        effect = net.annotations["effect"]
        evidence[effect] = net.var(effect).states[-1]
    _, cost = eliminate(net, query, evidence)
    return SweepRow(n, None if config.family.startswith("noisy-or") else l, cost)


def run_sweep(config: SweepConfig) -> SweepResult:
    if config.axis == "n":
        grid = [(n, config.l) for n in config.n_values]
    else:
        grid = [(config.n, l) for l in config.l_values]
    if config.family.endswith("atemporal"):
        # fail before doing any work
        worst = max(n for n, _ in grid)
        if worst > ATEMPORAL_MAX_N:
            raise CapExceededError(f"atemporal sweeps are capped at n <= {ATEMPORAL_MAX_N}, got n={worst}")
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            rows = list(pool.map(lambda nl: measure(config, *nl), grid))
    else:
        rows = [measure(config, n, l) for n, l in grid]
    metric, growth, band = config.resolved()
    result = SweepResult(config, tuple(rows), metric, growth, None, band)
    descriptor = fit_growth(result.points(), growth) if len(rows) >= 3 else None
    passed = None
    if band is not None and descriptor is not None:
        passed = band[0] <= descriptor <= band[1]
    return SweepResult(config, tuple(rows), metric, growth, descriptor, band, passed)
