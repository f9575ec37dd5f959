"""Cross-encoding agreement checks for one family spec.

Every applicable encoding is queried with variable elimination under a
fixed battery of evidence; encodings whose joint fits under the cap are
also queried by enumeration.  All answers are measured against the
enumeration answer of the first enumerable encoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CapExceededError, ImpossibleEvidenceError
from .inference import DEFAULT_CAP, Enumerator, eliminate, joint_size
from .models import Spec, build, encodings_for
from .netcore import BeliefNetwork

ENCODING_ORDER = ("temporal", "atemporal", "explicit", "naive")


@dataclass(frozen=True)
class Probe:
    label: str
    causes: Mapping[int, bool]
    observe_effect: bool = False


def evidence_battery(n: int) -> list[Probe]:
    probes = [
        Probe("no-evidence", {}),
        Probe("all-false", {j: False for j in range(1, n + 1)}),
        Probe("all-true", {j: True for j in range(1, n + 1)}),
    ]
    probes += [Probe(f"only-c{j}", {k: k == j for k in range(1, n + 1)}) for j in range(1, n + 1)]
    probes.append(Probe("effect-extreme", {}, observe_effect=True))
    return probes


def _queries(net: BeliefNetwork, probe: Probe, mapping: Sequence[int]):
    """(key, query, evidence) triples for one probe; ``mapping[k-1]`` renames cause k."""
    effect = net.annotations["effect"]
    evidence = {f"c{mapping[j - 1]}": "true" if v else "false" for j, v in probe.causes.items()}
    if probe.observe_effect:
        evidence[effect] = net.var(effect).states[-1]
        return [((probe.label, f"c{j}"), f"c{mapping[j - 1]}", evidence) for j in range(1, len(mapping) + 1)]
    return [((probe.label, "effect"), effect, evidence)]


def _answer(fn, query, evidence):
    try:
        return fn(query, evidence)
    except ImpossibleEvidenceError:
        return None


def _deviation(a, b) -> float:
    if a is None or b is None:
        return 0.0 if a is None and b is None else math.inf
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@dataclass
class CompareReport:
    reference: str
    rows: list[tuple[str, str, float]] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max((d for _, _, d in self.rows), default=0.0)

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_deviation <= tol


def _collect(net, probes, mapping, engine, cap):
    if engine == "enum":
        en = Enumerator(net, cap)
        fn = lambda q, ev: en.posterior(q, ev).probs
    else:
        fn = lambda q, ev: eliminate(net, q, ev)[0].probs
    out = {}
    for probe in probes:
        for key, query, evidence in _queries(net, probe, mapping):
            out[key] = _answer(fn, query, evidence)
    return out


def compare_encodings(
    spec: Spec,
    overrides: Mapping[str, BeliefNetwork] | None = None,
    reference: tuple[Spec, Sequence[int]] | None = None,
    cap: int = DEFAULT_CAP,
) -> CompareReport:
    """Compare all encodings of ``spec`` (optionally with hand-supplied networks).

    ``reference`` is ``(original_spec, perm)`` where cause k of ``spec`` is
    cause ``perm[k-1]`` of the original; the original's encodings then join
    the comparison with causes matched by original index.
    """
    overrides = dict(overrides or {})
    identity = list(range(1, spec.n + 1))
    probes = evidence_battery(spec.n)
    encs = [e for e in ENCODING_ORDER if e in encodings_for(spec)]
    subjects = [(e, overrides.get(e) or build(spec, e), identity) for e in encs]
    if reference is not None:
        ref_spec, perm = reference
        for e in ENCODING_ORDER:
            if e in encodings_for(ref_spec):
                subjects.append((f"reference-{e}", build(ref_spec, e), list(perm)))

    for _, net, _ in subjects:
        net.require_valid()
    if not any(joint_size(net) <= cap for _, net, _ in subjects):
        raise CapExceededError(f"no encoding has a joint within the enumeration cap {cap}")

    results = {}
    skipped = []
    for name, net, mapping in subjects:
        results[(name, "ve")] = _collect(net, probes, mapping, "ve", cap)
        if joint_size(net) <= cap:
            results[(name, "enum")] = _collect(net, probes, mapping, "enum", cap)
        else:
            skipped.append(f"{name}/enum (joint {joint_size(net)} > cap {cap})")
    oracle = next(k for k in results if k[1] == "enum")
    base = results[oracle]
    report = CompareReport(f"{oracle[0]}/enum", skipped=skipped)
    for (name, engine), answers in results.items():
        for key, value in answers.items():
            report.rows.append((f"{name}/{engine}", f"{key[0]}:{key[1]}", _deviation(value, base[key])))
    return report
