"""Versioned JSON documents for models, family specs and sweep configs.

Leading lines starting with ``#`` are comments and are skipped by every
reader.  Floats are written with 17 significant digits, so emitting a
parsed document reproduces it byte for byte.
"""

from __future__ import annotations

import itertools
import json
from typing import Any

import numpy as np

from .bench import SweepConfig
from .errors import ParseError
from .models import NoisyAdderSpec, NoisyOrSpec, Spec
from .netcore import BeliefNetwork, ConditionalTable, Variable

MODEL_FORMAT = "causalind-model"
SPEC_FORMAT = "causalind-spec"
SWEEP_FORMAT = "causalind-sweep"
VERSION = 1


def _num(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _is_scalar(x):
    return x is None or isinstance(x, (str, bool, int, float, np.integer, np.floating))


def _scalar(x):
    if x is None:
        return "null"
    if isinstance(x, str):
        return json.dumps(x)
    return _num(x)


def _flat(x):
    """Single-line rendering for scalars, scalar lists and small dicts of those."""
    if _is_scalar(x):
        return _scalar(x)
    if isinstance(x, (list, tuple)) and all(_is_scalar(v) for v in x):
        return "[" + ", ".join(_scalar(v) for v in x) + "]"
    if isinstance(x, dict) and all(_is_scalar(v) or (isinstance(v, (list, tuple)) and all(map(_is_scalar, v))) for v in x.values()):
        inner = ", ".join(f"{json.dumps(k)}: {_flat(v)}" for k, v in x.items())
        line = "{" + inner + "}"
        if len(line) <= 100:
            return line
    return None


def _rows(arr: np.ndarray, indent: int) -> str:
    """2-D float array as one bracketed line per row; each distinct value is formatted once."""
    uniq, inv = np.unique(arr, return_inverse=True)
    text = [_num(u) for u in uniq.tolist()]
    inv = inv.reshape(arr.shape).tolist()
    pad = "  " * (indent + 1)
    lines = [pad + "[" + ", ".join([text[k] for k in row]) + "]" for row in inv]
    return "[\n" + ",\n".join(lines) + "\n" + "  " * indent + "]"


def dumps(doc: Any, indent: int = 0) -> str:
    if isinstance(doc, np.ndarray):
        return _rows(doc, indent)
    flat = _flat(doc)
    if flat is not None:
        return flat
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(doc, dict):
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in doc.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    items = [pad + dumps(v, indent + 1) for v in doc]
    return "[\n" + ",\n".join(items) + "\n" + end + "]"


def _strip_comments(text: str) -> tuple[list[str], str]:
    lines = text.splitlines()
    comments = []
    while lines and (lines[0].lstrip().startswith("#") or not lines[0].strip()):
        line = lines.pop(0)
        if line.strip():
            comments.append(line.lstrip()[1:].strip())
    return comments, "\n".join(lines)


def loads(text: str, expected_format: str) -> dict:
    _, body = _strip_comments(text)
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    fmt = doc.get("format")
    if fmt != expected_format:
        raise ParseError(f"expected format {expected_format!r}, found {fmt!r}")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported {fmt} version {doc.get('version')!r}")
    return doc


def header_comments(text: str) -> list[str]:
    return _strip_comments(text)[0]


def _field(doc, key, kind, where):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind == "list" and not isinstance(value, list):
        raise ParseError(f"{where}: {key!r} must be a list")
    if kind == "str" and not isinstance(value, str):
        raise ParseError(f"{where}: {key!r} must be a string")
    if kind == "number" and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ParseError(f"{where}: {key!r} must be a number")
    if kind == "int" and (isinstance(value, bool) or not isinstance(value, int)):
        raise ParseError(f"{where}: {key!r} must be an integer")
    return value


def _table_rows(rows, where) -> np.ndarray:
    if not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: rows must be lists of numbers")
    flat = list(itertools.chain.from_iterable(rows))
    kinds = {type(v) for v in flat}
    if not kinds <= {int, float}:
        bad = next(v for v in flat if type(v) not in (int, float))
        raise ParseError(f"{where}: expected numbers, found {bad!r}")
    return np.array(flat, dtype=np.float64)


def _numbers(values, where):
    out = []
    for v in values:
        if isinstance(v, list):
            out.extend(_numbers(v, where))
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{where}: expected numbers, found {v!r}")
        else:
            out.append(float(v))
    return out


# family specs ---------------------------------------------------------------


def spec_to_doc(spec: Spec, extra: dict | None = None) -> dict:
    doc: dict[str, Any] = {"format": SPEC_FORMAT, "version": VERSION}
    if isinstance(spec, NoisyOrSpec):
        doc.update(family="noisy-or", q=list(spec.q), leak=spec.leak, cause_priors=list(spec.cause_priors))
    else:
        doc.update(
            family="noisy-adder",
            l=spec.l,
            nonneg=spec.nonneg,
            q=[list(r) for r in spec.q],
            leak=list(spec.leak),
            cause_priors=list(spec.cause_priors),
        )
    if extra:
        doc.update(extra)
    return doc


def spec_from_doc(doc: dict) -> Spec:
    """Build the spec object; numeric problems surface as SpecError (not ParseError)."""
    where = "spec"
    family = _field(doc, "family", "str", where)
    priors = _numbers(_field(doc, "cause_priors", "list", where), where)
    if family == "noisy-or":
        q = _numbers(_field(doc, "q", "list", where), where)
        leak = float(_field(doc, "leak", "number", where))
        return NoisyOrSpec(q=tuple(q), leak=leak, cause_priors=tuple(priors))
    if family == "noisy-adder":
        l = _field(doc, "l", "int", where)
        rows = _field(doc, "q", "list", where)
        if not all(isinstance(r, list) for r in rows):
            raise ParseError("spec: adder 'q' must be a list of rows")
        q = tuple(tuple(_numbers(r, where)) for r in rows)
        leak = tuple(_numbers(_field(doc, "leak", "list", where), where))
        nonneg = doc.get("nonneg", False)
        if not isinstance(nonneg, bool):
            raise ParseError("spec: 'nonneg' must be true or false")
        return NoisyAdderSpec(l=l, q=q, leak=leak, cause_priors=tuple(priors), nonneg=nonneg)
    raise ParseError(f"spec: unknown family {family!r}")


def read_spec(text: str) -> tuple[Spec, dict]:
    doc = loads(text, SPEC_FORMAT)
    return spec_from_doc(doc), doc


def write_spec(spec: Spec, extra: dict | None = None, comments=()) -> str:
    head = "".join(f"# {c}\n" for c in comments)
    return head + dumps(spec_to_doc(spec, extra)) + "\n"


# models ---------------------------------------------------------------------


def model_to_doc(net: BeliefNetwork, family: dict | None = None) -> dict:
    doc: dict[str, Any] = {"format": MODEL_FORMAT, "version": VERSION}
    doc["variables"] = [{"name": v.name, "states": list(v.states)} for v in net.variables]
    tables = []
    for t in net.tables:
        card = net.var(t.child).card
        tables.append({"child": t.child, "parents": list(t.parents), "rows": t.rows(card)})
    doc["tables"] = tables
    if net.annotations:
        doc["annotations"] = dict(net.annotations)
    if family:
        doc["family"] = family
    return doc


def write_model(net: BeliefNetwork, family: dict | None = None) -> str:
    return dumps(model_to_doc(net, family)) + "\n"


def read_model(text: str) -> tuple[BeliefNetwork, dict]:
    doc = loads(text, MODEL_FORMAT)
    where = "model"
    variables = []
    for v in _field(doc, "variables", "list", where):
        if not isinstance(v, dict):
            raise ParseError("model: each variable must be an object")
        name = _field(v, "name", "str", "variable")
        states = _field(v, "states", "list", f"variable {name}")
        if not all(isinstance(s, str) for s in states):
            raise ParseError(f"variable {name}: states must be strings")
        variables.append(Variable(name, tuple(states)))
    tables = []
    for t in _field(doc, "tables", "list", where):
        if not isinstance(t, dict):
            raise ParseError("model: each table must be an object")
        child = _field(t, "child", "str", "table")
        parents = _field(t, "parents", "list", f"table {child}")
        if not all(isinstance(p, str) for p in parents):
            raise ParseError(f"table {child}: parents must be names")
        rows = _table_rows(_field(t, "rows", "list", f"table {child}"), f"table {child}")
        tables.append(ConditionalTable(child, tuple(parents), rows))
    annotations = doc.get("annotations", {})
    if not isinstance(annotations, dict):
        raise ParseError("model: 'annotations' must be an object")
    return BeliefNetwork(variables, tables, annotations), doc


# sweep configs --------------------------------------------------------------

_SWEEP_KEYS = {
    "family", "n_values", "l", "seed", "axis", "l_values", "n", "metric",
    "growth", "band", "query_cause", "evidence", "workers",
}


def read_sweep(text: str) -> SweepConfig:
    doc = loads(text, SWEEP_FORMAT)
    unknown = set(doc) - _SWEEP_KEYS - {"format", "version", "label"}
    if unknown:
        raise ParseError(f"sweep config: unknown fields {sorted(unknown)}")
    kwargs = {k: doc[k] for k in _SWEEP_KEYS if k in doc}
    for key in ("n_values", "l_values", "band"):
        if key in kwargs and kwargs[key] is not None:
            if not isinstance(kwargs[key], list):
                raise ParseError(f"sweep config: {key!r} must be a list")
            kwargs[key] = tuple(kwargs[key])
    if "band" in kwargs and kwargs["band"] is not None and len(kwargs["band"]) != 2:
        raise ParseError("sweep config: 'band' must be [low, high]")
    try:
        return SweepConfig(**kwargs)
    except TypeError as exc:
        raise ParseError(f"sweep config: {exc}") from None
