"""Command-line entry point.

Exit codes: 0 ok, 1 comparison or benchmark failure, 2 parse error,
3 semantic error, 4 impossible evidence, 5 size cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fileio
from .bench import run_sweep
from .compare import compare_encodings
from .errors import (
    CapExceededError,
    ImpossibleEvidenceError,
    InvalidNetworkError,
    JointTooLargeError,
    OrderingError,
    ParseError,
    SpecError,
    UnknownStateError,
    UnknownVariableError,
)
from .inference import DEFAULT_CAP, eliminate, enumerate_posterior
from .models import apply_permutation, build, reorder_causes
from .netcore import active_path, d_separated, format_path, has_problem_cycles

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SEMANTIC, EXIT_IMPOSSIBLE, EXIT_CAP = range(6)


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None


def _load_model(path):
    net, _ = fileio.read_model(_read(path))
    net.require_valid()
    return net


def _names(values):
    out = []
    for v in values or []:
        out.extend(x for x in v.split(",") if x)
    return out


def cmd_build(args, out):
    spec, _ = fileio.read_spec(_read(args.spec))
    net = build(spec, args.encoding)
    family = fileio.spec_to_doc(spec)
    del family["format"], family["version"]
    out.write(fileio.write_model(net, family))
    return EXIT_OK


def cmd_query(args, out):
    net = _load_model(args.model)
    evidence = {}
    for item in args.evidence or []:
        name, sep, state = item.partition("=")
        if not sep:
            raise CliError(f"evidence must look like NAME=STATE, got {item!r}", EXIT_SEMANTIC)
        evidence[name] = state
    cost = None
    if args.engine == "enum":
        dist = enumerate_posterior(net, args.query, evidence, cap=args.cap)
    else:
        dist, cost = eliminate(net, args.query, evidence)
    out.write(f"query: {dist.variable}\n")
    for state, p in zip(dist.states, dist.probs):
        out.write(f"{state}: {p:.17g}\n")
    out.write(f"p(evidence): {dist.evidence_probability:.17g}\n")
    if args.costs:
        if cost is None:
            out.write("costs: not available for the enumeration engine\n")
        else:
            out.write(f"multiply_adds: {cost.multiply_add_count}\n")
            out.write(f"max_factor_entries: {cost.max_factor_entries}\n")
            out.write(f"elimination_order: {' '.join(cost.elimination_order)}\n")
    return EXIT_OK


def cmd_compare(args, out):
    text = _read(args.spec)
    spec, doc = fileio.read_spec(text)
    overrides = {}
    for item in args.model or []:
        enc, sep, path = item.partition("=")
        if not sep:
            raise CliError(f"--model expects ENCODING=FILE, got {item!r}", EXIT_SEMANTIC)
        overrides[enc] = _load_model(path)
    reference = None
    if args.reference:
        ref_spec, _ = fileio.read_spec(_read(args.reference))
        perm = doc.get("permutation")
        if perm is None:
            raise CliError("--reference needs a spec carrying a 'permutation' field", EXIT_SEMANTIC)
        reference = (ref_spec, perm)
        if sorted(perm) != list(range(1, ref_spec.n + 1)) or ref_spec.n != spec.n:
            raise CliError("permutation does not match the reference spec", EXIT_SEMANTIC)
    report = compare_encodings(spec, overrides, reference, cap=args.cap)
    worst: dict[str, float] = {}
    for subject, _, dev in report.rows:
        worst[subject] = max(worst.get(subject, 0.0), dev)
    out.write(f"reference: {report.reference}\n")
    for subject, dev in worst.items():
        out.write(f"{subject}: max deviation {dev:.3g}\n")
    for note in report.skipped:
        out.write(f"skipped: {note}\n")
    out.write(f"max deviation: {report.max_deviation:.3g}\n")
    ok = report.ok(args.tol)
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dsep(args, out):
    net = _load_model(args.model)
    x, y, z = _names(args.x), _names(args.y), _names(args.z)
    if not x or not y:
        raise CliError("--x and --y need at least one variable each", EXIT_SEMANTIC)
    if d_separated(net, x, y, z):
        out.write("yes\nevery path is blocked\n")
    else:
        path = active_path(net, x, y, z)
        out.write("no\n")
        out.write(f"active path: {format_path(path)}\n")
    return EXIT_OK


def cmd_cycles(args, out):
    net = _load_model(args.model)
    res = has_problem_cycles(net)
    if not res:
        out.write("no chordless moral cycle of length >= 4\n")
        return EXIT_OK
    out.write("problem cycle found\n")
    out.write(f"network cycle: {' - '.join(res.cycle + res.cycle[:1])}\n")
    out.write(f"moral cycle: {' - '.join(res.moral_cycle + res.moral_cycle[:1])}\n")
    return EXIT_OK


def cmd_bench(args, out):
    config = fileio.read_sweep(_read(args.config))
    result = run_sweep(config)
    axis = config.axis
    out.write(f"# family={config.family} axis={axis} seed={config.seed} metric={result.metric} growth={result.growth}\n")
    out.write("n\tl\tmultiply_adds\tmax_factor_entries\n")
    for r in result.rows:
        out.write(f"{r.n}\t{'-' if r.l is None else r.l}\t{r.cost.multiply_add_count}\t{r.cost.max_factor_entries}\n")
    if result.descriptor is None:
        out.write("growth: n/a (fewer than 3 points)\n")
        return EXIT_OK
    kind = "slope" if result.growth == "polynomial" else "ratio"
    out.write(f"growth {kind}: {result.descriptor:.6f}\n")
    if result.band is None:
        return EXIT_OK
    out.write(f"band: [{result.band[0]:g}, {result.band[1]:g}]\n")
    out.write("PASS\n" if result.passed else "FAIL\n")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_reorder(args, out):
    spec, doc = fileio.read_spec(_read(args.spec))
    try:
        indices = [int(x) for x in _names([args.evidence_causes])] if args.evidence_causes else []
    except ValueError:
        raise CliError(f"cause indices must be integers: {args.evidence_causes!r}", EXIT_SEMANTIC) from None
    try:
        perm = reorder_causes(spec, indices)
    except IndexError as exc:
        raise CliError(str(exc), EXIT_SEMANTIC) from None
    permuted = apply_permutation(spec, perm)
    prior = doc.get("permutation")
    composed = [prior[p - 1] for p in perm] if prior else perm
    comments = [f"permutation: {' '.join(map(str, perm))}"]
    out.write(fileio.write_spec(permuted, {"permutation": composed}, comments))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalind",
        description="Build, query and benchmark temporal and atemporal causal-independence networks.",
        epilog="exit codes: 0 ok, 1 comparison or benchmark failure, 2 parse error, 3 semantic error, "
        "4 impossible evidence, 5 size cap exceeded",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a network from a family spec")
    p.add_argument("spec")
    p.add_argument("--encoding", choices=["atemporal", "temporal", "explicit", "naive"], default="temporal")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="posterior of one variable")
    p.add_argument("model")
    p.add_argument("--query", required=True)
    p.add_argument("--evidence", nargs="*", metavar="NAME=STATE")
    p.add_argument("--engine", choices=["ve", "enum"], default="ve")
    p.add_argument("--costs", action="store_true")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("compare", help="check that all encodings of a spec agree")
    p.add_argument("spec")
    p.add_argument("--reference", help="original spec a reordered spec came from")
    p.add_argument("--model", action="append", metavar="ENCODING=FILE", help="use this model file for an encoding")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("dsep", help="d-separation test with an active-path witness")
    p.add_argument("model")
    p.add_argument("--x", nargs="+", required=True)
    p.add_argument("--y", nargs="+", required=True)
    p.add_argument("--z", nargs="*", default=[])
    p.set_defaults(func=cmd_dsep)

    p = sub.add_parser("cycles", help="look for chordless moral-graph cycles")
    p.add_argument("model")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("bench", help="run a complexity sweep")
    p.add_argument("config")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("reorder", help="move evidence causes to the end of the chain")
    p.add_argument("spec")
    p.add_argument("--evidence-causes", default="", metavar="LIST")
    p.set_defaults(func=cmd_reorder)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = make_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        err.write(f"error: {exc}\n")
        return exc.code
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except ImpossibleEvidenceError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IMPOSSIBLE
    except (CapExceededError, JointTooLargeError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAP
    except (SpecError, InvalidNetworkError, UnknownVariableError, UnknownStateError, OrderingError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
