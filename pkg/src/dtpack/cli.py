"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .digraph import DigraphError, ParseError, parse
from .exact import DEFAULT_BUDGET, SizeGuardError
from .generators import KINDS, GeneratorSpec
from .harness import (
    ResultDocument,
    aggregate,
    describe_instance,
    load_config,
    round_document,
    rows_to_csv,
    run_experiment,
    solve_document,
    verify_frequencies,
    verify_triangle_free_census,
    verify_rounding_validity,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("dtpack")


class UsageError(Exception):
    pass


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtpack", description="Directed triangle packing and covering.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance file")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--n", type=_positive)
    gen.add_argument("--k", type=_positive, help="number of planted carousels")
    gen.add_argument("--seed", type=_nonnegative)
    gen.add_argument("--out", type=Path)

    solve = sub.add_parser("solve", help="exact and fractional packing/cover values")
    solve.add_argument("input", help="instance file, or - for stdin")
    solve.add_argument("--mode", choices=("exact", "lp", "both"), default="both")
    solve.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="branch-and-bound node limit")
    solve.add_argument("--format", choices=("json", "csv", "text"), default="json")
    solve.add_argument("--timings", action="store_true", help="include wall-clock timings")
    solve.add_argument("--out", type=Path)

    rnd = sub.add_parser("round", help="round the fractional cover to a triangle cover")
    rnd.add_argument("input")
    rnd.add_argument("--mode", choices=("sample", "derandomize", "exhaustive"), default="derandomize")
    rnd.add_argument("--k", type=_positive, default=100, help="number of samples in sample mode")
    rnd.add_argument("--seed", type=_nonnegative, default=0)
    rnd.add_argument("--format", choices=("json", "csv", "text"), default="json")
    rnd.add_argument("--timings", action="store_true")
    rnd.add_argument("--out", type=Path)

    ver = sub.add_parser("verify", help="run a built-in verification suite")
    ver_sub = ver.add_subparsers(dest="suite", required=True)
    lem = ver_sub.add_parser("lemma51", help="triangle-free digraphs have at most n^2/2 arcs")
    lem.add_argument("--n", type=_nonnegative, default=4)
    val = ver_sub.add_parser("rounding-validity", help="every threshold outcome is a cover")
    val.add_argument("--n", type=_positive, default=8)
    val.add_argument("--instances", type=_positive, default=50)
    val.add_argument("--seed", type=_nonnegative, default=0)
    fr = ver_sub.add_parser("frequencies", help="empirical inclusion frequencies per bucket")
    fr.add_argument("--samples", type=_positive, default=10_000)
    fr.add_argument("--seed", type=_nonnegative, default=0)
    for p in (lem, val, fr):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", type=Path)

    exp = sub.add_parser("experiment", help="run a batch described by an INI config")
    exp.add_argument("config", type=Path)
    exp.add_argument("--jobs", type=_positive, help="override the config's worker count")
    exp.add_argument("--out", type=Path, help="CSV path (overrides the config)")
    return parser


# -- output ----------------------------------------------------------------------


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def render(doc: ResultDocument, fmt: str) -> str:
    data = doc.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    if fmt == "csv":
        flat = _flatten(data)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
        return buf.getvalue()
    return _text(data)


def _flatten(data: dict[str, Any]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in data["instance"].items():
        flat[f"instance.{key}"] = value
    for key, value in data["values"].items():
        if isinstance(value, dict):
            for sub, v in value.items():
                flat[f"{key}.{sub}" if sub != "value" else key] = v
        else:
            flat[key] = value
    if data.get("rounding"):
        for key in ("mode", "choice", "weight", "bound"):
            if key in data["rounding"]:
                flat[f"rounding.{key}"] = data["rounding"][key]
    for check in data["checks"]:
        flat[f"check.{check['name']}"] = check["status"]
    return flat


def _approx(value: Any) -> str:
    if isinstance(value, str) and "/" in value:
        p, q = value.split("/")
        return f"{value} (~{int(p) / int(q):.6f})"
    return str(value)


def _text(data: dict[str, Any]) -> str:
    lines = ["instance: " + ", ".join(f"{k}={v}" for k, v in data["instance"].items())]
    for key, value in data["values"].items():
        if isinstance(value, dict) and "value" in value:
            extra = ", ".join(f"{k}={_approx(v)}" for k, v in value.items() if k != "value")
            lines.append(f"  {key:<20} {_approx(value['value'])}  [{extra}]")
        else:
            lines.append(f"  {key:<20} {value}")
    if data.get("rounding"):
        r = data["rounding"]
        lines.append(f"rounding: {r['mode']}, choice {r['choice']}, weight {_approx(r['weight'])}, bound {_approx(r['bound'])}")
        lines.append(f"  cover arcs: {r['cover']}")
    width = max((len(c["name"]) for c in data["checks"]), default=0)
    lines.append("checks:")
    for c in data["checks"]:
        detail = f"  ({c['detail']})" if c["detail"] else ""
        lines.append(f"  {c['status'].upper():<7} {c['name']:<{width}}{detail}".rstrip())
    return "\n".join(lines) + "\n"


# -- commands --------------------------------------------------------------------


def _read_instance(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    g = parse(text)
    return g, describe_instance(g, source=None if path == "-" else Path(path).name, text=text)


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(args.kind, n=args.n, k=args.k, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(spec.text(), args.out)
    return EXIT_OK


def _finish(doc: ResultDocument, args) -> int:
    _emit(render(doc, args.format), args.out)
    return EXIT_FAILED if doc.failed else EXIT_OK


def cmd_solve(args) -> int:
    g, inst = _read_instance(args.input)
    return _finish(solve_document(g, inst, args.mode, args.budget, args.timings), args)


def cmd_round(args) -> int:
    g, inst = _read_instance(args.input)
    return _finish(round_document(g, inst, args.mode, args.seed, args.k, args.timings), args)


def cmd_verify(args) -> int:
    if args.suite == "lemma51":
        doc = verify_triangle_free_census(args.n)
    elif args.suite == "rounding-validity":
        doc = verify_rounding_validity(args.n, args.instances, args.seed)
    else:
        doc = verify_frequencies(args.samples, args.seed)
    return _finish(doc, args)


def cmd_experiment(args) -> int:
    try:
        config = load_config(args.config)
    except (OSError, ValueError, KeyError, configparser.Error) as exc:
        raise UsageError(f"bad config {args.config}: {exc}") from exc
    if args.jobs:
        config = type(config)(**{**config.__dict__, "jobs": args.jobs})
    rows, docs = run_experiment(config)
    out = args.out or (Path(config.csv) if config.csv else None)
    _emit(rows_to_csv(rows), out)
    summary = aggregate(rows)
    if config.documents:
        folder = Path(config.documents)
        folder.mkdir(parents=True, exist_ok=True)
        for row, doc in zip(rows, docs):
            (folder / f"{row['instance']}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        (folder / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_FAILED if summary["errors"] or summary["bound_violations"] else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "round": cmd_round,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, SizeGuardError) as exc:
        print(f"dtpack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DigraphError as exc:
        print(f"dtpack: invalid instance: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"dtpack: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
