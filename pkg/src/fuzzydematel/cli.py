"""Command-line front end.

Exit status: 0 success, 2 invalid input or failed analysis, 3 I/O failure.
Human-readable tables go to stdout; reports are written only to ``--out``.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import __version__
from .config import AnalysisConfig
from .dematel import InfluenceMatrix
from .errors import DematelError, StageError
from .graph import ImpactRelationMap, enumerate_cycles, factor_stats
from .io import export_dot, export_report, parse_edges, parse_matrix, parse_survey, round_half_away
from .pipeline import run_pipeline
from .survey import ExpertSurvey

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3

INPUT_KINDS = ("auto", "survey", "average", "total", "edges")


class _IOFailure(Exception):
    pass


def _threshold(value: str):
    if value == "auto":
        return value
    try:
        p = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {value!r}") from None
    if not p >= 0:
        raise argparse.ArgumentTypeError("threshold must be >= 0")
    return p


def _positive_int(value: str) -> int:
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return k


def _nonneg_int(value: str) -> int:
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzydematel",
        description="Fuzzy DEMATEL analysis: surveys -> total relation -> cause/effect -> feedback loops.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add_input(p):
        p.add_argument("input", help="survey CSV/JSON, matrix CSV, or edge-list CSV")
        p.add_argument(
            "--input-kind", choices=INPUT_KINDS, default="auto",
            help="how to read INPUT: expert survey, average matrix A, total-relation matrix T, "
                 "or manual edge list (default: auto-detect; plain matrices are read as A)",
        )
        p.add_argument("--scale-max", type=_positive_int, default=4,
                       help="largest crisp survey rating; ratings are integers 0..MAX (default: 4)")

    def add_analysis(p):
        p.add_argument("--threshold", type=_threshold, default="auto",
                       help="impact-relation threshold p, or 'auto' for the mean off-diagonal "
                            "entry of T (default: auto)")
        p.add_argument("--epsilon", type=float, default=1e-9,
                       help="half-width of the neutral band for r-c (default: 1e-9)")
        p.add_argument("--cfcs-bounds", choices=("global", "per-column"), default="global",
                       help="CFCS min/max bounds scope for linguistic surveys (default: global)")
        p.add_argument("--allow-self-loops", action="store_true",
                       help="keep diagonal entries of T above the threshold as self-loops")
        p.add_argument("--max-cycle-len", type=_positive_int, default=None,
                       help="longest feedback loop to enumerate (default: number of factors)")
        p.add_argument("--max-cycles", type=_nonneg_int, default=10_000,
                       help="stop enumerating after this many loops (default: 10000)")
        p.add_argument("--digits", type=int, default=2,
                       help="display rounding, 0..12 decimals (default: 2)")

    def add_report(p, required=False):
        p.add_argument("--out", required=required, help="write the report to this path")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="report format for --out (default: json)")

    p = sub.add_parser("validate", help="check an input file without analysing it",
                       description="Parse and validate an input file; writes nothing.")
    add_input(p)

    p = sub.add_parser("analyze", help="run the full pipeline and print the score table",
                       description="Run the full pipeline; print r, c, r+c, r-c per factor.")
    add_input(p)
    add_analysis(p)
    add_report(p)

    p = sub.add_parser("loops", help="list feedback loops and per-factor structure",
                       description="Enumerate the feedback loops of the impact-relation map.")
    add_input(p)
    add_analysis(p)
    add_report(p)

    p = sub.add_parser("export-dot", help="write the impact-relation map as Graphviz DOT",
                       description="Write the impact-relation map as a Graphviz DOT file.")
    add_input(p)
    add_analysis(p)
    p.add_argument("--out", required=True, help="DOT output path")
    return parser


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def _detect_kind(path: str, data: bytes) -> str:
    if path.lower().endswith(".json"):
        return "survey"
    text = data.decode("utf-8", errors="replace")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if any(re.match(r"#\s*expert\b", ln, re.IGNORECASE) for ln in lines):
        return "survey"
    if any(re.match(r"#\s*factors\b", ln, re.IGNORECASE) for ln in lines):
        return "edges"
    body = [ln for ln in lines if not ln.startswith("#")]
    if body and re.match(r"source\s*,\s*target\b", body[0], re.IGNORECASE):
        return "edges"
    return "average"


def load_input(path: str, kind: str = "auto", scale_max: int = 4):
    data = _read(path)
    if kind == "auto":
        kind = _detect_kind(path, data)
    if kind == "survey":
        fmt = "json" if path.lower().endswith(".json") else "csv"
        return parse_survey(data, fmt, scale_max=scale_max)
    if kind == "edges":
        return parse_edges(data)
    return parse_matrix(data, kind)


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        threshold=args.threshold,
        epsilon=args.epsilon,
        cfcs_bounds=args.cfcs_bounds,
        scale_max=args.scale_max,
        allow_self_loops=args.allow_self_loops,
        max_cycle_len=args.max_cycle_len,
        max_cycles=args.max_cycles,
        digits=args.digits,
    )


def _fmt(x, digits):
    return f"{round_half_away(x, digits):.{digits}f}"


def _print_scores(bundle, out):
    d = bundle.config.digits
    width = max(len(fid) for fid in bundle.factor_set.ids)
    for row in bundle.scores.rows():
        cells = [
            f"r={_fmt(row['r'], d)}",
            f"c={_fmt(row['c'], d)}",
            f"r+c={_fmt(row['prominence'], d)}",
            f"r−c={_fmt(row['relation'], d)}",
        ]
        out.write(f"{row['factor']:<{width}}  " + "  ".join(f"{c:<9}" for c in cells)
                  + f"  {row['class']}\n")
    out.write(f"causes: {', '.join(bundle.scores.causes()) or '-'}\n")
    out.write(f"effects: {', '.join(bundle.scores.effects()) or '-'}\n")


def _threshold_line(bundle) -> str:
    d = bundle.config.digits
    how = "auto: mean off-diagonal entry of T" if bundle.config.auto_threshold else "explicit"
    return f"threshold: {_fmt(bundle.threshold, max(d, 4))} ({how})\n"


def _print_loops(factor_set, irm, loops, structure, out, err):
    out.write(f"edges: {len(irm.edges)}\n")
    out.write(f"{loops.count} {'cycle' if loops.count == 1 else 'cycles'}\n")
    for k, cyc in enumerate(loops.cycles, start=1):
        out.write(f"  {k}. {' -> '.join(cyc + (cyc[0],))}\n")
    out.write("factor structure (rank: factor, relations, loops)\n")
    names = {f.id: f.label for f in factor_set}
    for s in sorted(structure, key=lambda s: s.rank):
        out.write(f"  {s.rank}. {names[s.factor]}: {s.relations} relations, {s.loops} loops\n")
    if loops.truncated:
        msg = f"warning: loop enumeration truncated at {loops.count} cycles (--max-cycles)\n"
        out.write(msg)
        err.write(msg)


def cmd_validate(args, out, err) -> int:
    src = load_input(args.input, args.input_kind, args.scale_max)
    if isinstance(src, ExpertSurvey):
        out.write(f"ok: {src.n} factors, {src.h} experts, {src.kind} survey\n")
    elif isinstance(src, InfluenceMatrix):
        out.write(f"ok: {src.n} factors, {src.kind} matrix\n")
    else:
        out.write(f"ok: {src.n} factors, {len(src.edges)} edges, edge list\n")
    return EXIT_OK


def _analysis_source(args):
    src = load_input(args.input, args.input_kind, args.scale_max)
    if isinstance(src, ImpactRelationMap):
        raise StageError("input", DematelError(f"{args.command} needs a survey or matrix, not an edge list"))
    return src


def cmd_analyze(args, out, err) -> int:
    src = _analysis_source(args)
    bundle = run_pipeline(src, _config(args))
    out.write(f"input: {bundle.source}, {bundle.factor_set.n} factors")
    out.write(f", {bundle.experts} experts\n" if bundle.experts else "\n")
    if bundle.s is not None:
        out.write(f"s = {_fmt(bundle.s, max(bundle.config.digits, 4))}\n")
    _print_scores(bundle, out)
    out.write(_threshold_line(bundle))
    out.write(f"edges: {len(bundle.irm.edges)}, cycles: {bundle.loops.count}"
              f"{' (truncated)' if bundle.loops.truncated else ''}\n")
    if args.out:
        _write(args.out, export_report(bundle, args.format))
    return EXIT_OK


def cmd_loops(args, out, err) -> int:
    cfg = _config(args)
    src = load_input(args.input, args.input_kind, args.scale_max)
    if isinstance(src, ImpactRelationMap):
        if args.out:
            raise StageError("input", DematelError("--out reports need a survey or matrix input"))
        loops = enumerate_cycles(src, cfg.max_cycle_len, cfg.max_cycles)
        out.write("threshold: none (manual edge list)\n")
        _print_loops(src.factor_set, src, loops, factor_stats(src, loops), out, err)
        return EXIT_OK
    bundle = run_pipeline(src, cfg)
    out.write(_threshold_line(bundle))
    _print_loops(bundle.factor_set, bundle.irm, bundle.loops, bundle.structure, out, err)
    if args.out:
        _write(args.out, export_report(bundle, args.format))
    return EXIT_OK


def cmd_export_dot(args, out, err) -> int:
    cfg = _config(args)
    src = load_input(args.input, args.input_kind, args.scale_max)
    if isinstance(src, ImpactRelationMap):
        data = export_dot(src, None, cfg.digits)
        n_edges = len(src.edges)
    else:
        bundle = run_pipeline(src, cfg)
        data = export_dot(bundle.irm, bundle.scores, cfg.digits)
        n_edges = len(bundle.irm.edges)
    _write(args.out, data)
    out.write(f"wrote {args.out} ({n_edges} edges)\n")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "loops": cmd_loops,
    "export-dot": cmd_export_dot,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out, err)
    except _IOFailure as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    except DematelError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
