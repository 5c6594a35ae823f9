"""Command-line surface for the four-stage workflow.

Subcommands: schedule, sample, fit, query, run, report, complexity, compare,
em. Exit codes are a stable contract: 0 success, 1 data error, 2 usage error,
3 partial protocol failure (some runs failed but a ledger was written).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, report, sampling
from .corpus import load_corpus
from .curve import fit_curve, invert, load_model, points_from_csv
from .errors import DataEffError, UnreachableTargetError
from .frames import exact_match, parse_frame
from .protocol import (
    CommandRunner,
    Ledger,
    SimulatedRunner,
    SimulatedRunnerConfig,
    build_manifests,
    ledger_to_curve,
    load_ledger,
    run_protocol,
    save_ledger,
)

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_points_file(path: str):
    """Points from a CSV, a JSON array of point objects, or a ledger JSON."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return ledger_to_curve(Ledger.from_json(text))
    if stripped.startswith("["):
        from .curve import EfficiencyPoint

        return [
            EfficiencyPoint(
                subset_percent=float(obj["subset_percent"]),
                exact_match=float(obj["exact_match"]),
                seed=int(obj.get("seed", 0)),
                model_id=obj.get("model_id", ""),
                domain=obj.get("domain", ""),
            )
            for obj in json.loads(text)
        ]
    return points_from_csv(text)


def cmd_schedule(args) -> int:
    schedule = sampling.make_schedule(args.n)
    sys.stdout.write(schedule.to_json() + "\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    table = load_corpus(args.corpus, args.format)
    spec = sampling.SubsetSpec(args.domain, args.algorithm, args.size, args.seed)
    subset = sampling.sample(table, spec)
    _emit(subset.to_json() + "\n", args.out)
    size = sampling.subset_size_report(subset, table)
    print(
        f"{subset.spec.algorithm} subset: {size.count} rows "
        f"({size.percent:.2f}% of {args.domain} train)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_fit(args) -> int:
    points = _load_points_file(args.points)
    zeros = sum(1 for p in points if p.subset_percent == 0)
    if zeros:
        print(
            f"warning: excluding {zeros} point(s) at 0% from the fit "
            "(curve has a pole at zero)",
            file=sys.stderr,
        )
    model = fit_curve(points, average_first=args.average_seeds)
    if not model.well_formed:
        print(
            f"warning: fit is not a well-formed saturating curve "
            f"(a={model.a:.4g}, c={model.c:.4g})",
            file=sys.stderr,
        )
    _emit(model.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_query(args) -> int:
    model = load_model(args.model)
    rows = []
    for y in args.em:
        try:
            answer = invert(model, y)
            note = "exceeds_full_data" if answer.exceeds_full_data else ""
            rows.append((f"{y:g}", f"{answer.percent:.3f}", note))
        except UnreachableTargetError:
            rows.append((f"{y:g}", "-", f"unreachable (asymptote {model.c:.2f})"))
    widths = [max(len(r[i]) for r in rows + [("em", "required_subset_%", "note")]) for i in range(3)]
    header = ("em", "required_subset_%", "note")
    for row in [header] + rows:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return EXIT_OK


def _make_runner(args, table):
    if args.runner == "simulate":
        config = SimulatedRunnerConfig(
            truth=tuple(args.truth),
            noise_sigma=args.noise,
            em_at_zero=args.em_at_zero,
            seed=args.sim_seed,
            emit_predictions=args.emit_predictions,
        )
        return SimulatedRunner(config, table)
    if args.runner.startswith("exec:"):
        return CommandRunner(args.runner[len("exec:"):])
    raise DataEffError(f"runner must be 'simulate' or 'exec:COMMAND', got {args.runner!r}")


def cmd_run(args) -> int:
    table = load_corpus(args.corpus, args.format)
    schedule = sampling.make_schedule(args.n)
    manifests = build_manifests(
        table, args.target, schedule,
        algorithm=args.algorithm, seeds=args.seeds, model_id=args.model_id,
    )
    runner = _make_runner(args, table)
    ledger = run_protocol(manifests, runner, jobs=args.jobs)
    save_ledger(ledger, args.out)
    failed = ledger.failed_entries
    print(
        f"{len(ledger.entries)} runs: {len(ledger.ok_entries)} ok, {len(failed)} failed "
        f"-> {args.out}",
        file=sys.stderr,
    )
    for entry in failed:
        print(f"  failed {entry.manifest.run_id}: {entry.error}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_report(args) -> int:
    points = _load_points_file(args.points)
    model = load_model(args.model) if args.model else None
    spec = report.ReportSpec(
        points=tuple(points), model=model, queries=tuple(args.queries), fmt=args.fmt
    )
    for path in report.write_report(spec, args.out):
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_complexity(args) -> int:
    ledger = load_ledger(args.ledger)
    table = load_corpus(args.corpus, args.format)
    if args.annotations:
        annotations = analysis.load_annotations(args.annotations)
    else:
        annotations = analysis.packaged_annotations(args.domain)
    per_intent = analysis.per_intent_points(ledger, table, args.min_count)
    curves = analysis.per_class_curves(per_intent, annotations)
    lines = ["class,subset_percent,mean_exact_match"]
    for cls, series in curves.items():
        for k, em in series:
            lines.append(f"{cls},{k:.10g},{em:.10g}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.reference:
        table = analysis.reference_comparison(args.reference)
    else:
        curves = {}
        for item in args.curves:
            name, _, path = item.partition("=")
            if not path:
                raise DataEffError(f"--curves entries look like NAME=FILE, got {item!r}")
            curves[name] = load_model(path)
        table = analysis.compare_models(curves, args.em)
    sys.stdout.write(table.to_csv() if args.fmt == "csv" else table.to_text())
    return EXIT_OK


def _read_frames(path: str):
    frames = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            frames.append(parse_frame(line))
        except DataEffError as exc:
            raise DataEffError(f"{path}:{lineno}: {exc}") from exc
    return frames


def cmd_em(args) -> int:
    system = _read_frames(args.system)
    reference = _read_frames(args.reference)
    value = exact_match(system, reference)
    print(f"{value:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dataeff",
        description="Measure and extrapolate how much target-domain data a "
        "semantic parser needs for a given exact-match level.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="print the logarithmic subset-size schedule")
    p.add_argument("--n", type=int, default=10, help="number of schedule points (>= 2)")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("sample", help="draw a subset of a target domain's train rows")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["tsv", "jsonl"], default=None)
    p.add_argument("--domain", required=True)
    p.add_argument("--algorithm", choices=["uniform", "spis"], default="uniform")
    p.add_argument("--size", type=float, required=True,
                   help="percent for uniform, per-label minimum for spis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="subset JSON path (default: stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="fit the efficiency curve to discrete points")
    p.add_argument("--points", required=True,
                   help="points CSV, points JSON array, or ledger JSON")
    p.add_argument("--out", default=None, help="curve model JSON path (default: stdout)")
    p.add_argument("--average-seeds", action="store_true",
                   help="average seeds per subset percent before fitting")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("query", help="invert a fitted curve at EM targets")
    p.add_argument("--model", required=True, help="curve model JSON path")
    p.add_argument("--em", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("run", help="run the full protocol and write a ledger")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["tsv", "jsonl"], default=None)
    p.add_argument("--target", required=True, help="target domain")
    p.add_argument("--runner", default="simulate", help="'simulate' or 'exec:COMMAND'")
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--out", required=True, help="ledger JSON path")
    p.add_argument("--n", type=int, default=10, help="schedule points")
    p.add_argument("--algorithm", choices=["uniform", "spis"], default="uniform")
    p.add_argument("--model-id", default="parser")
    p.add_argument("--jobs", type=int, default=1, help="parallel runs")
    p.add_argument("--truth", type=float, nargs=3, default=[-27.26, 0.35, 97.79],
                   metavar=("A", "B", "C"), help="simulator truth curve")
    p.add_argument("--noise", type=float, default=0.0, help="simulator EM noise sigma")
    p.add_argument("--em-at-zero", type=float, default=0.0,
                   help="simulator EM for the 0%% subset")
    p.add_argument("--sim-seed", type=int, default=0)
    p.add_argument("--emit-predictions", action="store_true",
                   help="simulator also emits per-test-row predictions")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="emit SVG and CSV plots of points + curve")
    p.add_argument("--points", required=True)
    p.add_argument("--model", default=None, help="curve model JSON path")
    p.add_argument("--queries", type=float, nargs="*", default=[],
                   help="EM targets to draw guide lines for")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--fmt", choices=["svg", "csv", "both"], default="both")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("complexity", help="per-complexity-class discrete curves")
    p.add_argument("--ledger", required=True, help="ledger JSON with predictions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["tsv", "jsonl"], default=None)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--annotations", help="intent,class CSV path")
    group.add_argument("--domain", help="use packaged annotations for this domain")
    p.add_argument("--min-count", type=int, default=10,
                   help="drop intents with fewer test rows than this")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("compare", help="rank models by data required per EM target")
    p.add_argument("--curves", nargs="+", default=[], metavar="NAME=FILE")
    p.add_argument("--em", type=float, nargs="*", default=[])
    p.add_argument("--reference", default=None,
                   help="print the packaged full-scale reference table for a domain")
    p.add_argument("--fmt", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("em", help="exact match between two frame files (one per line)")
    p.add_argument("--system", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_em)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "schedule" and args.n < 2:
        parser.error("--n must be >= 2")
    if args.command == "run" and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.command == "compare" and not args.reference and not args.curves:
        parser.error("compare needs --curves NAME=FILE ... --em Y ... or --reference DOMAIN")
    if args.command == "compare" and args.curves and not args.em:
        parser.error("--curves comparison needs --em targets")
    try:
        return args.func(args)
    except DataEffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
