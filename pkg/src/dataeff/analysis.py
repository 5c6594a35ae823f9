"""Result aggregation: seed variance, model comparison, intent complexity.

Complexity classes rank how hard an intent is to model (none < closed < semi
< open, where "semi" covers named entities / date-times / ~100-value closed
classes and "open" long free text); an intent inherits the maximum class of
its slots. Annotation files for five stock domains ship with the package, as
does a reference model-comparison table whose numbers come from full-scale
fine-tuning and are not recomputable here.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import CorpusTable
from .curve import CurveModel, EfficiencyPoint, fit_curve, invert
from .errors import AnalysisError, AnnotationError, UnreachableTargetError
from .frames import parse_frame, root_intent, serialize_frame
from .protocol import Ledger

PACKAGED_ANNOTATION_DOMAINS = ("messaging", "music", "reminder", "timer", "weather")


class ComplexityClass(enum.IntEnum):
    """Totally ordered difficulty classes; comparison follows the int value."""

    NONE = 0
    CLOSED = 1
    SEMI = 2
    OPEN = 3

    @staticmethod
    def from_string(text: str) -> "ComplexityClass":
        try:
            return ComplexityClass[text.strip().upper()]
        except KeyError:
            valid = ", ".join(c.name.lower() for c in ComplexityClass)
            raise AnnotationError(f"unknown complexity class {text!r} (expected {valid})")

    def __str__(self) -> str:
        return self.name.lower()


def intent_complexity_from_slots(slot_classes: list[ComplexityClass]) -> ComplexityClass:
    """Maximum slot class; an intent with no slots is 'none'."""
    return max(slot_classes, default=ComplexityClass.NONE)


@dataclass(frozen=True)
class ComplexityAnnotations:
    domain: str
    classes: dict  # intent label -> ComplexityClass

    def __getitem__(self, intent: str) -> ComplexityClass:
        return self.classes[intent]


def load_annotations(path: str | Path, domain: str | None = None) -> ComplexityAnnotations:
    """Read a two-column CSV ``intent,class``; the domain defaults from the filename."""
    path = Path(path)
    if domain is None:
        domain = path.stem
    classes: dict[str, ComplexityClass] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["intent", "class"]:
            raise AnnotationError(f"{path}: expected header 'intent,class', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise AnnotationError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            intent, cls = row[0].strip(), row[1]
            if not intent.startswith("IN:"):
                raise AnnotationError(f"{path}:{lineno}: intent {intent!r} must be IN:-prefixed")
            if intent in classes:
                raise AnnotationError(f"{path}:{lineno}: duplicate intent {intent!r}")
            classes[intent] = ComplexityClass.from_string(cls)
    return ComplexityAnnotations(domain, classes)


def packaged_annotations(domain: str) -> ComplexityAnnotations:
    """Annotations shipped with the package for one of the stock domains."""
    if domain not in PACKAGED_ANNOTATION_DOMAINS:
        raise AnnotationError(
            f"no packaged annotations for {domain!r} "
            f"(have: {', '.join(PACKAGED_ANNOTATION_DOMAINS)})"
        )
    ref = resources.files("dataeff").joinpath(f"data/annotations/{domain}.csv")
    with resources.as_file(ref) as path:
        return load_annotations(path, domain)


def per_intent_points(
    ledger: Ledger,
    table: CorpusTable,
    min_test_occurrences: int = 10,
) -> dict:
    """Break each run's exact match down by the reference frame's root intent.

    Every successful run must carry per-example predictions. Intents with
    fewer than min_test_occurrences rows in the target domain's test split are
    excluded. Returns {intent label: [EfficiencyPoint, ...]}.
    """
    entries = ledger.ok_entries
    if not entries:
        raise AnalysisError("ledger has no successful runs")
    domains = {e.manifest.target_domain for e in entries}
    if len(domains) != 1:
        raise AnalysisError(f"ledger mixes target domains {sorted(domains)}")
    domain = domains.pop()

    test_counts: dict[str, int] = {}
    for pos in table.row_ids(domain, "test"):
        label = root_intent(table.rows[pos].frame)
        test_counts[label] = test_counts.get(label, 0) + 1
    kept = {label for label, n in test_counts.items() if n >= min_test_occurrences}

    out: dict[str, list[EfficiencyPoint]] = {label: [] for label in sorted(kept)}
    for entry in entries:
        if entry.result.predictions is None:
            raise AnalysisError(
                f"run {entry.manifest.run_id!r} has no per-example predictions; "
                "re-run with a prediction-emitting runner"
            )
        per_intent: dict[str, list[bool]] = {}
        for row_id, predicted in entry.result.predictions:
            if not 0 <= row_id < len(table.rows):
                raise AnalysisError(
                    f"run {entry.manifest.run_id!r} predicts for row {row_id}, "
                    f"but the corpus has {len(table.rows)} rows"
                )
            reference = table.rows[row_id].frame
            label = root_intent(reference)
            if label not in kept:
                continue
            try:
                hit = serialize_frame(parse_frame(predicted)) == serialize_frame(reference)
            except Exception:
                hit = False  # unparseable prediction is simply a miss
            per_intent.setdefault(label, []).append(hit)
        for label, hits in per_intent.items():
            out[label].append(
                EfficiencyPoint(
                    subset_percent=entry.manifest.subset_percent,
                    exact_match=100.0 * sum(hits) / len(hits),
                    seed=entry.result.seed,
                    model_id=entry.manifest.model_id,
                    domain=domain,
                )
            )
    return out


def per_class_curves(
    per_intent: dict,
    annotations: ComplexityAnnotations,
) -> dict:
    """Average member-intent EM per subset percent within each complexity class.

    The average is unweighted across intents (seeds pool into a per-intent
    mean first). Classes with no member intents map to an empty list. Returns
    {ComplexityClass: [(subset percent, mean EM), ...]} sorted by percent.
    """
    missing = [label for label in per_intent if label not in annotations.classes]
    if missing:
        raise AnalysisError(f"intents without annotations: {', '.join(sorted(missing))}")

    intent_means: dict[str, dict[float, float]] = {}
    for label, points in per_intent.items():
        by_k: dict[float, list[float]] = {}
        for p in points:
            by_k.setdefault(p.subset_percent, []).append(p.exact_match)
        intent_means[label] = {k: math.fsum(v) / len(v) for k, v in by_k.items()}

    out: dict[ComplexityClass, list[tuple[float, float]]] = {}
    for cls in ComplexityClass:
        members = [label for label in per_intent if annotations.classes[label] == cls]
        ks = sorted({k for label in members for k in intent_means[label]})
        series = []
        for k in ks:
            values = [intent_means[label][k] for label in members if k in intent_means[label]]
            series.append((k, math.fsum(values) / len(values)))
        out[cls] = series
    return out


@dataclass(frozen=True)
class PercentStats:
    """Seed statistics for one subset percent."""

    mean: float
    min: float
    max: float
    seed_count: int

    @property
    def spread(self) -> float:
        return self.max - self.min


@dataclass(frozen=True)
class InversionSpread:
    """Per-seed inverse-query answers for one EM target; None marks unreachable."""

    per_seed: dict
    spread: float | None


@dataclass(frozen=True)
class SeedAggregate:
    per_percent: dict  # subset percent -> PercentStats
    per_seed_models: dict  # seed -> CurveModel (only when em_targets requested)
    inversion_spread: dict  # EM target -> InversionSpread


def aggregate_seeds(points: list[EfficiencyPoint], em_targets: tuple = ()) -> SeedAggregate:
    """Per-percent seed statistics, optionally with per-seed fits and query spread.

    Points must share one (model, domain). When em_targets is non-empty a
    curve is fitted to each seed's points and invert() answers are compared
    across seeds, quantifying how stable the protocol's conclusions are.
    """
    if not points:
        raise AnalysisError("no points to aggregate")
    pairs = {(p.model_id, p.domain) for p in points}
    if len(pairs) != 1:
        raise AnalysisError(f"points mix several (model, domain) pairs: {sorted(pairs)}")

    by_k: dict[float, list[EfficiencyPoint]] = {}
    for p in points:
        by_k.setdefault(p.subset_percent, []).append(p)
    per_percent = {
        k: PercentStats(
            mean=math.fsum(p.exact_match for p in group) / len(group),
            min=min(p.exact_match for p in group),
            max=max(p.exact_match for p in group),
            seed_count=len({p.seed for p in group}),
        )
        for k, group in sorted(by_k.items())
    }

    per_seed_models: dict[int, CurveModel] = {}
    inversion_spread: dict[float, InversionSpread] = {}
    if em_targets:
        seeds = sorted({p.seed for p in points})
        for seed in seeds:
            per_seed_models[seed] = fit_curve([p for p in points if p.seed == seed])
        for y in em_targets:
            per_seed: dict[int, float | None] = {}
            for seed in seeds:
                try:
                    per_seed[seed] = invert(per_seed_models[seed], y).percent
                except UnreachableTargetError:
                    per_seed[seed] = None
            reached = [v for v in per_seed.values() if v is not None]
            spread = (max(reached) - min(reached)) if reached else None
            inversion_spread[y] = InversionSpread(per_seed, spread)
    return SeedAggregate(per_percent, per_seed_models, inversion_spread)


@dataclass(frozen=True)
class QueryOutcome:
    """One comparison-table cell: a subset percent, or a marker explaining why not."""

    percent: float | None
    marker: str = ""  # "", "exceeds_full_data", "unreachable", "n/a"

    def render(self) -> str:
        if self.marker == "unreachable":
            return "unreachable"
        if self.marker == "n/a":
            return "-"
        text = f"{self.percent:.2f}"
        return f"{text} (exceeds_full_data)" if self.marker else text

    def sort_key(self) -> float:
        return self.percent if self.percent is not None else float("inf")


@dataclass(frozen=True)
class ComparisonTable:
    """Required subset percent per (model, EM target), most data-efficient first."""

    em_targets: tuple
    rows: tuple  # ((model_id, (QueryOutcome, ...)), ...)

    def to_csv(self) -> str:
        header = ["model"] + [f"em_{y:g}" for y in self.em_targets]
        lines = [",".join(header)]
        for model_id, cells in self.rows:
            lines.append(",".join([model_id] + [cell.render() for cell in cells]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = ["model"] + [f"em={y:g}%" for y in self.em_targets]
        table = [header] + [
            [model_id] + [cell.render() for cell in cells] for model_id, cells in self.rows
        ]
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = []
        for i, row in enumerate(table):
            lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _sorted_rows(rows: list) -> tuple:
    return tuple(sorted(rows, key=lambda row: (row[1][0].sort_key(), row[0])))


def compare_models(curves: dict, em_targets: list) -> ComparisonTable:
    """Inverse-query every model at every EM target.

    curves maps model id -> well-formed CurveModel. Rows are sorted by the
    data required at the first target, least first; targets above a model's
    ceiling render as 'unreachable', answers past 100% are flagged.
    """
    if len(curves) < 2:
        raise AnalysisError("compare_models needs at least 2 models")
    if not em_targets:
        raise AnalysisError("no EM targets to compare at")
    bad = [mid for mid, m in curves.items() if not m.well_formed]
    if bad:
        raise AnalysisError(f"models are not well-formed saturating curves: {', '.join(sorted(bad))}")
    rows = []
    for model_id, model in curves.items():
        cells = []
        for y in em_targets:
            try:
                answer = invert(model, y)
                cells.append(
                    QueryOutcome(answer.percent, "exceeds_full_data" if answer.exceeds_full_data else "")
                )
            except UnreachableTargetError:
                cells.append(QueryOutcome(None, "unreachable"))
        rows.append((model_id, tuple(cells)))
    return ComparisonTable(tuple(em_targets), _sorted_rows(rows))


def reference_comparison(domain: str) -> ComparisonTable:
    """Packaged full-scale fine-tuning results, formatted like compare_models output.

    These numbers come from GPU fine-tuning of production parsers and cannot
    be recomputed by the simulator; they ship as reference data only.
    """
    ref = resources.files("dataeff").joinpath("data/reference/model_generalizability.json")
    payload = json.loads(ref.read_text(encoding="utf-8"))
    domains = payload["domains"]
    if domain not in domains:
        raise AnalysisError(
            f"no reference comparison for {domain!r} (have: {', '.join(sorted(domains))})"
        )
    block = domains[domain]
    targets = tuple(float(y) for y in block["em_targets"])
    rows = []
    for model_id, answers in block["models"].items():
        cells = []
        for y in targets:
            value = answers.get(f"{y:g}")
            if value is None:
                cells.append(QueryOutcome(None, "n/a"))
            else:
                cells.append(QueryOutcome(float(value), "exceeds_full_data" if value > 100 else ""))
        rows.append((model_id, tuple(cells)))
    return ComparisonTable(targets, _sorted_rows(rows))
