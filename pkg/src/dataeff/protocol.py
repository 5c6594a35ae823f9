"""Four-stage orchestration: manifests -> runs -> ledger -> discrete curve.

A Manifest freezes one fine-tuning job: all source-domain train rows plus one
drawn target subset, with the target domain's eval/test rows for scoring. A
runner is any callable Manifest -> RunResult; two ship here. SimulatedRunner
scores h(k) + noise against a configured truth curve so the whole pipeline is
testable without GPUs, and CommandRunner shells out to a user command for real
fine-tuning (command gets the manifest JSON path as its single argument and
must print RunResult JSON on stdout, exiting 0).

Failed runs are recorded in the ledger and do not abort the protocol.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .corpus import CorpusTable
from .curve import EfficiencyPoint
from .errors import ProtocolError, RunnerError
from .frames import FrameNode, Frame, serialize_frame
from .rng import SplitMix64, combine, float_key
from .sampling import Schedule, SubsetSpec, sample

_EM_STREAM = 0x45
_PREDICTION_STREAM = 0x50


@dataclass(frozen=True)
class Manifest:
    """One fine-tuning job: mixed train rows, eval rows, and target test rows."""

    run_id: str
    model_id: str
    target_domain: str
    subset_spec: SubsetSpec
    subset_rows: tuple[int, ...]
    subset_percent: float  # nominal percent for uniform, realized percent for spis
    train_rows: tuple[int, ...]
    eval_rows: tuple[int, ...]
    test_rows: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "model_id": self.model_id,
            "target_domain": self.target_domain,
            "subset": {
                "target_domain": self.subset_spec.target_domain,
                "algorithm": self.subset_spec.algorithm,
                "size_param": self.subset_spec.size_param,
                "seed": self.subset_spec.seed,
            },
            "subset_rows": list(self.subset_rows),
            "subset_percent": self.subset_percent,
            "train_rows": list(self.train_rows),
            "eval_rows": list(self.eval_rows),
            "test_rows": list(self.test_rows),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(obj: dict) -> "Manifest":
        return Manifest(
            run_id=obj["run_id"],
            model_id=obj["model_id"],
            target_domain=obj["target_domain"],
            subset_spec=SubsetSpec(**obj["subset"]),
            subset_rows=tuple(obj["subset_rows"]),
            subset_percent=obj["subset_percent"],
            train_rows=tuple(obj["train_rows"]),
            eval_rows=tuple(obj["eval_rows"]),
            test_rows=tuple(obj["test_rows"]),
        )

    def summary(self) -> "ManifestSummary":
        return ManifestSummary(
            run_id=self.run_id,
            model_id=self.model_id,
            target_domain=self.target_domain,
            algorithm=self.subset_spec.algorithm,
            size_param=self.subset_spec.size_param,
            seed=self.subset_spec.seed,
            subset_percent=self.subset_percent,
            subset_size=len(self.subset_rows),
            n_train=len(self.train_rows),
            n_eval=len(self.eval_rows),
            n_test=len(self.test_rows),
        )


@dataclass(frozen=True)
class ManifestSummary:
    """The ledger's compact record of a manifest (row lists dropped)."""

    run_id: str
    model_id: str
    target_domain: str
    algorithm: str
    size_param: float
    seed: int
    subset_percent: float
    subset_size: int
    n_train: int
    n_eval: int
    n_test: int


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run; predictions is the optional per-test-row output."""

    run_id: str
    exact_match: float
    seed: int
    wall_time: float = 0.0
    predictions: tuple[tuple[int, str], ...] | None = None  # (row id, frame text)

    def __post_init__(self):
        if not 0.0 <= self.exact_match <= 100.0:
            raise ProtocolError(f"exact_match out of [0, 100]: {self.exact_match}")


@dataclass(frozen=True)
class LedgerEntry:
    manifest: ManifestSummary
    result: RunResult | None
    error: str | None

    @property
    def ok(self) -> bool:
        return self.result is not None


class Ledger:
    """Append-only run record keyed by run_id; results must match their manifest."""

    def __init__(self):
        self.entries: list[LedgerEntry] = []
        self._run_ids: set[str] = set()

    def append(self, manifest: Manifest | ManifestSummary,
               result: RunResult | None, error: str | None = None) -> None:
        summary = manifest.summary() if isinstance(manifest, Manifest) else manifest
        if summary.run_id in self._run_ids:
            raise ProtocolError(f"duplicate run_id {summary.run_id!r} in ledger")
        if result is not None and result.run_id != summary.run_id:
            raise ProtocolError(
                f"result for {result.run_id!r} does not match manifest {summary.run_id!r}"
            )
        if result is None and error is None:
            raise ProtocolError("a failed entry needs an error message")
        self._run_ids.add(summary.run_id)
        self.entries.append(LedgerEntry(summary, result, error))

    @property
    def ok_entries(self) -> list[LedgerEntry]:
        return [e for e in self.entries if e.ok]

    @property
    def failed_entries(self) -> list[LedgerEntry]:
        return [e for e in self.entries if not e.ok]

    def to_json(self) -> str:
        entries = []
        for e in self.entries:
            result = None
            if e.result is not None:
                result = {
                    "run_id": e.result.run_id,
                    "exact_match": e.result.exact_match,
                    "seed": e.result.seed,
                    "wall_time": e.result.wall_time,
                }
                if e.result.predictions is not None:
                    result["predictions"] = [list(p) for p in e.result.predictions]
            entries.append(
                {
                    "manifest": {
                        "run_id": e.manifest.run_id,
                        "model_id": e.manifest.model_id,
                        "target_domain": e.manifest.target_domain,
                        "algorithm": e.manifest.algorithm,
                        "size_param": e.manifest.size_param,
                        "seed": e.manifest.seed,
                        "subset_percent": e.manifest.subset_percent,
                        "subset_size": e.manifest.subset_size,
                        "n_train": e.manifest.n_train,
                        "n_eval": e.manifest.n_eval,
                        "n_test": e.manifest.n_test,
                    },
                    "result": result,
                    "error": e.error,
                }
            )
        return json.dumps({"entries": entries})

    @staticmethod
    def from_json(text: str) -> "Ledger":
        obj = json.loads(text)
        ledger = Ledger()
        for entry in obj["entries"]:
            summary = ManifestSummary(**entry["manifest"])
            result = None
            if entry["result"] is not None:
                raw = dict(entry["result"])
                predictions = raw.pop("predictions", None)
                if predictions is not None:
                    predictions = tuple((int(r), str(t)) for r, t in predictions)
                result = RunResult(predictions=predictions, **raw)
            ledger.append(summary, result, entry["error"])
        return ledger


def save_ledger(ledger: Ledger, path: str | Path) -> None:
    Path(path).write_text(ledger.to_json() + "\n", encoding="utf-8")


def load_ledger(path: str | Path) -> Ledger:
    return Ledger.from_json(Path(path).read_text(encoding="utf-8"))


def build_manifests(
    table: CorpusTable,
    target_domain: str,
    schedule: Schedule,
    algorithm: str = "uniform",
    seeds: Sequence[int] = (0,),
    model_id: str = "parser",
) -> list[Manifest]:
    """One manifest per (schedule size, seed).

    Train rows are every non-target train row plus the drawn subset; eval rows
    are all non-target eval rows plus the target domain's eval rows; test rows
    are the target domain's test split. For spis the schedule sizes double as
    the per-label minimums, skipping entries below 1.
    """
    if len(set(seeds)) != len(tuple(seeds)):
        raise ProtocolError(f"seeds must be unique, got {tuple(seeds)}")
    target_train = set(table.row_ids(target_domain, "train"))
    source_train = tuple(
        pos for pos, row in enumerate(table.rows)
        if row.domain != target_domain and row.split == "train"
    )
    source_eval = tuple(
        pos for pos, row in enumerate(table.rows)
        if row.domain != target_domain and row.split == "eval"
    )
    eval_rows = source_eval + table.row_ids(target_domain, "eval")
    test_rows = table.row_ids(target_domain, "test")

    sizes = list(schedule.sizes)
    if algorithm == "spis":
        sizes = [k for k in sizes if k >= 1]

    manifests = []
    for k in sizes:
        for seed in seeds:
            spec = SubsetSpec(target_domain, algorithm, float(k), seed)
            subset = sample(table, spec)
            if not target_train.issuperset(subset.row_ids):
                raise ProtocolError("sampler returned rows outside the target train split")
            if algorithm == "uniform":
                percent = float(k)
            else:
                percent = 100.0 * len(subset.row_ids) / len(target_train) if target_train else 0.0
            run_id = f"{model_id}.{target_domain}.{algorithm}{k:g}.s{seed}"
            manifests.append(
                Manifest(
                    run_id=run_id,
                    model_id=model_id,
                    target_domain=target_domain,
                    subset_spec=spec,
                    subset_rows=subset.row_ids,
                    subset_percent=percent,
                    train_rows=source_train + subset.row_ids,
                    eval_rows=eval_rows,
                    test_rows=test_rows,
                )
            )
    return manifests


@dataclass(frozen=True)
class SimulatedRunnerConfig:
    """Truth curve and noise for the simulator.

    EM for a k% subset is clamp(a / k**b + c + eps, 0, 100) with
    eps ~ Normal(0, noise_sigma^2); the 0% subset reports em_at_zero + eps
    because the curve has a pole at zero. Noise is keyed by
    (seed, run seed, k), never by execution order.
    """

    truth: tuple[float, float, float] = (-27.26, 0.35, 97.79)
    noise_sigma: float = 0.0
    em_at_zero: float = 0.0
    seed: int = 0
    emit_predictions: bool = False

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ProtocolError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.em_at_zero <= 100.0:
            raise ProtocolError(f"em_at_zero out of [0, 100]: {self.em_at_zero}")


def _clamp_em(value: float) -> float:
    return min(max(value, 0.0), 100.0)


def _corrupt(frame: Frame) -> str:
    """A prediction guaranteed to differ: the root intent label is rewritten."""
    root = frame.root
    return serialize_frame(Frame(FrameNode(root.kind, root.text + "_WRONG", root.children)))


def simulated_run(
    manifest: Manifest,
    config: SimulatedRunnerConfig,
    table: CorpusTable | None = None,
) -> RunResult:
    """Score one manifest against the configured truth curve.

    With emit_predictions a per-test-row prediction list is drawn (each row
    correct with probability EM/100) and exact_match becomes the realized
    fraction; a corpus table is then required for the reference frames.
    """
    k = manifest.subset_percent
    a, b, c = config.truth
    run_seed = manifest.subset_spec.seed
    noise_stream = SplitMix64(combine(config.seed, run_seed, float_key(k), _EM_STREAM))
    eps = noise_stream.gauss(config.noise_sigma) if config.noise_sigma > 0 else 0.0
    em = _clamp_em((config.em_at_zero if k == 0 else a / k ** b + c) + eps)

    predictions = None
    if config.emit_predictions:
        if table is None:
            raise ProtocolError("emit_predictions requires the corpus table")
        stream = SplitMix64(combine(config.seed, run_seed, float_key(k), _PREDICTION_STREAM))
        rows = []
        hits = 0
        for row_id in manifest.test_rows:
            frame = table.rows[row_id].frame
            if stream.unit() < em / 100.0:
                hits += 1
                rows.append((row_id, serialize_frame(frame)))
            else:
                rows.append((row_id, _corrupt(frame)))
        predictions = tuple(rows)
        if rows:
            em = 100.0 * hits / len(rows)
    return RunResult(
        run_id=manifest.run_id, exact_match=em, seed=run_seed,
        wall_time=0.0, predictions=predictions,
    )


class SimulatedRunner:
    """Runner wrapper around simulated_run; safe to call concurrently."""

    def __init__(self, config: SimulatedRunnerConfig, table: CorpusTable | None = None):
        self.config = config
        self.table = table

    def __call__(self, manifest: Manifest) -> RunResult:
        return simulated_run(manifest, self.config, self.table)


class CommandRunner:
    """Run an external fine-tuning command once per manifest.

    The command is invoked with the manifest JSON path appended as its single
    extra argument. It must exit 0 and print a RunResult JSON object
    ({"run_id", "exact_match", "seed", "wall_time", optional "predictions"})
    on stdout; anything else is recorded as a run failure.
    """

    def __init__(self, command: str | Sequence[str], timeout: float | None = None):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise RunnerError("empty runner command")
        self.timeout = timeout

    def __call__(self, manifest: Manifest) -> RunResult:
        with tempfile.TemporaryDirectory(prefix="dataeff-run-") as tmp:
            manifest_path = Path(tmp) / f"{manifest.run_id}.manifest.json"
            manifest_path.write_text(manifest.to_json() + "\n", encoding="utf-8")
            started = time.monotonic()
            try:
                proc = subprocess.run(
                    self.argv + [str(manifest_path)],
                    capture_output=True, text=True, timeout=self.timeout,
                )
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise RunnerError(f"runner command failed to execute: {exc}") from exc
            elapsed = time.monotonic() - started
        if proc.returncode != 0:
            detail = proc.stderr.strip().splitlines()
            raise RunnerError(
                f"runner exited {proc.returncode}"
                + (f": {detail[-1]}" if detail else "")
            )
        try:
            obj = json.loads(proc.stdout)
        except json.JSONDecodeError as exc:
            raise RunnerError(f"runner stdout is not RunResult JSON: {exc}") from exc
        if "exact_match" not in obj:
            raise RunnerError("runner output missing 'exact_match'")
        predictions = obj.get("predictions")
        if predictions is not None:
            predictions = tuple((int(r), str(t)) for r, t in predictions)
        return RunResult(
            run_id=obj.get("run_id", manifest.run_id),
            exact_match=float(obj["exact_match"]),
            seed=int(obj.get("seed", manifest.subset_spec.seed)),
            wall_time=float(obj.get("wall_time", elapsed)),
            predictions=predictions,
        )


Runner = Callable[[Manifest], RunResult]


def run_protocol(manifests: Sequence[Manifest], runner: Runner, jobs: int = 1) -> Ledger:
    """Execute every manifest exactly once and collect results into a ledger.

    Runs are independent; jobs > 1 executes them in a thread pool. A runner
    exception marks that run failed and the protocol continues. Ledger order
    always follows manifest order, regardless of completion order.
    """
    if jobs < 1:
        raise ProtocolError(f"jobs must be >= 1, got {jobs}")

    def attempt(manifest: Manifest):
        try:
            return runner(manifest), None
        except Exception as exc:  # fault isolation: one bad run must not abort the rest
            return None, f"{type(exc).__name__}: {exc}"

    if jobs == 1 or len(manifests) <= 1:
        outcomes = [attempt(m) for m in manifests]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(attempt, manifests))

    ledger = Ledger()
    for manifest, (result, error) in zip(manifests, outcomes):
        ledger.append(manifest, result, error)
    return ledger


def ledger_to_curve(ledger: Ledger) -> list[EfficiencyPoint]:
    """One EfficiencyPoint per successful run; the ledger must cover one (model, domain)."""
    entries = ledger.ok_entries
    if not ledger.entries:
        raise ProtocolError("empty ledger")
    if not entries:
        raise ProtocolError("all runs failed; nothing to plot")
    pairs = {(e.manifest.model_id, e.manifest.target_domain) for e in entries}
    if len(pairs) != 1:
        raise ProtocolError(
            f"ledger mixes several (model, domain) pairs: {sorted(pairs)}; "
            "split it before building a curve"
        )
    return [
        EfficiencyPoint(
            subset_percent=e.manifest.subset_percent,
            exact_match=e.result.exact_match,
            seed=e.result.seed,
            model_id=e.manifest.model_id,
            domain=e.manifest.target_domain,
        )
        for e in entries
    ]
