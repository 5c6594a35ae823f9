import itertools
import random
from collections import Counter

import pytest

from dataeff.corpus import CorpusRow, CorpusTable
from dataeff.errors import SamplingError, UnknownDomainError
from dataeff.frames import ontology_labels, parse_frame
from dataeff.sampling import (
    Subset,
    SubsetSpec,
    make_schedule,
    spis_sample,
    subset_size_report,
    uniform_sample,
    uniform_size,
)

from conftest import random_frame

# Published schedule for n=10: raw curve values and their ceiled sizes.
RAW_N10 = (0.00, 0.67, 1.79, 3.66, 6.78, 11.99, 20.69, 35.22, 59.48, 100.00)
SIZES_N10 = (0, 1, 2, 4, 7, 12, 21, 36, 60, 100)


def test_schedule_n10_reference_values():
    schedule = make_schedule(10)
    assert schedule.sizes == SIZES_N10
    for got, want in zip(schedule.raw, RAW_N10):
        assert abs(got - want) <= 0.005
    assert schedule.raw[0] == 0.0
    assert schedule.raw[-1] == 100.0


def test_schedule_g5():
    assert make_schedule(10).raw[4] == pytest.approx(6.78, abs=0.01)


def test_schedule_n2_endpoints():
    assert make_schedule(2).sizes == (0, 100)


def test_schedule_rejects_small_n():
    with pytest.raises(SamplingError):
        make_schedule(1)


@pytest.mark.parametrize("n", [2, 3, 5, 10, 17, 40])
def test_schedule_monotone_for_any_n(n):
    schedule = make_schedule(n)
    assert len(schedule.raw) == n
    assert all(a < b for a, b in zip(schedule.raw, schedule.raw[1:]))
    assert all(a <= b for a, b in zip(schedule.sizes, schedule.sizes[1:]))
    assert schedule.raw[0] == 0.0 and schedule.raw[-1] == 100.0
    assert schedule.sizes[0] == 0 and schedule.sizes[-1] == 100


def test_spec_validation():
    with pytest.raises(SamplingError):
        SubsetSpec("weather", "fancy", 10, 0)
    with pytest.raises(SamplingError):
        SubsetSpec("weather", "uniform", 101, 0)
    with pytest.raises(SamplingError):
        SubsetSpec("weather", "spis", 0, 0)
    with pytest.raises(SamplingError):
        SubsetSpec("weather", "spis", 1.5, 0)
    with pytest.raises(SamplingError):
        SubsetSpec("weather", "uniform", 10, -1)


def test_uniform_size_arithmetic():
    assert uniform_size(12, 1000) == 120
    assert uniform_size(1, 1000) == 10
    assert uniform_size(1, 999) == 10  # ceil(9.99)
    assert uniform_size(0, 1000) == 0
    assert uniform_size(100, 37) == 37
    assert uniform_size(0.5, 10) == 1  # ceil(0.05)


def test_uniform_sample_size_and_uniqueness(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 12, 1))
    assert len(subset.row_ids) == 120
    assert len(set(subset.row_ids)) == 120
    train = set(weather_table.row_ids("weather", "train"))
    assert set(subset.row_ids) <= train


def test_uniform_zero_percent(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 0, 1))
    assert subset.row_ids == ()


def test_uniform_full_domain_shuffled(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 100, 1))
    train = weather_table.row_ids("weather", "train")
    assert sorted(subset.row_ids) == sorted(train)
    assert subset.row_ids != train  # order is shuffled, not file order


def test_uniform_deterministic(weather_table):
    spec = SubsetSpec("weather", "uniform", 12, 42)
    a = uniform_sample(weather_table, spec)
    b = uniform_sample(weather_table, spec)
    assert a.row_ids == b.row_ids
    assert a.to_json() == b.to_json()


def test_uniform_seeds_differ(weather_table):
    a = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 12, 1))
    b = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 12, 2))
    assert a.row_ids != b.row_ids


def test_uniform_unknown_domain(weather_table):
    with pytest.raises(UnknownDomainError):
        uniform_sample(weather_table, SubsetSpec("desert", "uniform", 12, 1))


def test_uniform_empty_train_split():
    table = CorpusTable(
        [CorpusRow("weather", "hi", parse_frame("[IN:GET_WEATHER hi ]"), "test")]
    )
    with pytest.raises(SamplingError):
        uniform_sample(table, SubsetSpec("weather", "uniform", 10, 1))


def test_subset_json_round_trip(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 7, 9))
    again = Subset.from_json(subset.to_json())
    assert again == subset


def _single_intent_table(labels):
    rows = [
        CorpusRow("toy", f"utt {i}", parse_frame(f"[IN:{label} x ]"), "train")
        for i, label in enumerate(labels)
    ]
    return CorpusTable(rows)


def test_spis_distinct_intents_k1():
    table = _single_intent_table(["AAA", "BBB", "CCC", "DDD"])
    subset = spis_sample(table, SubsetSpec("toy", "spis", 1, 0))
    assert sorted(subset.row_ids) == [0, 1, 2, 3]


def test_spis_k_above_all_counts_selects_everything():
    table = _single_intent_table(["AAA", "AAA", "BBB"])
    subset = spis_sample(table, SubsetSpec("toy", "spis", 50, 0))
    assert sorted(subset.row_ids) == [0, 1, 2]


def _greedy_reference(frames, order, k):
    """Independent greedy replay used as the oracle."""
    seen = Counter()
    picked = []
    for idx in order:
        labels = ontology_labels(frames[idx])
        if any(seen[lab] < k for lab in labels):
            picked.append(idx)
            seen.update(labels)
    return picked, seen


def test_spis_six_row_fixture_against_all_orderings():
    # Labels AAA x4 and BBB x2 across six rows; at k=2 the greedy pass stops
    # early instead of taking the whole domain.
    labels = ["AAA", "AAA", "AAA", "AAA", "BBB", "BBB"]
    table = _single_intent_table(labels)
    frames = [row.frame for row in table.rows]
    totals = Counter()
    for frame in frames:
        totals.update(ontology_labels(frame))
    k = 2

    sizes = set()
    for order in itertools.permutations(range(6)):
        picked, seen = _greedy_reference(frames, order, k)
        sizes.add(len(picked))
        for label, total in totals.items():
            assert seen[label] >= min(k, total)

    subset = spis_sample(table, SubsetSpec("toy", "spis", k, 3))
    assert len(subset.row_ids) < len(table.rows)  # stopped early
    assert len(subset.row_ids) in sizes
    report = subset_size_report(subset, table)
    for label, total in totals.items():
        assert report.label_counts[label] >= min(k, total)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_spis_coverage_property(k):
    rng = random.Random(1000 + k)
    for trial in range(25):
        rows = [
            CorpusRow("rand", f"u{i}", random_frame(rng, max_depth=3, max_branch=3), "train")
            for i in range(rng.randint(5, 40))
        ]
        table = CorpusTable(rows)
        totals = Counter()
        for row in rows:
            totals.update(ontology_labels(row.frame))
        subset = spis_sample(table, SubsetSpec("rand", "spis", k, trial))
        achieved = subset_size_report(subset, table).label_counts
        for label, total in totals.items():
            assert achieved[label] >= min(k, total), (label, k, trial)


def test_spis_deterministic():
    table = _single_intent_table(["AAA", "AAA", "BBB", "CCC", "CCC", "DDD"])
    spec = SubsetSpec("toy", "spis", 1, 77)
    assert spis_sample(table, spec).row_ids == spis_sample(table, spec).row_ids


def test_size_report_uniform(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 12, 1))
    report = subset_size_report(subset, weather_table)
    assert report.count == 120
    assert report.percent == 12.0


def test_size_report_empty(weather_table):
    subset = uniform_sample(weather_table, SubsetSpec("weather", "uniform", 0, 1))
    report = subset_size_report(subset, weather_table)
    assert (report.count, report.percent, dict(report.label_counts)) == (0, 0.0, {})


def test_size_report_rejects_foreign_rows(weather_table):
    alarm_row = weather_table.row_ids("alarm", "train")[0]
    subset = Subset(SubsetSpec("weather", "uniform", 1, 0), (alarm_row,))
    with pytest.raises(SamplingError):
        subset_size_report(subset, weather_table)
