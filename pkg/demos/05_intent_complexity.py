"""Correlating data efficiency with intent complexity.

Each intent carries a difficulty class (none < closed < semi < open),
inherited from its hardest slot. Running the protocol with per-example
predictions lets us break exact match down by intent, then average intents
within each class: harder classes should sit lower at small subset sizes.
"""

from dataeff import (
    ComplexityClass,
    CorpusRow,
    CorpusTable,
    SimulatedRunner,
    SimulatedRunnerConfig,
    build_manifests,
    intent_complexity_from_slots,
    ledger_to_curve,
    make_schedule,
    packaged_annotations,
    parse_frame,
    per_class_curves,
    per_intent_points,
    run_protocol,
)

# Class inheritance: an intent is as hard as its hardest slot.
slots = [ComplexityClass.CLOSED, ComplexityClass.OPEN]
print("slots {closed, open} ->", intent_complexity_from_slots(slots))
print("no slots           ->", intent_complexity_from_slots([]))
print()

annotations = packaged_annotations("music")
print("packaged music annotations:")
for intent, cls in sorted(annotations.classes.items()):
    print(f"  {intent:<32} {cls}")
print()

# A music corpus whose test split has enough rows per intent (the analysis
# drops intents with fewer than 10 test occurrences).
rows = []
for intent in ("IN:PLAY_MUSIC", "IN:STOP_MUSIC", "IN:CREATE_PLAYLIST_MUSIC"):
    for i in range(120):
        rows.append(CorpusRow("music", f"{intent} {i}", parse_frame(f"[{intent} x{i} ]")))
    for i in range(25):
        rows.append(
            CorpusRow("music", f"{intent} test {i}", parse_frame(f"[{intent} y{i} ]"), "test")
        )
rows += [CorpusRow("event", f"event {i}", parse_frame("[IN:GET_EVENT go ]"))
         for i in range(400)]
table = CorpusTable(rows)

manifests = build_manifests(table, "music", make_schedule(8), seeds=(0,))
config = SimulatedRunnerConfig(truth=(-35.0, 0.45, 95.0), noise_sigma=0.0,
                               em_at_zero=10.0, emit_predictions=True)
ledger = run_protocol(manifests, SimulatedRunner(config, table))
print(f"{len(ledger.ok_entries)} runs with per-example predictions")

per_intent = per_intent_points(ledger, table)
print("intents kept for analysis:", ", ".join(sorted(per_intent)))
print()

curves = per_class_curves(per_intent, annotations)
print("class      subset%   mean EM")
for cls, series in curves.items():
    if not series:
        print(f"{str(cls):<9}  (no intents in this class)")
        continue
    for k, em in series:
        print(f"{str(cls):<9}  {k:>6.1f}   {em:6.2f}")

# Overall curve for reference.
points = ledger_to_curve(ledger)
overall = {p.subset_percent: p.exact_match for p in points}
print()
print("overall EM by subset size:", {k: round(v, 1) for k, v in sorted(overall.items())})
