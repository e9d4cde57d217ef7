"""A complete offline evaluation run.

Ingest a synthetic labeled pool, sample it evenly across the six categories
(five diseases plus no-finding), refine each sampled case with the mock
backend, label the refined text, score it, and persist everything. Running
it twice with the same seed returns the cached reports instead of calling
the backend again. Run: python demos/05_end_to_end_run.py
"""

import json
import tempfile
from pathlib import Path

from radbridge import (
    NO_FINDING,
    OBSERVATIONS,
    CaseRecord,
    DiagnosisScores,
    LabelSet,
    LabelStatus,
    PromptDesign,
)
from radbridge.evaluation import format_table
from radbridge.llm import MockBackend, MockBehavior
from radbridge.pipeline import Pipeline
from radbridge.store import CaseStore

workdir = Path(tempfile.mkdtemp(prefix="radbridge-demo-"))
print(f"store at {workdir}")


def case_for(category, i):
    positive = {category} if category != NO_FINDING else set()
    scores = {obs: (0.9 if obs in positive else 0.1) for obs in OBSERVATIONS}
    labels = {
        obs: (LabelStatus.POSITIVE if obs in positive else LabelStatus.NEGATIVE)
        for obs in OBSERVATIONS
    }
    name = category if isinstance(category, str) else category.json_key
    return CaseRecord(
        case_id=f"{name}-{i}",
        draft_report=f"Draft {i} for {name}.",
        scores=DiagnosisScores.from_mapping(scores),
        ground_truth_labels=LabelSet.from_mapping(labels),
    )


store = CaseStore(workdir / "store")
backend = MockBackend(MockBehavior.TEMPLATE_REFINE, backend_id="mock")
pipeline = Pipeline(store, {"mock": backend})

for category in list(OBSERVATIONS) + [NO_FINDING]:
    for i in range(2):
        store.add_case(case_for(category, i))
print(f"ingested {len(store.list_cases())} cases")

run, report = pipeline.run_evaluation(PromptDesign.P3, "mock", per_category=2, seed=7)
print(f"\nrun {run.run_id} complete={run.complete}, backend calls: {backend.calls}")
print(format_table(report))

# Idempotency: a second identical run reuses every stored report.
run2, report2 = pipeline.run_evaluation(PromptDesign.P3, "mock", per_category=2, seed=7)
print(f"\nsecond run backend calls (unchanged): {backend.calls}")
same = json.dumps(report.to_json_dict(), sort_keys=True) == json.dumps(
    report2.to_json_dict(), sort_keys=True
)
print(f"eval reports identical: {same}")
