import json
from pathlib import Path

import pytest

from radbridge.types import (
    NO_FINDING,
    OBSERVATIONS,
    CaseRecord,
    DiagnosisScores,
    LabelSet,
    LabelStatus,
    Observation,
)

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


def load_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def scores_for(positive: set[Observation], high=0.85, low=0.1) -> DiagnosisScores:
    return DiagnosisScores.from_mapping(
        {obs: (high if obs in positive else low) for obs in OBSERVATIONS}
    )


def labels_for(positive: set[Observation]) -> LabelSet:
    return LabelSet.from_mapping(
        {
            obs: (LabelStatus.POSITIVE if obs in positive else LabelStatus.NEGATIVE)
            for obs in OBSERVATIONS
        }
    )


def build_pool(per_category: int = 2) -> list[CaseRecord]:
    """Synthetic labeled pool: per_category cases for each disease plus the
    no-finding category, scores consistent with the ground truth."""
    pool = []
    for obs in OBSERVATIONS:
        for i in range(per_category):
            pool.append(
                CaseRecord(
                    case_id=f"pool-{obs.json_key}-{i}",
                    draft_report=f"Draft report {i} for {obs.display_name.lower()} review.",
                    scores=scores_for({obs}),
                    ground_truth_labels=labels_for({obs}),
                    created_at="2026-01-01T00:00:00+00:00",
                )
            )
    for i in range(per_category):
        pool.append(
            CaseRecord(
                case_id=f"pool-{NO_FINDING.lower()}-{i}",
                draft_report=f"Draft report {i}, unremarkable exam.",
                scores=scores_for(set()),
                ground_truth_labels=labels_for(set()),
                created_at="2026-01-01T00:00:00+00:00",
            )
        )
    return pool


@pytest.fixture
def pool_cases():
    return build_pool(2)


@pytest.fixture
def corpus_rows():
    return load_jsonl(DATA_DIR / "labeled_corpus.jsonl")


@pytest.fixture
def tables():
    return json.loads((DATA_DIR / "tables.json").read_text())


@pytest.fixture
def scripted_responses():
    return json.loads((DATA_DIR / "scripted_responses.json").read_text())
