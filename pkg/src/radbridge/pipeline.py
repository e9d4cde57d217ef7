"""End-to-end orchestration: ingest cases, refine reports through a backend,
and run persisted, resumable evaluations.

Refinement is idempotent: one stored report per (case, design, backend,
suppress) identity, returned without a second backend call on repeats. An
evaluation run walks sample -> refine -> label -> binarize -> confusion ->
prf1 -> length stats; per-case backend failures are recorded and excluded
from the metrics, while an unexpected abort leaves pending statuses behind
for resumption.
"""

from __future__ import annotations

import csv
import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .bridge import compose_query
from .errors import BackendError, ConflictError, DomainError, NotFoundError
from .evaluation import (
    DEFAULT_LENGTH_BUCKETS,
    EvalMetadata,
    EvalReport,
    assemble_report,
    sample_cases,
)
from .labeler import CueSet, Lexicon, UncertainPolicy, binarize, label_report
from .llm import ChatTurn, ThrottleRegistry
from .store import CaseStore, RunRecord
from .types import (
    CaseRecord,
    PromptDesign,
    RefinedReport,
    make_report_id,
    utc_now_iso,
)


@dataclass
class RowError:
    row: int
    message: str

    def to_json_dict(self) -> dict:
        return {"row": self.row, "error": self.message}


@dataclass
class IngestResult:
    case_ids: list[str] = field(default_factory=list)
    errors: list[RowError] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "ingested": list(self.case_ids),
            "errors": [e.to_json_dict() for e in self.errors],
        }


def _rows_from_jsonl(path: Path):
    with open(path, encoding="utf-8") as handle:
        for i, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield i, json.loads(line)
            except json.JSONDecodeError as exc:
                yield i, DomainError(f"invalid JSON: {exc}")


def _rows_from_csv(path: Path):
    """CSV carries the flat subset of the schema: caseId, draftReport, and
    one column per disease score; labels and segmentation need JSONL."""
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for i, row in enumerate(reader, start=2):  # line 1 is the header
            data: dict = {"caseId": (row.get("caseId") or "").strip()}
            draft = row.get("draftReport")
            if draft:
                data["draftReport"] = draft
            score_fields = {
                key: value
                for key, value in row.items()
                if key in _SCORE_COLUMNS and value not in (None, "")
            }
            if score_fields:
                try:
                    data["scores"] = {k: float(v) for k, v in score_fields.items()}
                except ValueError as exc:
                    yield i, DomainError(f"non-numeric score: {exc}")
                    continue
            yield i, data


_SCORE_COLUMNS = {
    "cardiomegaly",
    "edema",
    "consolidation",
    "atelectasis",
    "pleuralEffusion",
}


class Pipeline:
    def __init__(
        self,
        store: CaseStore,
        backends: Mapping[str, object],
        *,
        throttles: Optional[ThrottleRegistry] = None,
        lexicon: Optional[Lexicon] = None,
        cues: Optional[CueSet] = None,
        throttle_max_wait: Optional[float] = None,
    ):
        self.store = store
        self.backends = dict(backends)
        self.throttles = throttles if throttles is not None else ThrottleRegistry()
        self.lexicon = lexicon
        self.cues = cues
        self.throttle_max_wait = throttle_max_wait

    # -- ingest ------------------------------------------------------------

    def ingest_file(self, path: str | Path, fmt: Optional[str] = None) -> IngestResult:
        """Validate and persist cases from a JSONL or CSV file.

        Invalid rows are rejected with row-level diagnostics and never
        partially persisted; valid rows around them still land.
        """
        path = Path(path)
        if fmt is None:
            fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
        if fmt == "jsonl":
            rows = _rows_from_jsonl(path)
        elif fmt == "csv":
            rows = _rows_from_csv(path)
        else:
            raise DomainError(f"unknown ingest format {fmt!r}")
        return self.ingest_rows(rows)

    def ingest_rows(self, numbered_rows) -> IngestResult:
        result = IngestResult()
        for row_number, payload in numbered_rows:
            if isinstance(payload, Exception):
                result.errors.append(RowError(row_number, str(payload)))
                continue
            try:
                case = CaseRecord.from_json_dict(payload)
                self.store.add_case(case)
            except (DomainError, ConflictError) as exc:
                result.errors.append(RowError(row_number, str(exc)))
                continue
            result.case_ids.append(case.case_id)
        return result

    # -- refinement -----------------------------------------------------------

    def refine_case(
        self,
        case_id: str,
        design: PromptDesign,
        backend_id: str,
        suppress_mention: bool = False,
    ) -> tuple[RefinedReport, bool]:
        """Refine one case; returns (report, cached).

        ``cached`` is True when the stored report was returned without
        calling the backend again.
        """
        case = self.store.get_case(case_id)
        backend = self._backend(backend_id)
        report_id = make_report_id(case_id, design, backend_id, suppress_mention)
        existing = self.store.find_report(report_id)
        if existing is not None:
            return existing, True
        bundle = compose_query(case, design, suppress_mention)
        self.throttles.admit(backend_id, self.throttle_max_wait)
        result = backend.complete([ChatTurn(role="user", content=bundle.full_text)])
        report = RefinedReport(
            case_id=case_id,
            text=result.text,
            prompt_design=design,
            backend_id=backend_id,
            raw_response=result.raw_payload,
            suppress_mention=suppress_mention,
        )
        self.store.add_report(report)
        return report, False

    def _backend(self, backend_id: str):
        backend = self.backends.get(backend_id)
        if backend is None:
            raise NotFoundError(f"backend {backend_id!r} not configured")
        return backend

    # -- evaluation runs ------------------------------------------------------

    def run_evaluation(
        self,
        design: PromptDesign,
        backend_id: str,
        per_category: int,
        seed: int,
        *,
        suppress_mention: bool = False,
        uncertain_policy: UncertainPolicy = UncertainPolicy.AS_POSITIVE,
        buckets: Sequence[int] = DEFAULT_LENGTH_BUCKETS,
    ) -> tuple[RunRecord, EvalReport]:
        self._backend(backend_id)
        pool = [c for c in self.store.list_cases() if c.ground_truth_labels]
        sampled = sample_cases(pool, per_category, seed)
        run = RunRecord(
            run_id=uuid.uuid4().hex,
            prompt_design=design.value,
            backend_id=backend_id,
            suppress_mention=suppress_mention,
            per_category=per_category,
            seed=seed,
            uncertain_policy=uncertain_policy.value,
            case_ids=[c.case_id for c in sampled],
            started_at=utc_now_iso(),
            per_case_status={c.case_id: {"status": "pending"} for c in sampled},
        )
        self.store.open_run(run)
        return self._execute_run(run, buckets)

    def resume_run(
        self, run_id: str, buckets: Sequence[int] = DEFAULT_LENGTH_BUCKETS
    ) -> tuple[RunRecord, EvalReport]:
        """Finish a previously aborted run; only pending cases touch the
        backend (done cases reuse their persisted reports)."""
        run = self.store.get_run(run_id)
        if run.finished_at is not None and run.eval_report is not None:
            report = _eval_report_placeholder(run)
            return run, report
        return self._execute_run(run, buckets)

    def _execute_run(
        self, run: RunRecord, buckets: Sequence[int]
    ) -> tuple[RunRecord, EvalReport]:
        design = PromptDesign.from_string(run.prompt_design)
        policy = UncertainPolicy.from_string(run.uncertain_policy)
        for case_id in run.pending_case_ids():
            try:
                self.refine_case(case_id, design, run.backend_id, run.suppress_mention)
            except BackendError as exc:
                # Per-case backend failure: record and move on. Anything
                # else aborts the run with the remaining cases pending.
                self.store.set_case_status(
                    run.run_id, case_id, "failed", f"{exc.kind}: {exc}"
                )
                continue
            self.store.set_case_status(run.run_id, case_id, "done")

        pred, truth, reports, bleu_pairs, failed = [], [], [], [], []
        for case_id in run.case_ids:
            status = run.per_case_status.get(case_id, {}).get("status")
            if status != "done":
                failed.append(case_id)
                continue
            case = self.store.get_case(case_id)
            report = self.store.get_report(
                make_report_id(case_id, design, run.backend_id, run.suppress_mention)
            )
            predicted_labels = label_report(report.text, self.lexicon, self.cues)
            pred.append(binarize(predicted_labels, policy))
            truth.append(binarize(case.ground_truth_labels, policy))
            reports.append(report)
            if case.draft_report:
                bleu_pairs.append((report.text, case.draft_report))

        eval_report = assemble_report(
            pred,
            truth,
            reports,
            EvalMetadata(
                prompt_design=run.prompt_design,
                backend_id=run.backend_id,
                uncertain_policy=run.uncertain_policy,
                seed=run.seed,
            ),
            buckets=buckets,
            bleu_pairs=bleu_pairs,
            failed_case_ids=failed,
        )
        self.store.finish_run(run.run_id, eval_report.to_json_dict())
        return run, eval_report


def _eval_report_placeholder(run: RunRecord) -> EvalReport:
    """Rehydrate a stored EvalReport dict; enough for API reads."""
    from .evaluation import LengthStats, MetricTriple
    from .types import OBSERVATIONS

    data = run.eval_report
    per_observation = {
        obs: MetricTriple(
            precision=data["perObservation"][obs.json_key]["precision"],
            recall=data["perObservation"][obs.json_key]["recall"],
            f1=data["perObservation"][obs.json_key]["f1"],
            degenerate=tuple(
                data["perObservation"][obs.json_key].get("degenerate", ())
            ),
        )
        for obs in OBSERVATIONS
    }
    histogram = LengthStats(
        boundaries=tuple(data["lengthHistogram"]["boundaries"]),
        counts=tuple(data["lengthHistogram"]["counts"]),
        empty_report_fraction=data["emptyReportFraction"],
        n=data["n"],
    )
    return EvalReport(
        per_observation=per_observation,
        macro=MetricTriple(
            precision=data["macro"]["precision"],
            recall=data["macro"]["recall"],
            f1=data["macro"]["f1"],
        ),
        n=data["n"],
        length_histogram=histogram,
        empty_report_fraction=data["emptyReportFraction"],
        metadata=EvalMetadata(
            prompt_design=data["metadata"]["promptDesign"],
            backend_id=data["metadata"]["backendId"],
            uncertain_policy=data["metadata"]["uncertainPolicy"],
            seed=data["metadata"]["seed"],
        ),
        bleu4=data.get("bleu4"),
        failed_case_ids=tuple(data.get("failedCaseIds", ())),
    )


def evaluate_offline(
    rows: Sequence[dict],
    *,
    uncertain_policy: UncertainPolicy = UncertainPolicy.AS_POSITIVE,
    lexicon: Optional[Lexicon] = None,
    cues: Optional[CueSet] = None,
    buckets: Sequence[int] = DEFAULT_LENGTH_BUCKETS,
    compute_bleu: bool = True,
) -> EvalReport:
    """Evaluate pre-refined reports from JSONL rows of
    {caseId, refinedReport, draftReport, groundTruthLabels}."""
    from .types import LabelSet

    pred, truth, reports, bleu_pairs = [], [], [], []
    for i, row in enumerate(rows, start=1):
        try:
            case_id = row["caseId"]
            refined_text = row["refinedReport"]
            labels = LabelSet.from_json_dict(row["groundTruthLabels"])
        except KeyError as exc:
            raise DomainError(f"row {i}: missing field {exc}") from None
        predicted = label_report(refined_text, lexicon, cues)
        pred.append(binarize(predicted, uncertain_policy))
        truth.append(binarize(labels, uncertain_policy))
        reports.append(
            RefinedReport(
                case_id=case_id,
                text=refined_text,
                prompt_design=PromptDesign.P3,
                backend_id="offline",
                raw_response=refined_text,
            )
        )
        draft = row.get("draftReport")
        if compute_bleu and draft:
            bleu_pairs.append((refined_text, draft))
    return assemble_report(
        pred,
        truth,
        reports,
        EvalMetadata(
            prompt_design="offline",
            backend_id="offline",
            uncertain_policy=uncertain_policy.value,
            seed=0,
        ),
        buckets=buckets,
        bleu_pairs=bleu_pairs,
    )
