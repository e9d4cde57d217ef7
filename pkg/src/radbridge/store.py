"""Append-only JSONL persistence with an in-memory index.

Four segment files (cases, reports, sessions, runs) live under one store
directory. Every mutation appends one or more newline-terminated JSON lines
and fsyncs. A trailing line without its newline is a torn write and is
discarded on load; chat Q/A pairs are batched into a single line so they
land atomically. Sessions and runs are persisted as event streams and
folded back into objects on load, keeping every write append-only.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import ConflictError, DomainError, NotFoundError
from .types import CaseRecord, ChatTurn, RefinedReport, utc_now_iso


def _dump_line(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"


def _load_segment(path: Path) -> list[dict]:
    """Parse one segment. The final line is discarded when it lacks its
    newline terminator (torn write); corruption anywhere else is an error,
    because completed appends are never rewritten."""
    if not path.exists():
        return []
    raw = path.read_bytes()
    if not raw:
        return []
    lines = raw.split(b"\n")
    lines = lines[:-1]  # either the empty post-newline element or a torn tail
    records = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line.decode("utf-8")))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DomainError(
                f"{path.name}: corrupt record on line {i + 1}: {exc}"
            ) from exc
    return records


@dataclass
class SessionRecord:
    session_id: str
    case_id: str
    report_id: str
    context_header: str
    created_at: str
    turns: list[ChatTurn] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "sessionId": self.session_id,
            "caseId": self.case_id,
            "reportId": self.report_id,
            "contextHeader": self.context_header,
            "createdAt": self.created_at,
            "turns": [t.to_json_dict() for t in self.turns],
        }


@dataclass
class RunRecord:
    run_id: str
    prompt_design: str
    backend_id: str
    suppress_mention: bool
    per_category: int
    seed: int
    uncertain_policy: str
    case_ids: list[str]
    started_at: str
    finished_at: Optional[str] = None
    per_case_status: dict = field(default_factory=dict)
    eval_report: Optional[dict] = None

    @property
    def complete(self) -> bool:
        return all(s.get("status") != "pending" for s in self.per_case_status.values())

    def pending_case_ids(self) -> list[str]:
        return [
            cid
            for cid in self.case_ids
            if self.per_case_status.get(cid, {}).get("status") == "pending"
        ]

    def to_json_dict(self) -> dict:
        return {
            "runId": self.run_id,
            "promptDesign": self.prompt_design,
            "backendId": self.backend_id,
            "suppressMention": self.suppress_mention,
            "perCategory": self.per_category,
            "seed": self.seed,
            "uncertainPolicy": self.uncertain_policy,
            "caseIds": list(self.case_ids),
            "startedAt": self.started_at,
            "finishedAt": self.finished_at,
            "perCaseStatus": self.per_case_status,
            "complete": self.complete,
        }


class CaseStore:
    """Keyed, append-only collection of cases, refined reports, chat
    sessions, and evaluation runs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._cases: dict[str, CaseRecord] = {}
        self._case_order: list[str] = []
        self._reports: dict[str, RefinedReport] = {}
        self._sessions: dict[str, SessionRecord] = {}
        self._runs: dict[str, RunRecord] = {}
        self._reload()

    # -- loading -----------------------------------------------------------

    def _reload(self) -> None:
        for record in _load_segment(self.root / "cases.jsonl"):
            case = CaseRecord.from_json_dict(record)
            self._cases[case.case_id] = case
            self._case_order.append(case.case_id)
        for record in _load_segment(self.root / "reports.jsonl"):
            report = RefinedReport.from_json_dict(record)
            self._reports[report.report_id] = report
        for event in _load_segment(self.root / "sessions.jsonl"):
            self._apply_session_event(event)
        for event in _load_segment(self.root / "runs.jsonl"):
            self._apply_run_event(event)

    def _apply_session_event(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "session-opened":
            record = SessionRecord(
                session_id=event["sessionId"],
                case_id=event["caseId"],
                report_id=event["reportId"],
                context_header=event["contextHeader"],
                created_at=event["createdAt"],
            )
            self._sessions[record.session_id] = record
        elif kind == "turns":
            session = self._sessions.get(event["sessionId"])
            if session is None:
                raise DomainError(
                    f"turns event for unknown session {event.get('sessionId')!r}"
                )
            session.turns.extend(
                ChatTurn(role=t["role"], content=t["content"])
                for t in event["turns"]
            )
        else:
            raise DomainError(f"unknown session event {kind!r}")

    def _apply_run_event(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "run-opened":
            record = RunRecord(
                run_id=event["runId"],
                prompt_design=event["promptDesign"],
                backend_id=event["backendId"],
                suppress_mention=event["suppressMention"],
                per_category=event["perCategory"],
                seed=event["seed"],
                uncertain_policy=event["uncertainPolicy"],
                case_ids=list(event["caseIds"]),
                started_at=event["startedAt"],
                per_case_status={
                    cid: {"status": "pending"} for cid in event["caseIds"]
                },
            )
            self._runs[record.run_id] = record
        elif kind == "case-status":
            run = self._require_run_for_event(event)
            status = {"status": event["status"]}
            if event.get("reason"):
                status["reason"] = event["reason"]
            run.per_case_status[event["caseId"]] = status
        elif kind == "run-finished":
            run = self._require_run_for_event(event)
            run.finished_at = event["finishedAt"]
            run.eval_report = event.get("evalReport")
        else:
            raise DomainError(f"unknown run event {kind!r}")

    def _require_run_for_event(self, event: dict) -> RunRecord:
        run = self._runs.get(event.get("runId", ""))
        if run is None:
            raise DomainError(f"event for unknown run {event.get('runId')!r}")
        return run

    # -- appending ---------------------------------------------------------

    def _append_lines(self, segment: str, records: Iterable[dict]) -> None:
        payload = "".join(_dump_line(r) for r in records)
        with open(self.root / segment, "a", encoding="utf-8") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())

    # -- cases ---------------------------------------------------------------

    def add_case(self, case: CaseRecord) -> None:
        with self._lock:
            if case.case_id in self._cases:
                raise ConflictError(f"case {case.case_id!r} already exists")
            self._append_lines("cases.jsonl", [case.to_json_dict()])
            self._cases[case.case_id] = case
            self._case_order.append(case.case_id)

    def get_case(self, case_id: str) -> CaseRecord:
        case = self._cases.get(case_id)
        if case is None:
            raise NotFoundError(f"case {case_id!r} not found")
        return case

    def has_case(self, case_id: str) -> bool:
        return case_id in self._cases

    def list_cases(self) -> list[CaseRecord]:
        with self._lock:
            return [self._cases[cid] for cid in self._case_order]

    # -- refined reports -----------------------------------------------------

    def add_report(self, report: RefinedReport) -> None:
        with self._lock:
            if report.report_id in self._reports:
                raise ConflictError(f"report {report.report_id!r} already exists")
            self._append_lines("reports.jsonl", [report.to_json_dict()])
            self._reports[report.report_id] = report

    def get_report(self, report_id: str) -> RefinedReport:
        report = self._reports.get(report_id)
        if report is None:
            raise NotFoundError(f"report {report_id!r} not found")
        return report

    def find_report(self, report_id: str) -> Optional[RefinedReport]:
        return self._reports.get(report_id)

    def list_reports(self) -> list[RefinedReport]:
        with self._lock:
            return list(self._reports.values())

    # -- chat sessions ---------------------------------------------------------

    def open_session(
        self, session_id: str, case_id: str, report_id: str, context_header: str
    ) -> SessionRecord:
        with self._lock:
            if session_id in self._sessions:
                raise ConflictError(f"session {session_id!r} already exists")
            record = SessionRecord(
                session_id=session_id,
                case_id=case_id,
                report_id=report_id,
                context_header=context_header,
                created_at=utc_now_iso(),
            )
            self._append_lines(
                "sessions.jsonl",
                [
                    {
                        "event": "session-opened",
                        "sessionId": session_id,
                        "caseId": case_id,
                        "reportId": report_id,
                        "contextHeader": context_header,
                        "createdAt": record.created_at,
                    }
                ],
            )
            self._sessions[session_id] = record
            return record

    def get_session(self, session_id: str) -> SessionRecord:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"session {session_id!r} not found")
        return session

    def list_sessions(self) -> list[SessionRecord]:
        with self._lock:
            return list(self._sessions.values())

    def append_turns(self, session_id: str, turns: Iterable[ChatTurn]) -> None:
        """One event line for the whole batch, so a Q/A pair lands atomically."""
        turns = list(turns)
        with self._lock:
            session = self.get_session(session_id)
            self._append_lines(
                "sessions.jsonl",
                [
                    {
                        "event": "turns",
                        "sessionId": session_id,
                        "turns": [t.to_json_dict() for t in turns],
                    }
                ],
            )
            session.turns.extend(turns)

    # -- evaluation runs --------------------------------------------------------

    def open_run(self, run: RunRecord) -> None:
        with self._lock:
            if run.run_id in self._runs:
                raise ConflictError(f"run {run.run_id!r} already exists")
            self._append_lines(
                "runs.jsonl",
                [
                    {
                        "event": "run-opened",
                        "runId": run.run_id,
                        "promptDesign": run.prompt_design,
                        "backendId": run.backend_id,
                        "suppressMention": run.suppress_mention,
                        "perCategory": run.per_category,
                        "seed": run.seed,
                        "uncertainPolicy": run.uncertain_policy,
                        "caseIds": list(run.case_ids),
                        "startedAt": run.started_at,
                    }
                ],
            )
            self._runs[run.run_id] = run

    def set_case_status(
        self, run_id: str, case_id: str, status: str, reason: Optional[str] = None
    ) -> None:
        with self._lock:
            run = self.get_run(run_id)
            event = {
                "event": "case-status",
                "runId": run_id,
                "caseId": case_id,
                "status": status,
            }
            entry = {"status": status}
            if reason:
                event["reason"] = reason
                entry["reason"] = reason
            self._append_lines("runs.jsonl", [event])
            run.per_case_status[case_id] = entry

    def finish_run(self, run_id: str, eval_report: dict) -> None:
        with self._lock:
            run = self.get_run(run_id)
            finished_at = utc_now_iso()
            self._append_lines(
                "runs.jsonl",
                [
                    {
                        "event": "run-finished",
                        "runId": run_id,
                        "finishedAt": finished_at,
                        "evalReport": eval_report,
                    }
                ],
            )
            run.finished_at = finished_at
            run.eval_report = eval_report

    def get_run(self, run_id: str) -> RunRecord:
        run = self._runs.get(run_id)
        if run is None:
            raise NotFoundError(f"run {run_id!r} not found")
        return run
