"""Grounded interactive chat over a refined case.

Each session freezes a context header at creation time: a framing sentence
plus safety note, the bridged network descriptions, and the refined report.
Every outgoing request starts with that header as the system turn, followed
by the (capped) turn history and the new question. Stored history is
append-only; the cap only trims what is resent, never what is kept.
"""

from __future__ import annotations

import threading
import uuid
from collections import defaultdict
from typing import Mapping, Optional

from .bridge import render_descriptions
from .errors import DomainError, NotFoundError
from .llm import ChatTurn
from .store import CaseStore, SessionRecord

FRAMING_SENTENCE = (
    "You are assisting with questions about one chest X-ray exam. "
    "Answer using the network findings and the refined report below."
)
SAFETY_FOOTER = (
    "Your answers are informational only and are not a substitute for "
    "professional medical advice."
)

DEFAULT_TURN_CAP = 20


def build_context_header(descriptions: str, refined_text: str) -> str:
    return (
        f"{FRAMING_SENTENCE} {SAFETY_FOOTER}"
        f"\n\n{descriptions}"
        f"\n\nRefined report: {refined_text}"
    )


class ChatService:
    def __init__(
        self,
        store: CaseStore,
        backends: Mapping[str, object],
        turn_cap: int = DEFAULT_TURN_CAP,
    ):
        if turn_cap < 2 or turn_cap % 2 != 0:
            raise DomainError(f"turn cap must be a positive even number, got {turn_cap}")
        self.store = store
        self.backends = dict(backends)
        self.turn_cap = turn_cap
        self._session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._session_locks[session_id]

    def open_session(
        self, case_id: str, report_id: str, session_id: Optional[str] = None
    ) -> SessionRecord:
        """Create a session grounded in one case and one refined report."""
        case = self.store.get_case(case_id)
        report = self.store.get_report(report_id)
        if report.case_id != case_id:
            raise DomainError(
                f"report {report_id!r} belongs to case {report.case_id!r}, "
                f"not {case_id!r}"
            )
        descriptions = render_descriptions(case, report.prompt_design)
        header = build_context_header(descriptions, report.text)
        session_id = session_id or uuid.uuid4().hex
        return self.store.open_session(session_id, case_id, report_id, header)

    def ask(self, session_id: str, question: str, backend_id: str) -> ChatTurn:
        """Send one question; append and persist the Q/A pair atomically.

        On a failed backend call nothing is persisted, so a retry cannot
        duplicate the user turn.
        """
        if not question or not question.strip():
            raise DomainError("question must be non-empty")
        backend = self.backends.get(backend_id)
        if backend is None:
            raise NotFoundError(f"backend {backend_id!r} not configured")
        with self._lock_for(session_id):
            session = self.store.get_session(session_id)
            outgoing = [ChatTurn(role="system", content=session.context_header)]
            outgoing.extend(session.turns[-self.turn_cap:])
            user_turn = ChatTurn(role="user", content=question)
            outgoing.append(user_turn)
            result = backend.complete(outgoing)
            assistant_turn = ChatTurn(role="assistant", content=result.text)
            self.store.append_turns(session_id, [user_turn, assistant_turn])
            return assistant_turn

    def transcript(self, session_id: str) -> SessionRecord:
        return self.store.get_session(session_id)
