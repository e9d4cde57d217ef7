"""Grounded chat: every question rides on the case's bridged findings and
refined report. Run: python demos/06_grounded_chat.py
"""

import tempfile
from pathlib import Path

from radbridge import CaseRecord, DiagnosisScores, PromptDesign
from radbridge.chat import ChatService
from radbridge.llm import MockBackend, MockBehavior, ScriptedSource
from radbridge.pipeline import Pipeline
from radbridge.store import CaseStore

workdir = Path(tempfile.mkdtemp(prefix="radbridge-chat-"))
store = CaseStore(workdir / "store")
backends = {
    "mock": MockBackend(MockBehavior.TEMPLATE_REFINE, backend_id="mock"),
    "scripted": MockBackend(
        MockBehavior.SCRIPTED,
        script=ScriptedSource(
            [
                "Airspace consolidation means the air sacs are filled with "
                "fluid or other material instead of air.",
                "Treatment depends on the cause; your clinician may order "
                "antibiotics and a follow-up image.",
            ]
        ),
        backend_id="scripted",
    ),
}
pipeline = Pipeline(store, backends)

store.add_case(
    CaseRecord(
        case_id="chat-demo",
        draft_report="Opacity at the right base.",
        scores=DiagnosisScores(0.1, 0.1, 0.85, 0.1, 0.2),
    )
)
report, _ = pipeline.refine_case("chat-demo", PromptDesign.P3, "mock")
print("## Refined report")
print(report.text)

service = ChatService(store, backends)
session = service.open_session("chat-demo", report.report_id)
print("\n## Context header (what grounds every request)")
print(session.context_header)

for question in (
    "What is airspace consolidation?",
    "What treatment options are appropriate?",
):
    answer = service.ask(session.session_id, question, "scripted")
    print(f"\npatient: {question}")
    print(f"assistant: {answer.content}")

print(f"\ntranscript has {len(service.transcript(session.session_id).turns)} turns")
