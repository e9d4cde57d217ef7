"""Refining a draft report with the deterministic mock backend.

The TemplateRefine mock parses the composed prompt the way a cooperative
LLM would read it and answers with a report that mentions exactly the
diseases the classifier flagged. Run: python demos/02_mock_refinement.py
"""

from radbridge import CaseRecord, DiagnosisScores, PromptDesign, compose_query
from radbridge.llm import ChatTurn, MockBehavior, mock_complete

case = CaseRecord(
    case_id="demo-2",
    draft_report="No acute abnormality.",
    scores=DiagnosisScores(0.05, 0.05, 0.72, 0.05, 0.91),
)

bundle = compose_query(case, PromptDesign.P3)
print("## Outgoing prompt")
print(bundle.full_text)

result = mock_complete(
    [ChatTurn(role="user", content=bundle.full_text)], MockBehavior.TEMPLATE_REFINE
)
print("\n## Mock-refined report")
print(result.text)

# A known LLM tic: the model keeps crediting "Network A" unless told not to.
suppressed = compose_query(case, PromptDesign.P3, suppress_mention=True)
result2 = mock_complete(
    [ChatTurn(role="user", content=suppressed.full_text)], MockBehavior.TEMPLATE_REFINE
)
print("\n## With mention suppression")
print(result2.text)
