import pytest

from radbridge.bridge import compose_query
from radbridge.errors import DomainError, FixtureExhaustedError
from radbridge.labeler import label_report
from radbridge.llm import ChatTurn, MockBackend, MockBehavior, ScriptedSource, mock_complete
from radbridge.types import (
    OBSERVATIONS,
    CaseRecord,
    DiagnosisScores,
    LabelStatus,
    Observation,
    PromptDesign,
)


def user(content):
    return ChatTurn(role="user", content=content)


class TestEcho:
    def test_returns_user_content(self):
        result = mock_complete([user("hello")], MockBehavior.ECHO)
        assert result.text == "hello"

    def test_uses_last_user_turn(self):
        turns = [user("first"), ChatTurn(role="assistant", content="a"), user("second")]
        assert mock_complete(turns, MockBehavior.ECHO).text == "second"


class TestScripted:
    def test_plays_responses_in_order(self):
        script = ScriptedSource(["one", "two"])
        assert mock_complete([user("q")], MockBehavior.SCRIPTED, script=script).text == "one"
        assert mock_complete([user("q")], MockBehavior.SCRIPTED, script=script).text == "two"

    def test_exhaustion_is_an_error(self):
        script = ScriptedSource(["only"])
        mock_complete([user("q")], MockBehavior.SCRIPTED, script=script)
        with pytest.raises(FixtureExhaustedError):
            mock_complete([user("q")], MockBehavior.SCRIPTED, script=script)

    def test_determinism(self):
        texts = []
        for _ in range(2):
            script = ScriptedSource(["a", "b"])
            texts.append(
                [
                    mock_complete([user("x")], MockBehavior.SCRIPTED, script=script).text,
                    mock_complete([user("y")], MockBehavior.SCRIPTED, script=script).text,
                ]
            )
        assert texts[0] == texts[1]


def bundle_for(scores, design=PromptDesign.P3, suppress=False, draft=None):
    case = CaseRecord(
        case_id="m1",
        draft_report=draft,
        scores=scores,
        created_at="2026-01-01T00:00:00+00:00",
    )
    return compose_query(case, design, suppress_mention=suppress)


class TestTemplateRefine:
    def test_mentions_exactly_the_p3_diseases(self):
        bundle = bundle_for(DiagnosisScores(0.05, 0.05, 0.05, 0.05, 0.91))
        result = mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
        labels = label_report(result.text)
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.POSITIVE
        for obs in OBSERVATIONS:
            if obs is not Observation.PLEURAL_EFFUSION:
                assert labels[obs] is LabelStatus.NOT_MENTIONED, obs

    def test_no_finding_template(self):
        bundle = bundle_for(DiagnosisScores(0.1, 0.1, 0.1, 0.1, 0.1))
        result = mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
        assert "no acute cardiopulmonary process" in result.text.lower()
        assert label_report(result.text).no_finding

    def test_mentions_network_when_not_suppressed(self):
        bundle = bundle_for(DiagnosisScores(0.05, 0.05, 0.05, 0.05, 0.91))
        result = mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
        assert "Network A" in result.text

    def test_suppression_removes_network_mentions(self):
        bundle = bundle_for(
            DiagnosisScores(0.05, 0.05, 0.05, 0.05, 0.91), suppress=True
        )
        result = mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
        for label in ("Network A", "Network B", "Network C"):
            assert label not in result.text

    def test_draft_content_does_not_leak_into_mentions(self):
        # Only Network A's description drives the mention set.
        bundle = bundle_for(
            DiagnosisScores(0.05, 0.05, 0.05, 0.05, 0.91),
            draft="Known cardiomegaly and edema in the draft.",
        )
        result = mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
        labels = label_report(result.text)
        assert labels[Observation.CARDIOMEGALY] is LabelStatus.NOT_MENTIONED
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.POSITIVE

    def test_determinism(self):
        bundle = bundle_for(DiagnosisScores(0.9, 0.05, 0.6, 0.05, 0.91))
        results = [
            mock_complete([user(bundle.full_text)], MockBehavior.TEMPLATE_REFINE)
            for _ in range(2)
        ]
        assert results[0] == results[1]


class TestMockBackend:
    def test_counts_calls(self):
        backend = MockBackend(MockBehavior.ECHO)
        backend.complete([user("a")])
        backend.complete([user("b")])
        assert backend.calls == 2

    def test_scripted_requires_script(self):
        with pytest.raises(DomainError):
            MockBackend(MockBehavior.SCRIPTED)
