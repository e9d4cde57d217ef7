import random

import pytest
from hypothesis import given, strategies as st

from radbridge.errors import DomainError
from radbridge.labeler import (
    CueSet,
    Lexicon,
    LexiconEntry,
    UncertainPolicy,
    binarize,
    default_cues,
    default_lexicon,
    label_report,
    segment_sentences,
)
from radbridge.types import (
    OBSERVATIONS,
    LabelSet,
    LabelStatus,
    Observation,
)
from conftest import DATA_DIR, load_jsonl


class TestSegmentSentences:
    def test_two_sentences(self):
        parts = segment_sentences("No effusion. Heart normal.")
        assert [s.text for s in parts] == ["No effusion.", "Heart normal."]

    def test_empty(self):
        assert segment_sentences("") == []

    def test_abbreviation_guard(self):
        parts = segment_sentences("Impression: e.g. stable.")
        assert [s.text for s in parts] == ["Impression: e.g. stable."]

    @pytest.mark.parametrize(
        "text,count",
        [
            ("Dr. Smith read this. No findings.", 2),
            ("See exam no. 14 for comparison. Stable.", 2),
            ("What changed? Nothing! All stable.", 3),
            ("Trailing sentence without punctuation", 1),
        ],
    )
    def test_guards_and_terminators(self, text, count):
        assert len(segment_sentences(text)) == count

    def test_offsets_point_into_original(self):
        text = "  No effusion.  Heart normal."
        for sentence in segment_sentences(text):
            assert text[sentence.start : sentence.end] == sentence.text


class TestLexiconValidation:
    def test_phrase_cannot_serve_two_observations(self):
        entries = [
            LexiconEntry(Observation.EDEMA, ("edema",)),
            LexiconEntry(Observation.CONSOLIDATION, ("edema",)),
        ]
        with pytest.raises(DomainError):
            Lexicon(entries)

    def test_phrases_must_be_lowercase(self):
        with pytest.raises(DomainError):
            LexiconEntry(Observation.EDEMA, ("Edema",))

    def test_cue_lists_must_be_disjoint(self):
        with pytest.raises(DomainError):
            CueSet(("no",), ("no", "maybe"), 6)

    def test_shipped_data_loads(self):
        lexicon = default_lexicon()
        assert {e.observation for e in lexicon.entries} == set(OBSERVATIONS)
        cues = default_cues()
        assert cues.scope_window == 6


class TestLabelReport:
    def test_simple_negation(self):
        labels = label_report("There is no pleural effusion.")
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.NEGATIVE
        for obs in OBSERVATIONS:
            if obs is not Observation.PLEURAL_EFFUSION:
                assert labels[obs] is LabelStatus.NOT_MENTIONED

    def test_empty_report(self):
        labels = label_report("")
        assert all(s is LabelStatus.NOT_MENTIONED for _, s in labels.items())
        assert labels.no_finding

    def test_uncertain_and_positive_mix(self):
        labels = label_report(
            "Possible consolidation in the left lower lobe. "
            "Small bilateral pleural effusions."
        )
        assert labels[Observation.CONSOLIDATION] is LabelStatus.UNCERTAIN
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.POSITIVE

    def test_positive_outranks_negative_across_sentences(self):
        labels = label_report("No effusion on the right. Small left pleural effusion.")
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.POSITIVE

    def test_negation_outranks_uncertainty_in_window(self):
        labels = label_report("No definite evidence of possible pleural effusion.")
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.NEGATIVE

    def test_scope_window_limits_negation(self):
        # Cue sits 7 tokens before the mention: out of the 6-token window.
        text = "No prior imaging is available for review of the pleural effusion."
        labels = label_report(text)
        assert labels[Observation.PLEURAL_EFFUSION] is LabelStatus.POSITIVE

    def test_case_insensitive(self):
        lower = label_report("no pleural effusion. likely atelectasis.")
        upper = label_report("NO PLEURAL EFFUSION. LIKELY ATELECTASIS.")
        assert lower == upper

    def test_locality(self):
        # Appending a sentence without lexicon phrases changes nothing.
        base = "Moderate cardiomegaly. Possible edema."
        extended = base + " The osseous structures are unremarkable."
        assert label_report(base) == label_report(extended)

    def test_monotone_mention(self):
        labels = label_report("The mediastinum is within normal limits.")
        assert all(s is LabelStatus.NOT_MENTIONED for _, s in labels.items())

    @given(st.text(alphabet="abcdefghij .,!?", max_size=120))
    def test_never_crashes_and_is_deterministic(self, text):
        assert label_report(text) == label_report(text)

    def test_severity_phrased_text_round_trips_through_labeling(self):
        # Severity-phrased prompt text reads back with the statuses a human
        # would assign to those hedges: "No sign of" negates, "Small
        # possibility"/"Likely" hedge, "Definitely" asserts.
        import random

        from radbridge.bridge import render_p2
        from radbridge.types import DiagnosisScores, SeverityGrade, grade_of

        expected_status = {
            SeverityGrade.NO_SIGN: LabelStatus.NEGATIVE,
            SeverityGrade.SMALL_POSSIBILITY: LabelStatus.UNCERTAIN,
            SeverityGrade.LIKELY: LabelStatus.UNCERTAIN,
            SeverityGrade.DEFINITELY: LabelStatus.POSITIVE,
        }
        rng = random.Random(88)
        for _ in range(200):
            scores = DiagnosisScores(*[rng.random() for _ in range(5)])
            labels = label_report(render_p2(scores))
            for obs, value in scores.items():
                assert labels[obs] is expected_status[grade_of(value)], (
                    obs,
                    value,
                    render_p2(scores),
                )


class TestCorpusAccuracy:
    def test_status_agreement_at_least_95_percent(self):
        rows = load_jsonl(DATA_DIR / "labeled_corpus.jsonl")
        assert len(rows) == 60
        total = agree = 0
        for row in rows:
            hand = LabelSet.from_json_dict(row["labels"])
            got = label_report(row["text"])
            for obs in OBSERVATIONS:
                total += 1
                agree += hand[obs] == got[obs]
        assert total == 300
        assert agree / total >= 0.95, f"agreement {agree}/{total}"

    def test_case_mutation_invariance(self):
        rows = load_jsonl(DATA_DIR / "labeled_corpus.jsonl")
        rng = random.Random(1234)
        checked = 0
        while checked < 1000:
            row = rng.choice(rows)
            mutated = "".join(
                ch.upper() if rng.random() < 0.5 else ch.lower()
                for ch in row["text"]
            )
            assert label_report(mutated) == label_report(row["text"])
            checked += 1


class TestBinarize:
    def test_policies(self):
        labels = LabelSet(
            LabelStatus.POSITIVE,
            LabelStatus.NEGATIVE,
            LabelStatus.UNCERTAIN,
            LabelStatus.NOT_MENTIONED,
            LabelStatus.UNCERTAIN,
        )
        as_pos = binarize(labels, UncertainPolicy.AS_POSITIVE)
        as_neg = binarize(labels, UncertainPolicy.AS_NEGATIVE)
        assert as_pos == (True, False, True, False, True)
        assert as_neg == (True, False, False, False, False)

    def test_all_not_mentioned(self):
        labels = LabelSet(*[LabelStatus.NOT_MENTIONED] * 5)
        assert binarize(labels, UncertainPolicy.AS_POSITIVE) == (False,) * 5
