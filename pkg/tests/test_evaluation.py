import math
import random

import pytest

from radbridge.errors import DomainError, InsufficientPoolError
from radbridge.evaluation import (
    DEFAULT_LENGTH_BUCKETS,
    EvalMetadata,
    assemble_report,
    bleu4,
    confusion,
    f1_score,
    format_table,
    length_stats,
    prf1,
    sample_cases,
)
from radbridge.types import (
    NO_FINDING,
    OBSERVATIONS,
    CaseRecord,
    LabelStatus,
    LabelSet,
    Observation,
    PromptDesign,
    RefinedReport,
)
from conftest import build_pool, labels_for, scores_for


def random_vectors(rng, n):
    return [tuple(rng.random() < 0.5 for _ in range(5)) for _ in range(n)]


def brute_force_counts(pred, truth):
    """Independent recount, one pass per (case, observation) pair."""
    out = {}
    for j, obs in enumerate(OBSERVATIONS):
        cells = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
        for i in range(len(pred)):
            p, t = pred[i][j], truth[i][j]
            key = ("tp" if t else "fp") if p else ("fn" if t else "tn")
            cells[key] += 1
        out[obs] = cells
    return out


class TestConfusion:
    def test_perfect_prediction(self):
        rng = random.Random(1)
        vectors = random_vectors(rng, 10)
        counts = confusion(vectors, vectors)
        for obs in OBSERVATIONS:
            assert counts[obs].fp == 0
            assert counts[obs].fn == 0

    def test_all_true_vs_all_false(self):
        pred = [(True,) * 5] * 10
        truth = [(False,) * 5] * 10
        counts = confusion(pred, truth)
        for obs in OBSERVATIONS:
            assert counts[obs].fp == 10
            assert counts[obs].tp == 0

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            confusion([(True,) * 5], [])

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            confusion([(True,) * 4], [(True,) * 5])

    def test_matches_brute_force_on_random_instances(self):
        rng = random.Random(50)
        for _ in range(50):
            pred = random_vectors(rng, 50)
            truth = random_vectors(rng, 50)
            counts = confusion(pred, truth)
            expected = brute_force_counts(pred, truth)
            for obs in OBSERVATIONS:
                got = counts[obs]
                assert (got.tp, got.fp, got.fn, got.tn) == (
                    expected[obs]["tp"],
                    expected[obs]["fp"],
                    expected[obs]["fn"],
                    expected[obs]["tn"],
                )
                assert got.total == 50


class TestPrf1:
    @pytest.mark.parametrize(
        "precision,recall,expected",
        [
            (0.606, 0.569, 0.587),  # harmonic mean of the pair, 3 d.p.
            (0.563, 0.626, 0.593),
            (0.310, 0.803, 0.447),
        ],
    )
    def test_known_f1_triples(self, precision, recall, expected):
        assert f1_score(precision, recall) == pytest.approx(expected, abs=0.001)

    def test_degenerate_zero_counts(self):
        pred = [(False,) * 5] * 4
        truth = [(False,) * 5] * 4
        result = prf1(confusion(pred, truth))
        for obs in OBSERVATIONS:
            triple = result[obs]
            assert triple.precision == 0.0
            assert triple.recall == 0.0
            assert triple.f1 == 0.0
            assert set(triple.degenerate) == {"precision", "recall", "f1"}

    def test_macro_is_unweighted_mean(self):
        rng = random.Random(3)
        pred = random_vectors(rng, 30)
        truth = random_vectors(rng, 30)
        result = prf1(confusion(pred, truth))
        assert result.macro.f1 == pytest.approx(
            sum(result[o].f1 for o in OBSERVATIONS) / 5, abs=1e-15
        )

    def test_matches_brute_force_to_1e12(self):
        rng = random.Random(99)
        for _ in range(50):
            pred = random_vectors(rng, 50)
            truth = random_vectors(rng, 50)
            result = prf1(confusion(pred, truth))
            expected = brute_force_counts(pred, truth)
            for obs in OBSERVATIONS:
                c = expected[obs]
                p = c["tp"] / (c["tp"] + c["fp"]) if c["tp"] + c["fp"] else 0.0
                r = c["tp"] / (c["tp"] + c["fn"]) if c["tp"] + c["fn"] else 0.0
                f = 2 * p * r / (p + r) if p + r else 0.0
                assert abs(result[obs].precision - p) < 1e-12
                assert abs(result[obs].recall - r) < 1e-12
                assert abs(result[obs].f1 - f) < 1e-12

    def test_permutation_invariance(self):
        rng = random.Random(17)
        pred = random_vectors(rng, 40)
        truth = random_vectors(rng, 40)
        order = list(range(40))
        rng.shuffle(order)
        a = prf1(confusion(pred, truth))
        b = prf1(confusion([pred[i] for i in order], [truth[i] for i in order]))
        for obs in OBSERVATIONS:
            assert a[obs] == b[obs]


class TestSampleCases:
    def test_draws_per_category(self, pool_cases):
        picked = sample_cases(pool_cases, 2, seed=11)
        assert len(picked) == 12
        assert len({c.case_id for c in picked}) == 12

    def test_same_seed_same_selection(self, pool_cases):
        a = sample_cases(pool_cases, 2, seed=5)
        b = sample_cases(pool_cases, 2, seed=5)
        assert [c.case_id for c in a] == [c.case_id for c in b]

    def test_fifty_per_category_yields_three_hundred(self):
        pool = build_pool(60)
        picked = sample_cases(pool, 50, seed=13)
        assert len(picked) == 300
        assert len({c.case_id for c in picked}) == 300

    def test_different_seed_differs(self):
        pool = build_pool(6)
        a = sample_cases(pool, 2, seed=1)
        b = sample_cases(pool, 2, seed=2)
        assert [c.case_id for c in a] != [c.case_id for c in b]

    def test_insufficient_pool_names_category(self, pool_cases):
        with pytest.raises(InsufficientPoolError) as excinfo:
            sample_cases(pool_cases, 50, seed=0)
        assert excinfo.value.category == Observation.CARDIOMEGALY.value

    def test_multi_category_case_assigned_once(self):
        pool = build_pool(3)
        both = CaseRecord(
            case_id="pool-both-0",
            draft_report="d",
            scores=scores_for({Observation.CARDIOMEGALY, Observation.EDEMA}),
            ground_truth_labels=labels_for(
                {Observation.CARDIOMEGALY, Observation.EDEMA}
            ),
            created_at="2026-01-01T00:00:00+00:00",
        )
        pool = [both] + pool
        picked = sample_cases(pool, 3, seed=2)
        assert len(picked) == 18
        assert len({c.case_id for c in picked}) == 18

    def test_pool_order_does_not_matter(self):
        pool = build_pool(4)
        rng = random.Random(8)
        shuffled = pool[:]
        rng.shuffle(shuffled)
        a = [c.case_id for c in sample_cases(pool, 2, seed=9)]
        b = [c.case_id for c in sample_cases(shuffled, 2, seed=9)]
        assert a == b

    def test_unlabeled_pool_rejected(self):
        pool = [CaseRecord(case_id="x", draft_report="d")]
        with pytest.raises(DomainError):
            sample_cases(pool, 1, seed=0)


def make_report(case_id, text):
    return RefinedReport(
        case_id=case_id,
        text=text,
        prompt_design=PromptDesign.P3,
        backend_id="mock",
        raw_response=text,
    )


class TestLengthStats:
    def test_bucket_boundaries(self):
        reports = [
            make_report("a", " ".join(["w"] * 5)),
            make_report("b", " ".join(["w"] * 50)),
            make_report("c", " ".join(["w"] * 500)),
        ]
        stats = length_stats(reports, buckets=[10, 100])
        assert stats.counts == (1, 1, 1)

    def test_boundary_word_count_goes_to_upper_bucket(self):
        reports = [make_report("a", " ".join(["w"] * 10))]
        stats = length_stats(reports, buckets=[10, 100])
        assert stats.counts == (0, 1, 0)

    def test_all_empty(self):
        reports = [make_report("a", ""), make_report("b", "n/a")]
        stats = length_stats(reports)
        assert stats.empty_report_fraction == 1.0

    def test_boilerplate_detected_despite_length(self):
        reports = [make_report("a", "I'm sorry, I cannot generate a report.")]
        stats = length_stats(reports)
        assert stats.empty_report_fraction == 1.0

    def test_strictly_increasing_required(self):
        with pytest.raises(DomainError):
            length_stats([], buckets=[10, 10])

    def test_matches_brute_force_recount(self):
        rng = random.Random(12)
        reports = [
            make_report(f"c{i}", " ".join(["word"] * rng.randint(0, 200)))
            for i in range(200)
        ]
        stats = length_stats(reports)
        bounds = list(stats.boundaries)
        expected = [0] * (len(bounds) + 1)
        for report in reports:
            wc = report.word_count
            slot = 0
            while slot < len(bounds) and wc >= bounds[slot]:
                slot += 1
            expected[slot] += 1
        assert list(stats.counts) == expected
        assert sum(stats.counts) == 200


class TestBleu4:
    def test_identity(self):
        assert bleu4("the cat sat", ["the cat sat"]) == pytest.approx(1.0)
        assert bleu4("one", ["one"]) == pytest.approx(1.0)

    def test_no_overlap(self):
        assert bleu4("alpha beta gamma delta", ["epsilon zeta eta theta"]) == 0.0

    def test_empty_candidate(self):
        assert bleu4("", ["anything"]) == 0.0

    def test_requires_references(self):
        with pytest.raises(DomainError):
            bleu4("x", [])

    def test_short_candidate_frozen_value(self):
        # p1=p2=p3=1 over the three usable orders; BP = exp(1 - 4/3).
        expected = math.exp(-1.0 / 3.0)
        assert bleu4("the cat sat", ["the cat sat down"]) == pytest.approx(
            expected, abs=1e-12
        )

    def test_multi_reference_clipping_hand_computed(self):
        # p1=5/7, p2=4/6, p3=2/5, p4=1/4; c=7, closest r=7 so BP=1:
        # BLEU = (5/7 * 2/3 * 2/5 * 1/4) ** 0.25 = (1/21) ** 0.25
        value = bleu4(
            "the cat the cat on the mat",
            ["the cat is on the mat", "there is a cat on the mat"],
        )
        assert value == pytest.approx((1.0 / 21.0) ** 0.25, abs=1e-12)

    def test_case_insensitive(self):
        assert bleu4("The Cat Sat", ["the cat sat"]) == pytest.approx(1.0)

    def test_duplicate_reference_is_noop(self):
        rng = random.Random(5)
        words = ["alpha", "beta", "gamma", "delta", "epsilon"]
        for _ in range(100):
            cand = " ".join(rng.choices(words, k=rng.randint(1, 12)))
            ref = " ".join(rng.choices(words, k=rng.randint(1, 12)))
            single = bleu4(cand, [ref])
            doubled = bleu4(cand, [ref, ref])
            assert single == pytest.approx(doubled, abs=1e-15)
            assert 0.0 <= single <= 1.0

    def test_brevity_tie_breaks_to_shorter_reference(self):
        # c=2; references of length 1 and 3 tie on |len - c|. Both unigram
        # and bigram precision are 1, so picking the shorter reference
        # (r=1 <= c) must leave no penalty; the longer one would have
        # multiplied in exp(1 - 3/2).
        assert bleu4("a b", ["a", "a b c"]) == pytest.approx(1.0, abs=1e-12)


class TestEvalReport:
    def test_assemble_and_format(self):
        pred = [(True, False, False, False, True)] * 4
        truth = [(True, False, False, False, False)] * 4
        reports = [make_report(f"c{i}", "some refined text here") for i in range(4)]
        report = assemble_report(
            pred,
            truth,
            reports,
            EvalMetadata("P3", "mock", "AsPositive", 7),
        )
        assert report.n == 4
        assert sum(report.length_histogram.counts) == 4
        table = format_table(report)
        assert "Average" in table
        assert "Pleural Effusion" in table

    def test_histogram_must_sum_to_n(self):
        from radbridge.evaluation import LengthStats, MetricTriple, EvalReport

        with pytest.raises(DomainError):
            EvalReport(
                per_observation={o: MetricTriple(0, 0, 0) for o in OBSERVATIONS},
                macro=MetricTriple(0, 0, 0),
                n=3,
                length_histogram=LengthStats((10,), (1, 1), 0.0, 2),
                empty_report_fraction=0.0,
                metadata=EvalMetadata("P3", "m", "AsPositive", 0),
            )
