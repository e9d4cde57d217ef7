"""Quantitative evaluation: per-observation precision/recall/F1 with macro
averages, report-length statistics, seeded stratified case sampling, and
sentence-level BLEU-4.

Conventions are pinned so results are reproducible: any 0/0 metric is 0 with
a degeneracy flag (never silently dropped from macro averages), the macro
average is the unweighted mean over the five observations, and sampling
assigns a multi-category case to the first canonical category that draws it.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import DomainError, InsufficientPoolError
from .types import (
    NO_FINDING,
    OBSERVATIONS,
    CaseRecord,
    LabelStatus,
    Observation,
    RefinedReport,
    word_count,
)

DEFAULT_LENGTH_BUCKETS: tuple[int, ...] = (10, 20, 40, 80, 160)

# Reports matching one of these strings (case-folded, stripped) carry no
# usable content even when they clear the word-count floor.
NO_CONTENT_PHRASES = frozenset(
    {
        "n/a",
        "none",
        "no report",
        "no report generated",
        "no meaningful content.",
        "unable to generate a report.",
        "i'm sorry, i cannot generate a report.",
    }
)


@dataclass(frozen=True)
class ObservationCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ConfusionCounts:
    per_observation: Mapping[Observation, ObservationCounts]

    def __getitem__(self, obs: Observation) -> ObservationCounts:
        return self.per_observation[obs]


def confusion(
    pred: Sequence[Sequence[bool]], truth: Sequence[Sequence[bool]]
) -> ConfusionCounts:
    """Per-observation tp/fp/fn/tn over aligned boolean vectors."""
    if len(pred) != len(truth):
        raise DomainError(
            f"prediction/truth length mismatch: {len(pred)} vs {len(truth)}"
        )
    width = len(OBSERVATIONS)
    for i, (p, t) in enumerate(zip(pred, truth)):
        if len(p) != width or len(t) != width:
            raise DomainError(
                f"case {i}: vectors must have {width} entries "
                f"(got {len(p)} and {len(t)})"
            )
    counts = {}
    for j, obs in enumerate(OBSERVATIONS):
        tp = fp = fn = tn = 0
        for p, t in zip(pred, truth):
            if p[j] and t[j]:
                tp += 1
            elif p[j] and not t[j]:
                fp += 1
            elif not p[j] and t[j]:
                fn += 1
            else:
                tn += 1
        counts[obs] = ObservationCounts(tp=tp, fp=fp, fn=fn, tn=tn)
    return ConfusionCounts(per_observation=counts)


@dataclass(frozen=True)
class MetricTriple:
    precision: float
    recall: float
    f1: float
    degenerate: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        data = {"precision": self.precision, "recall": self.recall, "f1": self.f1}
        if self.degenerate:
            data["degenerate"] = list(self.degenerate)
        return data


@dataclass(frozen=True)
class Prf1Result:
    per_observation: Mapping[Observation, MetricTriple]
    macro: MetricTriple

    def __getitem__(self, obs: Observation) -> MetricTriple:
        return self.per_observation[obs]


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf1(counts: ConfusionCounts) -> Prf1Result:
    """Precision, recall, F1 per observation plus the unweighted macro mean.

    0/0 ratios resolve to 0 and are flagged rather than thrown, so partial
    runs keep honest macro averages.
    """
    per_observation = {}
    for obs in OBSERVATIONS:
        c = counts[obs]
        degenerate = []
        if c.tp + c.fp == 0:
            precision = 0.0
            degenerate.append("precision")
        else:
            precision = c.tp / (c.tp + c.fp)
        if c.tp + c.fn == 0:
            recall = 0.0
            degenerate.append("recall")
        else:
            recall = c.tp / (c.tp + c.fn)
        if precision + recall == 0:
            f1 = 0.0
            degenerate.append("f1")
        else:
            f1 = f1_score(precision, recall)
        per_observation[obs] = MetricTriple(
            precision=precision, recall=recall, f1=f1, degenerate=tuple(degenerate)
        )
    n = len(OBSERVATIONS)
    macro = MetricTriple(
        precision=sum(m.precision for m in per_observation.values()) / n,
        recall=sum(m.recall for m in per_observation.values()) / n,
        f1=sum(m.f1 for m in per_observation.values()) / n,
    )
    return Prf1Result(per_observation=per_observation, macro=macro)


def _case_in_category(case: CaseRecord, category) -> bool:
    labels = case.ground_truth_labels
    if category == NO_FINDING:
        return labels.no_finding
    return labels[category] is LabelStatus.POSITIVE


def sample_cases(
    pool: Sequence[CaseRecord], per_category: int, seed: int
) -> list[CaseRecord]:
    """Seeded stratified sample: per_category cases for each of the six
    categories (five diseases positive, plus no-finding).

    Categories draw in canonical order; a case drawn for an earlier category
    is no longer eligible later, so the output never repeats a case. Raises
    InsufficientPoolError naming the first category that cannot be filled.
    """
    if per_category < 1:
        raise DomainError(f"perCategory must be >= 1, got {per_category}")
    unlabeled = [c.case_id for c in pool if c.ground_truth_labels is None]
    if unlabeled:
        raise DomainError(
            f"{len(unlabeled)} pool case(s) lack groundTruthLabels, "
            f"first: {unlabeled[0]!r}"
        )
    rng = random.Random(seed)
    selected: list[CaseRecord] = []
    taken: set[str] = set()
    categories: list = list(OBSERVATIONS) + [NO_FINDING]
    for category in categories:
        eligible = sorted(
            (
                c
                for c in pool
                if c.case_id not in taken and _case_in_category(c, category)
            ),
            key=lambda c: c.case_id,
        )
        if len(eligible) < per_category:
            name = category if isinstance(category, str) else category.value
            raise InsufficientPoolError(
                category=name, available=len(eligible), requested=per_category
            )
        picks = rng.sample(eligible, per_category)
        for case in picks:
            taken.add(case.case_id)
            selected.append(case)
    return selected


@dataclass(frozen=True)
class LengthStats:
    boundaries: tuple[int, ...]
    counts: tuple[int, ...]
    empty_report_fraction: float
    n: int

    def to_json_dict(self) -> dict:
        return {
            "boundaries": list(self.boundaries),
            "counts": list(self.counts),
        }


def is_empty_report(text: str) -> bool:
    return word_count(text) < 3 or text.strip().lower() in NO_CONTENT_PHRASES


def length_stats(
    reports: Sequence[RefinedReport],
    buckets: Sequence[int] = DEFAULT_LENGTH_BUCKETS,
) -> LengthStats:
    """Histogram of word counts over len(buckets)+1 ranges, plus the fraction
    of reports with no usable content."""
    boundaries = tuple(buckets)
    if any(b2 <= b1 for b1, b2 in zip(boundaries, boundaries[1:])):
        raise DomainError(f"bucket boundaries must strictly increase: {boundaries}")
    counts = [0] * (len(boundaries) + 1)
    empty = 0
    for report in reports:
        counts[bisect_right(boundaries, report.word_count)] += 1
        if is_empty_report(report.text):
            empty += 1
    fraction = empty / len(reports) if reports else 0.0
    return LengthStats(
        boundaries=boundaries,
        counts=tuple(counts),
        empty_report_fraction=fraction,
        n=len(reports),
    )


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: str, references: Sequence[str]) -> float:
    """BLEU with n-grams up to 4, uniform weights, and brevity penalty.

    Whitespace tokenization, lowercased, clipped counts against all
    references. Orders longer than the candidate are skipped (weights
    re-normalize), so a text always scores 1.0 against itself; an empty
    candidate scores 0.
    """
    if not references:
        raise DomainError("bleu4 requires at least one reference")
    cand = candidate.lower().split()
    refs = [r.lower().split() for r in references]
    if not cand:
        return 0.0
    max_order = min(4, len(cand))
    log_sum = 0.0
    for n in range(1, max_order + 1):
        cand_counts = _ngram_counts(cand, n)
        max_ref_counts: Counter = Counter()
        for ref in refs:
            for gram, count in _ngram_counts(ref, n).items():
                if count > max_ref_counts[gram]:
                    max_ref_counts[gram] = count
        clipped = sum(
            min(count, max_ref_counts[gram]) for gram, count in cand_counts.items()
        )
        total = sum(cand_counts.values())
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    c = len(cand)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum / max_order)


@dataclass(frozen=True)
class EvalMetadata:
    prompt_design: str
    backend_id: str
    uncertain_policy: str
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "promptDesign": self.prompt_design,
            "backendId": self.backend_id,
            "uncertainPolicy": self.uncertain_policy,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EvalReport:
    per_observation: Mapping[Observation, MetricTriple]
    macro: MetricTriple
    n: int
    length_histogram: LengthStats
    empty_report_fraction: float
    metadata: EvalMetadata
    bleu4: Optional[float] = None
    failed_case_ids: tuple[str, ...] = ()

    def __post_init__(self):
        values = [self.empty_report_fraction, self.macro.precision,
                  self.macro.recall, self.macro.f1]
        for triple in self.per_observation.values():
            values += [triple.precision, triple.recall, triple.f1]
        if self.bleu4 is not None:
            values.append(self.bleu4)
        for v in values:
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"metric value outside [0, 1]: {v!r}")
        if sum(self.length_histogram.counts) != self.n:
            raise DomainError(
                f"histogram counts sum to {sum(self.length_histogram.counts)}, "
                f"expected n={self.n}"
            )

    def to_json_dict(self) -> dict:
        data: dict = {
            "perObservation": {
                obs.json_key: triple.to_json_dict()
                for obs, triple in ((o, self.per_observation[o]) for o in OBSERVATIONS)
            },
            "macro": self.macro.to_json_dict(),
            "n": self.n,
            "lengthHistogram": self.length_histogram.to_json_dict(),
            "emptyReportFraction": self.empty_report_fraction,
            "metadata": self.metadata.to_json_dict(),
        }
        if self.bleu4 is not None:
            data["bleu4"] = self.bleu4
        if self.failed_case_ids:
            data["failedCaseIds"] = list(self.failed_case_ids)
        return data


def assemble_report(
    pred: Sequence[Sequence[bool]],
    truth: Sequence[Sequence[bool]],
    reports: Sequence[RefinedReport],
    metadata: EvalMetadata,
    *,
    buckets: Sequence[int] = DEFAULT_LENGTH_BUCKETS,
    bleu_pairs: Optional[Sequence[tuple[str, str]]] = None,
    failed_case_ids: Sequence[str] = (),
) -> EvalReport:
    """Fold predictions, truths, and refined reports into one EvalReport."""
    result = prf1(confusion(pred, truth))
    stats = length_stats(reports, buckets)
    bleu_value: Optional[float] = None
    if bleu_pairs:
        bleu_value = sum(bleu4(cand, [ref]) for cand, ref in bleu_pairs) / len(
            bleu_pairs
        )
    return EvalReport(
        per_observation=result.per_observation,
        macro=result.macro,
        n=len(pred),
        length_histogram=stats,
        empty_report_fraction=stats.empty_report_fraction,
        metadata=metadata,
        bleu4=bleu_value,
        failed_case_ids=tuple(failed_case_ids),
    )


def format_table(report: EvalReport) -> str:
    """Human-readable PR/RC/F1 table, one row per observation plus Average."""
    header = f"{'Observation':<18} {'PR':>7} {'RC':>7} {'F1':>7}"
    rule = "-" * len(header)
    lines = [header, rule]
    for obs in OBSERVATIONS:
        m = report.per_observation[obs]
        lines.append(
            f"{obs.display_name:<18} {m.precision:>7.3f} {m.recall:>7.3f} {m.f1:>7.3f}"
        )
    lines.append(rule)
    m = report.macro
    lines.append(
        f"{'Average':<18} {m.precision:>7.3f} {m.recall:>7.3f} {m.f1:>7.3f}"
    )
    lines.append(f"n={report.n}  emptyReportFraction={report.empty_report_fraction:.3f}")
    if report.bleu4 is not None:
        lines.append(f"bleu4={report.bleu4:.4f}")
    return "\n".join(lines)
