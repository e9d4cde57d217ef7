"""Translate ingested model outputs into prompt text and assemble LLM queries.

Three rendering styles for classifier scores (raw values, severity grades,
threshold-filtered concise), a sentence template for segmentation summaries,
and a composer that stitches the available network outputs plus a revision
instruction into a single deterministic prompt. Every function here is pure:
identical inputs yield byte-identical text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .errors import DomainError
from .types import (
    CaseRecord,
    DiagnosisScores,
    PromptDesign,
    SegmentationSummary,
    SeverityGrade,
    grade_of,
)

SCORE_RULE_SENTENCE = "Higher disease score means higher possibility of illness"

# Surface templates for the four grades. Frozen: golden prompt files and the
# offline-evaluation goldens depend on these exact strings.
_GRADE_TEMPLATES = {
    SeverityGrade.NO_SIGN: "No sign of {disease}.",
    SeverityGrade.SMALL_POSSIBILITY: "Small possibility of {disease}.",
    SeverityGrade.LIKELY: "Likely {disease}.",
    SeverityGrade.DEFINITELY: "Definitely {disease}.",
}

NETWORK_CLASSIFIER = "Network A"
NETWORK_SEGMENTATION = "Network B"
NETWORK_REPORT_GENERATOR = "Network C"

_NETWORK_SEQUENCE = (
    NETWORK_CLASSIFIER,
    NETWORK_SEGMENTATION,
    NETWORK_REPORT_GENERATOR,
)


def render_p1(scores: DiagnosisScores) -> str:
    """Raw-score prompt: rule sentence then one "<Disease> score: X.XX" line
    per disease in canonical order."""
    lines = [SCORE_RULE_SENTENCE]
    for obs, value in scores.items():
        lines.append(f"{obs.display_name} score: {value:.2f}")
    return "\n".join(lines)


def render_p2(scores: DiagnosisScores) -> str:
    """Severity-grade prompt: one graded clause per disease in canonical order."""
    clauses = []
    for obs, value in scores.items():
        template = _GRADE_TEMPLATES[grade_of(value)]
        clauses.append(template.format(disease=obs.display_name))
    return " ".join(clauses)


def render_p3(scores: DiagnosisScores, threshold: float = 0.5) -> str:
    """Concise prompt: diseases scoring strictly above the threshold, or the
    literal "No Finding" when none qualify."""
    if not (0.0 < threshold < 1.0):
        raise DomainError(f"threshold must lie strictly inside (0, 1): {threshold!r}")
    positive = [obs.display_name for obs, value in scores.items() if value > threshold]
    if not positive:
        return "No Finding"
    return "Network diagnosis: " + ", ".join(positive) + "."


def _percent(area_fraction: float) -> int:
    # Round half away from zero on the decimal literal; any non-zero
    # fraction reports at least 1%.
    if area_fraction <= 0:
        return 0
    pct = int(
        (Decimal(str(area_fraction)) * 100).quantize(
            Decimal("1"), rounding=ROUND_HALF_UP
        )
    )
    return max(1, pct)


def render_segmentation(summaries: Sequence[SegmentationSummary]) -> str:
    """One sentence per summary, ordered by region name so input order never
    shows through."""
    ordered = sorted(summaries, key=lambda s: (s.region, s.finding, s.area_fraction))
    sentences = [
        f"Segmentation finds {s.finding} in the {s.region}, covering "
        f"approximately {_percent(s.area_fraction)}% of the region."
        for s in ordered
    ]
    return " ".join(sentences)


def render_full_text(
    system_rule: str,
    network_descriptions: Sequence[tuple[str, str]],
    instruction: str,
) -> str:
    """Deterministic bundle concatenation: single blank line between parts,
    trailing whitespace stripped."""
    parts = []
    if system_rule:
        parts.append(system_rule.rstrip())
    for label, description in network_descriptions:
        parts.append(f"{label}: {description}".rstrip())
    if instruction:
        parts.append(instruction.rstrip())
    return "\n\n".join(parts)


@dataclass(frozen=True)
class PromptBundle:
    """The assembled LLM query.

    ``full_text`` is always recomputed from the other fields, so two bundles
    with equal fields render identically byte for byte.
    """

    system_rule: str
    network_descriptions: tuple[tuple[str, str], ...]
    instruction: str
    suppress_network_mention: bool
    full_text: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "network_descriptions", tuple(tuple(p) for p in self.network_descriptions)
        )
        labels = [label for label, _ in self.network_descriptions]
        positions = []
        for label in labels:
            if label not in _NETWORK_SEQUENCE:
                raise DomainError(f"unknown network label {label!r}")
            positions.append(_NETWORK_SEQUENCE.index(label))
        if positions != sorted(set(positions)):
            raise DomainError(f"network labels out of order or duplicated: {labels}")
        object.__setattr__(
            self,
            "full_text",
            render_full_text(
                self.system_rule, self.network_descriptions, self.instruction
            ),
        )

    def to_json_dict(self) -> dict:
        return {
            "systemRule": self.system_rule,
            "networkDescriptions": [
                {"networkLabel": label, "description": text}
                for label, text in self.network_descriptions
            ],
            "instruction": self.instruction,
            "suppressNetworkMention": self.suppress_network_mention,
            "fullText": self.full_text,
        }


def _join_labels(labels: Sequence[str]) -> str:
    if len(labels) == 1:
        return labels[0]
    return ", ".join(labels[:-1]) + " and " + labels[-1]


def compose_query(
    case: CaseRecord,
    design: PromptDesign,
    suppress_mention: bool = False,
    threshold: float = 0.5,
) -> PromptBundle:
    """Assemble the full revision query for one case.

    The classifier rendering (per ``design``) is labeled Network A, the
    segmentation summary Network B, and the verbatim draft report Network C;
    absent outputs keep their letters unassigned. The instruction asks the
    model to revise the report from the labeled results, optionally with the
    mention-suppression suffix.
    """
    descriptions: list[tuple[str, str]] = []
    if case.scores is not None:
        if design is PromptDesign.P1:
            rendered = render_p1(case.scores)
        elif design is PromptDesign.P2:
            rendered = render_p2(case.scores)
        else:
            rendered = render_p3(case.scores, threshold)
        descriptions.append((NETWORK_CLASSIFIER, rendered))
    if case.segmentation:
        descriptions.append((NETWORK_SEGMENTATION, render_segmentation(case.segmentation)))
    if case.draft_report is not None:
        descriptions.append((NETWORK_REPORT_GENERATOR, case.draft_report))
    if not descriptions:
        raise DomainError(
            f"case {case.case_id!r} has no report and no model outputs to compose"
        )

    labels = _join_labels([label for label, _ in descriptions])
    if suppress_mention:
        instruction = (
            f"Revise the report based on results from {labels} "
            f"but without mentioning {labels}"
        )
    else:
        instruction = f"Revise the report based on results from {labels}."

    return PromptBundle(
        system_rule="",
        network_descriptions=tuple(descriptions),
        instruction=instruction,
        suppress_network_mention=suppress_mention,
    )


def render_descriptions(
    case: CaseRecord, design: PromptDesign, threshold: float = 0.5
) -> str:
    """Just the labeled network descriptions, without any instruction.

    Used by chat sessions, whose context wants the bridged findings but not
    the revision directive.
    """
    bundle = compose_query(case, design, suppress_mention=False, threshold=threshold)
    return render_full_text("", bundle.network_descriptions, "")


__all__ = [
    "SCORE_RULE_SENTENCE",
    "NETWORK_CLASSIFIER",
    "NETWORK_SEGMENTATION",
    "NETWORK_REPORT_GENERATOR",
    "PromptBundle",
    "PromptDesign",
    "compose_query",
    "render_descriptions",
    "render_full_text",
    "render_p1",
    "render_p2",
    "render_p3",
    "render_segmentation",
]
