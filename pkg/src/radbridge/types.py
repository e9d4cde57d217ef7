"""Shared domain vocabulary: observations, scores, grades, cases, labels, reports.

Every type here is an immutable value object with a canonical JSON form:
field names in lowerCamelCase, enum values spelled exactly as serialized
("NoSign", "Positive", ...). That JSON form is the persistence and wire
format used everywhere else in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

from .errors import DomainError


class Observation(Enum):
    """The five chest findings tracked end-to-end, in canonical order."""

    CARDIOMEGALY = "Cardiomegaly"
    EDEMA = "Edema"
    CONSOLIDATION = "Consolidation"
    ATELECTASIS = "Atelectasis"
    PLEURAL_EFFUSION = "PleuralEffusion"

    @property
    def display_name(self) -> str:
        """Human/prompt-facing name ("Pleural Effusion", not "PleuralEffusion")."""
        return _DISPLAY_NAMES[self]

    @property
    def json_key(self) -> str:
        return _JSON_KEYS[self]

    @classmethod
    def from_json_key(cls, key: str) -> "Observation":
        try:
            return _FROM_JSON_KEY[key]
        except KeyError:
            raise DomainError(f"unknown observation key {key!r}") from None


_DISPLAY_NAMES = {
    Observation.CARDIOMEGALY: "Cardiomegaly",
    Observation.EDEMA: "Edema",
    Observation.CONSOLIDATION: "Consolidation",
    Observation.ATELECTASIS: "Atelectasis",
    Observation.PLEURAL_EFFUSION: "Pleural Effusion",
}

_JSON_KEYS = {
    Observation.CARDIOMEGALY: "cardiomegaly",
    Observation.EDEMA: "edema",
    Observation.CONSOLIDATION: "consolidation",
    Observation.ATELECTASIS: "atelectasis",
    Observation.PLEURAL_EFFUSION: "pleuralEffusion",
}

_FROM_JSON_KEY = {v: k for k, v in _JSON_KEYS.items()}

OBSERVATIONS: tuple[Observation, ...] = tuple(Observation)

# Sampling/labeling marker for "no target observation is positive".
# Deliberately not an Observation member: score vectors never carry it.
NO_FINDING = "NoFinding"


class SeverityGrade(Enum):
    """Verbal likelihood buckets over the [0, 1] score range.

    Half-open intervals; a boundary score belongs to the upper grade, and
    1.0 belongs to DEFINITELY.
    """

    NO_SIGN = "NoSign"
    SMALL_POSSIBILITY = "SmallPossibility"
    LIKELY = "Likely"
    DEFINITELY = "Definitely"

    @property
    def interval(self) -> tuple[float, float]:
        return _GRADE_INTERVALS[self]

    @property
    def phrase(self) -> str:
        return _GRADE_PHRASES[self]

    @property
    def rank(self) -> int:
        return _GRADE_RANKS[self]

    def __lt__(self, other: "SeverityGrade") -> bool:
        if not isinstance(other, SeverityGrade):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: "SeverityGrade") -> bool:
        if not isinstance(other, SeverityGrade):
            return NotImplemented
        return self.rank <= other.rank


_GRADE_INTERVALS = {
    SeverityGrade.NO_SIGN: (0.0, 0.2),
    SeverityGrade.SMALL_POSSIBILITY: (0.2, 0.5),
    SeverityGrade.LIKELY: (0.5, 0.9),
    SeverityGrade.DEFINITELY: (0.9, 1.0),
}

_GRADE_PHRASES = {
    SeverityGrade.NO_SIGN: "No sign",
    SeverityGrade.SMALL_POSSIBILITY: "Small possibility",
    SeverityGrade.LIKELY: "Likely",
    SeverityGrade.DEFINITELY: "Definitely",
}

_GRADE_RANKS = {g: i for i, g in enumerate(SeverityGrade)}


def grade_of(score: float) -> SeverityGrade:
    """Map a probability to its severity grade.

    Boundaries belong to the upper grade; 1.0 is DEFINITELY. Scores outside
    [0, 1] are a domain error.
    """
    if not (0.0 <= score <= 1.0):
        raise DomainError(f"score {score!r} outside [0.0, 1.0]")
    if score < 0.2:
        return SeverityGrade.NO_SIGN
    if score < 0.5:
        return SeverityGrade.SMALL_POSSIBILITY
    if score < 0.9:
        return SeverityGrade.LIKELY
    return SeverityGrade.DEFINITELY


def word_count(text: str) -> int:
    """Count maximal non-whitespace runs."""
    return len(text.split())


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class DiagnosisScores:
    """Per-disease probability vector; exactly one score per observation."""

    cardiomegaly: float
    edema: float
    consolidation: float
    atelectasis: float
    pleural_effusion: float

    def __post_init__(self):
        for obs in OBSERVATIONS:
            value = self[obs]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise DomainError(f"score for {obs.value} is not a number: {value!r}")
            if not (0.0 <= value <= 1.0):
                raise DomainError(
                    f"score for {obs.value} outside [0.0, 1.0]: {value!r}"
                )

    def __getitem__(self, obs: Observation) -> float:
        return getattr(self, _FIELD_BY_OBSERVATION[obs])

    def items(self) -> Iterator[tuple[Observation, float]]:
        """Iterate (observation, score) pairs in canonical order."""
        for obs in OBSERVATIONS:
            yield obs, self[obs]

    @classmethod
    def from_mapping(cls, scores: Mapping[Observation, float]) -> "DiagnosisScores":
        if set(scores) != set(OBSERVATIONS):
            missing = [o.value for o in OBSERVATIONS if o not in scores]
            extra = [str(k) for k in scores if k not in OBSERVATIONS]
            raise DomainError(
                f"scores must cover exactly the five observations "
                f"(missing={missing}, extra={extra})"
            )
        return cls(**{_FIELD_BY_OBSERVATION[o]: scores[o] for o in OBSERVATIONS})

    def to_json_dict(self) -> dict:
        return {obs.json_key: value for obs, value in self.items()}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DiagnosisScores":
        if not isinstance(data, Mapping):
            raise DomainError(f"scores must be an object, got {type(data).__name__}")
        return cls.from_mapping(
            {Observation.from_json_key(k): v for k, v in data.items()}
        )


_FIELD_BY_OBSERVATION = {
    Observation.CARDIOMEGALY: "cardiomegaly",
    Observation.EDEMA: "edema",
    Observation.CONSOLIDATION: "consolidation",
    Observation.ATELECTASIS: "atelectasis",
    Observation.PLEURAL_EFFUSION: "pleural_effusion",
}


@dataclass(frozen=True)
class SegmentationSummary:
    """Text-level summary of one segmented finding."""

    region: str
    area_fraction: float
    finding: str

    def __post_init__(self):
        if not self.region or not self.region.strip():
            raise DomainError("segmentation region must be non-empty")
        if not (0.0 <= self.area_fraction <= 1.0):
            raise DomainError(
                f"areaFraction outside [0.0, 1.0]: {self.area_fraction!r}"
            )

    def to_json_dict(self) -> dict:
        return {
            "region": self.region,
            "areaFraction": self.area_fraction,
            "finding": self.finding,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SegmentationSummary":
        try:
            return cls(
                region=data["region"],
                area_fraction=data["areaFraction"],
                finding=data.get("finding", ""),
            )
        except KeyError as exc:
            raise DomainError(f"segmentation entry missing field {exc}") from None


class LabelStatus(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    UNCERTAIN = "Uncertain"
    NOT_MENTIONED = "NotMentioned"

    @classmethod
    def from_string(cls, value: str) -> "LabelStatus":
        for member in cls:
            if member.value == value:
                return member
        raise DomainError(f"unknown label status {value!r}")


@dataclass(frozen=True)
class LabelSet:
    """Per-observation extraction status for one report.

    ``no_finding`` is derived, never stored independently: it is true iff
    every status is Negative or NotMentioned. Deserialization re-checks a
    serialized flag against the recomputed one.
    """

    cardiomegaly: LabelStatus
    edema: LabelStatus
    consolidation: LabelStatus
    atelectasis: LabelStatus
    pleural_effusion: LabelStatus

    def __getitem__(self, obs: Observation) -> LabelStatus:
        return getattr(self, _FIELD_BY_OBSERVATION[obs])

    def items(self) -> Iterator[tuple[Observation, LabelStatus]]:
        for obs in OBSERVATIONS:
            yield obs, self[obs]

    @property
    def no_finding(self) -> bool:
        return all(
            status in (LabelStatus.NEGATIVE, LabelStatus.NOT_MENTIONED)
            for _, status in self.items()
        )

    @classmethod
    def from_mapping(cls, statuses: Mapping[Observation, LabelStatus]) -> "LabelSet":
        if set(statuses) != set(OBSERVATIONS):
            raise DomainError("label set must cover exactly the five observations")
        return cls(**{_FIELD_BY_OBSERVATION[o]: statuses[o] for o in OBSERVATIONS})

    def to_json_dict(self) -> dict:
        data = {obs.json_key: status.value for obs, status in self.items()}
        data["noFinding"] = self.no_finding
        return data

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "LabelSet":
        if not isinstance(data, Mapping):
            raise DomainError(f"labels must be an object, got {type(data).__name__}")
        statuses = {}
        for obs in OBSERVATIONS:
            if obs.json_key not in data:
                raise DomainError(f"labels missing observation {obs.json_key!r}")
            statuses[obs] = LabelStatus.from_string(data[obs.json_key])
        labels = cls.from_mapping(statuses)
        if "noFinding" in data and bool(data["noFinding"]) != labels.no_finding:
            raise DomainError(
                "serialized noFinding flag inconsistent with statuses "
                f"(stored {data['noFinding']!r}, derived {labels.no_finding!r})"
            )
        return labels


@dataclass(frozen=True)
class CaseRecord:
    """One exam: draft report, ingested model outputs, optional ground truth."""

    case_id: str
    draft_report: Optional[str] = None
    scores: Optional[DiagnosisScores] = None
    segmentation: tuple[SegmentationSummary, ...] = ()
    ground_truth_labels: Optional[LabelSet] = None
    created_at: str = field(default_factory=utc_now_iso)

    def __post_init__(self):
        if not self.case_id or not str(self.case_id).strip():
            raise DomainError("caseId must be a non-empty string")
        if self.draft_report is None and self.scores is None:
            raise DomainError(
                f"case {self.case_id!r} needs a draft report or diagnosis scores"
            )
        object.__setattr__(self, "segmentation", tuple(self.segmentation))

    def to_json_dict(self) -> dict:
        data: dict = {"caseId": self.case_id, "createdAt": self.created_at}
        if self.draft_report is not None:
            data["draftReport"] = self.draft_report
        if self.scores is not None:
            data["scores"] = self.scores.to_json_dict()
        if self.segmentation:
            data["segmentation"] = [s.to_json_dict() for s in self.segmentation]
        if self.ground_truth_labels is not None:
            data["groundTruthLabels"] = self.ground_truth_labels.to_json_dict()
        return data

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "CaseRecord":
        if not isinstance(data, Mapping):
            raise DomainError(f"case must be an object, got {type(data).__name__}")
        if "caseId" not in data:
            raise DomainError("case missing caseId")
        scores = data.get("scores")
        segmentation = data.get("segmentation") or ()
        if not isinstance(segmentation, Sequence) or isinstance(segmentation, str):
            raise DomainError("segmentation must be a list")
        labels = data.get("groundTruthLabels")
        kwargs: dict = {
            "case_id": data["caseId"],
            "draft_report": data.get("draftReport"),
            "scores": DiagnosisScores.from_json_dict(scores) if scores else None,
            "segmentation": tuple(
                SegmentationSummary.from_json_dict(s) for s in segmentation
            ),
            "ground_truth_labels": LabelSet.from_json_dict(labels) if labels else None,
        }
        if "createdAt" in data:
            kwargs["created_at"] = data["createdAt"]
        return cls(**kwargs)


class PromptDesign(Enum):
    """The three prompt styles: raw scores, severity grades, concise filter."""

    P1 = "P1"
    P2 = "P2"
    P3 = "P3"

    @classmethod
    def from_string(cls, value: str) -> "PromptDesign":
        for member in cls:
            if member.value == value.upper():
                return member
        raise DomainError(f"unknown prompt design {value!r}")


@dataclass(frozen=True)
class ChatTurn:
    """One message in a conversation; content must be non-empty except for
    system turns."""

    role: str
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise DomainError(f"unknown chat role {self.role!r}")
        if self.role != "system" and not self.content:
            raise DomainError(f"{self.role} turn content must be non-empty")

    def to_json_dict(self) -> dict:
        return {"role": self.role, "content": self.content}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ChatTurn":
        try:
            return cls(role=data["role"], content=data["content"])
        except KeyError as exc:
            raise DomainError(f"chat turn missing field {exc}") from None


def make_report_id(
    case_id: str, design: PromptDesign, backend_id: str, suppress_mention: bool
) -> str:
    """Deterministic refined-report key; one report per refine identity."""
    suffix = "s" if suppress_mention else "n"
    return f"{case_id}_{design.value.lower()}_{backend_id}_{suffix}"


@dataclass(frozen=True)
class RefinedReport:
    """The LLM's revision of a draft report, with full provenance."""

    case_id: str
    text: str
    prompt_design: PromptDesign
    backend_id: str
    raw_response: str
    suppress_mention: bool = False
    word_count: int = -1  # computed from text when left unset

    def __post_init__(self):
        expected = word_count(self.text)
        if self.word_count == -1:
            object.__setattr__(self, "word_count", expected)
        elif self.word_count != expected:
            raise DomainError(
                f"wordCount {self.word_count} disagrees with text ({expected} tokens)"
            )

    @property
    def report_id(self) -> str:
        return make_report_id(
            self.case_id, self.prompt_design, self.backend_id, self.suppress_mention
        )

    def to_json_dict(self) -> dict:
        return {
            "reportId": self.report_id,
            "caseId": self.case_id,
            "text": self.text,
            "promptDesign": self.prompt_design.value,
            "backendId": self.backend_id,
            "rawResponse": self.raw_response,
            "suppressMention": self.suppress_mention,
            "wordCount": self.word_count,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "RefinedReport":
        try:
            return cls(
                case_id=data["caseId"],
                text=data["text"],
                prompt_design=PromptDesign.from_string(data["promptDesign"]),
                backend_id=data["backendId"],
                raw_response=data.get("rawResponse", ""),
                suppress_mention=bool(data.get("suppressMention", False)),
                word_count=data.get("wordCount", -1),
            )
        except KeyError as exc:
            raise DomainError(f"refined report missing field {exc}") from None
