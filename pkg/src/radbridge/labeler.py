"""Rule-based extraction of per-observation labels from free-text reports.

A lexicon of match phrases per observation plus NegEx-style cue scoping:
a negation or uncertainty cue within a fixed token window before a phrase
match flips that mention to Negative or Uncertain (negation outranks
uncertainty). Mentions aggregate across sentences with precedence
Positive > Uncertain > Negative; observations never mentioned stay
NotMentioned. Lexicon and cues are versioned JSON data files, swappable
per run.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .errors import DomainError
from .types import OBSERVATIONS, LabelSet, LabelStatus, Observation

_TOKEN_RE = re.compile(r"[a-z0-9]+")

SENTENCE_TERMINATORS = ".!?"
ABBREVIATIONS = frozenset({"dr.", "no.", "e.g.", "i.e."})


@dataclass(frozen=True)
class Sentence:
    """One sentence with its character span in the original text."""

    text: str
    start: int
    end: int


def _is_abbreviation(text: str, dot_index: int) -> bool:
    j = dot_index
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    token = text[j : dot_index + 1].lower().lstrip("([\"'")
    return token in ABBREVIATIONS


def _emit(text: str, start: int, stop: int, out: list[Sentence]) -> None:
    raw = text[start:stop]
    stripped = raw.strip()
    if not stripped:
        return
    lead = len(raw) - len(raw.lstrip())
    begin = start + lead
    out.append(Sentence(text=stripped, start=begin, end=begin + len(stripped)))


def segment_sentences(text: str) -> list[Sentence]:
    """Split on sentence-final punctuation followed by whitespace, guarding
    a short abbreviation list; offsets index into the original text."""
    sentences: list[Sentence] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in SENTENCE_TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            if ch == "." and _is_abbreviation(text, i):
                i += 1
                continue
            _emit(text, start, i + 1, sentences)
            start = i + 1
        i += 1
    _emit(text, start, n, sentences)
    return sentences


@dataclass(frozen=True)
class LexiconEntry:
    observation: Observation
    phrases: tuple[str, ...]

    def __post_init__(self):
        if not self.phrases:
            raise DomainError(f"{self.observation.value}: phrase list is empty")
        for phrase in self.phrases:
            if not phrase or phrase != phrase.lower():
                raise DomainError(
                    f"{self.observation.value}: phrase {phrase!r} must be "
                    "non-empty lowercase"
                )


class Lexicon:
    def __init__(self, entries: Sequence[LexiconEntry], schema_version: int = 1):
        self.schema_version = schema_version
        self.entries = tuple(entries)
        seen: dict[str, Observation] = {}
        for entry in self.entries:
            for phrase in entry.phrases:
                if phrase in seen and seen[phrase] is not entry.observation:
                    raise DomainError(
                        f"phrase {phrase!r} assigned to both "
                        f"{seen[phrase].value} and {entry.observation.value}"
                    )
                seen[phrase] = entry.observation
        # Token sequences, precomputed once.
        self._phrase_tokens: list[tuple[Observation, tuple[str, ...]]] = [
            (entry.observation, tuple(phrase.split()))
            for entry in self.entries
            for phrase in entry.phrases
        ]

    @property
    def phrase_tokens(self) -> list[tuple[Observation, tuple[str, ...]]]:
        return self._phrase_tokens


@dataclass(frozen=True)
class CueSet:
    negation_cues: tuple[str, ...]
    uncertainty_cues: tuple[str, ...]
    scope_window: int

    def __post_init__(self):
        if self.scope_window < 1:
            raise DomainError(f"scopeWindow must be >= 1, got {self.scope_window}")
        overlap = set(self.negation_cues) & set(self.uncertainty_cues)
        if overlap:
            raise DomainError(f"cue lists overlap: {sorted(overlap)}")


def load_lexicon(path: Optional[str | Path] = None) -> Lexicon:
    data = _load_data_file(path, "lexicon.json")
    try:
        entries = [
            LexiconEntry(
                observation=Observation(item["observation"]),
                phrases=tuple(item["phrases"]),
            )
            for item in data["entries"]
        ]
        return Lexicon(entries, schema_version=data["schemaVersion"])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"malformed lexicon file: {exc}") from exc


def load_cues(path: Optional[str | Path] = None) -> CueSet:
    data = _load_data_file(path, "cues.json")
    try:
        return CueSet(
            negation_cues=tuple(data["negationCues"]),
            uncertainty_cues=tuple(data["uncertaintyCues"]),
            scope_window=int(data["scopeWindow"]),
        )
    except KeyError as exc:
        raise DomainError(f"malformed cues file: missing {exc}") from exc


def _load_data_file(path: Optional[str | Path], default_name: str) -> dict:
    if path is not None:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    source = resources.files("radbridge.data").joinpath(default_name)
    return json.loads(source.read_text(encoding="utf-8"))


_DEFAULT_LEXICON: Optional[Lexicon] = None
_DEFAULT_CUES: Optional[CueSet] = None


def default_lexicon() -> Lexicon:
    global _DEFAULT_LEXICON
    if _DEFAULT_LEXICON is None:
        _DEFAULT_LEXICON = load_lexicon()
    return _DEFAULT_LEXICON


def default_cues() -> CueSet:
    global _DEFAULT_CUES
    if _DEFAULT_CUES is None:
        _DEFAULT_CUES = load_cues()
    return _DEFAULT_CUES


def _tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _find_subsequence(tokens: Sequence[str], needle: Sequence[str]) -> list[int]:
    hits = []
    limit = len(tokens) - len(needle)
    for i in range(limit + 1):
        if tuple(tokens[i : i + len(needle)]) == tuple(needle):
            hits.append(i)
    return hits


def _window_has_cue(window: Sequence[str], cues: Sequence[str]) -> bool:
    for cue in cues:
        if _find_subsequence(window, cue.split()):
            return True
    return False


_STRENGTH = {
    LabelStatus.NEGATIVE: 0,
    LabelStatus.UNCERTAIN: 1,
    LabelStatus.POSITIVE: 2,
}


def label_report(
    text: str,
    lexicon: Optional[Lexicon] = None,
    cues: Optional[CueSet] = None,
) -> LabelSet:
    """Extract one status per observation from a free-text report."""
    lexicon = lexicon if lexicon is not None else default_lexicon()
    cues = cues if cues is not None else default_cues()
    best: dict[Observation, Optional[LabelStatus]] = {o: None for o in OBSERVATIONS}
    for sentence in segment_sentences(text):
        tokens = _tokenize(sentence.text)
        if not tokens:
            continue
        for observation, phrase in lexicon.phrase_tokens:
            for index in _find_subsequence(tokens, phrase):
                window = tokens[max(0, index - cues.scope_window) : index]
                if _window_has_cue(window, cues.negation_cues):
                    status = LabelStatus.NEGATIVE
                elif _window_has_cue(window, cues.uncertainty_cues):
                    status = LabelStatus.UNCERTAIN
                else:
                    status = LabelStatus.POSITIVE
                current = best[observation]
                if current is None or _STRENGTH[status] > _STRENGTH[current]:
                    best[observation] = status
    return LabelSet.from_mapping(
        {
            obs: (status if status is not None else LabelStatus.NOT_MENTIONED)
            for obs, status in best.items()
        }
    )


class UncertainPolicy(Enum):
    AS_POSITIVE = "AsPositive"
    AS_NEGATIVE = "AsNegative"

    @classmethod
    def from_string(cls, value: str) -> "UncertainPolicy":
        for member in cls:
            if member.value.lower() == value.lower():
                return member
        raise DomainError(f"unknown uncertain policy {value!r}")


def binarize(labels: LabelSet, policy: UncertainPolicy) -> tuple[bool, ...]:
    """Positive -> True; Negative/NotMentioned -> False; Uncertain per policy."""
    out = []
    for _, status in labels.items():
        if status is LabelStatus.POSITIVE:
            out.append(True)
        elif status is LabelStatus.UNCERTAIN:
            out.append(policy is UncertainPolicy.AS_POSITIVE)
        else:
            out.append(False)
    return tuple(out)
