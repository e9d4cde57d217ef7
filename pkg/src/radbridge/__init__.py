"""radbridge: bridge computer-aided-diagnosis outputs into LLM prompts,
refine radiology reports, evaluate the results, and host grounded chat."""

from .bridge import (
    PromptBundle,
    compose_query,
    render_p1,
    render_p2,
    render_p3,
    render_segmentation,
)
from .evaluation import EvalReport, bleu4, confusion, length_stats, prf1, sample_cases
from .labeler import UncertainPolicy, binarize, label_report, segment_sentences
from .types import (
    NO_FINDING,
    OBSERVATIONS,
    CaseRecord,
    ChatTurn,
    DiagnosisScores,
    LabelSet,
    LabelStatus,
    Observation,
    PromptDesign,
    RefinedReport,
    SegmentationSummary,
    SeverityGrade,
    grade_of,
    word_count,
)

__version__ = "0.1.0"

__all__ = [
    "CaseRecord",
    "ChatTurn",
    "DiagnosisScores",
    "EvalReport",
    "LabelSet",
    "LabelStatus",
    "NO_FINDING",
    "OBSERVATIONS",
    "Observation",
    "PromptBundle",
    "PromptDesign",
    "RefinedReport",
    "SegmentationSummary",
    "SeverityGrade",
    "UncertainPolicy",
    "binarize",
    "bleu4",
    "compose_query",
    "confusion",
    "grade_of",
    "label_report",
    "length_stats",
    "prf1",
    "render_p1",
    "render_p2",
    "render_p3",
    "render_segmentation",
    "sample_cases",
    "segment_sentences",
    "word_count",
    "__version__",
]
