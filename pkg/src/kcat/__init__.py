"""Knowledge-constrained annotation engine for fine-grained entity typing."""

from .analytics import (
    AccuracyMatrix,
    AnnotationFile,
    IntegrationResult,
    accuracy_matrix,
    classify_error,
    error_report,
    integrate,
    pairwise_accuracy,
)
from .corpus import Corpus, CorpusDocument, load_corpus
from .kb import (
    AliasTable,
    EntityRecord,
    KnowledgeBase,
    TypeHierarchy,
    load_kb,
    load_kb_dir,
    normalize_surface,
)
from .linker import (
    Candidate,
    CandidateSet,
    Mention,
    ReductionReport,
    constrained_types,
    export_predictions,
    filter_by_type,
    generate_candidates,
    import_predictions,
    rank_candidates,
    reduction_stats,
)
from .session import AnnotationSession, MentionState, open_session

__version__ = "0.1.0"

__all__ = [
    "AccuracyMatrix",
    "AliasTable",
    "AnnotationFile",
    "AnnotationSession",
    "Candidate",
    "CandidateSet",
    "Corpus",
    "CorpusDocument",
    "EntityRecord",
    "IntegrationResult",
    "KnowledgeBase",
    "Mention",
    "MentionState",
    "ReductionReport",
    "TypeHierarchy",
    "accuracy_matrix",
    "classify_error",
    "constrained_types",
    "error_report",
    "export_predictions",
    "filter_by_type",
    "generate_candidates",
    "import_predictions",
    "integrate",
    "load_corpus",
    "load_kb",
    "load_kb_dir",
    "normalize_surface",
    "open_session",
    "pairwise_accuracy",
    "rank_candidates",
    "reduction_stats",
]
