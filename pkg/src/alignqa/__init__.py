"""Structured question answering by constrained graph alignment.

Questions and contexts are decomposed into predicate-argument graphs; the
answer comes from the context node aligned to the question's wh node under
a beam search with locality and entity constraints. A linear scorer is
trainable as a structured SVM against heuristic oracle alignments.
"""

__version__ = "0.1.0"

from ._kernel import BACKEND as kernel_backend  # noqa: F401
from .aligner import (  # noqa: F401
    Alignment,
    ConstraintConfig,
    SearchResult,
    beam_search,
    check_alignment,
    exhaustive_search,
)
from .core import (  # noqa: F401
    AnnotatedExample,
    AnnotatedSide,
    EmbeddingSidecar,
    Span,
    load_corpus,
    save_corpus,
)
from .evaluation import PredictionRecord, coverage_curve, token_f1  # noqa: F401
from .graph import SemGraph, build_graph, build_question_graph, filter_usable  # noqa: F401
from .pipeline import predict_corpus, predict_example  # noqa: F401
from .scoring import EmbeddingScorer, LinearScorer, score_matrix  # noqa: F401
from .training import (  # noqa: F401
    TrainConfig,
    build_oracle,
    prepare_training,
    train_local,
    train_ssvm,
)
