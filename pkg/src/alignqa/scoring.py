"""Pair scoring between question and context nodes.

Two interchangeable scorers:

* ``EmbeddingScorer`` — dot product of span representations pooled from the
  per-example embedding sidecar (mean over token vectors).
* ``LinearScorer`` — dot product of a sparse feature vector with a
  trainable weight map; this is the scorer the trainer updates. When a
  sidecar is supplied, the embedding dot product joins the features.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import ARGUMENT, PREDICATE, AnnotatedExample, AnnotatedSide, EmbeddingSidecar, Span
from .graph import SemGraph, SemNode


def pool_node_vector(token_matrix: np.ndarray, span: Span) -> np.ndarray:
    """Mean of the token vectors covered by ``span``.

    Computed as ``ref + mean(rows - ref)`` so that identical rows pool to
    that row bit-for-bit.
    """
    if span.end > token_matrix.shape[0]:
        raise ValueError(f"span {span} exceeds matrix rows ({token_matrix.shape[0]})")
    rows = np.asarray(token_matrix, dtype=np.float64)[span.start : span.end]
    ref = rows[0]
    return ref + (rows - ref).mean(axis=0)


def token_jaccard(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    """Jaccard similarity of lowercased token sets; 0 when both are empty."""
    sa = {t.lower() for t in a}
    sb = {t.lower() for t in b}
    if not sa and not sb:
        return 0.0
    return len(sa & sb) / len(sa | sb)


def extract_features(
    q_node: SemNode,
    c_node: SemNode,
    q_side: AnnotatedSide,
    c_side: AnnotatedSide,
    emb_dot: float | None = None,
) -> dict[str, float]:
    """Sparse feature vector for one (question node, context node) pair.

    Fixed inventory: token Jaccard, lowercased overlap count, exact string
    match, entity-set equality, entity overlap ratio, kind pair, role pair,
    relative length difference, optional embedding dot product, and a bias.
    """
    q_tokens = [t.lower() for t in q_node.tokens(q_side)]
    c_tokens = [t.lower() for t in c_node.tokens(c_side)]
    q_set, c_set = set(q_tokens), set(c_tokens)
    union = q_set | c_set
    inter = q_set & c_set

    feats: dict[str, float] = {
        "jaccard": len(inter) / len(union) if union else 0.0,
        "overlap": float(len(inter)),
        "exact_match": 1.0 if q_tokens == c_tokens else 0.0,
        "len_diff": abs(len(q_tokens) - len(c_tokens)) / max(len(q_tokens), len(c_tokens)),
        "bias": 1.0,
    }

    qe, ce = q_node.entity_norms, c_node.entity_norms
    feats["entity_equal"] = 1.0 if qe and qe == ce else 0.0
    feats["entity_overlap"] = len(qe & ce) / len(qe | ce) if (qe or ce) else 0.0

    if q_node.kind == PREDICATE and c_node.kind == PREDICATE:
        feats["kind_pred_pred"] = 1.0
    elif q_node.kind == ARGUMENT and c_node.kind == ARGUMENT:
        feats["kind_arg_arg"] = 1.0
    else:
        feats["kind_cross"] = 1.0

    feats[f"role={q_node.role or '_'}|{c_node.role or '_'}"] = 1.0

    if emb_dot is not None:
        feats["emb_dot"] = float(emb_dot)
    return feats


class EmbeddingScorer:
    """Scores a pair as the dot product of its pooled span vectors."""

    variant = "embedding"
    trainable = False

    def __init__(self, sidecar: EmbeddingSidecar):
        self.sidecar = sidecar

    def matrix(self, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph) -> np.ndarray:
        rec = self.sidecar.load_for(ex)
        q_vecs = np.stack([pool_node_vector(rec.question, n.span) for n in q_graph.nodes])
        c_vecs = np.stack([pool_node_vector(rec.context, n.span) for n in c_graph.nodes])
        return q_vecs @ c_vecs.T

    def score_pair(self, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph, qi: int, cj: int) -> float:
        rec = self.sidecar.load_for(ex)
        q_vec = pool_node_vector(rec.question, q_graph.nodes[qi].span)
        c_vec = pool_node_vector(rec.context, c_graph.nodes[cj].span)
        return float(q_vec @ c_vec)


class LinearScorer:
    """Sparse linear model over pair features; unknown features score 0."""

    variant = "linear"
    trainable = True

    def __init__(self, weights: dict[str, float] | None = None, sidecar: EmbeddingSidecar | None = None):
        self.weights: dict[str, float] = dict(weights or {})
        self.sidecar = sidecar

    def pair_features(self, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph) -> list[list[dict[str, float]]]:
        """Feature vectors for every (question node, context node) pair."""
        emb = None
        if self.sidecar is not None:
            rec = self.sidecar.load_for(ex)
            q_vecs = np.stack([pool_node_vector(rec.question, n.span) for n in q_graph.nodes])
            c_vecs = np.stack([pool_node_vector(rec.context, n.span) for n in c_graph.nodes])
            emb = q_vecs @ c_vecs.T
        table = []
        for qi, qn in enumerate(q_graph.nodes):
            row = []
            for cj, cn in enumerate(c_graph.nodes):
                dot = float(emb[qi, cj]) if emb is not None else None
                row.append(extract_features(qn, cn, ex.question, ex.context, emb_dot=dot))
            table.append(row)
        return table

    def score_features(self, feats: dict[str, float]) -> float:
        w = self.weights
        return sum(w.get(name, 0.0) * value for name, value in sorted(feats.items()))

    def matrix(self, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph) -> np.ndarray:
        table = self.pair_features(ex, q_graph, c_graph)
        out = np.empty((len(q_graph), len(c_graph)), dtype=np.float64)
        for qi, row in enumerate(table):
            for cj, feats in enumerate(row):
                out[qi, cj] = self.score_features(feats)
        return out

    def score_pair(self, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph, qi: int, cj: int) -> float:
        emb = None
        if self.sidecar is not None:
            rec = self.sidecar.load_for(ex)
            emb = float(
                pool_node_vector(rec.question, q_graph.nodes[qi].span)
                @ pool_node_vector(rec.context, c_graph.nodes[cj].span)
            )
        feats = extract_features(q_graph.nodes[qi], c_graph.nodes[cj], ex.question, ex.context, emb_dot=emb)
        return self.score_features(feats)


ScorerModel = EmbeddingScorer | LinearScorer


def score_matrix(model: ScorerModel, ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph) -> np.ndarray:
    """m x n matrix with entry (i, j) = score of aligning q_i to c_j."""
    if len(q_graph) == 0 or len(c_graph) == 0:
        return np.zeros((len(q_graph), len(c_graph)), dtype=np.float64)
    mat = np.asarray(model.matrix(ex, q_graph, c_graph), dtype=np.float64)
    if not np.isfinite(mat).all():
        raise ValueError(f"{ex.id}: non-finite pair scores")
    return mat


def save_linear_model(model: LinearScorer, path: str | Path) -> None:
    """Persist weights as sorted ``feature<TAB>weight`` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for name in sorted(model.weights):
            fh.write(f"{name}\t{float(model.weights[name])!r}\n")


def load_linear_model(path: str | Path, sidecar: EmbeddingSidecar | None = None) -> LinearScorer:
    weights: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                name, value = line.split("\t")
                weights[name] = float(value)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'feature<TAB>weight', got {line!r}") from None
    return LinearScorer(weights, sidecar=sidecar)
