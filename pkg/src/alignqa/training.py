"""Oracle alignments and training for the linear scorer.

The gold signal is heuristic: the wh node is forced onto the context node
containing the answer, remaining nodes are aligned by token-Jaccard search,
and question nodes with zero similarity everywhere stay latent. Training
runs local (independent softmax) pretraining followed by a primal
structured-SVM loop whose violations come from loss-augmented beam search.
Latent nodes are completed by the current model before each hinge
computation and are exempt from the Hamming term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .aligner import Alignment, ConstraintConfig, beam_search
from .core import AnnotatedExample, EmbeddingSidecar
from .graph import SemGraph, build_graph, build_question_graph
from .scoring import LinearScorer, token_jaccard

jaccard = token_jaccard


class OracleFailure(ValueError):
    """No context node contains the answer; example unusable for training."""


@dataclass(frozen=True)
class OracleAlignment:
    forced: dict[int, int]  # question node -> context node
    latent: frozenset[int]  # question nodes with zero similarity everywhere
    relaxed: bool = False  # oracle search needed the k=inf fallback


@dataclass(frozen=True)
class TrainConfig:
    local_epochs: int = 10
    ssvm_epochs: int = 20
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 0
    search: ConstraintConfig = field(default_factory=ConstraintConfig)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0 or self.local_epochs < 0 or self.ssvm_epochs < 0:
            raise ValueError("l2 and epoch counts must be nonnegative")


@dataclass
class TrainItem:
    example: AnnotatedExample
    q_graph: SemGraph
    c_graph: SemGraph
    oracle: OracleAlignment
    features: list[list[dict[str, float]]]  # fixed per example; weights change


def jaccard_matrix(ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph) -> np.ndarray:
    out = np.zeros((len(q_graph), len(c_graph)), dtype=np.float64)
    for qi, qn in enumerate(q_graph.nodes):
        qt = qn.tokens(ex.question)
        for cj, cn in enumerate(c_graph.nodes):
            out[qi, cj] = token_jaccard(qt, cn.tokens(ex.context))
    return out


def build_oracle(
    ex: AnnotatedExample, q_graph: SemGraph, c_graph: SemGraph, cfg: ConstraintConfig
) -> OracleAlignment:
    """Heuristic gold alignment for one training example.

    The wh node is forced to the smallest context node containing a gold
    answer; the rest comes from Jaccard-scored beam search seeded with that
    pair. Question nodes whose Jaccard against every context node is zero
    are latent. Raises :class:`OracleFailure` when no node contains any
    answer.
    """
    wh = q_graph.wh_node
    if wh is None:
        raise ValueError("question graph has no wh node; run build_question_graph first")
    if not ex.answers:
        raise OracleFailure(f"{ex.id}: no gold answers")

    target = None
    for ans in ex.answers:
        containers = [n for n in c_graph.nodes if n.span.contains(ans)]
        if containers:
            target = min(containers, key=lambda n: (len(n.span), n.id))
            break
    if target is None:
        raise OracleFailure(f"{ex.id}: no context node contains an answer span")

    jmat = jaccard_matrix(ex, q_graph, c_graph)
    seed = {wh: target.id}
    relaxed = False
    result = beam_search(q_graph, c_graph, jmat, cfg, forced=seed)
    if result.rejected:
        result = beam_search(q_graph, c_graph, jmat, cfg.relaxed(), forced=seed)
        relaxed = True
    if result.rejected:
        raise OracleFailure(f"{ex.id}: oracle search dead-ended even with k=inf")

    mapping = result.alignment.mapping
    latent = frozenset(q for q in range(len(q_graph)) if q != wh and jmat[q].max() == 0.0)
    forced = {q: c for q, c in mapping.items() if q not in latent}
    return OracleAlignment(forced, latent, relaxed)


def complete_latent(
    model: LinearScorer,
    item: TrainItem,
    cfg: ConstraintConfig,
    scores: np.ndarray | None = None,
) -> tuple[Alignment, bool]:
    """Fill latent nodes with the current model's best choices.

    Forced pairs seed the beam and are never revised. Returns the total gold
    alignment and whether the k=inf fallback was needed (gold must be total
    for the hinge, so a dead end relaxes locality rather than failing).
    """
    if scores is None:
        scores = _weighted_matrix(model.weights, item.features)
    result = beam_search(item.q_graph, item.c_graph, scores, cfg, forced=item.oracle.forced)
    if not result.rejected:
        return result.alignment, False
    result = beam_search(item.q_graph, item.c_graph, scores, cfg.relaxed(), forced=item.oracle.forced)
    if result.rejected:
        raise RuntimeError(f"{item.example.id}: latent completion dead-ended with k=inf")
    return result.alignment, True


def hamming(a: Mapping[int, int], gold: Mapping[int, int]) -> int:
    """Number of question nodes aligned differently; node sets must match."""
    if set(a) != set(gold):
        raise ValueError("alignments cover different question node sets")
    return sum(1 for q in a if a[q] != gold[q])


def prepare_training(
    examples,
    cfg: ConstraintConfig,
    sidecar: EmbeddingSidecar | None = None,
) -> tuple[list[TrainItem], list[tuple[AnnotatedExample, str]]]:
    """Build graphs, oracles, and feature tables for trainable examples.

    Failures (no answers, no answer-containing node) are returned with
    reasons, never raised: a corpus-scale run keeps going.
    """
    probe = LinearScorer(sidecar=sidecar)
    items: list[TrainItem] = []
    failures: list[tuple[AnnotatedExample, str]] = []
    for ex in examples:
        q_graph = build_question_graph(ex.question)
        c_graph = build_graph(ex.context)
        try:
            oracle = build_oracle(ex, q_graph, c_graph, cfg)
        except OracleFailure as exc:
            failures.append((ex, str(exc)))
            continue
        feats = probe.pair_features(ex, q_graph, c_graph)
        items.append(TrainItem(ex, q_graph, c_graph, oracle, feats))
    return items, failures


def _weighted_matrix(weights: dict[str, float], features: list[list[dict[str, float]]]) -> np.ndarray:
    m = len(features)
    n = len(features[0]) if m else 0
    out = np.empty((m, n), dtype=np.float64)
    for qi in range(m):
        row = features[qi]
        for cj in range(n):
            out[qi, cj] = sum(weights.get(k, 0.0) * v for k, v in sorted(row[cj].items()))
    return out


def train_local(
    model: LinearScorer,
    items: list[TrainItem],
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> list[float]:
    """Independent softmax pretraining over forced oracle pairs.

    Each forced pair (q, gold c) is one multiclass decision over all context
    nodes; weights take a plain cross-entropy gradient step per decision.
    Latent nodes are skipped. Returns the mean loss per epoch.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    eta = config.learning_rate
    history: list[float] = []
    for _ in range(config.local_epochs):
        order = rng.permutation(len(items))
        losses: list[float] = []
        for idx in order:
            item = items[idx]
            for q, gold_c in sorted(item.oracle.forced.items()):
                row = item.features[q]
                logits = np.array(
                    [sum(model.weights.get(k, 0.0) * v for k, v in sorted(f.items())) for f in row]
                )
                logits -= logits.max()
                exp = np.exp(logits)
                probs = exp / exp.sum()
                losses.append(-math.log(max(float(probs[gold_c]), 1e-300)))
                for name, value in row[gold_c].items():
                    model.weights[name] = model.weights.get(name, 0.0) + eta * value
                for cj, f in enumerate(row):
                    p = float(eta * probs[cj])
                    for name, value in f.items():
                        model.weights[name] = model.weights.get(name, 0.0) - p * value
        history.append(float(np.mean(losses)) if losses else 0.0)
    return history


@dataclass
class SsvmEpochStats:
    mean_hinge: float
    violations: int
    relaxed_gold: int
    relaxed_search: int


def structured_hinge(
    item: TrainItem,
    scores: np.ndarray,
    gold: Alignment,
    cfg: ConstraintConfig,
) -> tuple[float, Alignment, bool]:
    """Hinge term for one example: max(0, f(best augmented) + Ham - f(gold)).

    The augmented search adds +1 for every non-latent node aligned away from
    gold, so its returned search score already equals f(a) + Ham(a, gold).
    Returns (hinge, augmented argmax, used k=inf fallback).
    """
    targets = {q: c for q, c in dict(gold.pairs).items() if q not in item.oracle.latent}
    result = beam_search(item.q_graph, item.c_graph, scores, cfg, augment=targets)
    relaxed = False
    if result.rejected:
        result = beam_search(item.q_graph, item.c_graph, scores, cfg.relaxed(), augment=targets)
        relaxed = True
    if result.rejected:
        raise RuntimeError(f"{item.example.id}: augmented search dead-ended with k=inf")
    hinge = max(0.0, result.search_score - gold.total_score)
    return hinge, result.alignment, relaxed


def train_ssvm(
    model: LinearScorer,
    items: list[TrainItem],
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> list[SsvmEpochStats]:
    """Primal subgradient SSVM over beam-searched violations.

    Per example: complete the latent gold with the current model, run
    loss-augmented search, and on a positive hinge update
    w <- (1 - eta*l2) * w + eta * (features(gold) - features(argmax)).
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    eta = config.learning_rate
    stats: list[SsvmEpochStats] = []
    for _ in range(config.ssvm_epochs):
        order = rng.permutation(len(items))
        hinges: list[float] = []
        violations = relaxed_gold = relaxed_search = 0
        for idx in order:
            item = items[idx]
            scores = _weighted_matrix(model.weights, item.features)
            gold, g_relaxed = complete_latent(model, item, config.search, scores=scores)
            relaxed_gold += g_relaxed
            hinge, ahat, s_relaxed = structured_hinge(item, scores, gold, config.search)
            relaxed_search += s_relaxed
            hinges.append(hinge)
            if hinge <= 0.0:
                continue
            violations += 1
            delta: dict[str, float] = {}
            gold_map = gold.mapping
            ahat_map = ahat.mapping
            for q in range(len(item.q_graph)):
                if gold_map[q] == ahat_map[q]:
                    continue
                for name, value in item.features[q][gold_map[q]].items():
                    delta[name] = delta.get(name, 0.0) + value
                for name, value in item.features[q][ahat_map[q]].items():
                    delta[name] = delta.get(name, 0.0) - value
            if config.l2 > 0.0:
                decay = 1.0 - eta * config.l2
                for name in model.weights:
                    model.weights[name] *= decay
            for name, value in delta.items():
                model.weights[name] = model.weights.get(name, 0.0) + eta * value
        stats.append(
            SsvmEpochStats(float(np.mean(hinges)) if hinges else 0.0, violations, relaxed_gold, relaxed_search)
        )
    return stats
