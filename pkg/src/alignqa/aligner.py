"""Constrained alignment search between question and context graphs.

``beam_search`` is the production inference path (backed by the compiled
kernel when available); ``exhaustive_search`` is the slow reference solver
used as an oracle in tests, and ``check_alignment`` is an independent
post-hoc validator for every enabled constraint.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from itertools import product
from typing import Mapping

import numpy as np

from ._kernel import BACKEND, run_beam
from .graph import SemGraph, SemNode

__all__ = [
    "ConstraintConfig",
    "Alignment",
    "SearchResult",
    "entity_compatible",
    "candidate_set",
    "beam_search",
    "exhaustive_search",
    "check_alignment",
    "ExhaustiveCapError",
    "BACKEND",
]


class ExhaustiveCapError(RuntimeError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class ConstraintConfig:
    """Search-time knobs: locality radius k, beam size, hard constraints."""

    k: int | float = 3
    beam_size: int = 20
    entity_hard: bool = False
    kind_match: bool = False

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.k != math.inf and (int(self.k) != self.k or self.k < 1):
            raise ValueError("k must be a positive integer or math.inf")

    def relaxed(self) -> "ConstraintConfig":
        """Same config with the locality constraint dropped."""
        return replace(self, k=math.inf)


@dataclass(frozen=True)
class Alignment:
    """Total map from question nodes to context nodes."""

    pairs: tuple[tuple[int, int], ...]  # (q, c) sorted by q
    per_pair_scores: tuple[tuple[int, int, float], ...]
    total_score: float

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)


@dataclass(frozen=True)
class SearchResult:
    """Either a complete alignment or a rejection with the best partial."""

    alignment: Alignment | None
    search_score: float  # includes loss-augment bonuses when enabled
    partial: tuple[tuple[int, int], ...] = ()

    @property
    def rejected(self) -> bool:
        return self.alignment is None


def entity_compatible(q_node: SemNode, c_node: SemNode) -> bool:
    """Hard entity constraint: an entity-bearing question node may only pair
    with a context node carrying exactly the same normalized entity set."""
    return not q_node.entity_norms or q_node.entity_norms == c_node.entity_norms


def allowed_mask(q_graph: SemGraph, c_graph: SemGraph, cfg: ConstraintConfig) -> np.ndarray:
    mask = np.ones((len(q_graph), len(c_graph)), dtype=np.uint8)
    if not cfg.entity_hard and not cfg.kind_match:
        return mask
    for qi, qn in enumerate(q_graph.nodes):
        for cj, cn in enumerate(c_graph.nodes):
            if cfg.entity_hard and not entity_compatible(qn, cn):
                mask[qi, cj] = 0
            elif cfg.kind_match and qn.kind != cn.kind:
                mask[qi, cj] = 0
    return mask


def within_k_mask(c_graph: SemGraph, k: int | float) -> np.ndarray:
    n = len(c_graph)
    if k == math.inf:
        return np.ones((n, n), dtype=np.uint8)
    dm = c_graph.distance_matrix
    return ((dm >= 0) & (dm <= k)).astype(np.uint8)


def candidate_set(
    q_graph: SemGraph,
    c_graph: SemGraph,
    hypothesis: Mapping[int, int],
    q: int,
    cfg: ConstraintConfig,
) -> set[int]:
    """Context nodes that may extend ``hypothesis`` at question node ``q``.

    With aligned question-graph neighbors the locality check is conjunctive
    over all of them; a node with none falls back to anything within k of
    any aligned context node. The entity and kind constraints filter on top.
    May legitimately be empty, in which case the hypothesis dies.
    """
    if not hypothesis:
        raise ValueError("hypothesis must be nonempty")
    if q in hypothesis:
        raise ValueError(f"question node {q} is already aligned")
    within = within_k_mask(c_graph, cfg.k)
    nb_aligned = [hypothesis[nb] for nb in q_graph.neighbors(q) if nb in hypothesis]
    if nb_aligned:
        cands = {c for c in range(len(c_graph)) if all(within[cb, c] for cb in nb_aligned)}
    else:
        cands = {c for c in range(len(c_graph)) if any(within[cb, c] for cb in hypothesis.values())}
    q_node = q_graph.nodes[q]
    if cfg.entity_hard:
        cands = {c for c in cands if entity_compatible(q_node, c_graph.nodes[c])}
    if cfg.kind_match:
        cands = {c for c in cands if c_graph.nodes[c].kind == q_node.kind}
    return cands


def _adjacency_csr(g: SemGraph) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(len(g) + 1, dtype=np.int32)
    flat: list[int] = []
    for i, nbrs in enumerate(g.adjacency):
        flat.extend(nbrs)
        indptr[i + 1] = len(flat)
    return indptr, np.asarray(flat, dtype=np.int32)


def _targets_array(m: int, mapping: Mapping[int, int] | None, n: int, what: str) -> np.ndarray:
    arr = np.full(m, -1, dtype=np.int32)
    for q, c in (mapping or {}).items():
        if not (0 <= q < m and 0 <= c < n):
            raise ValueError(f"{what} pair ({q}, {c}) out of range")
        arr[q] = c
    return arr


def _result_from_assignment(assign, score: float, scores: np.ndarray, complete: bool) -> SearchResult:
    pairs = tuple((q, c) for q, c in enumerate(assign) if c >= 0)
    if not complete:
        return SearchResult(None, score, partial=pairs)
    per = tuple((q, c, float(scores[q, c])) for q, c in pairs)
    total = 0.0
    for q, c in pairs:
        total += float(scores[q, c])
    return SearchResult(Alignment(pairs, per, total), score)


def beam_search(
    q_graph: SemGraph,
    c_graph: SemGraph,
    scores: np.ndarray,
    cfg: ConstraintConfig,
    forced: Mapping[int, int] | None = None,
    augment: Mapping[int, int] | None = None,
) -> SearchResult:
    """Find the best-scoring constrained alignment by beam search.

    The beam is seeded with the top-b single pairs, or with ``forced`` as
    the sole seed hypothesis when given (forced pairs are never revised).
    In augment mode every pair (q, c) with c != augment[q] earns a +1 bonus,
    implementing loss-augmented inference. A dead beam yields a rejection
    carrying the best partial hypothesis.
    """
    m, n = len(q_graph), len(c_graph)
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    if scores.shape != (m, n):
        raise ValueError(f"score matrix shape {scores.shape} does not match graphs ({m}, {n})")
    if m == 0:
        return SearchResult(Alignment((), (), 0.0), 0.0)
    if n == 0:
        return SearchResult(None, 0.0)

    indptr, indices = _adjacency_csr(q_graph)
    complete, assign, score = run_beam(
        scores,
        allowed_mask(q_graph, c_graph, cfg),
        indptr,
        indices,
        within_k_mask(c_graph, cfg.k),
        int(cfg.beam_size),
        _targets_array(m, forced, n, "forced"),
        _targets_array(m, augment, n, "augment"),
    )
    return _result_from_assignment(assign, score, scores, complete)


def exhaustive_search(
    q_graph: SemGraph,
    c_graph: SemGraph,
    scores: np.ndarray,
    cfg: ConstraintConfig,
    forced: Mapping[int, int] | None = None,
    augment: Mapping[int, int] | None = None,
    cap: int = 10**6,
) -> SearchResult:
    """Enumerate every total alignment and return the constrained argmax.

    Reference oracle for the beam: the locality constraint is checked
    pairwise over adjacent question nodes. Ties resolve to the
    lexicographically smallest assignment vector. Refuses instances with
    n^m beyond ``cap``.
    """
    m, n = len(q_graph), len(c_graph)
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    if m == 0:
        return SearchResult(Alignment((), (), 0.0), 0.0)
    if n == 0:
        return SearchResult(None, 0.0)
    if n**m > cap:
        raise ExhaustiveCapError(f"n^m = {n}^{m} exceeds cap {cap}")

    allowed = allowed_mask(q_graph, c_graph, cfg)
    forced = dict(forced or {})
    cand_lists = []
    for q in range(m):
        if q in forced:
            cand_lists.append([forced[q]])
        else:
            cand_lists.append([c for c in range(n) if allowed[q, c]])
        if not cand_lists[-1]:
            return SearchResult(None, 0.0)

    if cfg.k == math.inf:
        edge_ok = None
    else:
        dm = c_graph.distance_matrix
        edge_ok = (dm >= 0) & (dm <= cfg.k)
    q_edges = [(e.u, e.v) for e in q_graph.edges]

    gold = _targets_array(m, augment, n, "augment")
    best_vec = None
    best_score = -math.inf
    for vec in product(*cand_lists):
        if edge_ok is not None and any(not edge_ok[vec[u], vec[v]] for u, v in q_edges):
            continue
        s = 0.0
        for q in range(m):
            s += scores[q, vec[q]]
            if gold[q] >= 0 and vec[q] != gold[q]:
                s += 1.0
        if s > best_score:  # product() yields lexicographic order: first max wins ties
            best_score = s
            best_vec = vec
    if best_vec is None:
        return SearchResult(None, 0.0)
    return _result_from_assignment(list(best_vec), best_score, scores, True)


def check_alignment(
    q_graph: SemGraph,
    c_graph: SemGraph,
    alignment: Alignment,
    cfg: ConstraintConfig,
) -> list[str]:
    """Independently re-validate an alignment against every enabled constraint.

    Does its own BFS over the context graph rather than trusting any search
    bookkeeping. Returns human-readable violations; empty means sound.
    """
    m, n = len(q_graph), len(c_graph)
    problems: list[str] = []
    mapping = dict(alignment.pairs)
    if sorted(mapping) != list(range(m)):
        problems.append(f"alignment does not cover every question node exactly once: {sorted(mapping)}")
        return problems
    if any(not (0 <= c < n) for c in mapping.values()):
        problems.append("alignment references an unknown context node")
        return problems

    # Own adjacency + BFS from the raw edge list; deliberately does not
    # touch the graph's cached distance matrix.
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for e in c_graph.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)

    def bfs_dist(src: int, dst: int) -> float:
        if src == dst:
            return 0
        seen = {src}
        queue = deque([(src, 0)])
        while queue:
            u, d = queue.popleft()
            for v in adj[u]:
                if v == dst:
                    return d + 1
                if v not in seen:
                    seen.add(v)
                    queue.append((v, d + 1))
        return math.inf

    if cfg.k != math.inf:
        for e in q_graph.edges:
            d = bfs_dist(mapping[e.u], mapping[e.v])
            if d > cfg.k:
                problems.append(
                    f"locality violation: adjacent question nodes {e.u},{e.v} aligned "
                    f"{d} apart (k={cfg.k})"
                )
    if cfg.entity_hard:
        for q, c in alignment.pairs:
            if not entity_compatible(q_graph.nodes[q], c_graph.nodes[c]):
                problems.append(f"entity violation: {q} -> {c}")
    if cfg.kind_match:
        for q, c in alignment.pairs:
            if q_graph.nodes[q].kind != c_graph.nodes[c].kind:
                problems.append(f"kind violation: {q} -> {c}")
    return problems
