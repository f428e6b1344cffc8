"""Predicate-argument graphs over annotated text.

A graph has one node per predicate and per surviving argument span.
Construction merges duplicate spans across frames, links coreferent
arguments, and collapses nested structures (an argument containing another
frame's predicate becomes a direct predicate-predicate edge).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import ARGUMENT, PREDICATE, AnnotatedExample, AnnotatedSide, Span

PRED_ARG = "pred_arg"
COREF = "coref"
NESTED = "nested"

WH_WORDS = frozenset({"who", "whom", "whose", "what", "which", "when", "where", "why", "how"})

UNREACHABLE = math.inf


class NoWhNodeError(ValueError):
    """Question graph has no argument node containing a wh word."""


@dataclass(frozen=True)
class SemNode:
    id: int
    kind: str  # PREDICATE | ARGUMENT
    span: Span
    role: str | None
    entity_norms: frozenset[str]

    def tokens(self, side: AnnotatedSide) -> tuple[str, ...]:
        return side.tokens[self.span.start : self.span.end]


@dataclass(frozen=True)
class SemEdge:
    u: int
    v: int
    label: str

    def other(self, node_id: int) -> int:
        return self.v if node_id == self.u else self.u


class SemGraph:
    def __init__(self, nodes: list[SemNode], edges: list[SemEdge], wh_node: int | None = None):
        self.nodes = nodes
        self.edges = edges
        self.wh_node = wh_node

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def adjacency(self) -> list[tuple[int, ...]]:
        adj: list[set[int]] = [set() for _ in self.nodes]
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        return [tuple(sorted(s)) for s in adj]

    def neighbors(self, node_id: int) -> tuple[int, ...]:
        self._check_id(node_id)
        return self.adjacency[node_id]

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop counts as int32; -1 marks unreachable pairs."""
        n = len(self.nodes)
        dist = np.full((n, n), -1, dtype=np.int32)
        for src in range(n):
            dist[src, src] = 0
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for v in self.adjacency[u]:
                    if dist[src, v] < 0:
                        dist[src, v] = dist[src, u] + 1
                        queue.append(v)
        return dist

    def distance(self, u: int, v: int) -> int | float:
        """Shortest edge path between two nodes, ignoring labels.

        Returns 0 iff u == v and ``UNREACHABLE`` when they sit in different
        components.
        """
        self._check_id(u)
        self._check_id(v)
        d = int(self.distance_matrix[u, v])
        return UNREACHABLE if d < 0 else d

    def _check_id(self, node_id: int) -> None:
        if not (0 <= node_id < len(self.nodes)):
            raise ValueError(f"unknown node id {node_id}")


def build_graph(side: AnnotatedSide) -> SemGraph:
    """Construct the predicate-argument graph for one annotated side.

    Duplicate spans across frames become a single node. Nested collapse is
    applied to a fixed point: any argument whose span strictly contains a
    foreign predicate span is removed and its parent predicates are wired
    straight to the contained predicates. Coreference edges join surviving
    argument nodes that contain a mention of the same cluster.
    """
    # Provisional node keys: (kind, span). Role comes from the first frame
    # that introduces the span as an argument.
    pred_keys: list[tuple[str, Span]] = []
    roles: dict[tuple[str, Span], str] = {}
    keys: set[tuple[str, Span]] = set()
    pred_arg_pairs: set[tuple[tuple[str, Span], tuple[str, Span]]] = set()

    for frame in side.frames:
        pkey = (PREDICATE, frame.predicate)
        if pkey not in keys:
            keys.add(pkey)
            pred_keys.append(pkey)
        for role, span in frame.arguments:
            akey = (ARGUMENT, span)
            if akey not in keys:
                keys.add(akey)
                roles[akey] = role
            pred_arg_pairs.add((pkey, akey))

    # Nested collapse. Predicates are never removed, so the set of
    # qualifying arguments is fixed and one pass reaches the fixed point;
    # the loop guards against that reasoning being wrong.
    nested_pairs: set[tuple[tuple[str, Span], tuple[str, Span]]] = set()
    while True:
        doomed = None
        for kind, span in keys:
            if kind != ARGUMENT:
                continue
            inner = [pk for pk in pred_keys if pk in keys and span.strictly_contains(pk[1])]
            if inner:
                doomed = ((kind, span), inner)
                break
        if doomed is None:
            break
        akey, inner = doomed
        parents = [p for (p, a) in pred_arg_pairs if a == akey]
        for p1 in parents:
            for p2 in inner:
                if p1 != p2:
                    nested_pairs.add((p1, p2))
        keys.discard(akey)
        pred_arg_pairs = {(p, a) for (p, a) in pred_arg_pairs if a != akey}

    # Deterministic ordering: span start, then kind, then span end.
    ordered = sorted(keys, key=lambda k: (k[1].start, k[0], k[1].end))
    index = {key: i for i, key in enumerate(ordered)}

    nodes = []
    for key in ordered:
        kind, span = key
        ents = frozenset(e.norm for e in side.entities if span.contains(e.span))
        nodes.append(SemNode(index[key], kind, span, roles.get(key), ents))

    edge_set: set[tuple[int, int, str]] = set()

    def add_edge(a: int, b: int, label: str):
        if a != b:
            edge_set.add((min(a, b), max(a, b), label))

    for p, a in pred_arg_pairs:
        add_edge(index[p], index[a], PRED_ARG)
    for p1, p2 in nested_pairs:
        if p1 in index and p2 in index:
            add_edge(index[p1], index[p2], NESTED)

    # Coreference: a node matches a cluster when it contains one of its
    # mentions (exact span equality is rare in real annotation).
    for cluster in side.coref_clusters:
        matching = [
            n.id for n in nodes if n.kind == ARGUMENT and any(n.span.contains(m) for m in cluster)
        ]
        for i, a in enumerate(matching):
            for b in matching[i + 1 :]:
                add_edge(a, b, COREF)

    edges = [SemEdge(u, v, label) for (u, v, label) in sorted(edge_set)]
    return SemGraph(nodes, edges)


def detect_wh_node(graph: SemGraph, side: AnnotatedSide) -> int:
    """Pick the argument node containing a wh word; earliest span start wins."""
    candidates = []
    for node in graph.nodes:
        if node.kind != ARGUMENT:
            continue
        if any(t.lower() in WH_WORDS for t in node.tokens(side)):
            candidates.append(node)
    if not candidates:
        raise NoWhNodeError("no argument node contains a wh word")
    best = min(candidates, key=lambda n: (n.span.start, n.id))
    return best.id


def build_question_graph(side: AnnotatedSide) -> SemGraph:
    """Build the question-side graph with its wh node designated."""
    g = build_graph(side)
    g.wh_node = detect_wh_node(g, side)
    return g


NO_SRL = "no-srl"
NO_WH = "no-wh"


@dataclass(frozen=True)
class Discarded:
    example: AnnotatedExample
    reason: str  # NO_SRL | NO_WH


def filter_usable(examples) -> tuple[list[AnnotatedExample], list[Discarded]]:
    """Split a corpus into usable examples and discards with reason codes.

    Usable means the question has at least one SRL frame and its graph has
    a detectable wh node.
    """
    usable: list[AnnotatedExample] = []
    discarded: list[Discarded] = []
    for ex in examples:
        if not ex.question.frames:
            discarded.append(Discarded(ex, NO_SRL))
            continue
        try:
            build_question_graph(ex.question)
        except NoWhNodeError:
            discarded.append(Discarded(ex, NO_WH))
            continue
        usable.append(ex)
    return usable, discarded


# ---------------------------------------------------------------------------
# Debug exports


def graph_to_text(graph: SemGraph, side: AnnotatedSide) -> str:
    lines = []
    for n in graph.nodes:
        extra = f" role={n.role}" if n.role else ""
        if n.entity_norms:
            extra += " ents={" + ", ".join(sorted(n.entity_norms)) + "}"
        mark = " [wh]" if graph.wh_node == n.id else ""
        lines.append(f"node {n.id} {n.kind} {n.span.start}:{n.span.end} '{n.span.text(side.tokens)}'{extra}{mark}")
    for e in graph.edges:
        lines.append(f"edge {e.u} -- {e.v} {e.label}")
    return "\n".join(lines) + "\n"


def graph_to_dot(graph: SemGraph, side: AnnotatedSide, name: str = "semgraph") -> str:
    def esc(s: str) -> str:
        return s.replace("\\", "\\\\").replace('"', '\\"')

    lines = [f"graph {name} {{"]
    for n in graph.nodes:
        shape = "box" if n.kind == PREDICATE else "ellipse"
        peripheries = ' peripheries="2"' if graph.wh_node == n.id else ""
        lines.append(f'  n{n.id} [label="{esc(n.span.text(side.tokens))}" shape={shape}{peripheries}];')
    for e in graph.edges:
        style = {PRED_ARG: "solid", COREF: "dashed", NESTED: "dotted"}[e.label]
        lines.append(f'  n{e.u} -- n{e.v} [label="{e.label}" style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
