import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alignqa.core import ARGUMENT, PREDICATE, AnnotatedSide, Entity, Span, SrlFrame
from alignqa.graph import (
    COREF,
    NESTED,
    PRED_ARG,
    UNREACHABLE,
    NoWhNodeError,
    build_graph,
    build_question_graph,
    detect_wh_node,
    filter_usable,
    graph_to_dot,
    graph_to_text,
)

from .conftest import example, side


def node_spans(g, kind=None):
    return {(n.span.start, n.span.end) for n in g.nodes if kind is None or n.kind == kind}


def edge_set(g):
    return {(e.u, e.v, e.label) for e in g.edges}


class TestBuildGraph:
    def test_single_frame_star(self):
        s = side(["a", "hit", "b"], frames=[((1, 2), [("ARG0", (0, 1)), ("ARG1", (2, 3))])])
        g = build_graph(s)
        assert len(g.nodes) == 3
        assert sum(n.kind == PREDICATE for n in g.nodes) == 1
        assert len(g.edges) == 2
        assert all(e.label == PRED_ARG for e in g.edges)

    def test_empty_side(self):
        g = build_graph(side(["just", "tokens"]))
        assert g.nodes == [] and g.edges == []

    def test_nested_collapse(self, nested_example):
        g = build_graph(nested_example.context)
        # the containing argument (4, 8) is gone, predicates are wired directly
        assert (4, 8) not in node_spans(g)
        preds = {n.span.start: n.id for n in g.nodes if n.kind == PREDICATE}
        played, determine = preds[3], preds[5]
        assert (min(played, determine), max(played, determine), NESTED) in edge_set(g)
        # nothing else touches the removed argument
        assert len(g.nodes) == 4

    def test_multilevel_nesting_collapses_to_fixed_point(self):
        # f0's argument contains f1's frame; f1's argument contains f2's frame.
        s = side(
            list("tttttttttt"),
            frames=[
                ((0, 1), [("A", (2, 10))]),
                ((2, 3), [("A", (4, 10))]),
                ((4, 5), [("A", (6, 8))]),
            ],
        )
        g = build_graph(s)
        for n in g.nodes:
            if n.kind == ARGUMENT:
                for other in g.nodes:
                    if other.kind == PREDICATE:
                        assert not n.span.strictly_contains(other.span)
        labels = {e.label for e in g.edges}
        assert NESTED in labels

    def test_coref_edge_between_containing_arguments(self, game_example):
        g = build_graph(game_example.context)
        by_span = {(n.span.start, n.span.end): n for n in g.nodes}
        sb50 = by_span[(0, 3)]
        the_game = by_span[(7, 9)]
        assert (min(sb50.id, the_game.id), max(sb50.id, the_game.id), COREF) in edge_set(g)

    def test_every_coref_edge_joins_arguments(self, game_example):
        g = build_graph(game_example.context)
        for e in g.edges:
            if e.label == COREF:
                assert g.nodes[e.u].kind == ARGUMENT
                assert g.nodes[e.v].kind == ARGUMENT

    def test_duplicate_span_across_frames_merges(self):
        # "b" is ARG1 of hit and ARG0 of ran
        s = side(
            ["a", "hit", "b", "ran"],
            frames=[
                ((1, 2), [("ARG0", (0, 1)), ("ARG1", (2, 3))]),
                ((3, 4), [("ARG0", (2, 3))]),
            ],
        )
        g = build_graph(s)
        shared = [n for n in g.nodes if (n.span.start, n.span.end) == (2, 3)]
        assert len(shared) == 1
        degree = sum(shared[0].id in (e.u, e.v) for e in g.edges)
        assert degree == 2

    def test_entity_norms_attached_by_containment(self):
        s = side(
            ["the", "denver", "broncos", "won"],
            frames=[((3, 4), [("ARG0", (0, 3))])],
            entities=[("ORG", (1, 3), "denver broncos")],
        )
        g = build_graph(s)
        arg = next(n for n in g.nodes if n.kind == ARGUMENT)
        assert arg.entity_norms == frozenset({"denver broncos"})

    def test_deterministic_ordering(self, game_example):
        g1 = build_graph(game_example.context)
        g2 = build_graph(game_example.context)
        assert [(n.kind, n.span) for n in g1.nodes] == [(n.kind, n.span) for n in g2.nodes]
        assert g1.edges == g2.edges
        starts = [n.span.start for n in g1.nodes]
        assert starts == sorted(starts)


class TestWhDetection:
    def test_basic(self, game_example):
        g = build_graph(game_example.question)
        wh = detect_wh_node(g, game_example.question)
        assert g.nodes[wh].span == Span(0, 1)

    def test_tie_broken_by_earliest_start(self):
        s = side(
            ["what", "beats", "which", "card"],
            frames=[
                ((1, 2), [("ARG0", (0, 1)), ("ARG1", (2, 4))]),
            ],
        )
        g = build_graph(s)
        wh = detect_wh_node(g, s)
        assert g.nodes[wh].span.start == 0

    def test_no_wh_errors(self):
        s = side(["the", "game", "ended"], frames=[((2, 3), [("ARG1", (0, 2))])])
        g = build_graph(s)
        with pytest.raises(NoWhNodeError):
            detect_wh_node(g, s)

    def test_wh_must_be_argument(self):
        # wh word only inside the predicate span does not count
        s = side(["teams", "what"], frames=[((1, 2), [("ARG0", (0, 1))])])
        g = build_graph(s)
        with pytest.raises(NoWhNodeError):
            detect_wh_node(g, s)

    def test_how_covers_how_many(self):
        s = side(["how", "many", "points", "scored"], frames=[((3, 4), [("ARG1", (0, 3))])])
        g = build_question_graph(s)
        assert g.nodes[g.wh_node].span == Span(0, 3)


class TestDistance:
    def chain(self):
        # args at 0,2,4; preds at 1,3 -> path a0 - p1 - a2 - p3 - a4
        return build_graph(
            side(
                list("abcde"),
                frames=[
                    ((1, 2), [("A0", (0, 1)), ("A1", (2, 3))]),
                    ((3, 4), [("A0", (2, 3)), ("A1", (4, 5))]),
                ],
            )
        )

    def test_zero_iff_same(self):
        g = self.chain()
        assert g.distance(2, 2) == 0
        assert g.distance(0, 1) == 1

    def test_chain_distance(self):
        g = self.chain()
        assert g.distance(0, 2) == 2
        assert g.distance(0, 4) == 4

    def test_unreachable(self):
        s = side(
            list("abcdef"),
            frames=[
                ((1, 2), [("A0", (0, 1))]),
                ((4, 5), [("A0", (3, 4))]),
            ],
        )
        g = build_graph(s)
        assert g.distance(0, 2) == UNREACHABLE
        assert g.distance(0, 2) == math.inf

    def test_unknown_node(self):
        g = self.chain()
        with pytest.raises(ValueError):
            g.distance(0, 99)


class TestFilterUsable:
    def test_reason_codes(self, game_example):
        no_srl = example("nosrl", side(["when", "was", "it"]), game_example.context, answers=[(0, 1)])
        no_wh = example(
            "nowh",
            side(["the", "game", "ended"], frames=[((2, 3), [("ARG1", (0, 2))])]),
            game_example.context,
            answers=[(0, 1)],
        )
        usable, discarded = filter_usable([game_example, no_srl, no_wh])
        assert [ex.id for ex in usable] == ["game"]
        assert {(d.example.id, d.reason) for d in discarded} == {("nosrl", "no-srl"), ("nowh", "no-wh")}

    def test_usable_has_exactly_one_wh(self, game_example):
        usable, _ = filter_usable([game_example])
        g = build_question_graph(usable[0].question)
        assert g.wh_node is not None


# --- property tests over random annotated sides ---------------------------


@st.composite
def annotated_sides(draw):
    n_tokens = draw(st.integers(min_value=2, max_value=12))
    tokens = [f"t{i}" for i in range(n_tokens)]
    n_frames = draw(st.integers(min_value=0, max_value=3))
    frames = []
    for _ in range(n_frames):
        p = draw(st.integers(min_value=0, max_value=n_tokens - 1))
        pred = (p, p + 1)
        n_args = draw(st.integers(min_value=0, max_value=2))
        args = []
        for _ in range(n_args):
            s = draw(st.integers(min_value=0, max_value=n_tokens - 1))
            e = draw(st.integers(min_value=s + 1, max_value=n_tokens))
            if s < pred[1] and pred[0] < e:  # would overlap the predicate
                continue
            args.append(("ARG", (s, e)))
        frames.append((pred, args))
    n_clusters = draw(st.integers(min_value=0, max_value=2))
    clusters = []
    for _ in range(n_clusters):
        mentions = []
        for _ in range(2):
            s = draw(st.integers(min_value=0, max_value=n_tokens - 1))
            mentions.append((s, s + 1))
        clusters.append(mentions)
    return side(tokens, frames=frames, coref=clusters)


@given(annotated_sides())
@settings(max_examples=150, deadline=None)
def test_graph_invariants(s: AnnotatedSide):
    g = build_graph(s)
    pred_spans = [n.span for n in g.nodes if n.kind == PREDICATE]
    for n in g.nodes:
        if n.kind == ARGUMENT:
            assert not any(n.span.strictly_contains(p) for p in pred_spans)
    for e in g.edges:
        assert e.u != e.v
        if e.label == COREF:
            assert g.nodes[e.u].kind == ARGUMENT and g.nodes[e.v].kind == ARGUMENT
    assert len({(e.u, e.v, e.label) for e in g.edges}) == len(g.edges)


@given(annotated_sides())
@settings(max_examples=60, deadline=None)
def test_distance_metric_properties(s: AnnotatedSide):
    g = build_graph(s)
    ids = [n.id for n in g.nodes][:6]
    for u, v in combinations(ids, 2):
        assert g.distance(u, v) == g.distance(v, u)
    for u, v, w in combinations(ids, 3):
        assert g.distance(u, w) <= g.distance(u, v) + g.distance(v, w)


def test_exports_mention_every_node_and_edge(game_example):
    g = build_question_graph(game_example.question)
    text = graph_to_text(g, game_example.question)
    assert text.count("node ") == len(g.nodes)
    assert text.count("edge ") == len(g.edges)
    assert "[wh]" in text
    dot = graph_to_dot(g, game_example.question)
    assert dot.startswith("graph")
    assert dot.count(" -- ") == len(g.edges)
