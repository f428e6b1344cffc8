"""Shared hand-fixture builders for the test suite."""

from __future__ import annotations

import pytest

from alignqa.core import AnnotatedExample, AnnotatedSide, Entity, Span, SrlFrame


def side(tokens, frames=(), coref=(), entities=()):
    """Compact AnnotatedSide builder.

    frames:   [((ps, pe), [(role, (s, e)), ...]), ...]
    coref:    [[(s, e), (s, e), ...], ...]
    entities: [(type, (s, e), norm), ...]
    """
    return AnnotatedSide(
        tokens=tuple(tokens),
        frames=tuple(
            SrlFrame(Span(*pred), tuple((role, Span(*sp)) for role, sp in args)) for pred, args in frames
        ),
        coref_clusters=tuple(tuple(Span(*m) for m in cluster) for cluster in coref),
        entities=tuple(Entity(t, Span(*sp), norm) for t, sp, norm in entities),
    )


def example(ex_id, question, context, answers=()):
    return AnnotatedExample(ex_id, question, context, tuple(Span(*a) for a in answers))


@pytest.fixture
def game_example():
    """Two-sentence context with a coreference link and a temporal answer.

    Question: "When was Super Bowl 50 played"
    Context:  "Super Bowl 50 was a game . The game was played on February 7 , 2016 ."
    """
    question = side(
        ["When", "was", "Super", "Bowl", "50", "played"],
        frames=[((5, 6), [("ARGM-TMP", (0, 1)), ("ARG1", (2, 5))])],
        entities=[("EVENT", (2, 5), "super bowl 50")],
    )
    context = side(
        ["Super", "Bowl", "50", "was", "a", "game", ".", "The", "game", "was", "played",
         "on", "February", "7", ",", "2016", "."],
        frames=[
            ((3, 4), [("ARG1", (0, 3)), ("ARG2", (4, 6))]),
            ((10, 11), [("ARG1", (7, 9)), ("ARGM-TMP", (11, 16))]),
        ],
        coref=[[(0, 3), (7, 9)]],
        entities=[("EVENT", (0, 3), "super bowl 50")],
    )
    return example("game", question, context, answers=[(12, 16)])


@pytest.fixture
def nested_example():
    """Context where an argument of "was" contains the frame of "determine"."""
    context = side(
        ["The", "game", "was", "played", "to", "determine", "the", "champion"],
        frames=[
            ((3, 4), [("ARG1", (0, 2)), ("ARG2", (4, 8))]),
            ((5, 6), [("ARG1", (6, 8))]),
        ],
    )
    question = side(
        ["What", "was", "played"],
        frames=[((2, 3), [("ARG1", (0, 1))])],
    )
    return example("nested", question, context, answers=[(0, 2)])
