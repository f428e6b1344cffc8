"""Deterministic synthetic fixtures for tests and benchmarks.

Three families:

* bare random search instances (graphs + score matrices) for comparing the
  beam against the exhaustive reference;
* a linearly separable training corpus where entity equality and token
  Jaccard identify the gold alignment among distractor frames;
* an adversarial suite where half the contexts carry a distractor sentence
  with swapped entities that outscores the truth under a constructed
  embedding sidecar.
"""

from __future__ import annotations

import numpy as np

from .core import ARGUMENT, PREDICATE, AnnotatedExample, AnnotatedSide, Entity, Span, SrlFrame
from .graph import SemGraph, SemNode


def _random_tree(rng: np.random.Generator, n: int) -> list[tuple[int, int]]:
    return [(int(rng.integers(0, i)), i) for i in range(1, n)]


def random_graph(
    rng: np.random.Generator,
    n: int,
    extra_edges: int = 0,
    entity_pool: tuple[str, ...] = (),
    entity_prob: float = 0.0,
) -> SemGraph:
    """Connected random graph with alternating node kinds and synthetic spans."""
    from .graph import SemEdge

    nodes = []
    for i in range(n):
        kind = PREDICATE if i % 2 else ARGUMENT
        ents = frozenset()
        if entity_pool and kind == ARGUMENT and rng.random() < entity_prob:
            ents = frozenset({str(rng.choice(entity_pool))})
        nodes.append(SemNode(i, kind, Span(i, i + 1), None, ents))
    edges = set(_random_tree(rng, n)) if n > 1 else set()
    for _ in range(extra_edges):
        u, v = rng.integers(0, n, size=2)
        if u != v:
            edges.add((min(int(u), int(v)), max(int(u), int(v))))
    return SemGraph(nodes, [SemEdge(u, v, "pred_arg") for u, v in sorted(edges)])


def random_instance(
    rng: np.random.Generator,
    m_max: int = 4,
    n_max: int = 6,
    entity_pool: tuple[str, ...] = ("x", "y", "z"),
    entity_prob: float = 0.3,
) -> tuple[SemGraph, SemGraph, np.ndarray]:
    """Random (question graph, context graph, scores in [-1, 1]) instance."""
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(max(1, m // 2), n_max + 1))
    q_graph = random_graph(rng, m, entity_pool=entity_pool, entity_prob=entity_prob)
    c_graph = random_graph(rng, n, extra_edges=int(rng.integers(0, n)), entity_pool=entity_pool, entity_prob=entity_prob)
    scores = rng.uniform(-1.0, 1.0, size=(m, n))
    return q_graph, c_graph, scores


# ---------------------------------------------------------------------------
# Separable training corpus


def separable_example(index: int, total: int) -> AnnotatedExample:
    """One training example whose gold alignment is feature-separable.

    The context holds a gold frame (matching entity, verb, and an answer
    node sharing the 'year' token with the wh span) and a distractor frame
    with a swapped entity and different answer. The two frames are
    disconnected, so locality alone rules out mixed alignments.
    """
    k = index
    j = (index + 7) % max(total, 1)
    ent_k, ent_j = f"ent{k}", f"ent{j}"
    verb_k, verb_j = f"verb{k}", f"verb{j}"
    ans_k, ans_j = f"ans{k}", f"ans{j}"

    question = AnnotatedSide(
        tokens=("when", "year", "did", ent_k, verb_k),
        frames=(
            SrlFrame(Span(4, 5), (("ARGM-TMP", Span(0, 2)), ("ARG0", Span(3, 4)))),
        ),
        coref_clusters=(),
        entities=(Entity("ENT", Span(3, 4), ent_k),),
    )
    context = AnnotatedSide(
        tokens=(ent_k, verb_k, "year", ans_k, ent_j, verb_j, f"z{j}", ans_j),
        frames=(
            SrlFrame(Span(1, 2), (("ARG0", Span(0, 1)), ("ARGM-TMP", Span(2, 4)))),
            SrlFrame(Span(5, 6), (("ARG0", Span(4, 5)), ("ARGM-TMP", Span(6, 8)))),
        ),
        coref_clusters=(),
        entities=(Entity("ENT", Span(0, 1), ent_k), Entity("ENT", Span(4, 5), ent_j)),
    )
    return AnnotatedExample(f"sep{index:03d}", question, context, (Span(3, 4),))


def separable_corpus(count: int = 50) -> list[AnnotatedExample]:
    return [separable_example(i, count) for i in range(count)]


# ---------------------------------------------------------------------------
# Adversarial suite with a constructed embedding sidecar


def adversarial_example(index: int, dim: int = 8) -> tuple[AnnotatedExample, np.ndarray, np.ndarray, Span | None]:
    """(example, question matrix, context matrix, distractor region).

    Odd indices carry a distractor sentence whose nodes outscore the truth
    under the constructed embeddings (swapped entity scores 1.2, fake
    answer 1.15, true pairs 1.0), so an unconstrained aligner is fooled and
    the fooled alignment shows a visibly larger worst gap.
    """
    ent_true = f"team{index}"
    ent_fake = f"rival{index}"
    year_true = str(2000 + index)
    year_fake = str(1900 + index)

    q_tokens = ("when", "did", ent_true, "play")
    question = AnnotatedSide(
        tokens=q_tokens,
        frames=(SrlFrame(Span(3, 4), (("ARGM-TMP", Span(0, 1)), ("ARG0", Span(2, 3)))),),
        coref_clusters=(),
        entities=(Entity("ENT", Span(2, 3), ent_true),),
    )

    c_tokens = [ent_true, "played", "on", "february", "7", year_true]
    frames = [SrlFrame(Span(1, 2), (("ARG0", Span(0, 1)), ("ARGM-TMP", Span(2, 6))))]
    entities = [Entity("ENT", Span(0, 1), ent_true)]
    distractor = index % 2 == 1
    region = None
    if distractor:
        c_tokens += [ent_fake, "played", "on", "march", "9", year_fake]
        frames.append(SrlFrame(Span(7, 8), (("ARG0", Span(6, 7)), ("ARGM-TMP", Span(8, 12)))))
        entities.append(Entity("ENT", Span(6, 7), ent_fake))
        region = Span(6, 12)
    context = AnnotatedSide(tuple(c_tokens), tuple(frames), (), tuple(entities))
    ex = AnnotatedExample(f"adv{index:03d}", question, context, (Span(3, 6),))

    # Token embeddings: every token of a node gets that node's designed
    # vector, so mean pooling reproduces it exactly.
    e_wh, e_ent, e_pred = np.eye(dim)[0], np.eye(dim)[1], np.eye(dim)[2]
    q_mat = np.zeros((len(q_tokens), dim), dtype=np.float32)
    q_mat[0] = e_wh  # "when"
    q_mat[2] = e_ent
    q_mat[3] = e_pred
    c_mat = np.zeros((len(c_tokens), dim), dtype=np.float32)
    c_mat[0] = e_ent
    c_mat[1] = e_pred
    c_mat[2:6] = e_wh
    if distractor:
        c_mat[6] = 1.2 * e_ent
        c_mat[7] = 0.9 * e_pred
        c_mat[8:12] = 1.15 * e_wh
    return ex, q_mat, c_mat, region


def adversarial_suite(count: int = 40, dim: int = 8):
    """Examples plus their sidecar matrices and distractor regions by id."""
    examples, mats, regions = [], {}, {}
    for i in range(count):
        ex, q_mat, c_mat, region = adversarial_example(i, dim)
        examples.append(ex)
        mats[ex.id] = (q_mat, c_mat)
        regions[ex.id] = region
    return examples, mats, regions


# ---------------------------------------------------------------------------
# Prediction-throughput corpus


def chain_side(rng: np.random.Generator, n_frames: int, vocab: int, wh_first: bool = False) -> AnnotatedSide:
    """Frames chained by shared argument spans: arg0 pred0 arg1 pred1 arg2 ...

    Sharing an argument span between consecutive frames merges it into one
    node, giving a connected chain of 2 * n_frames + 1 nodes.
    """
    tokens: list[str] = []
    frames = []
    entities = []
    for f in range(n_frames):
        if f == 0:
            tokens.append("when" if wh_first else f"w{rng.integers(vocab)}")
        tokens.append(f"v{rng.integers(vocab)}")
        tokens.append(f"w{rng.integers(vocab)}")
        left = Span(2 * f, 2 * f + 1)
        pred = Span(2 * f + 1, 2 * f + 2)
        right = Span(2 * f + 2, 2 * f + 3)
        frames.append(SrlFrame(pred, (("ARG0", left), ("ARG1", right))))
        if rng.random() < 0.15:
            entities.append(Entity("ENT", left, tokens[left.start].lower()))
    return AnnotatedSide(tuple(tokens), tuple(frames), (), tuple(entities))


def throughput_corpus(count: int = 1000, seed: int = 0, max_q_frames: int = 4, max_c_frames: int = 29):
    """Corpus sized for the prediction throughput envelope (m<=10, n<=60)."""
    rng = np.random.default_rng(seed)
    examples = []
    for i in range(count):
        qf = int(rng.integers(1, max_q_frames + 1))
        cf = int(rng.integers(5, max_c_frames + 1))
        question = chain_side(rng, qf, vocab=40, wh_first=True)
        context = chain_side(rng, cf, vocab=40)
        arg_starts = [2 * f for f in range(cf + 1)]
        a = int(rng.choice(arg_starts))
        examples.append(
            AnnotatedExample(f"perf{i:05d}", question, context, (Span(a, a + 1),))
        )
    return examples
