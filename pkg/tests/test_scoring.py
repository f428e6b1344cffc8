import numpy as np
import pytest

from alignqa.core import EmbeddingSidecar, Span, write_sidecar_record
from alignqa.graph import build_graph, build_question_graph
from alignqa.scoring import (
    EmbeddingScorer,
    LinearScorer,
    extract_features,
    load_linear_model,
    pool_node_vector,
    save_linear_model,
    score_matrix,
    token_jaccard,
)

from .conftest import example, side


class TestPooling:
    def test_mean_of_two_rows(self):
        mat = np.array([[1.0, 1.0], [3.0, 3.0]])
        np.testing.assert_array_equal(pool_node_vector(mat, Span(0, 2)), [2.0, 2.0])

    def test_single_row_identity(self):
        mat = np.array([[0.1, 0.7, -2.3]])
        out = pool_node_vector(mat, Span(0, 1))
        assert (out == mat[0]).all()

    def test_hand_mean_three_rows(self):
        mat = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
        np.testing.assert_allclose(pool_node_vector(mat, Span(0, 3)), [1.0, 1.0])

    def test_identical_rows_pool_to_that_row_exactly(self):
        # 0.1 is not exactly representable; naive sum/3 would be off by an ulp
        row = np.array([0.1, 0.2, 0.3])
        mat = np.stack([row, row, row])
        out = pool_node_vector(mat, Span(0, 3))
        assert (out == row).all()

    def test_span_beyond_rows_rejected(self):
        with pytest.raises(ValueError):
            pool_node_vector(np.zeros((2, 3)), Span(0, 3))


class TestJaccard:
    def test_identical(self):
        assert token_jaccard(("The", "Game"), ("the", "game")) == 1.0

    def test_disjoint(self):
        assert token_jaccard(("a",), ("b",)) == 0.0

    def test_hand_two_thirds(self):
        assert token_jaccard(("the", "game"), ("the", "final", "game")) == pytest.approx(2 / 3)

    def test_both_empty(self):
        assert token_jaccard((), ()) == 0.0


def feature_fixture():
    q = side(
        ["who", "took", "the", "game"],
        frames=[((1, 2), [("ARG0", (0, 1)), ("ARG1", (2, 4))])],
    )
    c = side(
        ["the", "final", "game", "ended"],
        frames=[((3, 4), [("ARG1", (0, 3))])],
    )
    return example("feat", q, c)


class TestFeatures:
    def test_identical_single_token_spans(self):
        s = side(["game", "won"], frames=[((1, 2), [("A", (0, 1))])])
        g = build_graph(s)
        arg = next(n for n in g.nodes if n.kind == "argument")
        feats = extract_features(arg, arg, s, s)
        assert feats["jaccard"] == 1.0
        assert feats["exact_match"] == 1.0
        assert feats["overlap"] == 1.0
        assert feats["len_diff"] == 0.0
        assert feats["kind_arg_arg"] == 1.0

    def test_disjoint_token_sets(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        q_pred = next(n for n in qg.nodes if n.kind == "predicate")
        c_pred = next(n for n in cg.nodes if n.kind == "predicate")
        feats = extract_features(q_pred, c_pred, ex.question, ex.context)
        assert feats["jaccard"] == 0.0
        assert feats["overlap"] == 0.0
        assert feats["exact_match"] == 0.0
        assert feats["kind_pred_pred"] == 1.0

    def test_hand_jaccard_two_thirds(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        q_arg = next(n for n in qg.nodes if n.span == Span(2, 4))  # "the game"
        c_arg = next(n for n in cg.nodes if n.span == Span(0, 3))  # "the final game"
        feats = extract_features(q_arg, c_arg, ex.question, ex.context)
        assert feats["jaccard"] == pytest.approx(2 / 3)
        assert feats["overlap"] == 2.0
        assert feats["role=ARG1|ARG1"] == 1.0
        assert feats["kind_arg_arg"] == 1.0

    def test_bias_always_present(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        feats = extract_features(qg.nodes[0], cg.nodes[0], ex.question, ex.context)
        assert feats["bias"] == 1.0
        assert "emb_dot" not in feats
        feats = extract_features(qg.nodes[0], cg.nodes[0], ex.question, ex.context, emb_dot=0.5)
        assert feats["emb_dot"] == 0.5


class TestLinearScorer:
    def test_zero_weights_score_zero(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        mat = score_matrix(LinearScorer(), ex, qg, cg)
        assert (mat == 0).all()

    def test_unknown_feature_ignored(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        m1 = score_matrix(LinearScorer({"jaccard": 1.0}), ex, qg, cg)
        m2 = score_matrix(LinearScorer({"jaccard": 1.0, "no_such_feature": 99.0}), ex, qg, cg)
        np.testing.assert_array_equal(m1, m2)

    def test_matrix_matches_score_pair(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        model = LinearScorer({"jaccard": 1.5, "overlap": -0.25, "bias": 0.1, "kind_pred_pred": 2.0})
        mat = score_matrix(model, ex, qg, cg)
        for qi in range(len(qg)):
            for cj in range(len(cg)):
                assert mat[qi, cj] == model.score_pair(ex, qg, cg, qi, cj)

    def test_linear_in_weights(self):
        ex = feature_fixture()
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        rng = np.random.default_rng(3)
        names = ["jaccard", "overlap", "bias", "len_diff", "exact_match"]
        w1 = {k: float(rng.normal()) for k in names}
        w2 = {k: float(rng.normal()) for k in names}
        w12 = {k: w1[k] + w2[k] for k in names}
        m1 = score_matrix(LinearScorer(w1), ex, qg, cg)
        m2 = score_matrix(LinearScorer(w2), ex, qg, cg)
        m12 = score_matrix(LinearScorer(w12), ex, qg, cg)
        np.testing.assert_allclose(m12, m1 + m2, atol=1e-12)

    def test_save_load_round_trip(self, tmp_path):
        model = LinearScorer({"jaccard": 1.25, "bias": -0.5, "role=ARG0|ARG0": 3.0})
        path = tmp_path / "model.txt"
        save_linear_model(model, path)
        lines = path.read_text().splitlines()
        assert lines == sorted(lines)
        assert load_linear_model(path).weights == model.weights


class TestEmbeddingScorer:
    def make_sidecar(self, tmp_path, ex, q_mat, c_mat):
        write_sidecar_record(tmp_path, ex.id, q_mat, c_mat)
        return EmbeddingSidecar(tmp_path)

    def test_orthogonal_vectors_score_zero(self, tmp_path):
        q = side(["who", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        c = side(["x", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        ex = example("orth", q, c)
        q_mat = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.float32)
        c_mat = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.float32)
        scorer = EmbeddingScorer(self.make_sidecar(tmp_path, ex, q_mat, c_mat))
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        q_arg = next(i for i, n in enumerate(qg.nodes) if n.kind == "argument")
        c_arg = next(i for i, n in enumerate(cg.nodes) if n.kind == "argument")
        assert scorer.score_pair(ex, qg, cg, q_arg, c_arg) == 0.0

    def test_hand_dot_product(self, tmp_path):
        q = side(["who", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        c = side(["x", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        ex = example("dot", q, c)
        q_mat = np.array([[1.0, 2.0], [0.0, 0.0]], dtype=np.float32)
        c_mat = np.array([[3.0, 4.0], [0.0, 0.0]], dtype=np.float32)
        scorer = EmbeddingScorer(self.make_sidecar(tmp_path, ex, q_mat, c_mat))
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        q_arg = next(i for i, n in enumerate(qg.nodes) if n.kind == "argument")
        c_arg = next(i for i, n in enumerate(cg.nodes) if n.kind == "argument")
        assert scorer.score_pair(ex, qg, cg, q_arg, c_arg) == 11.0  # 1*3 + 2*4

    def test_orthonormal_rows_give_identity_pattern(self, tmp_path):
        # three single-token nodes each side, matching basis vectors
        q = side(
            ["when", "played", "game"],
            frames=[((1, 2), [("AT", (0, 1)), ("A1", (2, 3))])],
        )
        c = side(
            ["now", "played", "match"],
            frames=[((1, 2), [("AT", (0, 1)), ("A1", (2, 3))])],
        )
        ex = example("eye", q, c)
        basis = np.eye(3, dtype=np.float32)
        scorer = EmbeddingScorer(self.make_sidecar(tmp_path, ex, basis, basis))
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        mat = score_matrix(scorer, ex, qg, cg)
        expected = np.zeros((3, 3))
        for i, qn in enumerate(qg.nodes):
            for j, cn in enumerate(cg.nodes):
                expected[i, j] = 1.0 if qn.span == cn.span else 0.0
        np.testing.assert_array_equal(mat, expected)

    def test_emb_dot_feeds_linear_features(self, tmp_path):
        q = side(["who", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        c = side(["x", "won"], frames=[((1, 2), [("A0", (0, 1))])])
        ex = example("featdot", q, c)
        q_mat = np.full((2, 2), 2.0, dtype=np.float32)
        c_mat = np.full((2, 2), 3.0, dtype=np.float32)
        sidecar = self.make_sidecar(tmp_path, ex, q_mat, c_mat)
        qg, cg = build_graph(ex.question), build_graph(ex.context)
        mat = score_matrix(LinearScorer({"emb_dot": 1.0}, sidecar=sidecar), ex, qg, cg)
        np.testing.assert_allclose(mat, 12.0)  # 2*3 + 2*3


def test_wh_question_graph_roundtrip(game_example):
    # score_matrix over real graphs stays finite and consistent
    qg = build_question_graph(game_example.question)
    cg = build_graph(game_example.context)
    model = LinearScorer({"jaccard": 1.0, "entity_equal": 2.0})
    mat = score_matrix(model, game_example, qg, cg)
    assert mat.shape == (len(qg), len(cg))
    assert np.isfinite(mat).all()
