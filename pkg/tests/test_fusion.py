import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omninav.detection import BoundingBox, Detection
from omninav.errors import (
    DegenerateInput,
    DistanceOutOfTable,
    ShapeMismatch,
    UnknownViewpoint,
)
from omninav.fusion import (
    EmbeddingConfig,
    FusedKeyword,
    KeywordEmbedder,
    build_map_embedding,
    fuse_continuous,
    fuse_discrete,
    fuse_keyword_embedding,
    heading_embedding,
    keyword_attention,
    layer_norm,
)
from omninav.graph import Omnigraph, Viewpoint

from oracles import brute_force_fuse_discrete, random_detection_graph


def det(label, confidence):
    return Detection(
        label=label,
        box=BoundingBox(10.0, 10.0, 60.0, 60.0),
        confidence=confidence,
        heading_deg=0.0,
    )


def graph_line_abc():
    g = Omnigraph("s")
    for i, vid in enumerate("ABC"):
        g.add_viewpoint(Viewpoint(vid, (float(i), 0.0)))
    g.add_edge("A", "B")
    g.add_edge("B", "C")
    g.nodes["B"].detections["sofa"] = det("sofa", 0.9)
    g.nodes["C"].detections["sofa"] = det("sofa", 0.8)
    g.nodes["C"].detections["lamp"] = det("lamp", 0.7)
    return g


def view_by_id(ids):
    lookup = {vid: i for i, vid in enumerate(sorted(ids))}
    return lambda cur, nb: lookup[nb] % 12


class TestFuseDiscrete:
    def test_line_example(self):
        g = graph_line_abc()
        view = lambda cur, nb: 5 if nb == "B" else 99
        fused = fuse_discrete(g, "A", 3, view)
        assert [(f.label, f.d_v, f.h_v) for f in fused] == [("sofa", 1, 5), ("lamp", 2, 5)]
        # mode tie for sofa resolved toward the closer viewpoint's confidence
        assert fused[0].confidence == 0.9

    def test_keyword_at_origin(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("A", (0.0, 0.0)))
        g.nodes["A"].detections["bed"] = det("bed", 0.6)
        fused = fuse_discrete(g, "A", 1, lambda cur, nb: 7)
        assert fused == [FusedKeyword(label="bed", d_v=0, h_v=0, confidence=0.6)]

    def test_empty_detections(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("A", (0.0, 0.0)))
        assert fuse_discrete(g, "A", 3, lambda cur, nb: 0) == []

    def test_unknown_current(self):
        with pytest.raises(UnknownViewpoint):
            fuse_discrete(Omnigraph("s"), "A", 3, lambda cur, nb: 0)

    def test_distinct_labels_from_neighbour_tables(self):
        g = graph_line_abc()
        fused = fuse_discrete(g, "A", 3, lambda cur, nb: 0)
        labels = [f.label for f in fused]
        assert len(labels) == len(set(labels))
        all_labels = {l for vp in g.nodes.values() for l in vp.detections}
        assert set(labels) <= all_labels

    def test_matches_brute_force_on_random_graphs(self):
        for seed in range(60):
            g, origin = random_detection_graph(seed)
            view = view_by_id(g.nodes)
            for d_n in (1, 2, 3):
                assert fuse_discrete(g, origin, d_n, view) == brute_force_fuse_discrete(
                    g, origin, d_n, view
                ), f"mismatch seed={seed} d_n={d_n}"

    def test_first_hop_lexicographic_tie_break(self):
        # diamond: A-B-D and A-C-D are both shortest; B < C must win
        g = Omnigraph("s")
        for vid in "ABCD":
            g.add_viewpoint(Viewpoint(vid, (0.0, 0.0)))
        for a, b in (("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")):
            g.add_edge(a, b)
        g.nodes["D"].detections["sofa"] = det("sofa", 0.5)
        fused = fuse_discrete(g, "A", 3, lambda cur, nb: {"B": 1, "C": 2}[nb])
        assert fused[0].h_v == 1


class TestFuseContinuous:
    def test_hand_case_max_score(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("east", (5.0, 0.0)))
        g.add_viewpoint(Viewpoint("north", (0.0, 5.0)))
        g.nodes["east"].detections["sofa"] = det("sofa", 0.8)
        g.nodes["north"].detections["sofa"] = det("sofa", 0.9)
        fused = fuse_continuous(g, (0.0, 0.0), 7.0)
        assert len(fused) == 1
        assert fused[0].d_v == pytest.approx(5.0)
        assert fused[0].h_v == pytest.approx(0.0)  # bearing to (0, 5), north = 0
        assert fused[0].confidence == 0.9  # max-score detection wins

    def test_radius_too_small(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("east", (5.0, 0.0)))
        g.nodes["east"].detections["sofa"] = det("sofa", 0.8)
        assert fuse_continuous(g, (0.0, 0.0), 4.0) == []

    def test_bearing_convention_due_east(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("east", (3.0, 0.0)))
        g.nodes["east"].detections["lamp"] = det("lamp", 0.5)
        fused = fuse_continuous(g, (0.0, 0.0), 7.0)
        assert fused[0].h_v == pytest.approx(90.0)

    def test_sorted_by_distance(self):
        g = Omnigraph("s")
        g.add_viewpoint(Viewpoint("far", (6.0, 0.0)))
        g.add_viewpoint(Viewpoint("near", (1.0, 0.0)))
        g.nodes["far"].detections["lamp"] = det("lamp", 0.5)
        g.nodes["near"].detections["sofa"] = det("sofa", 0.5)
        assert [f.label for f in fuse_continuous(g, (0.0, 0.0), 7.0)] == ["sofa", "lamp"]


class TestHeadingEmbedding:
    @pytest.mark.parametrize(
        "theta,phi,expected",
        [
            (0.0, 0.0, (0.0, 1.0, 0.0, 1.0)),
            (90.0, 0.0, (1.0, 0.0, 0.0, 1.0)),
            (180.0, -90.0, (0.0, -1.0, -1.0, 0.0)),
        ],
    )
    def test_cases(self, theta, phi, expected):
        np.testing.assert_allclose(heading_embedding(theta, phi), expected, atol=1e-12)

    @given(st.floats(min_value=-720, max_value=720), st.floats(min_value=-90, max_value=90))
    def test_unit_circle_pairs(self, theta, phi):
        e = heading_embedding(theta, phi)
        assert abs(e[0] ** 2 + e[1] ** 2 - 1.0) < 1e-12
        assert abs(e[2] ** 2 + e[3] ** 2 - 1.0) < 1e-12


class TestLayerNorm:
    def test_analytic_case(self):
        np.testing.assert_allclose(
            layer_norm(np.array([1.0, 2.0, 3.0])), [-1.2247, 0.0, 1.2247], atol=1e-3
        )

    def test_fixed_point(self):
        v = np.array([-1.0, 1.0])  # already zero mean, unit population variance
        np.testing.assert_allclose(layer_norm(v), v, atol=1e-4)

    def test_constant_vector_rejected(self):
        with pytest.raises(DegenerateInput):
            layer_norm(np.array([5.0, 5.0, 5.0]))

    def test_too_short(self):
        with pytest.raises(DegenerateInput):
            layer_norm(np.array([1.0]))

    @given(st.integers(min_value=0, max_value=500))
    def test_statistics(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=rng.integers(2, 64)) * rng.uniform(0.5, 10) + rng.uniform(-5, 5)
        out = layer_norm(v)
        assert abs(out.mean()) < 1e-9
        assert abs(out.var() - 1.0) < 1e-4


class TestFuseKeywordEmbedding:
    def test_distance_term_nulled(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        cfg.e_d = np.zeros_like(cfg.e_d)
        e = KeywordEmbedder(dim=8, seed=0).embed("sofa")
        a = fuse_keyword_embedding(e, 2, 0, cfg)
        b = fuse_keyword_embedding(e, 2, 3, cfg)
        np.testing.assert_array_equal(a, b)

    def test_term_isolation(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        cfg.w_cls = np.eye(8)
        cfg.w_h = np.zeros_like(cfg.w_h)
        cfg.e_d = np.zeros_like(cfg.e_d)
        e_cls = layer_norm(np.arange(8.0))  # zero mean, unit variance
        out = fuse_keyword_embedding(e_cls, 0, 0, cfg)
        np.testing.assert_allclose(out, layer_norm(e_cls), atol=1e-12)

    def test_deterministic_across_rebuilds(self):
        a = EmbeddingConfig(dim=16, view_count=12, d_n=3, seed=42)
        b = EmbeddingConfig(dim=16, view_count=12, d_n=3, seed=42)
        e1 = KeywordEmbedder(dim=16, seed=42).embed("dining table")
        e2 = KeywordEmbedder(dim=16, seed=42).embed("dining table")
        out1 = fuse_keyword_embedding(e1, 4, 2, a)
        out2 = fuse_keyword_embedding(e2, 4, 2, b)
        assert out1.tobytes() == out2.tobytes()

    def test_distance_out_of_table(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        e = KeywordEmbedder(dim=8).embed("sofa")
        with pytest.raises(DistanceOutOfTable):
            fuse_keyword_embedding(e, 0, 4, cfg)

    def test_continuous_distance_binning(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=7, seed=1)
        e = KeywordEmbedder(dim=8).embed("sofa")
        a = fuse_keyword_embedding(e, 45.0, 2.2, cfg, continuous=True)
        b = fuse_keyword_embedding(e, 45.0, 2.9, cfg, continuous=True)
        np.testing.assert_array_equal(a, b)  # same floor bin

    def test_config_json_round_trip(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=9)
        clone = EmbeddingConfig.from_json(cfg.to_json())
        np.testing.assert_array_equal(cfg.w_cls, clone.w_cls)
        np.testing.assert_array_equal(cfg.e_d, clone.e_d)


class TestBuildMapEmbedding:
    def test_empty(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        out = build_map_embedding([], cfg, KeywordEmbedder(dim=8))
        assert out.shape == (0, 8)

    def test_single_row_equals_fuse(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        embedder = KeywordEmbedder(dim=8, seed=1)
        fk = FusedKeyword(label="sofa", d_v=1, h_v=3, confidence=0.9)
        out = build_map_embedding([fk], cfg, embedder)
        np.testing.assert_array_equal(
            out[0], fuse_keyword_embedding(embedder.embed("sofa"), 3, 1, cfg)
        )

    @given(st.permutations(range(4)))
    def test_permutation_invariant(self, perm):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        embedder = KeywordEmbedder(dim=8, seed=1)
        fks = [
            FusedKeyword(label="sofa", d_v=1, h_v=3, confidence=0.9),
            FusedKeyword(label="lamp", d_v=1, h_v=2, confidence=0.4),
            FusedKeyword(label="bed", d_v=2, h_v=0, confidence=0.7),
            FusedKeyword(label="sink", d_v=0, h_v=0, confidence=0.2),
        ]
        base = build_map_embedding(fks, cfg, embedder)
        shuffled = build_map_embedding([fks[i] for i in perm], cfg, embedder)
        np.testing.assert_array_equal(base, shuffled)

    def test_duplicate_distance_label_tie_break(self):
        cfg = EmbeddingConfig(dim=8, view_count=12, d_n=3, seed=1)
        embedder = KeywordEmbedder(dim=8, seed=1)
        fks = [
            FusedKeyword(label="zebra rug", d_v=1, h_v=0, confidence=0.5),
            FusedKeyword(label="armchair", d_v=1, h_v=1, confidence=0.5),
        ]
        out = build_map_embedding(fks, cfg, embedder)
        np.testing.assert_array_equal(
            out[0], fuse_keyword_embedding(embedder.embed("armchair"), 1, 1, cfg)
        )


class TestKeywordAttention:
    def test_singleton_softmax(self):
        key = np.array([[1.0, 2.0, 3.0]])
        value = np.array([[5.0, 6.0]])
        out = keyword_attention(np.array([1.0, 2.0, 3.0]), key, value)
        np.testing.assert_allclose(out, [5.0, 6.0])

    def test_aligned_query_dominates(self):
        keys = np.array([[1.0, 0.0], [0.0, 1.0]])
        values = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        out = keyword_attention(np.array([50.0, 0.0]), keys, values)
        # softmax weight on key 1 exceeds 1/(1+exp(-50/sqrt(2))) > 0.99
        assert out[0] > 0.99
        assert out[1] < 0.01

    def test_empty_keys(self):
        out = keyword_attention(np.array([1.0, 2.0]), np.zeros((0, 2)), np.zeros((0, 5)))
        np.testing.assert_array_equal(out, np.zeros(5))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            keyword_attention(np.array([1.0]), np.zeros((2, 3)), np.zeros((2, 4)))
        with pytest.raises(ShapeMismatch):
            keyword_attention(np.array([1.0, 2.0, 3.0]), np.zeros((2, 3)), np.zeros((3, 4)))

    @given(st.integers(min_value=0, max_value=200))
    def test_weights_sum_and_shift_invariance(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 6))
        d = int(rng.integers(1, 6))
        keys = rng.normal(size=(k, d))
        values = rng.normal(size=(k, 3))
        query = rng.normal(size=d)
        if np.linalg.norm(query) < 1e-6:
            return
        out = keyword_attention(query, keys, values)
        # weights implicitly sum to 1: attention over constant values returns it
        const = keyword_attention(query, keys, np.ones((k, 3)) * 7.5)
        np.testing.assert_allclose(const, [7.5, 7.5, 7.5], atol=1e-9)
        # shifting every logit by the same constant must not change the output;
        # adding u with u . query = c * sqrt(d) to every key does exactly that
        c = float(rng.uniform(-3, 3))
        u = query * (c * np.sqrt(d) / float(query @ query))
        shifted = keyword_attention(query, keys + u, values)
        np.testing.assert_allclose(out, shifted, atol=1e-9)
