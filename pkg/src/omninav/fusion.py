"""Omnigraph fusion: turn a local subgraph into positional keyword context.

Discrete pipeline (pre-defined viewpoints): collect neighbours within a hop
budget, take each viewpoint's best box per keyword, attach hop distance and
the view index of the next move toward the viewpoint, and collapse keywords
seen at several viewpoints to their most frequent (distance, view) pair.

Continuous pipeline: collect viewpoints within a metric radius, keep the
single highest-scoring detection per keyword, and attach the Euclidean
distance and compass bearing to its viewpoint.

The fused keywords feed an embedding sum of three normalized terms (keyword
representation, heading embedding, distance embedding) and a scaled
dot-product attention read-out.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    DistanceOutOfTable,
    ShapeMismatch,
    UnknownViewpoint,
)
from .geometry import bearing_deg
from .graph import Omnigraph, ViewpointId

LAYER_NORM_EPS = 1e-5


@dataclass(frozen=True)
class FusedKeyword:
    """A deduplicated keyword with its positional attributes.

    Discrete: d_v is a hop count, h_v a view index. Continuous: d_v is meters,
    h_v a heading in degrees.
    """

    label: str
    d_v: float
    h_v: float
    confidence: float


def fuse_discrete(
    graph: Omnigraph,
    current: ViewpointId,
    d_n: int,
    next_move_view_index: Callable[[ViewpointId, ViewpointId], int],
) -> list[FusedKeyword]:
    """Discrete fusion around ``current``.

    ``next_move_view_index(current, first_hop)`` maps the first move of the
    shortest path toward a neighbour to a discrete view index; a keyword at
    the current viewpoint itself gets distance 0 and the self view index 0.
    Output is sorted by (distance, label).
    """
    if current not in graph.nodes:
        raise UnknownViewpoint(current)
    hops = dict(graph.neighbours_within_hops(current, d_n))
    first = graph.first_hops(current)

    # (label -> [(d_v, h_v, confidence)]) one occurrence per holding viewpoint
    occurrences: dict[str, list[tuple[int, int, float]]] = {}
    for vid in sorted(hops):
        vp = graph.nodes[vid]
        d = hops[vid]
        h = 0 if vid == current else int(next_move_view_index(current, first[vid]))
        for label, det in vp.detections.items():
            assert label == det.label
            occurrences.setdefault(label, []).append((d, h, det.confidence))

    fused = []
    for label, occ in occurrences.items():
        counts = Counter((d, h) for d, h, _ in occ)
        # most frequent (d, h); ties prefer closer evidence, then smaller index
        (d_v, h_v), _ = min(counts.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
        confidence = max(c for d, h, c in occ if (d, h) == (d_v, h_v))
        fused.append(FusedKeyword(label=label, d_v=d_v, h_v=h_v, confidence=confidence))
    fused.sort(key=lambda fk: (fk.d_v, fk.label))
    return fused


def fuse_continuous(
    graph: Omnigraph, pos: Sequence[float], d_n: float
) -> list[FusedKeyword]:
    """Continuous fusion around a free-space position.

    Keeps the single highest-confidence detection per keyword over all
    viewpoints strictly within d_n meters; attaches the distance to that
    detection's viewpoint and the compass bearing toward it.
    """
    neighbours = graph.neighbours_within_radius(pos, d_n)

    best: dict[str, tuple[float, float, ViewpointId]] = {}
    for vid, dist in neighbours:
        vp = graph.nodes[vid]
        for label, det in vp.detections.items():
            # highest confidence wins; ties go to the closer, then smaller id
            rank = (-det.confidence, dist, vid)
            cur = best.get(label)
            if cur is None or rank < cur:
                best[label] = rank

    fused = []
    for label, (neg_conf, dist, vid) in best.items():
        heading = bearing_deg(pos, graph.nodes[vid].position)
        fused.append(
            FusedKeyword(label=label, d_v=dist, h_v=heading, confidence=-neg_conf)
        )
    fused.sort(key=lambda fk: (fk.d_v, fk.label))
    return fused


def heading_embedding(theta_deg: float, phi_deg: float) -> np.ndarray:
    """4-vector (sin t, cos t, sin p, cos p) of heading/elevation in degrees."""
    t = math.radians(theta_deg)
    p = math.radians(phi_deg)
    return np.array([math.sin(t), math.cos(t), math.sin(p), math.cos(p)])


def layer_norm(v: np.ndarray) -> np.ndarray:
    """Standardize to zero mean / unit variance (population), no learned affine."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DegenerateInput("layer_norm needs a vector of length >= 2")
    var = float(v.var())
    if var < 1e-20:
        raise DegenerateInput("constant vector has no direction to normalize")
    return (v - v.mean()) / math.sqrt(var + LAYER_NORM_EPS)


def _layer_norm_term(v: np.ndarray) -> np.ndarray:
    """Epsilon-stabilized normalization for use inside the fusion sum.

    A constant vector normalizes to exactly zero under (v - mean) /
    sqrt(var + eps); deliberately zeroed weight matrices therefore null
    their term instead of erroring.
    """
    v = np.asarray(v, dtype=float)
    if float(v.var()) < 1e-20:
        return np.zeros_like(v)
    return layer_norm(v)


@dataclass
class EmbeddingConfig:
    """Deterministic stand-in for the learned fusion parameters.

    All matrices and the distance table are generated from ``seed``, so a
    config serializes as its scalar fields alone. ``view_count`` discrete view
    indices wrap ``elevation_rows`` rings of equal size; the default is a
    single ring of 12 headings.
    """

    dim: int
    view_count: int
    d_n: int
    seed: int
    elevation_rows: int = 1
    w_cls: np.ndarray | None = None
    w_h: np.ndarray | None = None
    e_d: np.ndarray | None = None

    def __post_init__(self):
        if self.view_count % self.elevation_rows != 0:
            raise ShapeMismatch("view_count must be a multiple of elevation_rows")
        rng = np.random.default_rng(self.seed)
        if self.w_cls is None:
            self.w_cls = rng.standard_normal((self.dim, self.dim))
        if self.w_h is None:
            self.w_h = rng.standard_normal((self.dim, 4))
        if self.e_d is None:
            self.e_d = rng.standard_normal((self.d_n + 1, self.dim))
        if self.w_cls.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"w_cls shape {self.w_cls.shape} != ({self.dim}, {self.dim})")
        if self.w_h.shape != (self.dim, 4):
            raise ShapeMismatch(f"w_h shape {self.w_h.shape} != ({self.dim}, 4)")
        if self.e_d.shape != (self.d_n + 1, self.dim):
            raise ShapeMismatch(f"e_d shape {self.e_d.shape} != ({self.d_n + 1}, {self.dim})")

    @property
    def headings(self) -> int:
        return self.view_count // self.elevation_rows

    def view_angles(self, view_index: int) -> tuple[float, float]:
        """(heading, elevation) in degrees of a discrete view index.

        Headings advance clockwise in 360/headings steps; with several
        elevation rows, row r covers indices [r*headings, (r+1)*headings) and
        rows spread symmetrically around the horizon in 30 deg steps.
        """
        if not (0 <= view_index < self.view_count):
            raise ShapeMismatch(f"view index {view_index} outside [0, {self.view_count})")
        ring, column = divmod(int(view_index), self.headings)
        theta = column * (360.0 / self.headings)
        phi = (ring - (self.elevation_rows - 1) / 2.0) * 30.0
        return theta, phi

    def distance_index(self, d_v: float) -> int:
        """Distance-table row for d_v; continuous distances bin by floor."""
        if not (0 <= d_v <= self.d_n):
            raise DistanceOutOfTable(f"distance {d_v} outside [0, {self.d_n}]")
        return int(math.floor(d_v))

    def to_json(self) -> str:
        return json.dumps(
            {
                "dim": self.dim,
                "view_count": self.view_count,
                "d_n": self.d_n,
                "seed": self.seed,
                "elevation_rows": self.elevation_rows,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingConfig":
        return cls(**json.loads(text))


class KeywordEmbedder:
    """Deterministic keyword representation: a seeded hash-derived vector.

    Stands in for a language encoder's [CLS] output; equal labels map to
    equal vectors on every platform and run.
    """

    def __init__(self, dim: int, seed: int = 0):
        self.dim = dim
        self.seed = seed

    def embed(self, label: str) -> np.ndarray:
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, *words]))
        return rng.standard_normal(self.dim)


def fuse_keyword_embedding(
    e_cls: np.ndarray,
    h_v: float,
    d_v: float,
    cfg: EmbeddingConfig,
    continuous: bool = False,
) -> np.ndarray:
    """Fused keyword vector: LN(W_cls e) + LN(W_h heading(h_v)) + E_d[d_v].

    Discrete inputs carry a view index and a hop count; continuous inputs a
    heading in degrees (elevation 0) and a distance in meters binned into the
    table.
    """
    e_cls = np.asarray(e_cls, dtype=float)
    if e_cls.shape != (cfg.dim,):
        raise ShapeMismatch(f"e_cls shape {e_cls.shape} != ({cfg.dim},)")
    if continuous:
        theta, phi = float(h_v), 0.0
    else:
        theta, phi = cfg.view_angles(int(h_v))
    term_cls = _layer_norm_term(cfg.w_cls @ e_cls)
    term_h = _layer_norm_term(cfg.w_h @ heading_embedding(theta, phi))
    return term_cls + term_h + cfg.e_d[cfg.distance_index(d_v)]


def build_map_embedding(
    fused: Sequence[FusedKeyword],
    cfg: EmbeddingConfig,
    embedder: KeywordEmbedder,
    continuous: bool = False,
) -> np.ndarray:
    """Row-stack fused keyword embeddings, closest keyword first.

    The input is re-sorted by (distance, label) defensively, so any
    permutation of the same keywords produces an identical matrix.
    """
    ordered = sorted(fused, key=lambda fk: (fk.d_v, fk.label))
    rows = [
        fuse_keyword_embedding(embedder.embed(fk.label), fk.h_v, fk.d_v, cfg, continuous)
        for fk in ordered
    ]
    if not rows:
        return np.zeros((0, cfg.dim))
    return np.stack(rows)


def keyword_attention(query: np.ndarray, keys: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Scaled dot-product attention read-out for a single query vector.

    Empty keys are a defined degenerate case returning the zero vector of the
    value width.
    """
    query = np.asarray(query, dtype=float)
    keys = np.asarray(keys, dtype=float)
    values = np.asarray(values, dtype=float)
    if keys.ndim != 2 or values.ndim != 2:
        raise ShapeMismatch("keys and values must be matrices")
    if keys.shape[0] != values.shape[0]:
        raise ShapeMismatch(f"{keys.shape[0]} keys vs {values.shape[0]} values")
    if keys.shape[0] == 0:
        return np.zeros(values.shape[1])
    if query.shape != (keys.shape[1],):
        raise ShapeMismatch(f"query shape {query.shape} != ({keys.shape[1]},)")
    logits = keys @ query / math.sqrt(keys.shape[1])
    logits -= logits.max()
    weights = np.exp(logits)
    weights /= weights.sum()
    return weights @ values
