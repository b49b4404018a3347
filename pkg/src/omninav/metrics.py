"""Episode- and tour-level navigation metrics.

Episode metrics follow the standard VLN definitions (trajectory length,
navigation error, oracle success, success rate, success weighted by path
length, normalized DTW). The tour-level score concatenates each tour's
executed navigation paths and ground-truth paths in episode order, scores
the concatenation with nDTW, and averages across tours weighted by
reference step count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyPath
from .geometry import euclid, path_length

Point = Sequence[float]

DEFAULT_D_TH = 3.0
DEFAULT_SUCCESS_RADIUS = 3.0


def dtw(path: Sequence[Point], ref: Sequence[Point]) -> float:
    """Classic dynamic time warping cost with Euclidean point distance.

    Boundary-matched, full warping path, no step weighting.
    """
    if len(path) == 0 or len(ref) == 0:
        raise EmptyPath("dtw needs non-empty paths")
    n, m = len(path), len(ref)
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = euclid(path[i - 1], ref[j - 1])
            acc[i, j] = cost + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[n, m])


def ndtw(path: Sequence[Point], ref: Sequence[Point], d_th: float = DEFAULT_D_TH) -> float:
    """exp(-dtw / (|ref| * d_th)): 1.0 for a perfect match, decaying with cost."""
    return math.exp(-dtw(path, ref) / (len(ref) * d_th))


def t_ndtw(
    tours: Sequence[tuple[Sequence[Sequence[Point]], Sequence[Sequence[Point]]]],
    d_th: float = DEFAULT_D_TH,
    weighted: bool = True,
) -> float:
    """Tour-level nDTW.

    Each tour is (executed_paths, reference_paths), one entry per episode in
    tour order; both sides are concatenated before scoring. Tours aggregate
    by reference step count, or uniformly with ``weighted=False``.
    """
    scores = []
    weights = []
    for executed_paths, reference_paths in tours:
        q = [p for path in executed_paths for p in path]
        r = [p for path in reference_paths for p in path]
        if not q or not r:
            raise EmptyPath("tour with empty concatenated path")
        scores.append(ndtw(q, r, d_th))
        weights.append(len(r))
    if not scores:
        raise EmptyPath("no tours to aggregate")
    if not weighted:
        return sum(scores) / len(scores)
    total = sum(weights)
    return sum(w * s for w, s in zip(weights, scores)) / total


@dataclass(frozen=True)
class EpisodeResult:
    """One episode's metric row."""

    tl: float
    ne: float
    os_: int
    sr: int
    spl: float
    ndtw: float

    def as_dict(self) -> dict:
        return {
            "TL": self.tl,
            "NE": self.ne,
            "OS": self.os_,
            "nDTW": self.ndtw,
            "SR": self.sr,
            "SPL": self.spl,
        }


def episode_metrics(
    executed: Sequence[Point],
    gt_path: Sequence[Point],
    goal: Point,
    shortest_path_length: float,
    success_radius: float = DEFAULT_SUCCESS_RADIUS,
    d_th: float = DEFAULT_D_TH,
) -> EpisodeResult:
    """Standard episode metrics of an executed path against its reference."""
    if len(executed) == 0:
        raise EmptyPath("executed path is empty")
    if len(gt_path) == 0:
        raise EmptyPath("ground-truth path is empty")
    tl = path_length(executed)
    ne = euclid(executed[-1], goal)
    sr = 1 if ne <= success_radius else 0
    os_ = 1 if min(euclid(p, goal) for p in executed) <= success_radius else 0
    denom = max(tl, shortest_path_length)
    spl = float(sr) if denom == 0 else sr * shortest_path_length / denom
    return EpisodeResult(
        tl=tl,
        ne=ne,
        os_=os_,
        sr=sr,
        spl=spl,
        ndtw=ndtw(executed, gt_path, d_th),
    )


METRIC_COLUMNS = ("TL", "NE", "OS", "nDTW", "SR", "SPL")


def render_metrics_table(rows: dict[str, dict], t_ndtw_value: float | None = None) -> str:
    """Aligned text table of per-episode metrics plus the tour aggregate."""
    header = ["episode"] + list(METRIC_COLUMNS) + ["t-nDTW"]
    lines = []
    body = []
    for key in rows:
        row = rows[key]
        body.append(
            [key] + [_fmt(row.get(col)) for col in METRIC_COLUMNS] + [""]
        )
    if t_ndtw_value is not None:
        body.append(["(tour)"] + [""] * len(METRIC_COLUMNS) + [_fmt(t_ndtw_value)])
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
              for i in range(len(header))]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)))
    for r in body:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(r)))
    return "\n".join(lines)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)
