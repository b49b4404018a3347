"""Episode-to-tour ordering.

Episodes chain best when each one starts where the previous one ended, so
the ordering minimizes the summed goal-to-next-start distances. That is an
open asymmetric travelling-salesman path; nearest-neighbour construction
followed by 2-opt improvement gets within a few percent of optimal on the
scene sizes we care about, with no external solver.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import SceneMismatch
from ..geometry import euclid
from .tour import Episode, Tour


def _cost_matrix(episodes: Sequence[Episode]) -> list[list[float]]:
    n = len(episodes)
    return [
        [euclid(episodes[i].goal.position, episodes[j].start.position) for j in range(n)]
        for i in range(n)
    ]


def ordering_cost(episodes: Sequence[Episode], order: Sequence[int] | None = None) -> float:
    """Sum of goal-to-next-start distances along an order (open path)."""
    order = list(order) if order is not None else list(range(len(episodes)))
    cost = _cost_matrix(episodes)
    return sum(cost[order[k]][order[k + 1]] for k in range(len(order) - 1))


def order_episodes_into_tour(episodes: Sequence[Episode]) -> Tour:
    """Order episodes to minimize end-to-next-start travel.

    Nearest-neighbour construction from every possible anchor (an open path
    cannot be rotated by 2-opt, so the anchor matters), each candidate
    improved by first-improvement 2-opt with full cost recomputation (exact
    under the asymmetric cost). The input order is kept as a final fallback
    candidate, so the result never costs more than either baseline.
    """
    if not episodes:
        raise SceneMismatch("cannot order zero episodes")
    scene_ids = {ep.scene_id for ep in episodes if ep.scene_id is not None}
    if len(scene_ids) > 1:
        raise SceneMismatch(f"episodes span scenes {sorted(scene_ids)}")
    scene_id = scene_ids.pop() if scene_ids else ""

    n = len(episodes)
    cost = _cost_matrix(episodes)

    def path_cost(order: list[int]) -> float:
        return sum(cost[order[k]][order[k + 1]] for k in range(n - 1))

    def nearest_neighbour(anchor: int) -> list[int]:
        remaining = [i for i in range(n) if i != anchor]
        order = [anchor]
        while remaining:
            cur = order[-1]
            nxt = min(remaining, key=lambda j: (cost[cur][j], j))
            remaining.remove(nxt)
            order.append(nxt)
        return order

    candidates = [_two_opt(nearest_neighbour(a), path_cost) for a in range(n)]
    candidates.append(_two_opt(list(range(n)), path_cost))
    candidates.append(list(range(n)))
    best = min(candidates, key=path_cost)

    return Tour(
        scene_id=scene_id or (episodes[0].scene_id or ""),
        episodes=tuple(episodes[i] for i in best),
    )


def _two_opt(order: list[int], path_cost, max_rounds: int = 200) -> list[int]:
    """First-improvement 2-opt via segment reversal until a local optimum."""
    n = len(order)
    best = list(order)
    best_cost = path_cost(best)
    for _ in range(max_rounds):
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                cand = best[:i] + best[i : j + 1][::-1] + best[j + 1 :]
                cand_cost = path_cost(cand)
                if cand_cost < best_cost - 1e-12:
                    best, best_cost = cand, cand_cost
                    improved = True
        if not improved:
            break
    return best
