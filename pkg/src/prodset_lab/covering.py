"""Exact set-cover search over bitmask universes.

Strategy: greedy pass for an incumbent upper bound, then depth-first
branch-and-bound that branches on the uncovered element with the fewest
covering candidates. Dominated candidates (whose restriction to the universe
is contained in an earlier candidate's) are dropped up front. All iteration
orders are fixed, so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf


@dataclass(frozen=True)
class CoverResult:
    status: str  # "exact" | "lower_bound" | "budget" | "infeasible"
    size: int | None  # proven minimum (status "exact" only)
    chosen: tuple | None  # candidate indices realizing the minimum
    lower_bound: int  # certified: every cover has at least this many sets
    upper_bound: int | None  # size of the best cover found, if any
    nodes: int


def greedy_cover(universe: int, masks) -> list[int] | None:
    """Indices of a greedy cover of ``universe``, or None if impossible."""
    uncovered = universe
    chosen: list[int] = []
    while uncovered:
        best_i = -1
        best_gain = 0
        for i, m in enumerate(masks):
            gain = (m & uncovered).bit_count()
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_gain == 0:
            return None
        chosen.append(best_i)
        uncovered &= ~masks[best_i]
    return chosen


def min_cover(
    universe: int,
    masks,
    max_size: int | None = None,
    node_cap: int = 2_000_000,
) -> CoverResult:
    """Minimum number of candidate masks whose union contains ``universe``.

    ``max_size`` caps the search depth; if the true minimum exceeds it, the
    result certifies ``lower_bound = max_size + 1`` instead of guessing.
    ``node_cap`` bounds the branch-and-bound tree; on exhaustion the result
    is flagged "budget" and only the trivial lower bound is claimed.
    """
    masks = list(masks)
    if universe == 0:
        return CoverResult("exact", 0, (), 0, 0, 0)

    union = 0
    for m in masks:
        union |= m
    if universe & ~union:
        return CoverResult("infeasible", None, None, 0, None, 0)

    # Dominance filter: drop a candidate whose restriction to the universe
    # is contained in an earlier kept candidate's.
    restriction = [m & universe for m in masks]
    keep: list[int] = []
    for i, r in enumerate(restriction):
        if not r:
            continue
        if any(r & ~restriction[j] == 0 for j in keep):
            continue
        keep.append(i)
    kept_masks = [restriction[i] for i in keep]

    greedy = greedy_cover(universe, kept_masks)
    assert greedy is not None  # union covers, so greedy cannot fail
    incumbent = list(greedy)
    incumbent_size = len(incumbent)

    depth_cap = max_size if max_size is not None else incumbent_size
    max_gain = max(m.bit_count() for m in kept_masks)

    # coverers[b]: kept-candidate indices containing universe bit b
    bits = []
    u = universe
    while u:
        low = u & -u
        bits.append(low)
        u ^= low
    coverers = {b: [i for i, m in enumerate(kept_masks) if m & b] for b in bits}

    nodes = 0
    budget_hit = False
    best = incumbent if incumbent_size <= depth_cap else None
    best_size = incumbent_size if best is not None else depth_cap + 1

    def dfs(uncovered: int, chosen: list[int]) -> None:
        nonlocal nodes, budget_hit, best, best_size
        if budget_hit:
            return
        nodes += 1
        if nodes > node_cap:
            budget_hit = True
            return
        if not uncovered:
            if len(chosen) < best_size:
                best = list(chosen)
                best_size = len(chosen)
            return
        need = len(chosen) + -(-uncovered.bit_count() // max_gain)
        if need >= best_size or len(chosen) >= min(best_size - 1, depth_cap):
            return
        # branch on the uncovered element with the fewest coverers
        pivot = None
        pivot_cov = None
        for b in bits:
            if uncovered & b:
                cov = [i for i in coverers[b] if i not in chosen]
                if pivot_cov is None or len(cov) < len(pivot_cov):
                    pivot, pivot_cov = b, cov
                    if len(cov) <= 1:
                        break
        if not pivot_cov:
            return
        for i in pivot_cov:
            chosen.append(i)
            dfs(uncovered & ~kept_masks[i], chosen)
            chosen.pop()

    dfs(universe, [])

    if budget_hit:
        trivial_lb = -(-universe.bit_count() // max_gain)
        up = best_size if best is not None else (incumbent_size if greedy else None)
        ch = tuple(keep[i] for i in best) if best is not None else None
        return CoverResult("budget", None, ch, trivial_lb, up, nodes)

    if best is None:
        # exhaustive to depth_cap: minimum certified to exceed max_size
        up = incumbent_size
        return CoverResult("lower_bound", None, None, depth_cap + 1, up, nodes)

    return CoverResult(
        "exact", best_size, tuple(keep[i] for i in best), best_size, best_size, nodes
    )
