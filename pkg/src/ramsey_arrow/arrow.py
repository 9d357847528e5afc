"""Deciding G -> (K_{r+1}, P_n): exact backtracking and a heuristic portfolio."""

from __future__ import annotations

import enum
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .adversary import (
    WrongVertexCount,
    strategy_boundary,
    strategy_hitting_set,
    strategy_pinned_cliques,
    verify_avoiding,
)
from .detectors import DEFAULT_PATH_BUDGET, enumerate_cliques
from .graph import Graph, TwoColouring, iter_bits

DEFAULT_ARROW_BUDGET = 5_000_000

_UNSET, _RED, _BLUE = 0, 1, 2


class ArrowKind(enum.Enum):
    HOLDS = "ArrowHolds"
    FAILS = "ArrowFails"
    UNKNOWN = "Unknown"


@dataclass
class ArrowVerdict:
    kind: ArrowKind
    colouring: TwoColouring | None = None
    reason: str = ""
    nodes: int = 0
    elapsed: float = 0.0
    trace: list[tuple[tuple[int, int], tuple[int, ...]]] = field(default_factory=list)


class _OutOfBudget(Exception):
    pass


def _path_from(adj, v: int, need: int, visited: int) -> bool:
    """Is there a simple path with ``need`` more edges starting at ``v``, avoiding ``visited``?"""
    if need == 0:
        return True
    for w in iter_bits(adj[v] & ~visited):
        if _path_from(adj, w, need - 1, visited | (1 << w)):
            return True
    return False


def path_through_edge(adj, u: int, v: int, length: int) -> bool:
    """Does the graph have a path of ``length`` edges using edge ``uv``?

    Splits the path at ``uv``: a simple path of ``i`` edges ending at ``u`` and
    one of ``length - 1 - i`` edges leaving ``v``, vertex-disjoint.
    """
    budget_left = length - 1

    def left(x: int, used: int, visited: int) -> bool:
        if _path_from(adj, v, budget_left - used, visited):
            return True
        if used == budget_left:
            return False
        for w in iter_bits(adj[x] & ~visited):
            if left(w, used + 1, visited | (1 << w)):
                return True
        return False

    return left(u, 0, (1 << u) | (1 << v))


def arrow_exact(graph: Graph, r: int, n: int, budget: int = DEFAULT_ARROW_BUDGET, trace: bool = False) -> ArrowVerdict:
    """Complete search over red/blue colourings of ``graph``.

    Edges are branched in decreasing order of the number of K_{r+1} copies
    containing them. A copy with all edges blue but one undecided forces that
    edge red; a red edge that completes a red path with n edges closes the
    branch. No symmetry reduction.
    """
    t0 = time.perf_counter()
    edges = graph.edges()
    index = {e: i for i, e in enumerate(edges)}
    copies = enumerate_cliques(graph, r + 1)
    copy_edges = [
        [index[(c[a], c[b])] for a in range(len(c)) for b in range(a + 1, len(c))] for c in copies
    ]
    in_copies: list[list[int]] = [[] for _ in edges]
    for ci, ce in enumerate(copy_edges):
        for e in ce:
            in_copies[e].append(ci)
    order = sorted(range(len(edges)), key=lambda e: (-len(in_copies[e]), edges[e]))
    size = len(copy_edges[0]) if copy_edges else 0
    colour = [_UNSET] * len(edges)
    blue_count = [0] * len(copies)
    unset_count = [size] * len(copies)
    red_adj = [0] * graph.num_vertices
    forced_log: list[tuple[tuple[int, int], tuple[int, ...]]] = []
    nodes = 0

    def assign(e: int, c: int, trail: list[int]) -> bool:
        """Set colour ``c`` on edge ``e`` and propagate; False on conflict."""
        queue = [(e, c, None)]
        while queue:
            e, c, why = queue.pop()
            if colour[e] != _UNSET:
                if colour[e] != c:
                    return False
                continue
            colour[e] = c
            trail.append(e)
            if why is not None and trace:
                forced_log.append((edges[e], copies[why]))
            u, v = edges[e]
            if c == _RED:
                for ci in in_copies[e]:
                    unset_count[ci] -= 1
                red_adj[u] |= 1 << v
                red_adj[v] |= 1 << u
                if path_through_edge(red_adj, u, v, n):
                    return False
            else:
                for ci in in_copies[e]:
                    unset_count[ci] -= 1
                    blue_count[ci] += 1
                    if blue_count[ci] == size:
                        return False
                    if blue_count[ci] == size - 1 and unset_count[ci] == 1:
                        f = next(x for x in copy_edges[ci] if colour[x] == _UNSET)
                        queue.append((f, _RED, ci))
        return True

    def undo(trail: list[int], mark: int) -> None:
        while len(trail) > mark:
            e = trail.pop()
            c = colour[e]
            colour[e] = _UNSET
            if c == _RED:
                u, v = edges[e]
                red_adj[u] &= ~(1 << v)
                red_adj[v] &= ~(1 << u)
                for ci in in_copies[e]:
                    unset_count[ci] += 1
            else:
                for ci in in_copies[e]:
                    unset_count[ci] += 1
                    blue_count[ci] -= 1

    trail: list[int] = []

    def search(pos: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _OutOfBudget
        while pos < len(order) and colour[order[pos]] != _UNSET:
            pos += 1
        if pos == len(order):
            return True
        e = order[pos]
        for c in (_BLUE, _RED):
            mark = len(trail)
            log_mark = len(forced_log)
            if assign(e, c, trail) and search(pos + 1):
                return True
            undo(trail, mark)
            del forced_log[log_mark:]
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(edges) + 1000))
    try:
        found = search(0)
    except _OutOfBudget:
        return ArrowVerdict(ArrowKind.UNKNOWN, None, "node budget exhausted", nodes, time.perf_counter() - t0)
    finally:
        sys.setrecursionlimit(limit)
    elapsed = time.perf_counter() - t0
    if not found:
        return ArrowVerdict(ArrowKind.HOLDS, None, "complete search", nodes, elapsed)
    col = TwoColouring.from_red_edges(graph, [edges[e] for e in range(len(edges)) if colour[e] == _RED])
    return ArrowVerdict(ArrowKind.FAILS, col, "avoiding colouring", nodes, elapsed, list(forced_log))


# --- portfolio -------------------------------------------------------------


def _violation(graph: Graph, red_adj, copy_masks, n: int) -> int:
    """Blue K_{r+1} copies plus the excess of red components over n vertices.

    Zero means no blue clique and every red component too small for a path with n edges.
    """
    blue = 0
    for c in copy_masks:
        if not any(red_adj[u] & m for u, m in c):
            blue += 1
    red = Graph(graph.num_vertices, tuple(red_adj))
    excess = sum(max(0, comp.bit_count() - n) for comp in red.components())
    return blue + excess


def _conflict_edges(graph: Graph, red_adj, copies, copy_masks, index, n: int) -> list[int]:
    """Edges of all-blue copies and red edges inside oversized red components."""
    out = set()
    for c, cm in zip(copies, copy_masks):
        if not any(red_adj[u] & m for u, m in cm):
            out.update(index[(c[i], c[j])] for i in range(len(c)) for j in range(i + 1, len(c)))
    red = Graph(graph.num_vertices, tuple(red_adj))
    for comp in red.components():
        if comp.bit_count() > n:
            for u in iter_bits(comp):
                out.update(index[(u, v)] for v in iter_bits(red.adj[u] >> (u + 1) << (u + 1)))
    return sorted(out)


def local_search(
    graph: Graph, r: int, n: int, seed: int = 0, restarts: int = 4, steps: int = 300, noise: float = 0.2
) -> TwoColouring | None:
    """Min-conflicts search over colourings; returns a verified avoiding colouring or None."""
    edges = graph.edges()
    if not edges:
        return TwoColouring.all_blue(graph)
    rng = np.random.default_rng(seed)
    copies = enumerate_cliques(graph, r + 1)
    # per copy: (vertex, mask of its later copy vertices) pairs, to test for a red edge
    copy_masks = [
        [(c[i], sum(1 << w for w in c[i + 1:])) for i in range(len(c) - 1)] for c in copies
    ]
    index = {e: i for i, e in enumerate(edges)}
    for _ in range(restarts):
        red_adj = [0] * graph.num_vertices
        for (u, v), x in zip(edges, rng.random(len(edges))):
            if x < 0.3:
                red_adj[u] |= 1 << v
                red_adj[v] |= 1 << u
        cost = _violation(graph, red_adj, copy_masks, n)
        for _ in range(steps):
            if cost == 0:
                col = TwoColouring(graph, red_adj)
                ok, _ = verify_avoiding(col, r, n, "exact")
                if ok:
                    return col
                break
            if rng.random() < noise:
                cands = [int(rng.integers(len(edges)))]
            else:
                cands = _conflict_edges(graph, red_adj, copies, copy_masks, index, n)
            best, best_cost = [], None
            for ei in cands:
                u, v = edges[ei]
                red_adj[u] ^= 1 << v
                red_adj[v] ^= 1 << u
                c = _violation(graph, red_adj, copy_masks, n)
                red_adj[u] ^= 1 << v
                red_adj[v] ^= 1 << u
                if best_cost is None or c < best_cost:
                    best, best_cost = [ei], c
                elif c == best_cost:
                    best.append(ei)
            ei = best[int(rng.integers(len(best)))]
            u, v = edges[ei]
            red_adj[u] ^= 1 << v
            red_adj[v] ^= 1 << u
            cost = best_cost
        if cost == 0:
            col = TwoColouring(graph, red_adj)
            if verify_avoiding(col, r, n, "exact")[0]:
                return col
    return None


def arrow_portfolio(
    graph: Graph,
    r: int,
    n: int,
    t_hint: int | None = None,
    seed: int = 0,
    budget: int = DEFAULT_PATH_BUDGET,
    candidates: tuple[TwoColouring, ...] = (),
    local_steps: int = 300,
) -> ArrowVerdict:
    """Try to refute the arrow with constructions and local search.

    Returns ``FAILS`` with a verified colouring, or ``UNKNOWN``; never ``HOLDS``.
    ``candidates`` are extra colourings (e.g. from a denser coupled sample,
    restricted to this graph) checked first.
    """
    t0 = time.perf_counter()
    for col in candidates:
        if verify_avoiding(col, r, n, "exact", budget)[0]:
            return ArrowVerdict(ArrowKind.FAILS, col, "candidate", 0, time.perf_counter() - t0)
    t = graph.num_vertices - r * n if t_hint is None else t_hint
    attempts = [lambda: strategy_hitting_set(graph, r, n, "exact", budget)]
    if t >= 0:
        attempts.append(lambda: strategy_boundary(graph, r, n, t, "exact", budget))
        attempts.append(lambda: strategy_pinned_cliques(graph, r, n, t, "exact", budget))
    for attempt in attempts:
        try:
            res = attempt()
        except WrongVertexCount:
            continue
        if res.success:
            return ArrowVerdict(ArrowKind.FAILS, res.colouring, res.strategy, 0, time.perf_counter() - t0)
    col = local_search(graph, r, n, seed=seed, steps=local_steps)
    if col is not None:
        return ArrowVerdict(ArrowKind.FAILS, col, "local", 0, time.perf_counter() - t0)
    return ArrowVerdict(ArrowKind.UNKNOWN, None, "no avoiding colouring found", 0, time.perf_counter() - t0)
