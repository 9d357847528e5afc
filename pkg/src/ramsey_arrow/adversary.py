"""Explicit colourings avoiding a red P_n and a blue K_{r+1}, and the cycle-based classifier.

Each strategy builds a colouring deterministically and then has it checked by
the detectors; a result counts as avoiding only after that check.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .detectors import (
    DEFAULT_PATH_BUDGET,
    Outcome,
    SearchVerdict,
    enumerate_cliques,
    find_clique,
    find_path_exact,
    find_path_posa,
    format_certificate,
    is_cycle,
    rotation_extension,
)
from .graph import Graph, TwoColouring, iter_bits, to_mask

ALPHA = 2**-4
GAMMA = 2**-10


def default_c_const(r: int) -> float:
    return 2**8 * r**2


class WrongVertexCount(ValueError):
    pass


@dataclass
class AdversaryResult:
    strategy: str
    colouring: TwoColouring | None
    reason: str | None = None
    verification: dict[str, SearchVerdict] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    heuristic: bool = False

    @property
    def success(self) -> bool:
        return self.colouring is not None

    def checks(self) -> list[dict]:
        """One record per verification check, for the JSON-lines report."""
        out = []
        for name, verdict in self.verification.items():
            out.append(
                {
                    "name": name,
                    "pass": not verdict.found,
                    "verdict": verdict.kind.value,
                    "mode": verdict.mode,
                    "witness": format_certificate(verdict.witness) if verdict.witness is not None else None,
                }
            )
        return out


def verify_avoiding(
    colouring: TwoColouring, r: int, n: int, verify: str = "exact", budget: int = DEFAULT_PATH_BUDGET
) -> tuple[bool, dict[str, SearchVerdict]]:
    """Check for a red path with n edges and a blue K_{r+1}.

    In ``exact`` mode the colouring passes only if both searches refute.
    In ``heuristic`` mode the red-path side uses rotation-extension, so a pass
    is not a proof.
    """
    if verify == "exact":
        path = find_path_exact(colouring.red_subgraph(), n, budget)
        path_ok = path.refuted
    elif verify == "heuristic":
        path = find_path_posa(colouring.red_subgraph(), n)
        path_ok = not path.found
    else:
        raise ValueError(f"unknown verification mode {verify!r}")
    clique = find_clique(colouring.blue_subgraph(), r + 1)
    return path_ok and clique.refuted, {"no_red_path": path, "no_blue_clique": clique}


def _finish(strategy, colouring, r, n, verify, budget, metadata) -> AdversaryResult:
    ok, checks = verify_avoiding(colouring, r, n, verify, budget)
    if ok:
        return AdversaryResult(strategy, colouring, None, checks, metadata, heuristic=verify != "exact")
    if checks["no_red_path"].found:
        reason = "red path detected"
    elif checks["no_blue_clique"].found:
        reason = "blue clique detected"
    else:
        reason = "verification inconclusive"
    return AdversaryResult(strategy, None, reason, checks, metadata)


def greedy_hitting_set(graph: Graph, copies: list[tuple[int, ...]]) -> list[tuple[int, int]]:
    """Edges meeting every copy; picks the edge in most uncovered copies, ties to the smallest edge."""
    by_edge: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, clique in enumerate(copies):
        for i, u in enumerate(clique):
            for v in clique[i + 1:]:
                by_edge[(u, v)].append(idx)
    count = {e: len(c) for e, c in by_edge.items()}
    covered = [False] * len(copies)
    remaining = len(copies)
    chosen = []
    while remaining:
        edge = min(count, key=lambda e: (-count[e], e))
        chosen.append(edge)
        for idx in by_edge[edge]:
            if covered[idx]:
                continue
            covered[idx] = True
            remaining -= 1
            clique = copies[idx]
            for i, u in enumerate(clique):
                for v in clique[i + 1:]:
                    count[(u, v)] -= 1
        del count[edge]
    return sorted(chosen)


def strategy_hitting_set(
    graph: Graph, r: int, n: int, verify: str = "exact", budget: int = DEFAULT_PATH_BUDGET
) -> AdversaryResult:
    """Colour a hitting set of the K_{r+1} copies red and everything else blue."""
    copies = enumerate_cliques(graph, r + 1)
    red = greedy_hitting_set(graph, copies)
    colouring = TwoColouring.from_red_edges(graph, red)
    meta = {"copies": len(copies), "red_edges": len(red)}
    return _finish("hitting", colouring, r, n, verify, budget, meta)


def _fill_parts(N: int, t: int, n: int, r: int, forced: int) -> list[list[int]]:
    """A_0 = first t vertices, A_1 contains ``forced`` and is topped up lexicographically."""
    a0 = list(range(t))
    rest = [v for v in range(t, N) if not forced >> v & 1]
    a1 = sorted(list(iter_bits(forced)) + rest[: n - forced.bit_count()])
    rest = rest[n - forced.bit_count():]
    parts = [a0, a1]
    for _ in range(r - 1):
        parts.append(rest[:n])
        rest = rest[n:]
    if rest:
        parts[-1].extend(rest)
    return parts


def _check_order(graph: Graph, r: int, n: int, t: int) -> None:
    if graph.num_vertices != r * n + t:
        raise WrongVertexCount(f"need r n + t = {r * n + t} vertices, graph has {graph.num_vertices}")


def boundary_set(graph: Graph, t: int) -> int:
    """Outside neighbourhood of the first t vertices, as a bitmask."""
    a0 = (1 << t) - 1
    return graph.neighbourhood(a0) & ~a0


def strategy_boundary(
    graph: Graph, r: int, n: int, t: int, verify: str = "exact", budget: int = DEFAULT_PATH_BUDGET
) -> AdversaryResult:
    """Parts A_0 (first t vertices), A_1 ⊇ N(A_0), A_2..A_r; red inside parts, blue across."""
    _check_order(graph, r, n, t)
    x = boundary_set(graph, t)
    meta = {"boundary": x.bit_count()}
    if x.bit_count() > n:
        return AdversaryResult("boundary", None, f"boundary too large: {x.bit_count()}", metadata=meta)
    parts = _fill_parts(graph.num_vertices, t, n, r, x)
    meta["parts"] = parts
    return _finish("boundary", TwoColouring.from_parts(graph, parts), r, n, verify, budget, meta)


def pinned_cliques(graph: Graph, r: int, t: int) -> list[tuple[int, ...]]:
    """Copies of K_{r+1} with exactly one vertex among the first t."""
    a0 = (1 << t) - 1
    out = []
    for v in range(min(t, graph.num_vertices)):
        for rest in enumerate_cliques(graph, r, within=graph.adj[v] & ~a0):
            out.append((v,) + rest)
    return out


def strategy_pinned_cliques(
    graph: Graph, r: int, n: int, t: int, verify: str = "exact", budget: int = DEFAULT_PATH_BUDGET
) -> AdversaryResult:
    """Like the boundary strategy, but A_1 only has to hold the cliques pinned at A_0."""
    _check_order(graph, r, n, t)
    copies = pinned_cliques(graph, r, t)
    w = 0
    for c in copies:
        w |= to_mask(c[1:])
    meta = {"pinned": len(copies), "pinned_span": w.bit_count()}
    if w.bit_count() > n:
        return AdversaryResult("pinned", None, f"pinned cliques span too many vertices: {w.bit_count()}", metadata=meta)
    parts = _fill_parts(graph.num_vertices, t, n, r, w)
    meta["parts"] = parts
    return _finish("pinned", TwoColouring.from_parts(graph, parts), r, n, verify, budget, meta)


STRATEGIES = {
    "hitting": lambda g, r, n, t, verify, budget: strategy_hitting_set(g, r, n, verify, budget),
    "boundary": strategy_boundary,
    "pinned": strategy_pinned_cliques,
}


# --- structure from red cycles ---------------------------------------------


@dataclass
class StructuralPartition:
    parts: list[list[int]]
    alpha: float
    gamma: float
    p: float
    n: int
    conflicts: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)


def _disjoint_masks(sets) -> list[int]:
    masks = [to_mask(s) for s in sets]
    seen = 0
    for m in masks:
        if seen & m:
            raise ValueError("vertex sets must be pairwise disjoint")
        seen |= m
    return masks


def classify_by_cycles(
    colouring: TwoColouring, cycles, alpha: float = ALPHA, gamma: float = GAMMA, p: float = 1.0, n: int = 1
) -> StructuralPartition:
    """Assign v to A_i when ``|N(v) ∩ B_i| >= alpha p n`` and ``|N_blue(v) ∩ B_i| <= gamma p n``.

    Vertices qualifying for no index go to A_0; several qualifying indices are
    a conflict, resolved to the lowest index and reported.
    """
    masks = _disjoint_masks(cycles)
    base, red = colouring.base.adj, colouring.red_adj
    lo, hi = alpha * p * n, gamma * p * n
    parts: list[list[int]] = [[] for _ in range(len(masks) + 1)]
    conflicts = []
    for v in range(colouring.base.num_vertices):
        q = tuple(
            i + 1
            for i, m in enumerate(masks)
            if (base[v] & m).bit_count() >= lo and (base[v] & ~red[v] & m).bit_count() <= hi
        )
        if not q:
            parts[0].append(v)
            continue
        parts[q[0]].append(v)
        if len(q) > 1:
            conflicts.append((v, q))
    return StructuralPartition(parts, alpha, gamma, p, n, conflicts)


@dataclass
class StructuralReport:
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_structural_partition(colouring: TwoColouring, parts, c_const: float, p: float, n: int) -> StructuralReport:
    """``|A_0| <= C/p``, ``|A_i| <= n`` and only blue edges between A_i, A_j for i, j >= 1."""
    violations = []
    a0 = list(parts[0])
    if p > 0 and len(a0) > c_const / p:
        violations.append({"kind": "A0 too large", "size": len(a0), "bound": c_const / p})
    masks = [to_mask(part) for part in parts]
    for i in range(1, len(parts)):
        if len(parts[i]) > n:
            violations.append({"kind": f"A{i} too large", "size": len(parts[i]), "bound": n})
    red = colouring.red_adj
    for i in range(1, len(parts)):
        for j in range(i + 1, len(parts)):
            for u in iter_bits(masks[i]):
                hits = red[u] & masks[j]
                if hits:
                    v = (hits & -hits).bit_length() - 1
                    violations.append({"kind": "red cross edge", "edge": (min(u, v), max(u, v)), "parts": (i, j)})
    return StructuralReport(violations)


@dataclass
class CycleSearch:
    cycles: list[tuple[int, ...]]
    complete: bool


def _best_closure(adj, paths) -> tuple[int, ...] | None:
    best: tuple[int, ...] | None = None
    for path in paths:
        pos = {x: i for i, x in enumerate(path)}
        end, start = path[-1], path[0]
        for u in iter_bits(adj[end]):
            i = pos.get(u)
            if i is not None and len(path) - i >= 3 and (best is None or len(path) - i > len(best)):
                best = tuple(path[i:])
        for u in iter_bits(adj[start]):
            j = pos.get(u)
            if j is not None and j + 1 >= 3 and (best is None or j + 1 > len(best)):
                best = tuple(path[: j + 1])
    return best


def find_long_red_cycles(
    colouring: TwoColouring, r: int, min_length: int, seed: int = 0, restarts: int = 32
) -> CycleSearch:
    """Up to r vertex-disjoint red cycles of at least ``min_length`` edges each.

    Rotation-extension on the red graph, closing paths into cycles where an
    endpoint sees an earlier path vertex. Found cycles are removed before the
    next search. Incomplete: a failure does not mean the cycles are absent.
    """
    red = colouring.red_subgraph()
    rng = np.random.default_rng(seed)
    remaining = red.vertex_mask
    cycles: list[tuple[int, ...]] = []
    for _ in range(r):
        best = None
        pool = [v for v in iter_bits(remaining) if red.adj[v] & remaining]
        if not pool:
            break
        for s in rng.permutation(pool)[:restarts].tolist():
            run = rotation_extension(red, s, rng, within=remaining)
            cand = _best_closure(red.adj, run.explored + [run.path])
            if cand is not None and (best is None or len(cand) > len(best)):
                best = cand
        if best is None or len(best) < min_length or not is_cycle(red, best):
            break
        cycles.append(best)
        remaining &= ~to_mask(best)
    return CycleSearch(cycles, len(cycles) == r)


__all__ = [
    "ALPHA",
    "GAMMA",
    "AdversaryResult",
    "CycleSearch",
    "Outcome",
    "STRATEGIES",
    "StructuralPartition",
    "StructuralReport",
    "WrongVertexCount",
    "boundary_set",
    "classify_by_cycles",
    "default_c_const",
    "find_long_red_cycles",
    "greedy_hitting_set",
    "pinned_cliques",
    "strategy_boundary",
    "strategy_hitting_set",
    "strategy_pinned_cliques",
    "verify_avoiding",
    "verify_structural_partition",
]
