"""Witness detection: cliques, long paths, transversal cliques, expansion.

Every positive answer carries a certificate that can be re-checked against
the graph. Negative answers say how they were reached: ``REFUTED`` only comes
from a complete search, ``NOT_FOUND`` from a heuristic or an exhausted budget.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, iter_bits, to_mask

DEFAULT_PATH_BUDGET = 2_000_000
POSA_RESTARTS = 32
EXHAUSTIVE_EXPANSION_LIMIT = 20


# --- witnesses -------------------------------------------------------------


@dataclass(frozen=True)
class RedPath:
    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class BlueClique:
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class SeparatedSets:
    a: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """Labelled vertex sets ``A{first_index}, A{first_index+1}, ...``."""

    parts: tuple[tuple[int, ...], ...]
    first_index: int = 0


def is_path(graph: Graph, vertices: Sequence[int]) -> bool:
    if len(set(vertices)) != len(vertices):
        return False
    return all(graph.has_edge(u, v) for u, v in zip(vertices, vertices[1:]))


def is_clique(graph: Graph, vertices: Sequence[int]) -> bool:
    if len(set(vertices)) != len(vertices):
        return False
    return all(graph.has_edge(u, v) for u, v in combinations(vertices, 2))


def is_cycle(graph: Graph, vertices: Sequence[int]) -> bool:
    return len(vertices) >= 3 and is_path(graph, vertices) and graph.has_edge(vertices[-1], vertices[0])


def external_neighbourhood(graph: Graph, mask: int) -> int:
    return graph.neighbourhood(mask) & ~mask


def _ints(vs: Iterable[int]) -> str:
    return " ".join(str(v) for v in vs)


def format_certificate(witness) -> str:
    if isinstance(witness, RedPath):
        return f"PATH {_ints(witness.vertices)}".rstrip()
    if isinstance(witness, BlueClique):
        return f"CLIQUE {_ints(witness.vertices)}".rstrip()
    if isinstance(witness, SeparatedSets):
        return f"SETS A: {_ints(witness.a)} B: {_ints(witness.b)}".replace("  ", " ").rstrip()
    if isinstance(witness, Partition):
        chunks = [f"A{witness.first_index + i}: {_ints(part)}".rstrip() for i, part in enumerate(witness.parts)]
        return "SETS " + " ".join(chunks)
    raise TypeError(f"no text form for {type(witness).__name__}")


def parse_certificate(text: str):
    toks = text.split()
    if not toks:
        raise ValueError("empty certificate")
    head, rest = toks[0], toks[1:]
    if head == "PATH":
        return RedPath(tuple(int(t) for t in rest))
    if head == "CLIQUE":
        return BlueClique(tuple(int(t) for t in rest))
    if head != "SETS":
        raise ValueError(f"unknown certificate kind {head!r}")
    labels: list[str] = []
    sets: list[list[int]] = []
    for tok in rest:
        if tok.endswith(":"):
            labels.append(tok[:-1])
            sets.append([])
        elif sets:
            sets[-1].append(int(tok))
        else:
            raise ValueError("vertex before first set label")
    if labels == ["A", "B"]:
        return SeparatedSets(tuple(sets[0]), tuple(sets[1]))
    first = int(labels[0][1:]) if labels else 0
    return Partition(tuple(tuple(s) for s in sets), first)


# --- verdicts --------------------------------------------------------------


class Outcome(enum.Enum):
    FOUND = "FoundWithCertificate"
    REFUTED = "ExhaustivelyRefuted"
    NOT_FOUND = "HeuristicallyNotFound"


@dataclass(frozen=True)
class SearchVerdict:
    kind: Outcome
    witness: object = None
    nodes_explored: int = 0
    elapsed: float = 0.0
    mode: str = "exact"

    @property
    def found(self) -> bool:
        return self.kind is Outcome.FOUND

    @property
    def refuted(self) -> bool:
        return self.kind is Outcome.REFUTED


# --- cliques ---------------------------------------------------------------


def find_clique(graph: Graph, k: int) -> SearchVerdict:
    """Decide whether ``graph`` has a k-clique (Bron-Kerbosch with pivoting).

    The pivot maximises ``|P & N(u)|`` over ``P | X``; ties go to the lowest
    vertex index.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    t0 = time.perf_counter()
    adj = graph.adj
    nodes = 0

    def expand(chosen: list[int], cand: int, excl: int) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if len(chosen) == k:
            return chosen
        if len(chosen) + cand.bit_count() < k:
            return None
        pivot, best = -1, -1
        for u in iter_bits(cand | excl):
            c = (cand & adj[u]).bit_count()
            if c > best:
                pivot, best = u, c
        for v in iter_bits(cand & ~adj[pivot]):
            res = expand(chosen + [v], cand & adj[v], excl & adj[v])
            if res is not None:
                return res
            cand &= ~(1 << v)
            excl |= 1 << v
            if len(chosen) + cand.bit_count() < k:
                return None
        return None

    res = expand([], graph.vertex_mask, 0) if graph.num_vertices >= k else None
    elapsed = time.perf_counter() - t0
    if res is None:
        return SearchVerdict(Outcome.REFUTED, None, nodes, elapsed)
    return SearchVerdict(Outcome.FOUND, BlueClique(tuple(sorted(res))), nodes, elapsed)


def enumerate_cliques(graph: Graph, size: int, within: int | None = None) -> list[tuple[int, ...]]:
    """All cliques of exactly ``size`` vertices, each as a sorted tuple, in lexicographic order."""
    adj = graph.adj
    out: list[tuple[int, ...]] = []
    start = graph.vertex_mask if within is None else within

    def grow(chosen: tuple[int, ...], cand: int) -> None:
        if len(chosen) == size:
            out.append(chosen)
            return
        for v in iter_bits(cand):
            # candidates only above v keeps each clique once
            grow(chosen + (v,), cand & adj[v] & ~((1 << (v + 1)) - 1))

    if size >= 1:
        grow((), start)
    return out


def find_transversal_clique(graph: Graph, sets: Sequence[Iterable[int]]) -> SearchVerdict:
    """A clique taking exactly one vertex from each of the disjoint sets."""
    masks = [to_mask(s) for s in sets]
    if len(masks) < 2:
        raise ValueError("need at least two sets")
    seen = 0
    for m in masks:
        if seen & m:
            raise ValueError("sets must be pairwise disjoint")
        seen |= m
    t0 = time.perf_counter()
    adj = graph.adj
    nodes = 0

    def search(chosen: list[int], remaining: list[int]) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if not remaining:
            return chosen
        i = min(range(len(remaining)), key=lambda j: remaining[j].bit_count())
        pool = remaining[i]
        rest = remaining[:i] + remaining[i + 1:]
        for v in iter_bits(pool):
            narrowed = [m & adj[v] for m in rest]
            if all(narrowed):
                res = search(chosen + [v], narrowed)
                if res is not None:
                    return res
        return None

    res = search([], masks) if all(masks) else None
    elapsed = time.perf_counter() - t0
    if res is None:
        return SearchVerdict(Outcome.REFUTED, None, nodes, elapsed)
    return SearchVerdict(Outcome.FOUND, BlueClique(tuple(sorted(res))), nodes, elapsed)


# --- long paths ------------------------------------------------------------


def _reach(adj: Sequence[int], frontier: int, allowed: int) -> int:
    seen = frontier
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= adj[v]
        frontier = nxt & allowed & ~seen
        seen |= frontier
    return seen


def find_path_exact(graph: Graph, length: int, budget: int = DEFAULT_PATH_BUDGET) -> SearchVerdict:
    """Complete DFS for a path with exactly ``length`` edges.

    Components with too few vertices or edges are skipped outright; inside a
    component a branch is cut when the vertices still reachable from the
    current endpoint cannot complete the path.
    """
    if length < 1:
        raise ValueError("path length must be at least 1")
    t0 = time.perf_counter()
    adj = graph.adj
    need = length + 1
    nodes = 0
    for comp in graph.components():
        if comp.bit_count() < need or graph.edges_within(comp) < length:
            continue
        for s in iter_bits(comp):
            path = [s]
            visited = 1 << s
            cands = [adj[s] & comp]
            while cands:
                c = cands[-1]
                if not c:
                    cands.pop()
                    visited &= ~(1 << path.pop())
                    continue
                bit = c & -c
                cands[-1] = c ^ bit
                w = bit.bit_length() - 1
                nodes += 1
                if nodes > budget:
                    return SearchVerdict(Outcome.NOT_FOUND, None, nodes, time.perf_counter() - t0, "budget")
                path.append(w)
                visited |= bit
                if len(path) == need:
                    return SearchVerdict(Outcome.FOUND, RedPath(tuple(path)), nodes, time.perf_counter() - t0)
                nxt = adj[w] & comp & ~visited
                if nxt and _reach(adj, nxt, comp & ~visited).bit_count() < need - len(path):
                    nxt = 0
                cands.append(nxt)
    return SearchVerdict(Outcome.REFUTED, None, nodes, time.perf_counter() - t0)


@dataclass
class RotationRun:
    """Outcome of one rotation-extension run from a single start vertex."""

    path: list[int]
    endpoints: set[int] = field(default_factory=set)
    explored: list[list[int]] = field(default_factory=list)
    rotations: int = 0


def rotation_extension(
    graph: Graph,
    start: int,
    rng: np.random.Generator,
    target_length: int | None = None,
    within: int | None = None,
) -> RotationRun:
    """Grow a path from ``start`` by extension and Pósa rotation until it stalls.

    A rotation with endpoint ``v`` and edge ``v ~ path[i]`` reverses the tail
    after ``i``, making ``path[i+1]`` the new endpoint. A rotation round keeps
    ``path[0]`` fixed and performs at most N rotations; the run stalls when
    rounds from both ends reach no endpoint with a neighbour off the path.
    """
    adj = graph.adj
    allowed = graph.vertex_mask if within is None else within
    n = graph.num_vertices
    target = n if target_length is None else target_length + 1
    path = [start]
    on_path = 1 << start
    endpoints: set[int] = {start}
    explored: list[list[int]] = [path]
    rotations = 0
    flipped = False
    while len(path) < target:
        ext = adj[path[-1]] & allowed & ~on_path
        if ext:
            choices = list(iter_bits(ext))
            w = choices[int(rng.integers(len(choices)))]
            path.append(w)
            on_path |= 1 << w
            flipped = False
            continue
        seen = {path[-1]}
        queue = [path]
        head = 0
        nxt_path = None
        while head < len(queue) and len(seen) <= n and nxt_path is None:
            cur = queue[head]
            head += 1
            pos = {x: i for i, x in enumerate(cur)}
            for u in iter_bits(adj[cur[-1]] & on_path):
                i = pos[u]
                if i >= len(cur) - 2:
                    continue
                new_end = cur[i + 1]
                if new_end in seen:
                    continue
                seen.add(new_end)
                rotations += 1
                rotated = cur[: i + 1] + cur[i + 1:][::-1]
                queue.append(rotated)
                if adj[new_end] & allowed & ~on_path:
                    nxt_path = rotated
                    break
        endpoints = seen
        explored = queue
        if nxt_path is not None:
            path = nxt_path
            flipped = False
        elif flipped:
            break
        else:
            path = path[::-1]
            flipped = True
    return RotationRun(path, endpoints, explored, rotations)


def find_path_posa(graph: Graph, length: int, seed: int = 0, restarts: int = POSA_RESTARTS) -> SearchVerdict:
    """Heuristic search for a path with ``length`` edges by rotation-extension.

    Never refutes: failure is reported as ``NOT_FOUND``.
    """
    if length < 1:
        raise ValueError("path length must be at least 1")
    t0 = time.perf_counter()
    n = graph.num_vertices
    rng = np.random.default_rng(seed)
    nodes = 0
    if n >= length + 1:
        starts = rng.permutation(n)[:restarts].tolist()
        for s in starts:
            run = rotation_extension(graph, s, rng, target_length=length)
            nodes += len(run.path) + run.rotations
            if len(run.path) >= length + 1:
                cert = RedPath(tuple(run.path[: length + 1]))
                return SearchVerdict(Outcome.FOUND, cert, nodes, time.perf_counter() - t0, "rotation")
    return SearchVerdict(Outcome.NOT_FOUND, None, nodes, time.perf_counter() - t0, "rotation")


# --- expansion (Pósa) ------------------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    parameter_k: int
    violating_set: frozenset[int] | None = None
    certified: bool = True

    @property
    def expander(self) -> bool:
        return self.violating_set is None


def _violates(graph: Graph, mask: int) -> bool:
    return external_neighbourhood(graph, mask).bit_count() < 2 * mask.bit_count()


def check_expansion(graph: Graph, k: int, mode: str = "exhaustive", seed: int = 0) -> ExpansionReport:
    """Check ``|N(X)| >= 2|X|`` for all nonempty ``|X| <= k``, ``N(X)`` external.

    ``exhaustive`` enumerates every such X (N <= 20 only). ``rotation`` inspects
    endpoint sets of stalled rotation runs: a violating set it returns is real,
    but a clean result is not a proof (``certified=False``).
    """
    n = graph.num_vertices
    if mode == "exhaustive":
        if n > EXHAUSTIVE_EXPANSION_LIMIT:
            raise ValueError(
                f"exhaustive expansion check refused: {n} vertices exceeds the limit of {EXHAUSTIVE_EXPANSION_LIMIT}"
            )
        for size in range(1, min(k, n) + 1):
            for xs in combinations(range(n), size):
                if _violates(graph, to_mask(xs)):
                    return ExpansionReport(k, frozenset(xs))
        return ExpansionReport(k)
    if mode == "rotation":
        rng = np.random.default_rng(seed)
        for s in rng.permutation(n)[:POSA_RESTARTS].tolist():
            run = rotation_extension(graph, s, rng)
            ends = to_mask(run.endpoints)
            if run.endpoints and len(run.endpoints) <= k and _violates(graph, ends):
                return ExpansionReport(k, frozenset(run.endpoints), certified=True)
        return ExpansionReport(k, None, certified=False)
    raise ValueError(f"unknown expansion mode {mode!r}")


@dataclass(frozen=True)
class PosaReport:
    k: int
    expansion: ExpansionReport
    target_length: int
    path: SearchVerdict | None
    message: str

    @property
    def consistent(self) -> bool:
        return not self.expansion.expander or (self.path is not None and self.path.found)


def posa_guarantee_check(graph: Graph, k: int, budget: int = DEFAULT_PATH_BUDGET) -> PosaReport:
    """If every small set expands, a path of ``min(3k-1, N-1)`` edges must exist."""
    expansion = check_expansion(graph, k, "exhaustive")
    target = min(3 * k - 1, graph.num_vertices - 1)
    if not expansion.expander:
        return PosaReport(k, expansion, target, None, "hypothesis fails, no guarantee claimed")
    if target <= 0:
        verdict = SearchVerdict(Outcome.FOUND, RedPath((0,)) if graph.num_vertices else None)
    else:
        verdict = find_path_exact(graph, target, budget)
    msg = "guaranteed path found" if verdict.found else f"guarantee violated: {verdict.kind.value}"
    return PosaReport(k, expansion, target, verdict, msg)


# --- degree statistics -----------------------------------------------------


def low_degree_count(graph: Graph, subset: Iterable[int], threshold: int) -> list[int]:
    """All vertices with at most ``threshold`` neighbours inside ``subset``."""
    mask = to_mask(subset)
    return [v for v in range(graph.num_vertices) if graph.count_into(v, mask) <= threshold]


def low_degree_threshold(p: float, subset_size: int) -> int:
    """``floor(p|U|/8)``, the cut-off used for the low-degree property."""
    return math.floor(p * subset_size / 8)


def neighbourhood_cover(graph: Graph, xs: Iterable[int]) -> int:
    """Size of the union of the neighbourhoods of ``xs``."""
    mask = to_mask(xs)
    if not mask:
        raise ValueError("X must be nonempty")
    return graph.neighbourhood(mask).bit_count()


__all__ = [
    "BlueClique",
    "ExpansionReport",
    "Outcome",
    "Partition",
    "PosaReport",
    "RedPath",
    "RotationRun",
    "SearchVerdict",
    "SeparatedSets",
    "check_expansion",
    "enumerate_cliques",
    "external_neighbourhood",
    "find_clique",
    "find_path_exact",
    "find_path_posa",
    "find_transversal_clique",
    "format_certificate",
    "is_clique",
    "is_cycle",
    "is_path",
    "low_degree_count",
    "low_degree_threshold",
    "neighbourhood_cover",
    "parse_certificate",
    "posa_guarantee_check",
    "rotation_extension",
]
