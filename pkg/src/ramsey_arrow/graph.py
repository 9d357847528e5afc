"""Graphs, red/blue edge colourings, the seeded G(N, p) sampler and file IO.

Vertices are ``0..N-1``. Adjacency is kept as one Python ``int`` bitmask per
vertex, so ``|N(v) & S|`` is a single AND plus ``bit_count``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

RED = "R"
BLUE = "B"

# rows per block when drawing pair uniforms for large N
_ROW_BLOCK = 256


class GraphFormatError(ValueError):
    """Malformed graph or colouring file."""


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph stored as neighbour bitmasks."""

    num_vertices: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.num_vertices:
            raise ValueError("adjacency length does not match vertex count")

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * num_vertices
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge {u} {v} out of range for N={num_vertices}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(num_vertices, tuple(adj))

    @property
    def vertex_mask(self) -> int:
        return (1 << self.num_vertices) - 1

    @property
    def num_edges(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        out = []
        for u, a in enumerate(self.adj):
            for v in iter_bits(a >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbours(self, v: int) -> list[int]:
        return list(iter_bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def count_into(self, v: int, mask: int) -> int:
        """``|N(v) & S|`` for a vertex set given as a bitmask."""
        return (self.adj[v] & mask).bit_count()

    def neighbourhood(self, mask: int) -> int:
        """Union of the neighbourhoods of the vertices in ``mask``."""
        out = 0
        for v in iter_bits(mask):
            out |= self.adj[v]
        return out

    def restrict(self, mask: int) -> "Graph":
        """Same vertex labels, keeping only edges inside ``mask``."""
        return Graph(
            self.num_vertices,
            tuple(a & mask if mask >> v & 1 else 0 for v, a in enumerate(self.adj)),
        )

    def components(self, mask: int | None = None) -> list[int]:
        """Connected components (as bitmasks) of the subgraph induced on ``mask``."""
        remaining = self.vertex_mask if mask is None else mask
        comps = []
        while remaining:
            seed = remaining & -remaining
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for v in iter_bits(frontier):
                    nxt |= self.adj[v]
                nxt &= remaining & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            remaining &= ~comp
        return comps

    def edges_within(self, mask: int) -> int:
        return sum((self.adj[v] & mask).bit_count() for v in iter_bits(mask)) // 2

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.num_vertices == other.num_vertices and all(
            a & ~b == 0 for a, b in zip(self.adj, other.adj)
        )


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(length: int) -> Graph:
    """The path with ``length`` edges (``length + 1`` vertices)."""
    return Graph.from_edges(length + 1, [(i, i + 1) for i in range(length)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges())
        offset += g.num_vertices
    return Graph.from_edges(offset, edges)


def complete_multipartite(*sizes: int) -> Graph:
    part = []
    for i, s in enumerate(sizes):
        part.extend([i] * s)
    n = len(part)
    return Graph.from_edges(
        n, [(u, v) for u in range(n) for v in range(u + 1, n) if part[u] != part[v]]
    )


class TwoColouring:
    """Red/blue colouring of every edge of ``base``.

    Only the red adjacency is stored; blue is the complement inside ``base``.
    """

    __slots__ = ("base", "red_adj")

    def __init__(self, base: Graph, red_adj: Sequence[int]):
        if len(red_adj) != base.num_vertices:
            raise ValueError("red adjacency length does not match base graph")
        for v, (r, a) in enumerate(zip(red_adj, base.adj)):
            if r & ~a:
                raise ValueError(f"red edge at vertex {v} is not an edge of the base graph")
        self.base = base
        self.red_adj = tuple(red_adj)

    @classmethod
    def from_red_edges(cls, base: Graph, red_edges: Iterable[tuple[int, int]]) -> "TwoColouring":
        red = [0] * base.num_vertices
        for u, v in red_edges:
            if not base.has_edge(u, v):
                raise ValueError(f"edge {u} {v} not in graph")
            red[u] |= 1 << v
            red[v] |= 1 << u
        return cls(base, red)

    @classmethod
    def all_blue(cls, base: Graph) -> "TwoColouring":
        return cls(base, (0,) * base.num_vertices)

    @classmethod
    def all_red(cls, base: Graph) -> "TwoColouring":
        return cls(base, base.adj)

    @classmethod
    def from_parts(cls, base: Graph, parts: Sequence[Iterable[int]]) -> "TwoColouring":
        """Edges inside a part red, edges between parts blue."""
        red = [0] * base.num_vertices
        for part in parts:
            mask = to_mask(part)
            for v in iter_bits(mask):
                red[v] = base.adj[v] & mask
        return cls(base, red)

    @classmethod
    def random(cls, base: Graph, red_probability: float, rng: np.random.Generator) -> "TwoColouring":
        edges = base.edges()
        draws = rng.random(len(edges))
        return cls.from_red_edges(base, [e for e, x in zip(edges, draws) if x < red_probability])

    def colour(self, u: int, v: int) -> str:
        if not self.base.has_edge(u, v):
            raise KeyError(f"edge {u} {v} not in graph")
        return RED if self.red_adj[u] >> v & 1 else BLUE

    def red_subgraph(self) -> Graph:
        return Graph(self.base.num_vertices, self.red_adj)

    def blue_subgraph(self) -> Graph:
        return Graph(
            self.base.num_vertices,
            tuple(a & ~r for a, r in zip(self.base.adj, self.red_adj)),
        )

    def red_edges(self) -> list[tuple[int, int]]:
        return self.red_subgraph().edges()

    def restrict_to(self, sub: Graph) -> "TwoColouring":
        """The colouring induced on a spanning subgraph of ``base``."""
        if not sub.is_subgraph_of(self.base):
            raise ValueError("not a subgraph of the coloured graph")
        return TwoColouring(sub, tuple(r & a for r, a in zip(self.red_adj, sub.adj)))

    def __eq__(self, other):
        if not isinstance(other, TwoColouring):
            return NotImplemented
        return self.base == other.base and self.red_adj == other.red_adj

    def __hash__(self):
        return hash((self.base, self.red_adj))

    def __repr__(self):
        return f"TwoColouring(N={self.base.num_vertices}, red={len(self.red_edges())}, edges={self.base.num_edges})"


# --- sampling -------------------------------------------------------------


@dataclass(frozen=True)
class Seed:
    """Reproducible sampling seed: a master seed plus an independent stream id."""

    master_seed: int
    stream_id: int = 0

    def _sequence(self) -> np.random.SeedSequence:
        mask = (1 << 64) - 1
        return np.random.SeedSequence([self.master_seed & mask, self.stream_id & mask])

    def key(self) -> int:
        """The derived 64-bit key driving the counter-based generator."""
        return int(self._sequence().generate_state(1, dtype=np.uint64)[0])

    def generator(self) -> np.random.Generator:
        """Counter-based (Philox) generator; output ``i`` depends only on (seed, i)."""
        return np.random.Generator(np.random.Philox(key=self.key()))

    def child(self, label: int) -> np.random.Generator:
        """An auxiliary stream (colourings, restarts) independent of the pair uniforms."""
        return np.random.Generator(np.random.Philox(key=self.key(), counter=[0, 0, 0, label + 1]))


def pair_index(u: int, v: int, n: int) -> int:
    """Position of pair ``u < v`` in lexicographic order of all C(n, 2) pairs."""
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_uniforms(n: int, seed: Seed) -> np.ndarray:
    """One U[0,1) variate per unordered pair, lexicographic pair order."""
    return seed.generator().random(math.comb(n, 2))


def _iter_uniform_rows(n: int, seed: Seed) -> Iterator[tuple[int, np.ndarray]]:
    gen = seed.generator()
    for u in range(n - 1):
        yield u, gen.random(n - 1 - u)


def _graph_from_rows(n: int, rows: Iterable[tuple[int, np.ndarray]]) -> Graph:
    if n <= 2048:
        adj = [0] * n
        for u, hit in rows:
            for j in np.flatnonzero(hit).tolist():
                v = u + 1 + j
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        return Graph(n, tuple(adj))
    # large N: dense bit matrix, then pack each row into an int
    mat = np.zeros((n, n), dtype=bool)
    for u, hit in rows:
        mat[u, u + 1:] = hit
    mat |= mat.T
    packed = np.packbits(mat, axis=1, bitorder="little")
    del mat
    return Graph(n, tuple(int.from_bytes(row.tobytes(), "little") for row in packed))


def sample_gnp(n_vertices: int, p: float, seed: Seed) -> Graph:
    """Sample G(N, p): pair ``{u, v}`` is an edge iff its uniform is below ``p``.

    Because each pair's uniform is fixed by the seed, ``p1 <= p2`` gives
    ``sample_gnp(N, p1, s) ⊆ sample_gnp(N, p2, s)``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n_vertices < 0:
        raise ValueError("n_vertices must be non-negative")
    return _graph_from_rows(n_vertices, ((u, row < p) for u, row in _iter_uniform_rows(n_vertices, seed)))


def sample_gnp_coupled(n_vertices: int, ps: Sequence[float], seed: Seed) -> list[Graph]:
    """Graphs for every ``p`` in ``ps`` built from one shared set of pair uniforms."""
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
    rows = list(_iter_uniform_rows(n_vertices, seed))
    return [_graph_from_rows(n_vertices, ((u, row < p) for u, row in rows)) for p in ps]


# --- file IO ---------------------------------------------------------------


def format_graph(graph: Graph) -> str:
    lines = [f"{graph.num_vertices} {graph.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty file, line 1")
    head = lines[0].split()
    if len(head) != 2 or not all(tok.isdigit() for tok in head):
        raise GraphFormatError("expected header 'N M', line 1")
    n, m = int(head[0]), int(head[1])
    adj = [0] * n
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        toks = line.split()
        if len(toks) != 2 or not all(tok.isdigit() for tok in toks):
            raise GraphFormatError(f"malformed edge line, line {lineno}")
        u, v = int(toks[0]), int(toks[1])
        if u >= n or v >= n:
            raise GraphFormatError(f"vertex index out of range, line {lineno}")
        if u == v:
            raise GraphFormatError(f"self-loop, line {lineno}")
        if adj[u] >> v & 1:
            raise GraphFormatError(f"duplicate edge, line {lineno}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        seen += 1
    if seen != m:
        raise GraphFormatError(f"header declares {m} edges but file lists {seen}, line 1")
    return Graph(n, tuple(adj))


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(graph: Graph, path) -> None:
    Path(path).write_text(format_graph(graph))


def format_colouring(colouring: TwoColouring) -> str:
    lines = [f"{u} {v} {colouring.colour(u, v)}" for u, v in colouring.base.edges()]
    return "".join(line + "\n" for line in lines)


def parse_colouring(text: str, graph: Graph) -> TwoColouring:
    red = [0] * graph.num_vertices
    coloured = [0] * graph.num_vertices
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        toks = line.split()
        if len(toks) != 3 or not toks[0].isdigit() or not toks[1].isdigit() or toks[2] not in (RED, BLUE):
            raise GraphFormatError(f"malformed colouring line, line {lineno}")
        u, v = int(toks[0]), int(toks[1])
        if u >= graph.num_vertices or v >= graph.num_vertices or u == v or not graph.has_edge(u, v):
            raise GraphFormatError(f"edge {u} {v} not in graph, line {lineno}")
        if coloured[u] >> v & 1:
            raise GraphFormatError(f"edge {u} {v} coloured twice, line {lineno}")
        coloured[u] |= 1 << v
        coloured[v] |= 1 << u
        if toks[2] == RED:
            red[u] |= 1 << v
            red[v] |= 1 << u
    for u, a in enumerate(graph.adj):
        missing = a & ~coloured[u] & ~((1 << (u + 1)) - 1)
        if missing:
            raise GraphFormatError(f"edge {u} {lowest_bit(missing)} uncoloured")
    return TwoColouring(graph, red)


def read_colouring(path, graph: Graph) -> TwoColouring:
    return parse_colouring(Path(path).read_text(), graph)


def write_colouring(colouring: TwoColouring, path) -> None:
    Path(path).write_text(format_colouring(colouring))
