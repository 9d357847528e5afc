"""Constructive DFS separation and the red-path / blue-partite decomposition."""

from __future__ import annotations

from dataclasses import dataclass

from .detectors import Partition, RedPath, SeparatedSets, is_path
from .graph import Graph, TwoColouring, iter_bits, to_mask


class InfeasibleSizes(ValueError):
    pass


class HypothesisViolated(RuntimeError):
    def __init__(self, deficit: int):
        super().__init__(f"cannot assemble A: {deficit} finished vertices short and no long path met")
        self.deficit = deficit


class WrongVertexCount(ValueError):
    pass


@dataclass(frozen=True)
class LongPath:
    path: tuple[int, ...]

    @property
    def witness(self) -> RedPath:
        return RedPath(self.path)


@dataclass(frozen=True)
class Split:
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def witness(self) -> SeparatedSets:
        return SeparatedSets(self.a, self.b)


def dfs_separate(
    graph: Graph,
    a: int,
    b: int,
    path_bound: int,
    within: int | None = None,
    check_invariant: bool = False,
) -> LongPath | Split:
    """Run DFS keeping vertices unexplored (U), on the stack (S) or finished (F).

    No edge ever joins F and U. The stack is a path, so if it reaches
    ``path_bound`` edges that path is returned. Otherwise, once ``|U| = b``,
    ``A`` is taken from F in finishing order and ``B = U``. If F is still too
    small at that point the DFS keeps popping (U unchanged) until it is not;
    if a push comes first, the search runs to completion looking for a long
    path before giving up with :class:`HypothesisViolated`.
    """
    vertices = graph.vertex_mask if within is None else within
    total = vertices.bit_count()
    if a < 1 or b < 1:
        raise InfeasibleSizes("a and b must be positive")
    if a + b > total:
        raise InfeasibleSizes(f"a + b = {a + b} exceeds the {total} available vertices")
    adj = graph.adj
    unexplored = vertices
    stack: list[int] = []
    finished: list[int] = []
    finished_mask = 0
    deficit = None

    def long_path() -> LongPath | None:
        if len(stack) - 1 >= path_bound:
            return LongPath(tuple(stack[: path_bound + 1]))
        return None

    while unexplored or stack:
        if check_invariant:
            assert all(adj[v] & unexplored == 0 for v in finished), "F-U edge during DFS"
        if deficit is None and unexplored.bit_count() == b and len(finished) >= a:
            return Split(tuple(finished[:a]), tuple(iter_bits(unexplored)))
        if stack:
            nxt = adj[stack[-1]] & unexplored
            if not nxt:
                v = stack.pop()
                finished.append(v)
                finished_mask |= 1 << v
                continue
        else:
            nxt = unexplored
        if deficit is None and unexplored.bit_count() == b:
            # about to push past |U| = b with F still short
            deficit = a - len(finished)
        w = (nxt & -nxt).bit_length() - 1
        stack.append(w)
        unexplored &= ~(1 << w)
        hit = long_path()
        if hit is not None:
            return hit
    if deficit is None:
        # |U| = b was reached only after the last push; everything is finished now
        deficit = a - len(finished)
    raise HypothesisViolated(deficit)


@dataclass(frozen=True)
class WeakPartiteWitness:
    sets: tuple[tuple[int, ...], ...]

    @property
    def witness(self) -> Partition:
        return Partition(self.sets, 1)


@dataclass(frozen=True)
class RedPathOutcome:
    path: tuple[int, ...]

    @property
    def witness(self) -> RedPath:
        return RedPath(self.path)


def decompose_blue_partite(
    colouring: TwoColouring, r: int, n: int, t: int, check_invariant: bool = False
) -> RedPathOutcome | WeakPartiteWitness:
    """Find a red path with ``n`` edges, or r+1 disjoint t-sets with only blue edges between them.

    Needs exactly ``r n + (r+1) t`` vertices. Round ``s`` separates a t-set
    from the current working set inside the red graph; the remaining set
    shrinks to ``(r-s) n + (r-s+1) t`` vertices and the last one is the final t-set.
    """
    N = colouring.base.num_vertices
    if N != r * n + (r + 1) * t:
        raise WrongVertexCount(f"need r n + (r+1) t = {r * n + (r + 1) * t} vertices, graph has {N}")
    red = colouring.red_subgraph()
    working = red.vertex_mask
    sets: list[tuple[int, ...]] = []
    for s in range(1, r + 1):
        b = (r - s) * n + (r - s + 1) * t
        assert working.bit_count() == (r - s + 1) * n + (r - s + 2) * t
        try:
            out = dfs_separate(red, t, b, n, within=working, check_invariant=check_invariant)
        except HypothesisViolated as exc:
            raise AssertionError(f"separation failed in round {s} despite the size identity") from exc
        if isinstance(out, LongPath):
            return RedPathOutcome(out.path)
        sets.append(out.a)
        working = to_mask(out.b)
    sets.append(tuple(iter_bits(working)))
    return WeakPartiteWitness(tuple(sets))


def verify_split(graph: Graph, split: Split, a: int, b: int) -> bool:
    amask, bmask = to_mask(split.a), to_mask(split.b)
    return (
        len(split.a) == a
        and len(split.b) == b
        and amask.bit_count() == a
        and bmask.bit_count() == b
        and amask & bmask == 0
        and all(graph.adj[v] & bmask == 0 for v in split.a)
    )


def verify_weak_partite(colouring: TwoColouring, witness: WeakPartiteWitness, t: int) -> bool:
    """Disjoint t-sets with every base edge between distinct sets blue."""
    masks = [to_mask(s) for s in witness.sets]
    if any(len(s) != t or m.bit_count() != t for s, m in zip(witness.sets, masks)):
        return False
    union = 0
    for m in masks:
        if union & m:
            return False
        union |= m
    red = colouring.red_adj
    for i, si in enumerate(witness.sets):
        others = union & ~masks[i]
        if any(red[v] & others for v in si):
            return False
    return True


def verify_outcome(colouring: TwoColouring, out, r: int, n: int, t: int) -> bool:
    if isinstance(out, RedPathOutcome):
        return len(out.path) == n + 1 and is_path(colouring.red_subgraph(), out.path)
    return len(out.sets) == r + 1 and verify_weak_partite(colouring, out, t)
