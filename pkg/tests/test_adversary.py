import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import clique_number, count_cliques, longest_path_dp
from ramsey_arrow.adversary import (
    ALPHA,
    GAMMA,
    WrongVertexCount,
    boundary_set,
    classify_by_cycles,
    default_c_const,
    find_long_red_cycles,
    pinned_cliques,
    strategy_boundary,
    strategy_hitting_set,
    strategy_pinned_cliques,
    verify_avoiding,
    verify_structural_partition,
)
from ramsey_arrow.detectors import is_cycle
from ramsey_arrow.graph import (
    Graph,
    Seed,
    TwoColouring,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    sample_gnp,
)


def _avoids(col, r, n):
    N = col.base.num_vertices
    return longest_path_dp(N, col.red_edges()) < n and clique_number(N, col.blue_subgraph().edges()) < r + 1


# --- hitting set


def test_hitting_on_triangle_free_graph_is_all_blue():
    res = strategy_hitting_set(cycle_graph(8), 2, 3)
    assert res.success and res.colouring.red_edges() == []


def test_hitting_single_triangle():
    res = strategy_hitting_set(complete_graph(3), 2, 2)
    assert res.success
    assert len(res.colouring.red_edges()) == 1
    assert _avoids(res.colouring, 2, 2)


def test_hitting_fails_when_red_path_forms():
    # K_5 has 10 triangles; hitting them needs a red path with two edges
    res = strategy_hitting_set(complete_graph(5), 2, 2)
    assert not res.success and res.reason == "red path detected"


@pytest.mark.parametrize("s", range(15))
def test_hitting_on_sparse_gnp(s):
    g = sample_gnp(40, 0.08, Seed(s, 40))
    triangles = count_cliques(40, g.edges(), 3)
    res = strategy_hitting_set(g, 2, 20)
    assert res.metadata["copies"] == triangles
    if triangles < 20:
        assert res.success
    if res.success:
        assert res.verification["no_red_path"].refuted and res.verification["no_blue_clique"].refuted
        assert clique_number(40, res.colouring.blue_subgraph().edges()) < 3


# --- boundary


def test_boundary_on_edgeless_graph():
    res = strategy_boundary(empty_graph(2 * 4 + 2), 2, 4, 2)
    assert res.success and res.metadata["boundary"] == 0


def test_boundary_on_complete_graph_fails():
    res = strategy_boundary(complete_graph(5), 2, 2, 1)
    assert not res.success
    assert res.reason == "boundary too large: 4"


def test_boundary_wrong_vertex_count():
    with pytest.raises(WrongVertexCount):
        strategy_boundary(empty_graph(7), 2, 2, 1)


@pytest.mark.parametrize("s", range(20))
def test_boundary_success_recounted(s):
    r, n, t = 2, 8, 2
    g = sample_gnp(r * n + t, 0.08, Seed(s, 18))
    res = strategy_boundary(g, r, n, t)
    x = boundary_set(g, t)
    assert res.metadata["boundary"] == x.bit_count()
    if not res.success:
        assert x.bit_count() > n
        return
    parts = res.metadata["parts"]
    assert sorted(v for p in parts for v in p) == list(range(g.num_vertices))
    assert all(len(p) <= n for p in parts[1:])
    for j in range(2, r + 1):
        assert not any(g.has_edge(u, v) for u in parts[0] for v in parts[j])
    assert _avoids(res.colouring, r, n)


# --- pinned cliques


def test_pinned_with_no_cliques_near_a0():
    g = disjoint_union(empty_graph(2), complete_graph(3), empty_graph(5))
    res = strategy_pinned_cliques(g, 2, 4, 2)
    assert res.success and res.metadata["pinned"] == 0


def test_pinned_single_triangle_through_vertex_zero():
    g = Graph.from_edges(9, [(0, 1), (0, 2), (1, 2)])
    res = strategy_pinned_cliques(g, 2, 4, 1)
    assert res.success
    a1 = res.metadata["parts"][1]
    assert {1, 2} <= set(a1)
    assert _avoids(res.colouring, 2, 4)


@pytest.mark.parametrize("s", range(20))
def test_pinned_recount(s):
    r, n, t = 2, 12, 2
    g = sample_gnp(r * n + t, 0.25, Seed(s, 26))
    copies = pinned_cliques(g, r, t)
    brute = [
        (a, b, c)
        for a in range(t)
        for b in range(t, g.num_vertices)
        for c in range(b + 1, g.num_vertices)
        if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
    ]
    assert sorted(copies) == brute
    res = strategy_pinned_cliques(g, r, n, t)
    if res.success:
        a1 = set(res.metadata["parts"][1])
        assert all(set(c[1:]) <= a1 for c in copies)
        assert res.verification["no_red_path"].refuted and res.verification["no_blue_clique"].refuted


# --- verification


def test_verify_avoiding_heuristic_flags():
    g = sample_gnp(20, 0.3, Seed(1))
    col = TwoColouring.random(g, 0.5, np.random.default_rng(0))
    ok_exact, _ = verify_avoiding(col, 2, 8, "exact")
    ok_heur, _ = verify_avoiding(col, 2, 8, "heuristic")
    if ok_exact:
        assert ok_heur
    with pytest.raises(ValueError):
        verify_avoiding(col, 2, 8, "sloppy")


def test_checks_are_json_lines():
    res = strategy_hitting_set(complete_graph(3), 2, 2)
    lines = [json.dumps(c) for c in res.checks()]
    names = [json.loads(x)["name"] for x in lines]
    assert names == ["no_red_path", "no_blue_clique"]
    assert all(json.loads(x)["pass"] for x in lines)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["hitting", "boundary", "pinned"]), st.floats(0, 0.5))
def test_every_success_avoids(master, strategy, p):
    r, n, t = 2, 4, 1
    g = sample_gnp(r * n + t, p, Seed(master))
    fn = {
        "hitting": lambda: strategy_hitting_set(g, r, n),
        "boundary": lambda: strategy_boundary(g, r, n, t),
        "pinned": lambda: strategy_pinned_cliques(g, r, n, t),
    }[strategy]
    res = fn()
    if res.success:
        assert _avoids(res.colouring, r, n)


# --- structural classifier


def test_all_blue_puts_everything_in_a0():
    g = complete_graph(12)
    part = classify_by_cycles(TwoColouring.all_blue(g), [range(0, 4), range(4, 8)], ALPHA, GAMMA, p=1.0, n=8)
    assert part.parts[0] == list(range(12)) and part.parts[1] == part.parts[2] == []


def test_red_cliques_classify_into_their_parts():
    g = disjoint_union(complete_graph(5), complete_graph(5), empty_graph(3))
    col = TwoColouring.all_red(g)
    part = classify_by_cycles(col, [range(5), range(5, 10)], alpha=0.5, gamma=0.0, p=1.0, n=8)
    assert part.parts == [[10, 11, 12], [0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    assert part.conflicts == []


def test_overlapping_cycles_rejected():
    with pytest.raises(ValueError):
        classify_by_cycles(TwoColouring.all_blue(complete_graph(4)), [[0, 1], [1, 2]])


def test_conflicts_reported():
    g = complete_graph(6)
    col = TwoColouring.all_red(g)
    part = classify_by_cycles(col, [[0, 1], [2, 3]], alpha=0.1, gamma=0.0, p=1.0, n=10)
    assert (4, (1, 2)) in part.conflicts and 4 in part.parts[1]


@pytest.mark.parametrize("s", range(5))
def test_classifier_recount_on_planted_cycles(s):
    r, n, t = 2, 10, 2
    g = sample_gnp(r * n + t, 0.4, Seed(s, 7))
    base = strategy_boundary(g, r, n, t)
    rng = np.random.default_rng(s)
    col = base.colouring if base.success else TwoColouring.random(g, 0.5, rng)
    cycles = [list(range(2, 8)), list(range(12, 18))]
    alpha, gamma, p = 0.2, 0.1, 0.4
    part = classify_by_cycles(col, cycles, alpha, gamma, p, n)
    assert sorted(v for q in part.parts for v in q) == list(range(g.num_vertices))
    for i, cyc in enumerate(cycles, start=1):
        for v in part.parts[i]:
            nb = [u for u in cyc if g.has_edge(v, u)]
            blue = [u for u in nb if col.colour(v, u) == "B"]
            assert len(nb) >= alpha * p * n and len(blue) <= gamma * p * n
    for v in part.parts[0]:
        for cyc in cycles:
            nb = [u for u in cyc if g.has_edge(v, u)]
            blue = [u for u in nb if col.colour(v, u) == "B"]
            assert not (len(nb) >= alpha * p * n and len(blue) <= gamma * p * n)


def test_structural_vacuous_pass():
    g = sample_gnp(10, 0.5, Seed(3))
    col = TwoColouring.random(g, 0.5, np.random.default_rng(3))
    rep = verify_structural_partition(col, [list(range(10)), [], []], c_const=10, p=1.0, n=1)
    assert rep.passed


def test_structural_red_cross_edge_named():
    g = complete_graph(4)
    col = TwoColouring.from_red_edges(g, [(1, 2)])
    rep = verify_structural_partition(col, [[0], [1], [2, 3]], c_const=10, p=1.0, n=3)
    assert not rep.passed
    assert rep.violations == [{"kind": "red cross edge", "edge": (1, 2), "parts": (1, 2)}]


def test_structural_size_violations():
    col = TwoColouring.all_blue(empty_graph(6))
    rep = verify_structural_partition(col, [[0, 1, 2], [3, 4, 5]], c_const=1, p=0.5, n=2)
    kinds = {v["kind"] for v in rep.violations}
    assert kinds == {"A0 too large", "A1 too large"}


@pytest.mark.parametrize("s", range(5))
def test_boundary_output_passes_structural_check(s):
    r, n, t = 2, 10, 2
    g = sample_gnp(r * n + t, 0.05, Seed(s, 8))
    res = strategy_boundary(g, r, n, t)
    if res.success:
        rep = verify_structural_partition(res.colouring, res.metadata["parts"], default_c_const(r), 0.05, n)
        assert rep.passed


# --- long red cycles


def test_planted_cycles_found():
    g = disjoint_union(cycle_graph(12), cycle_graph(12), complete_graph(4))
    col = TwoColouring.from_red_edges(g, cycle_graph(12).edges() + [(u + 12, v + 12) for u, v in cycle_graph(12).edges()])
    res = find_long_red_cycles(col, 2, 10)
    assert res.complete and len(res.cycles) == 2
    assert {len(c) for c in res.cycles} == {12}


def test_all_blue_has_no_cycles():
    res = find_long_red_cycles(TwoColouring.all_blue(complete_graph(10)), 2, 3)
    assert not res.complete and res.cycles == []


def test_random_colouring_cycles_reverify():
    g = sample_gnp(400, 0.1, Seed(0, 400))
    col = TwoColouring.random(g, 0.5, np.random.default_rng(0))
    red = col.red_subgraph()
    res = find_long_red_cycles(col, 2, 50)
    assert res.cycles
    used = set()
    for c in res.cycles:
        assert len(c) >= 50 and is_cycle(red, c)
        assert not used & set(c)
        used |= set(c)
