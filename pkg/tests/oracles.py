"""Brute-force reference implementations used only by the tests.

These deliberately avoid the package's search code: they see a graph only
through its sorted edge list.
"""

from itertools import combinations, permutations


def adjacency_sets(num_vertices, edges):
    adj = [set() for _ in range(num_vertices)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def clique_number(num_vertices, edges):
    adj = adjacency_sets(num_vertices, edges)
    best = 1 if num_vertices else 0
    for k in range(2, num_vertices + 1):
        if any(all(b in adj[a] for a, b in combinations(c, 2)) for c in combinations(range(num_vertices), k)):
            best = k
        else:
            break
    return best


def longest_path_dp(num_vertices, edges):
    """Longest simple path (in edges) by dynamic programming over vertex subsets.

    ``ends[S]`` is the set of vertices v such that some path visits exactly S and ends at v.
    """
    if num_vertices == 0:
        return -1
    adj = [0] * num_vertices
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    ends = [0] * (1 << num_vertices)
    for v in range(num_vertices):
        ends[1 << v] = 1 << v
    best = 0
    for mask in range(1, 1 << num_vertices):
        e = ends[mask]
        if not e:
            continue
        best = max(best, bin(mask).count("1") - 1)
        for v in range(num_vertices):
            if e >> v & 1:
                free = adj[v] & ~mask
                w = 0
                while free:
                    if free & 1:
                        ends[mask | (1 << w)] |= 1 << w
                    free >>= 1
                    w += 1
    return best


def violating_sets(num_vertices, edges, k):
    """All nonempty X with |X| <= k and |N(X) minus X| < 2|X|."""
    adj = adjacency_sets(num_vertices, edges)
    out = []
    for size in range(1, k + 1):
        for xs in combinations(range(num_vertices), size):
            nb = set().union(*(adj[x] for x in xs)) - set(xs)
            if len(nb) < 2 * size:
                out.append(set(xs))
    return out


def count_cliques(num_vertices, edges, size):
    adj = adjacency_sets(num_vertices, edges)
    return sum(
        all(b in adj[a] for a, b in combinations(c, 2)) for c in combinations(range(num_vertices), size)
    )


def arrow_brute_force(num_vertices, edges, r, n):
    """True iff every red/blue colouring has a red path with n edges or a blue K_{r+1}."""
    edges = list(edges)
    for bits in range(1 << len(edges)):
        red = [e for i, e in enumerate(edges) if bits >> i & 1]
        blue = [e for i, e in enumerate(edges) if not bits >> i & 1]
        if longest_path_dp(num_vertices, red) >= n:
            continue
        if clique_number(num_vertices, blue) >= r + 1:
            continue
        return False
    return True


def canonical_edges(num_vertices, edges):
    """Lexicographically smallest relabelled edge list; equal iff the graphs are isomorphic."""
    best = None
    for perm in permutations(range(num_vertices)):
        key = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or key < best:
            best = key
    return best


def graphs_up_to_isomorphism(num_vertices):
    """One representative per isomorphism class, built by adding a vertex in every possible way."""
    classes = {()}
    for k in range(1, num_vertices + 1):
        nxt = set()
        for edges in classes:
            for nb in range(1 << (k - 1)):
                new = list(edges) + [(u, k - 1) for u in range(k - 1) if nb >> u & 1]
                nxt.add(canonical_edges(k, new))
        classes = nxt
    return sorted(classes)


def one_vertex_extensions(num_vertices):
    """Graphs on num_vertices vertices covering every isomorphism class (with repeats)."""
    out = []
    for edges in graphs_up_to_isomorphism(num_vertices - 1):
        for nb in range(1 << (num_vertices - 1)):
            out.append(list(edges) + [(u, num_vertices - 1) for u in range(num_vertices - 1) if nb >> u & 1])
    return out
