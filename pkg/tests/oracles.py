"""Brute-force graph oracles, independent of the flow-based implementations."""

import itertools

from mobyz import Network


def brute_min_separator(g, u, v):
    """Smallest vertex set (excluding u, v) disconnecting u from v, or None
    when u and v are adjacent (no such set exists)."""
    if g.adjacent(u, v):
        return None
    others = [x for x in g.vertices if x not in (u, v)]
    for size in range(len(others) + 1):
        for subset in itertools.combinations(others, size):
            if not g.connected_avoiding(u, v, subset):
                return size
    raise AssertionError("some subset must disconnect a non-adjacent pair")


def brute_local_connectivity(g, u, v):
    if g.adjacent(u, v):
        key = (min(u, v), max(u, v))
        trimmed = Network(g.n, [e for e in g.edges() if e != key])
        return 1 + brute_local_connectivity(trimmed, u, v)
    return brute_min_separator(g, u, v)


def brute_vertex_connectivity(g):
    if g.is_complete():
        return g.n - 1
    return min(
        brute_min_separator(g, u, v)
        for u in g.vertices
        for v in range(u + 1, g.n + 1)
        if not g.adjacent(u, v)
    )
