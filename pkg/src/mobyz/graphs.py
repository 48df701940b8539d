"""Undirected networks: queries, connectivity, disjoint paths, generators.

Vertices are 1-based processor ids. Disjoint-path computation uses
unit-vertex-capacity max flow with a fixed smallest-vertex-first augmentation
order, so every party derives the identical "pre-agreed" path system with no
communication.
"""

from __future__ import annotations

from dataclasses import dataclass


class Network:
    """Immutable simple graph on vertices 1..n."""

    def __init__(self, n: int, edges):
        if n < 1:
            raise ValueError("need at least one vertex")
        adj = {v: set() for v in range(1, n + 1)}
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{v}) outside 1..{n}")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self._adj = {v: frozenset(nb) for v, nb in adj.items()}

    @property
    def vertices(self):
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self):
        return sorted((u, v) for u in self.vertices for v in self._adj[u] if u < v)

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def is_complete(self) -> bool:
        return all(len(self._adj[v]) == self.n - 1 for v in self.vertices)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = {1}
        stack = [1]
        while stack:
            for w in self._adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def connected_avoiding(self, a: int, b: int, removed) -> bool:
        """True iff a reaches b in the graph minus `removed` vertices."""
        removed = set(removed)
        if a in removed or b in removed:
            raise ValueError("endpoints cannot be removed")
        if a == b:
            return True
        seen = {a}
        stack = [a]
        while stack:
            for w in self._adj[stack.pop()]:
                if w == b:
                    return True
                if w not in seen and w not in removed:
                    seen.add(w)
                    stack.append(w)
        return False


@dataclass(frozen=True)
class PathSystem:
    """Internally-vertex-disjoint paths from source to target."""

    source: int
    target: int
    paths: tuple

    def validate(self, g: Network) -> None:
        seen_internal = set()
        for path in self.paths:
            if path[0] != self.source or path[-1] != self.target:
                raise AssertionError(f"path {path} has wrong endpoints")
            for a, b in zip(path, path[1:]):
                if not g.adjacent(a, b):
                    raise AssertionError(f"path {path} uses non-edge ({a},{b})")
            internal = set(path[1:-1])
            if internal & seen_internal or self.source in internal or self.target in internal:
                raise AssertionError(f"path {path} not internally disjoint")
            seen_internal |= internal


def min_degree(g: Network) -> int:
    return min(g.degree(v) for v in g.vertices)


def common_neighbors(g: Network, u: int, v: int) -> frozenset:
    """Vertices adjacent to both u and v (never u or v themselves)."""
    if u == v:
        raise ValueError("u and v must differ")
    return g.neighbors(u) & g.neighbors(v) - {u, v}


# --- unit-vertex-capacity max flow ------------------------------------------
#
# Vertex splitting: each vertex w becomes w_in -> w_out with capacity 1; an
# edge {a,b} becomes arcs a_out -> b_in and b_out -> a_in with unbounded
# capacity, except a direct s-t edge which carries at most one unit (it is
# one path). Unbounded edge arcs force minimum cuts onto vertex arcs, which
# is what the separator extraction reads off. Flow state:
#   edge_flow: set of directed (a, b) arcs carrying one unit (vertex
#              capacities keep every edge at one unit or less)
#   through:   set of vertices whose in->out arc carries one unit
# Augmenting paths start at ("out", s) and end at ("in", t), found by DFS
# exploring neighbors smallest-first for determinism.


def _residual_successors(g, node, through, edge_flow, s, t):
    side, v = node
    succs = []
    if side == "out":
        for w in sorted(g.neighbors(v)):
            if (v, w) == (s, t) and (s, t) in edge_flow:
                continue
            succs.append(("in", w))
        if v in through:
            succs.append(("in", v))  # cancel the vertex passage
    else:
        if v not in through:
            succs.append(("out", v))
        for w in sorted(g.neighbors(v)):
            if (w, v) in edge_flow:
                succs.append(("out", w))  # cancel incoming edge flow
    return succs


def _augment(g: Network, s: int, t: int, through: set, edge_flow: set) -> bool:
    start = ("out", s)
    goal = ("in", t)
    prev = {start: None}
    stack = [start]
    found = False
    while stack:
        node = stack.pop()
        if node == goal:
            found = True
            break
        for nxt in reversed(_residual_successors(g, node, through, edge_flow, s, t)):
            if nxt not in prev:
                prev[nxt] = node
                stack.append(nxt)
    if not found:
        return False
    path = []
    node = goal
    while node is not None:
        path.append(node)
        node = prev[node]
    path.reverse()
    for a, b in zip(path, path[1:]):
        if a[0] == "out" and b[0] == "in" and a[1] != b[1]:
            if (b[1], a[1]) in edge_flow:
                edge_flow.discard((b[1], a[1]))
            else:
                edge_flow.add((a[1], b[1]))
        elif a[0] == "in" and b[0] == "out" and a[1] == b[1]:
            through.add(a[1])
        elif a[0] == "out" and b[0] == "in" and a[1] == b[1]:
            through.discard(a[1])
        elif a[0] == "in" and b[0] == "out":
            edge_flow.discard((b[1], a[1]))
    return True


def _max_disjoint_flow(g: Network, s: int, t: int):
    """Maximum internally-disjoint s-t path count, with the final flow state."""
    through: set = set()
    edge_flow: set = set()
    count = 0
    while _augment(g, s, t, through, edge_flow):
        count += 1
    return count, through, edge_flow


def local_connectivity(g: Network, u: int, v: int) -> int:
    """Maximum number of internally-vertex-disjoint u-v paths."""
    if u == v:
        raise ValueError("u and v must differ")
    return _max_disjoint_flow(g, u, v)[0]


def vertex_connectivity(g: Network) -> int:
    """Minimum over non-adjacent pairs of the u-v disjoint-path count.

    Complete graphs yield n-1; disconnected graphs yield 0.
    """
    if g.n < 2:
        raise ValueError("connectivity needs at least two vertices")
    if g.is_complete():
        return g.n - 1
    best = g.n - 1
    for u in g.vertices:
        for v in range(u + 1, g.n + 1):
            if not g.adjacent(u, v):
                best = min(best, local_connectivity(g, u, v))
                if best == 0:
                    return 0
    return best


def local_connectivity_avoiding_source(g: Network, s: int) -> int:
    """min over p != s of the s-p disjoint-path count; <= 4m certifies the
    impossibility hypothesis when the minimizing pair admits a separator."""
    if g.n < 3:
        raise ValueError("needs at least three vertices")
    return min(local_connectivity(g, s, p) for p in g.vertices if p != s)


def min_separator_certificate(g: Network, s: int):
    """Smallest separator avoiding s, as (size, cut, separated vertex).

    Only pairs (s, p) with p not adjacent to s admit separators; returns None
    when s is adjacent to every other vertex. The cut comes from the max-flow
    residual: vertices with in-node reachable from s but out-node not.
    """
    best = None
    for p in g.vertices:
        if p == s or g.adjacent(s, p):
            continue
        count, through, edge_flow = _max_disjoint_flow(g, s, p)
        if best is None or count < best[0]:
            best = (count, through, edge_flow, p)
    if best is None:
        return None
    count, through, edge_flow, p = best
    reach = _reachable_in_residual(g, s, p, through, edge_flow)
    cut = frozenset(
        v for v in g.vertices
        if v not in (s, p) and ("in", v) in reach and ("out", v) not in reach
    )
    assert len(cut) == count and not g.connected_avoiding(s, p, cut)
    return count, cut, p


def _reachable_in_residual(g: Network, s: int, t: int, through: set, edge_flow: set) -> set:
    seen = {("out", s)}
    stack = [("out", s)]
    while stack:
        node = stack.pop()
        for nxt in _residual_successors(g, node, through, edge_flow, s, t):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def disjoint_paths(g: Network, u: int, v: int, k: int) -> PathSystem:
    """k internally-vertex-disjoint u-v paths, deterministic and pre-agreed.

    Raises with the achievable maximum when k exceeds the local connectivity.
    """
    if u == v:
        raise ValueError("u and v must differ")
    count, _, edge_flow = _max_disjoint_flow(g, u, v)
    if k > count:
        raise ValueError(
            f"requested {k} disjoint paths between {u} and {v}; maximum is {count}"
        )
    succ: dict = {}
    for a, b in edge_flow:
        succ.setdefault(a, []).append(b)
    for a in succ:
        succ[a].sort()
    paths = []
    for _ in range(count):
        path = [u]
        while path[-1] != v:
            path.append(succ[path[-1]].pop(0))
        paths.append(tuple(path))
    paths.sort()
    system = PathSystem(source=u, target=v, paths=tuple(paths[:k]))
    system.validate(g)
    return system


# --- generators ---------------------------------------------------------------


def complete_network(n: int) -> Network:
    return Network(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])


def make_two_clique_network(clique_size: int, bridge_size: int) -> Network:
    """Two disjoint cliques of `clique_size` plus `bridge_size` universal vertices.

    Vertices 1..c form the first clique, c+1..2c the second, and the last
    `bridge_size` vertices are adjacent to everything.
    """
    if clique_size < 1 or bridge_size < 0:
        raise ValueError("clique_size >= 1 and bridge_size >= 0 required")
    c, b = clique_size, bridge_size
    n = 2 * c + b
    edges = set()
    for base in (0, c):
        for i in range(1, c + 1):
            for j in range(i + 1, c + 1):
                edges.add((base + i, base + j))
    for bridge in range(2 * c + 1, n + 1):
        for v in range(1, n + 1):
            if v != bridge:
                edges.add((min(v, bridge), max(v, bridge)))
    return Network(n, edges)


def complete_minus_matching(n: int, removed_pairs: int) -> Network:
    """Complete graph minus the matching (1,2), (3,4), ... (`removed_pairs` edges)."""
    if removed_pairs < 0 or 2 * removed_pairs > n:
        raise ValueError("matching does not fit")
    skip = {(2 * i - 1, 2 * i) for i in range(1, removed_pairs + 1)}
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if (u, v) not in skip
    ]
    return Network(n, edges)


def cycle_network(n: int) -> Network:
    return Network(n, [(i, i % n + 1) for i in range(1, n + 1)])


def star_network(n: int) -> Network:
    """Center is vertex 1; leaves 2..n."""
    return Network(n, [(1, v) for v in range(2, n + 1)])


# --- edge-list text format ------------------------------------------------------


def write_edge_list(g: Network) -> str:
    """One edge per line ("u v"); isolated vertices as a bare id line."""
    lines = [f"{u} {v}" for u, v in g.edges()]
    lines += [str(v) for v in g.vertices if g.degree(v) == 0]
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Network:
    edges = []
    isolated = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            ids = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"edge list line {lineno}: not vertex ids: {raw!r}") from None
        if len(ids) == 1:
            isolated.append(ids[0])
        elif len(ids) == 2:
            edges.append((ids[0], ids[1]))
        else:
            raise ValueError(f"edge list line {lineno}: expected 1 or 2 ids")
    mentioned = [v for e in edges for v in e] + isolated
    if not mentioned:
        raise ValueError("empty edge list")
    return Network(max(mentioned), edges)
