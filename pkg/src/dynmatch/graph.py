"""Graph, matching, and fractional-matching types plus exact verification oracles.

Vertices are dense integer ids 0..n-1 and edges are normalized (min, max)
pairs.  All types are immutable after construction.  The exact maximum-matching
oracle runs augmenting-path search on bipartite-tagged graphs at any size and
memoized brute force on general graphs up to n = 24.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "Edge",
    "Graph",
    "Matching",
    "FractionalAssignment",
    "InvalidGraphError",
    "InvalidSupportError",
    "UnsupportedSizeError",
    "normalize_edge",
    "max_matching_exact",
    "fractional_size",
    "is_fractional_matching",
    "read_graph",
    "write_graph",
]

Edge = tuple[int, int]

BRUTE_FORCE_LIMIT = 24


class InvalidGraphError(ValueError):
    pass


class InvalidSupportError(ValueError):
    pass


class UnsupportedSizeError(ValueError):
    pass


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1, optionally bipartite-tagged.

    `sides[v]` is 0 (L) or 1 (R) when tagged; every edge must cross sides.
    """

    n: int
    edges: frozenset[Edge]
    sides: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u == v:
                raise InvalidGraphError(f"self-loop at {u}")
            if not (0 <= u < v < self.n):
                raise InvalidGraphError(f"edge ({u}, {v}) not normalized in range")
        if self.sides is not None:
            if len(self.sides) != self.n:
                raise InvalidGraphError("sides length != n")
            for u, v in self.edges:
                if self.sides[u] == self.sides[v]:
                    raise InvalidGraphError(f"edge ({u}, {v}) does not cross sides")

    @staticmethod
    def build(n: int, edges, sides=None) -> "Graph":
        listed = [normalize_edge(u, v) for u, v in edges]
        norm = frozenset(listed)
        if len(norm) != len(listed):
            raise InvalidGraphError("duplicate edges")
        return Graph(n=n, edges=norm, sides=tuple(sides) if sides is not None else None)

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for u, w in self.edges if u == v or w == v)


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edges."""

    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for u, v in self.edges:
            if u in seen or v in seen:
                raise InvalidGraphError("matching edges share a vertex")
            seen.add(u)
            seen.add(v)

    @staticmethod
    def build(edges) -> "Matching":
        return Matching(frozenset(normalize_edge(u, v) for u, v in edges))

    @property
    def size(self) -> int:
        return len(self.edges)

    def is_valid_for(self, g: Graph) -> bool:
        return all(e in g.edges for e in self.edges)


@dataclass(frozen=True)
class FractionalAssignment:
    """Nonnegative edge weights; a fractional matching iff per-vertex sums <= 1."""

    values: dict[Edge, float] = field(default_factory=dict)

    @staticmethod
    def build(values: dict) -> "FractionalAssignment":
        out = {}
        for (u, v), x in values.items():
            if x < 0:
                raise ValueError(f"negative value on edge ({u}, {v})")
            out[normalize_edge(u, v)] = float(x)
        return FractionalAssignment(out)


def fractional_size(f: FractionalAssignment) -> float:
    """|x| = sum of edge values."""
    return float(sum(f.values.values()))


def is_fractional_matching(f: FractionalAssignment, g: Graph) -> bool:
    """True iff every value is in [0, 1] and every per-vertex incident sum is <= 1."""
    vertex_sum = [0.0] * g.n
    for e, x in f.values.items():
        if e not in g.edges:
            raise InvalidSupportError(f"value on non-edge {e}")
        if not (0.0 <= x <= 1.0 + 1e-12):
            return False
        vertex_sum[e[0]] += x
        vertex_sum[e[1]] += x
    return all(s <= 1.0 + 1e-9 for s in vertex_sum)


def _bipartite_max_matching(n: int, edges: frozenset[Edge], sides) -> Matching:
    """Hopcroft-Karp over the L side; deterministic given the edge set."""
    left = [v for v in range(n) if sides[v] == 0]
    adj: dict[int, list[int]] = {v: [] for v in left}
    for u, v in sorted(edges):
        l, r = (u, v) if sides[u] == 0 else (v, u)
        adj[l].append(r)
    INF = float("inf")
    pair_l: dict[int, int] = {}
    pair_r: dict[int, int] = {}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        q = deque()
        for l in left:
            if l not in pair_l:
                dist[l] = 0
                q.append(l)
            else:
                dist[l] = INF
        found = False
        while q:
            l = q.popleft()
            for r in adj[l]:
                nxt = pair_r.get(r)
                if nxt is None:
                    found = True
                elif dist[nxt] == INF:
                    dist[nxt] = dist[l] + 1
                    q.append(nxt)
        return found

    def dfs(l: int) -> bool:
        for r in adj[l]:
            nxt = pair_r.get(r)
            if nxt is None or (dist[nxt] == dist[l] + 1 and dfs(nxt)):
                pair_l[l] = r
                pair_r[r] = l
                return True
        dist[l] = INF
        return False

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n + 100))
    try:
        while bfs():
            for l in left:
                if l not in pair_l:
                    dfs(l)
    finally:
        sys.setrecursionlimit(old_limit)
    return Matching.build((l, r) for l, r in pair_l.items())


def _brute_force_max_matching(n: int, edges: frozenset[Edge]) -> Matching:
    """Exhaustive search with memoized vertex masks; exact for n <= 24."""
    adj_mask = [0] * n
    neighbors: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(edges):
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
        neighbors[u].append(v)
        neighbors[v].append(u)
    memo: dict[int, tuple[int, tuple[Edge, ...]]] = {}

    def solve(mask: int) -> tuple[int, tuple[Edge, ...]]:
        if mask == 0:
            return 0, ()
        hit = memo.get(mask)
        if hit is not None:
            return hit
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        best = solve(rest)  # v unmatched
        for w in neighbors[v]:
            if mask >> w & 1:
                size, picked = solve(rest & ~(1 << w))
                if size + 1 > best[0]:
                    best = (size + 1, picked + ((v, w),))
        memo[mask] = best
        return best

    _, picked = solve((1 << n) - 1)
    return Matching.build(picked)


def max_matching_exact(g: Graph) -> Matching:
    """Maximum-cardinality matching: augmenting paths when bipartite-tagged,
    brute force otherwise (general graphs limited to n <= 24)."""
    if g.sides is not None:
        return _bipartite_max_matching(g.n, g.edges, g.sides)
    if g.n > BRUTE_FORCE_LIMIT:
        raise UnsupportedSizeError(
            f"exact matching on untagged graphs limited to n <= {BRUTE_FORCE_LIMIT}, got {g.n}"
        )
    return _brute_force_max_matching(g.n, g.edges)


def two_color(n: int, edges) -> tuple[int, ...]:
    """2-color each component (BFS); raises if some component is odd-cyclic."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    color = [-1] * n
    for s in range(n):
        if color[s] != -1:
            continue
        color[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if color[w] == -1:
                    color[w] = color[u] ^ 1
                    q.append(w)
                elif color[w] == color[u]:
                    raise InvalidGraphError("graph tagged bipartite is not 2-colorable")
    return tuple(color)


def read_graph(path) -> Graph:
    """Text format: first line `n [bipartite]`, then one `u v` per edge."""
    with open(path) as fh:
        header = fh.readline().split()
        n = int(header[0])
        bipartite = len(header) > 1 and header[1] == "bipartite"
        edges = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
    sides = two_color(n, edges) if bipartite else None
    return Graph.build(n, edges, sides=sides)


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} bipartite\n" if g.sides is not None else f"{g.n}\n")
        for u, v in sorted(g.edges):
            fh.write(f"{u} {v}\n")
