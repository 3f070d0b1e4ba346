"""Simple undirected graphs on vertex set 0..n-1, plus the shared text format."""

from __future__ import annotations

from typing import Iterable, Iterator


class Graph:
    """Immutable simple undirected graph.

    Adjacency is kept both as frozensets (convenient) and as bitmasks
    (fast intersection tests for the clique machinery).
    """

    __slots__ = ("n", "adj", "bits", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.adj = tuple(frozenset(s) for s in adj)
        bits = []
        for s in adj:
            m = 0
            for v in s:
                m |= 1 << v
            bits.append(m)
        self.bits = tuple(bits)
        self._edges = tuple(sorted((u, v) for u in range(n) for v in adj[u] if u < v))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def m(self) -> int:
        return len(self._edges)

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_clique(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        for i, u in enumerate(vs):
            for v in vs[i + 1 :]:
                if v not in self.adj[u]:
                    return False
        return True

    def subgraph(self, vs: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph and the old->new vertex map."""
        vs = sorted(set(vs))
        idx = {v: i for i, v in enumerate(vs)}
        edges = [(idx[u], idx[v]) for u, v in self._edges if u in idx and v in idx]
        return Graph(len(vs), edges), idx

    def components(self) -> list[frozenset[int]]:
        """Connected components, sorted by minimum vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack, comp = [s], []
            seen[s] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(frozenset(comp))
        return sorted(comps, key=min)

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def connected_in(self, allowed: frozenset[int], start: int) -> set[int]:
        """Vertices reachable from start using only allowed vertices."""
        if start not in allowed:
            return set()
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self.adj[u]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def relabel(self, images: Iterable[int]) -> "Graph":
        """Graph with vertex v renamed to images[v]."""
        images = list(images)
        return Graph(self.n, [(images[u], images[v]) for u, v in self._edges])

    def union_disjoint(self, other: "Graph") -> "Graph":
        """Disjoint union; other's vertices are shifted by self.n."""
        edges = list(self._edges)
        edges += [(u + self.n, v + self.n) for u, v in other._edges]
        return Graph(self.n + other.n, edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def separates(g: Graph, z: Iterable[int], a: Iterable[int], b: Iterable[int]) -> bool:
    """True iff no path connects a∖z to b∖z in g − z (vacuously true on empty sides)."""
    z = set(z)
    a = {v for v in a if v not in z}
    b = {v for v in b if v not in z}
    if not a or not b:
        return True
    allowed = frozenset(v for v in g.vertices() if v not in z)
    reached = set()
    for s in a:
        if s in reached:
            continue
        reached |= g.connected_in(allowed, s)
    return not (reached & b)


def parse_graph_text(text: str) -> Graph:
    """Parse the shared text format: 'n m' header, then m lines 'u v'.

    Blank lines and '#' comments are ignored.
    """
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append([int(parts[0]), int(parts[1])])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise ValueError("empty graph file (missing 'n m' header)")
    n, m = rows[0]
    edges = rows[1:]
    if len(edges) != m:
        raise ValueError(f"header declares {m} edges, found {len(edges)}")
    for u, v in edges:
        if not (0 <= u < v < n):
            raise ValueError(f"edge ({u},{v}) violates 0 <= u < v < n={n}")
    return Graph(n, [(u, v) for u, v in edges])


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(rays: int) -> Graph:
    """K1,rays with the center at vertex 0."""
    return Graph(rays + 1, [(0, i) for i in range(1, rays + 1)])


def iter_all_graphs(n: int) -> Iterator[Graph]:
    """All labeled simple graphs on n vertices (for tiny oracle sweeps)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << len(pairs)):
        yield Graph(n, [pairs[k] for k in range(len(pairs)) if mask >> k & 1])
