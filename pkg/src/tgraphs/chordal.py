"""Chordal-graph primitives: recognition, cliques, clique trees, edge classes, separators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import Disconnected, NotChordal
from .graph import Graph


@dataclass(frozen=True)
class EliminationOrdering:
    """Perfect elimination ordering: later neighbors of each vertex form a clique."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class WeightedCliqueGraph:
    """Maximal cliques with intersection-weighted edges (weight > 0 only)."""

    nodes: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int, int], ...]  # (i, j, weight), i < j


@dataclass(frozen=True)
class CliqueTree:
    """Maximum-weight spanning tree of the weighted clique graph."""

    nodes: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]  # (i, j), i < j

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out


INDISPENSABLE = "indispensable"
UNNECESSARY = "unnecessary"
OPTIONAL = "optional"


@dataclass(frozen=True)
class Separator:
    """Minimal vertex separator; optionally flags one component it cuts off."""

    vertices: tuple[int, ...]
    component: Optional[frozenset[int]] = field(default=None, compare=False)


def maximum_cardinality_search(g: Graph) -> list[int]:
    """MCS visit order v_1..v_n; its reverse is a PEO iff g is chordal."""
    n = g.n
    weight = [0] * n
    visited = [False] * n
    order = []
    for _ in range(n):
        best = -1
        for v in range(n):
            if not visited[v] and (best == -1 or weight[v] > weight[best]):
                best = v
        visited[best] = True
        order.append(best)
        for w in g.adj[best]:
            if not visited[w]:
                weight[w] += 1
    return order


def is_chordal(g: Graph) -> Optional[EliminationOrdering]:
    """A perfect elimination ordering of g, or None when g is not chordal."""
    n = g.n
    if n == 0:
        return EliminationOrdering(())
    mcs = maximum_cardinality_search(g)
    peo = mcs[::-1]
    pos = [0] * n
    for i, v in enumerate(peo):
        pos[v] = i
    for i, v in enumerate(peo):
        later = [w for w in g.adj[v] if pos[w] > i]
        if not later:
            continue
        u = min(later, key=lambda w: pos[w])
        rest = [w for w in later if w != u]
        if any(w not in g.adj[u] for w in rest):
            return None
    return EliminationOrdering(tuple(peo))


def simplicial_vertices(g: Graph) -> frozenset[int]:
    """Vertices whose neighborhood induces a clique."""
    return frozenset(v for v in g.vertices() if g.is_clique(g.adj[v]))


def maximal_cliques(g: Graph, peo: Optional[EliminationOrdering] = None) -> list[tuple[int, ...]]:
    """All maximal cliques of a chordal graph, sorted lexicographically."""
    if peo is None:
        peo = is_chordal(g)
        if peo is None:
            raise NotChordal("maximal_cliques requires a chordal graph")
    order = peo.order
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    candidates = []
    for i, v in enumerate(order):
        c = frozenset([v] + [w for w in g.adj[v] if pos[w] > i])
        candidates.append(c)
    candidates = sorted(set(candidates), key=len, reverse=True)
    cliques: list[frozenset[int]] = []
    for c in candidates:
        if not any(c < other for other in cliques):
            cliques.append(c)
    return sorted(tuple(sorted(c)) for c in cliques)


def weighted_clique_graph(g: Graph) -> WeightedCliqueGraph:
    """Clique graph with |C_i ∩ C_j| edge weights (edges only for nonempty intersections)."""
    nodes = tuple(maximal_cliques(g))
    sets = [frozenset(c) for c in nodes]
    edges = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            w = len(sets[i] & sets[j])
            if w > 0:
                edges.append((i, j, w))
    return WeightedCliqueGraph(nodes, tuple(edges))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def clique_tree(g: Graph, wcg: Optional[WeightedCliqueGraph] = None) -> CliqueTree:
    """Deterministic maximum-weight spanning tree of the clique graph.

    Ties are broken by lexicographically smallest (i, j) node-index pair,
    with nodes in the canonical sorted-clique order.
    """
    if not g.is_connected():
        raise Disconnected("clique_tree requires a connected graph")
    if wcg is None:
        wcg = weighted_clique_graph(g)
    k = len(wcg.nodes)
    uf = _UnionFind(k)
    chosen = []
    for i, j, _w in sorted(wcg.edges, key=lambda e: (-e[2], e[0], e[1])):
        if uf.union(i, j):
            chosen.append((i, j))
    if len(chosen) != k - 1:
        raise Disconnected("clique graph is disconnected")
    return CliqueTree(wcg.nodes, tuple(sorted(chosen)))


def classify_edges(wcg: WeightedCliqueGraph) -> dict[tuple[int, int], str]:
    """Classify clique-graph edges against maximum-weight spanning trees.

    An edge is unnecessary iff its endpoints are connected by strictly
    heavier edges; indispensable iff it is a bridge once same-or-heavier
    edges are added to the strictly-heavier skeleton.
    """
    k = len(wcg.nodes)
    result: dict[tuple[int, int], str] = {}
    by_weight: dict[int, list[tuple[int, int]]] = {}
    for i, j, w in wcg.edges:
        by_weight.setdefault(w, []).append((i, j))
    uf = _UnionFind(k)
    for w in sorted(by_weight, reverse=True):
        group = by_weight[w]
        # components of the strictly-heavier subgraph
        comp = {x: uf.find(x) for pair in group for x in pair}
        live = []
        for i, j in group:
            if comp[i] == comp[j]:
                result[(i, j)] = UNNECESSARY
            else:
                live.append((i, j))
        # bridges of the contracted weight-class multigraph are indispensable
        bridges = _multigraph_bridges(live, comp)
        for e in live:
            result[e] = INDISPENSABLE if e in bridges else OPTIONAL
        for i, j in live:
            uf.union(i, j)
    return result


def _multigraph_bridges(edges, comp):
    """Bridges among `edges` after contracting endpoints by comp[]; parallel edges never qualify."""
    adj: dict[int, list[tuple[int, tuple[int, int]]]] = {}
    for e in edges:
        a, b = comp[e[0]], comp[e[1]]
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    bridges: set[tuple[int, int]] = set()
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    counter = [0]
    for root in adj:
        if root in index:
            continue
        # iterative DFS with per-edge tracking so parallel edges are handled
        stack = [(root, None, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            node, in_edge, it = stack[-1]
            advanced = False
            for nxt, e in it:
                if e is in_edge:
                    continue
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append((nxt, e, iter(adj[nxt])))
                    advanced = True
                    break
                low[node] = min(low[node], index[nxt])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[node])
                    if low[node] > index[parent]:
                        bridges.add(in_edge)
        # parallel edges: both copies connect the same contracted pair, never bridges
    seen_pairs: dict[tuple[int, int], int] = {}
    for e in edges:
        a, b = comp[e[0]], comp[e[1]]
        pair = (min(a, b), max(a, b))
        seen_pairs[pair] = seen_pairs.get(pair, 0) + 1
    return {e for e in bridges if seen_pairs[(min(comp[e[0]], comp[e[1]]), max(comp[e[0]], comp[e[1]]))] == 1}


def leaf_cliques(g: Graph) -> list[tuple[int, ...]]:
    """Maximal cliques that can be a leaf of some clique tree.

    A clique qualifies iff it is incident to at most one indispensable edge
    and is not a cutvertex of the clique graph minus unnecessary edges.
    """
    if not g.is_connected():
        raise Disconnected("leaf_cliques requires a connected graph")
    wcg = weighted_clique_graph(g)
    classes = classify_edges(wcg)
    k = len(wcg.nodes)
    indis = [0] * k
    adj = [[] for _ in range(k)]
    for (i, j), cls in classes.items():
        if cls == INDISPENSABLE:
            indis[i] += 1
            indis[j] += 1
        if cls != UNNECESSARY:
            adj[i].append(j)
            adj[j].append(i)
    cut = _cutvertices(k, adj)
    return [wcg.nodes[i] for i in range(k) if indis[i] <= 1 and i not in cut]


def _cutvertices(n, adj):
    """Articulation points via iterative Tarjan DFS."""
    index = [-1] * n
    low = [0] * n
    cut = set()
    counter = [0]
    for root in range(n):
        if index[root] != -1:
            continue
        root_children = 0
        stack = [(root, -1, iter(adj[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nxt in it:
                if index[nxt] == -1:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    if node == root:
                        root_children += 1
                    stack.append((nxt, node, iter(adj[nxt])))
                    advanced = True
                    break
                elif nxt != parent:
                    low[node] = min(low[node], index[nxt])
            if not advanced:
                stack.pop()
                if stack:
                    pnode = stack[-1][0]
                    low[pnode] = min(low[pnode], low[node])
                    if pnode != root and low[node] >= index[pnode]:
                        cut.add(pnode)
        if root_children >= 2:
            cut.add(root)
    return cut


def minimal_separators(g: Graph) -> list[Separator]:
    """All minimal vertex separators of a connected chordal graph.

    Realized as deduplicated intersections of adjacent cliques along a
    clique tree; each is a clique. A cut-off component is attached for
    convenience.
    """
    if g.n == 0:
        return []
    if not g.is_connected():
        raise Disconnected("minimal_separators requires a connected graph")
    tree = clique_tree(g)
    seen: dict[tuple[int, ...], Separator] = {}
    for i, j in tree.edges:
        s = frozenset(tree.nodes[i]) & frozenset(tree.nodes[j])
        key = tuple(sorted(s))
        if not key or key in seen:
            continue
        allowed = frozenset(v for v in g.vertices() if v not in s)
        # flag the component containing the lowest vertex outside s
        start = min(allowed)
        comp = frozenset(g.connected_in(allowed, start))
        seen[key] = Separator(key, comp)
    return [seen[k] for k in sorted(seen)]
