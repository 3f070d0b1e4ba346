"""Brute-force oracles, certified random instance generation, relabeling utilities."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import TooLarge
from .graph import Graph
from .perm import Perm, PermGroup

BRUTE_GUARD = 12


def brute_force_isomorphism(g1: Graph, g2: Graph, guard: int = BRUTE_GUARD) -> Optional[Perm]:
    """Exhaustive backtracking isomorphism; None means none exists."""
    if g1.n > guard or g2.n > guard:
        raise TooLarge(f"brute force guarded at n <= {guard}")
    if g1.n != g2.n or g1.m != g2.m:
        return None
    if sorted(map(g1.degree, g1.vertices())) != sorted(map(g2.degree, g2.vertices())):
        return None
    n = g1.n
    # most-constrained-first: descending degree
    order = sorted(g1.vertices(), key=lambda v: -g1.degree(v))
    images: dict[int, int] = {}
    used = [False] * n

    def backtrack(i: int) -> bool:
        if i == n:
            return True
        u = order[i]
        for w in range(n):
            if used[w] or g1.degree(u) != g2.degree(w):
                continue
            ok = True
            for v, x in images.items():
                if g1.has_edge(u, v) != g2.has_edge(w, x):
                    ok = False
                    break
            if not ok:
                continue
            images[u] = w
            used[w] = True
            if backtrack(i + 1):
                return True
            del images[u]
            used[w] = False
        return False

    if not backtrack(0):
        return None
    return Perm([images[v] for v in range(n)])


def iter_automorphisms(g: Graph, guard: int = BRUTE_GUARD) -> Iterator[Perm]:
    """All automorphisms of g, by exhaustive backtracking."""
    if g.n > guard:
        raise TooLarge(f"brute force guarded at n <= {guard}")
    n = g.n
    order = sorted(g.vertices(), key=lambda v: -g.degree(v))
    images: dict[int, int] = {}
    used = [False] * n

    def backtrack(i: int) -> Iterator[Perm]:
        if i == n:
            yield Perm([images[v] for v in range(n)])
            return
        u = order[i]
        for w in range(n):
            if used[w] or g.degree(u) != g.degree(w):
                continue
            if any(g.has_edge(u, v) != g.has_edge(w, x) for v, x in images.items()):
                continue
            images[u] = w
            used[w] = True
            yield from backtrack(i + 1)
            del images[u]
            used[w] = False

    yield from backtrack(0)


def brute_force_autgroup(g: Graph, guard: int = BRUTE_GUARD) -> PermGroup:
    """Full automorphism group, generated from every automorphism found."""
    return PermGroup(g.n, list(iter_automorphisms(g, guard)))


@dataclass(frozen=True)
class TRepresentation:
    """Host tree (a subdivision of a d-leaf tree) plus one connected model per vertex."""

    tree_n: int
    tree_edges: tuple[tuple[int, int], ...]
    models: tuple[frozenset[int], ...]

    def host_tree(self) -> Graph:
        return Graph(self.tree_n, self.tree_edges)

    def to_json_dict(self) -> dict:
        return {
            "tree_edges": [list(e) for e in self.tree_edges],
            "models": [sorted(m) for m in self.models],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TRepresentation":
        edges = tuple((int(a), int(b)) for a, b in data["tree_edges"])
        tree_n = max((max(e) for e in edges), default=-1) + 1
        models = tuple(frozenset(int(x) for x in m) for m in data["models"])
        tree_n = max(tree_n, max((max(m, default=-1) for m in models), default=-1) + 1)
        return cls(tree_n, edges, models)


def verify_t_representation(g: Graph, rep: TRepresentation) -> bool:
    """Check the models are nonempty connected subtrees whose intersection graph is g."""
    tree = rep.host_tree()
    if len(rep.models) != g.n:
        return False
    # host must be a tree
    if tree.n == 0 or tree.m != tree.n - 1 or not tree.is_connected():
        return False
    for model in rep.models:
        if not model:
            return False
        start = min(model)
        if tree.connected_in(model, start) != set(model):
            return False
    for u in range(g.n):
        for v in range(u + 1, g.n):
            touches = bool(rep.models[u] & rep.models[v])
            if touches != g.has_edge(u, v):
                return False
    return True


def _labeled_trees(n: int) -> Iterator[Graph]:
    """All labeled trees on n vertices via Prüfer sequences."""
    if n == 1:
        yield Graph(1, [])
        return
    if n == 2:
        yield Graph(2, [(0, 1)])
        return

    def from_pruefer(seq: tuple[int, ...]) -> Graph:
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        seq_list = list(seq)
        leaves = sorted(v for v in range(n) if degree[v] == 1)
        for x in seq_list:
            leaf = leaves.pop(0)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[x] -= 1
            if degree[x] == 1:
                # keep the leaf pool sorted for determinism
                lo = 0
                while lo < len(leaves) and leaves[lo] < x:
                    lo += 1
                leaves.insert(lo, x)
        u, v = leaves
        edges.append((min(u, v), max(u, v)))
        return Graph(n, edges)

    for seq in _product_range(n, n - 2):
        yield from_pruefer(seq)


def _product_range(base: int, repeat: int) -> Iterator[tuple[int, ...]]:
    if repeat == 0:
        yield ()
        return
    for rest in _product_range(base, repeat - 1):
        for x in range(base):
            yield rest + (x,)


def tree_catalog(d: int) -> list[Graph]:
    """All trees with exactly d leaves and no degree-2 vertices, up to isomorphism.

    Such trees have at most 2d-2 vertices; the catalog is deduplicated by
    brute-force isomorphism and cached.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if d in _TREE_CATALOG_CACHE:
        return _TREE_CATALOG_CACHE[d]
    found: list[Graph] = []
    for n in range(2, 2 * d - 1):
        for t in _labeled_trees(n):
            degs = [t.degree(v) for v in range(n)]
            if sum(1 for x in degs if x == 1) != d:
                continue
            if any(x == 2 for x in degs):
                continue
            if any(brute_force_isomorphism(t, s) is not None for s in found if s.n == n):
                continue
            found.append(t)
    _TREE_CATALOG_CACHE[d] = found
    return found


_TREE_CATALOG_CACHE: dict[int, list[Graph]] = {}


def random_tree(n: int, rng: random.Random) -> Graph:
    """Uniform-ish random labeled tree (random Prüfer sequence)."""
    if n <= 2:
        return Graph(n, [(0, 1)] if n == 2 else [])
    seq = tuple(rng.randrange(n) for _ in range(n - 2))
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = sorted(leaves)
    edges.append((u, v))
    return Graph(n, edges)


def random_t_graph(d: int, n: int, seed: int) -> tuple[Graph, TRepresentation]:
    """Certified random T-graph: n connected subtrees of a random subdivision.

    Deterministic per (d, n, seed).
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if n < 1:
        raise ValueError("need n >= 1")
    rng = random.Random(f"tgraph-{d}-{n}-{seed}")
    skeleton = rng.choice(tree_catalog(d))
    # subdivide each edge 0..3 times
    nodes = skeleton.n
    edges: list[tuple[int, int]] = []
    for u, v in skeleton.edges:
        chain = [u] + [nodes + i for i in range(rng.randrange(4))] + [v]
        nodes += len(chain) - 2
        edges += [(min(a, b), max(a, b)) for a, b in zip(chain, chain[1:])]
    host = Graph(nodes, edges)
    # grow n connected subtrees by randomized BFS
    models = []
    for _ in range(n):
        size = rng.randint(1, max(1, nodes * 2 // 3))
        start = rng.randrange(nodes)
        model = {start}
        frontier = [start]
        while frontier and len(model) < size:
            u = frontier.pop(rng.randrange(len(frontier)))
            for w in sorted(host.adj[u]):
                if w not in model and rng.random() < 0.7:
                    model.add(w)
                    frontier.append(w)
            if not frontier and len(model) < size:
                boundary = sorted(
                    w for u2 in model for w in host.adj[u2] if w not in model
                )
                if not boundary:
                    break
                pick = rng.choice(boundary)
                model.add(pick)
                frontier.append(pick)
        models.append(frozenset(model))
    shuffle = list(range(n))
    rng.shuffle(shuffle)
    models = [models[i] for i in shuffle]
    g_edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if models[u] & models[v]
    ]
    graph = Graph(n, g_edges)
    rep = TRepresentation(nodes, tuple(host.edges), tuple(models))
    assert verify_t_representation(graph, rep)
    return graph, rep


def random_relabel(g: Graph, seed: int) -> tuple[Graph, Perm]:
    """Uniformly random vertex relabeling; returns the new graph and the permutation used."""
    rng = random.Random(f"relabel-{seed}")
    images = list(range(g.n))
    rng.shuffle(images)
    p = Perm(images)
    return g.relabel(images), p


def tree_path_contains(tree: Graph, u: int, v: int, w: int) -> bool:
    """Whether w lies on the unique u-v path of a tree."""
    dist = _tree_dists(tree, u)
    dist_w = _tree_dists(tree, w)
    return dist[w] + dist_w[v] == dist[v]


def _tree_dists(tree: Graph, s: int) -> list[int]:
    dist = [-1] * tree.n
    dist[s] = 0
    queue = [s]
    while queue:
        u = queue.pop(0)
        for x in tree.adj[u]:
            if dist[x] == -1:
                dist[x] = dist[u] + 1
                queue.append(x)
    return dist
