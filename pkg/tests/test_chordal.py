import random
from itertools import combinations

import pytest

from tgraphs.chordal import (
    INDISPENSABLE,
    OPTIONAL,
    UNNECESSARY,
    classify_edges,
    clique_tree,
    is_chordal,
    leaf_cliques,
    maximal_cliques,
    minimal_separators,
    simplicial_vertices,
    weighted_clique_graph,
)
from tgraphs.errors import Disconnected, NotChordal
from tgraphs.graph import Graph, complete_graph, cycle_graph, path_graph, separates, star_graph
from tgraphs.harness import random_t_graph, random_tree, tree_path_contains


def brute_is_chordal(g):
    """No chordless (induced) cycle of length >= 4."""
    for size in range(4, g.n + 1):
        for sub in combinations(range(g.n), size):
            degs = [sum(1 for w in sub if g.has_edge(v, w)) for v in sub]
            if any(d != 2 for d in degs):
                continue
            allowed = frozenset(sub)
            if g.connected_in(allowed, sub[0]) == set(sub):
                return False
    return True


def spanning_trees(k, edges):
    """All spanning trees of a graph on k nodes given weighted edges (i, j, w)."""
    for chosen in combinations(edges, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i, j, _w in chosen:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            yield chosen


def max_weight_spanning_trees(wcg):
    k = len(wcg.nodes)
    if k == 1:
        return [()]
    trees = list(spanning_trees(k, wcg.edges))
    best = max(sum(w for _i, _j, w in t) for t in trees)
    return [t for t in trees if sum(w for _i, _j, w in t) == best]


def random_chordal(n, seed):
    """Random chordal graph: take a random T-graph and keep it if connected."""
    for s in range(seed, seed + 50):
        g, _rep = random_t_graph(3, n, s)
        if g.is_connected():
            return g
    raise AssertionError("no connected instance found")


class TestIsChordal:
    def test_c4_is_not_chordal(self):
        assert is_chordal(cycle_graph(4)) is None

    def test_k4_is_chordal(self):
        peo = is_chordal(complete_graph(4))
        assert peo is not None
        assert sorted(peo.order) == [0, 1, 2, 3]

    def test_generator_output_is_chordal(self):
        g, _ = random_t_graph(3, 12, 1)
        assert is_chordal(g) is not None
        assert brute_is_chordal(g)

    def test_peo_invariant(self):
        g = random_chordal(9, 3)
        order = is_chordal(g).order
        pos = {v: i for i, v in enumerate(order)}
        for v in g.vertices():
            later = [w for w in g.adj[v] if pos[w] > pos[v]]
            assert g.is_clique(later)

    @pytest.mark.parametrize("seed", range(30))
    def test_agrees_with_chordless_cycle_scan(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45]
        g = Graph(n, edges)
        assert (is_chordal(g) is not None) == brute_is_chordal(g)


class TestSimplicial:
    def test_path(self):
        assert simplicial_vertices(path_graph(3)) == {0, 2}

    def test_complete(self):
        assert simplicial_vertices(complete_graph(5)) == set(range(5))

    def test_c4(self):
        assert simplicial_vertices(cycle_graph(4)) == frozenset()


class TestMaximalCliques:
    def test_path(self):
        assert maximal_cliques(path_graph(3)) == [(0, 1), (1, 2)]

    def test_k4(self):
        assert maximal_cliques(complete_graph(4)) == [(0, 1, 2, 3)]

    def test_claw(self):
        assert maximal_cliques(star_graph(3)) == [(0, 1), (0, 2), (0, 3)]

    def test_not_chordal_raises(self):
        with pytest.raises(NotChordal):
            maximal_cliques(cycle_graph(5))

    @pytest.mark.parametrize("seed", range(10))
    def test_count_and_cover(self, seed):
        g = random_chordal(8, 100 + seed)
        cliques = maximal_cliques(g)
        assert len(cliques) <= g.n
        assert set().union(*map(set, cliques)) == set(range(g.n))
        for c in cliques:
            assert g.is_clique(c)
        # maximality against brute enumeration
        for size in range(1, g.n + 1):
            for sub in combinations(range(g.n), size):
                if not g.is_clique(sub):
                    continue
                if any(all(x in set(c) for x in sub) and len(c) > size for c in cliques):
                    continue
                assert sub in cliques


class TestWeightedCliqueGraph:
    def test_path4(self):
        wcg = weighted_clique_graph(path_graph(4))
        assert wcg.nodes == ((0, 1), (1, 2), (2, 3))
        assert wcg.edges == ((0, 1, 1), (1, 2, 1))

    def test_claw_triangle(self):
        wcg = weighted_clique_graph(star_graph(3))
        assert len(wcg.edges) == 3
        assert all(w == 1 for _i, _j, w in wcg.edges)

    def test_weights_are_intersections(self):
        g = random_chordal(9, 7)
        wcg = weighted_clique_graph(g)
        for i, j, w in wcg.edges:
            assert w == len(set(wcg.nodes[i]) & set(wcg.nodes[j]))


class TestCliqueTree:
    def test_path4_unique(self):
        t = clique_tree(path_graph(4))
        assert t.edges == ((0, 1), (1, 2))

    def test_claw_lexicographic(self):
        t = clique_tree(star_graph(3))
        assert t.edges == ((0, 1), (0, 2))

    def test_disconnected_raises(self):
        with pytest.raises(Disconnected):
            clique_tree(Graph(4, [(0, 1), (2, 3)]))

    @pytest.mark.parametrize("seed", range(8))
    def test_max_weight_and_subtree_property(self, seed):
        g = random_chordal(7, 200 + seed)
        wcg = weighted_clique_graph(g)
        if len(wcg.nodes) > 7:
            pytest.skip("keep brute enumeration small")
        t = clique_tree(g)
        weights = {(i, j): w for i, j, w in wcg.edges}
        got = sum(weights[e] for e in t.edges)
        best = max(
            sum(w for _i, _j, w in tree) for tree in spanning_trees(len(wcg.nodes), wcg.edges)
        ) if len(wcg.nodes) > 1 else 0
        assert got == best
        # clique-intersection property: cliques containing v form a subtree
        adj = {i: set() for i in range(len(t.nodes))}
        for i, j in t.edges:
            adj[i].add(j)
            adj[j].add(i)
        for v in g.vertices():
            holder = [i for i, c in enumerate(t.nodes) if v in c]
            seen = {holder[0]}
            stack = [holder[0]]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in set(holder) and y not in seen:
                        seen.add(y)
                        stack.append(y)
            assert seen == set(holder)


class TestClassifyEdges:
    def test_path4_all_indispensable(self):
        wcg = weighted_clique_graph(path_graph(4))
        classes = classify_edges(wcg)
        assert all(c == INDISPENSABLE for c in classes.values())

    def test_claw_all_optional(self):
        wcg = weighted_clique_graph(star_graph(3))
        classes = classify_edges(wcg)
        assert all(c == OPTIONAL for c in classes.values())

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_spanning_tree_enumeration(self, seed):
        g = random_chordal(7, 300 + seed)
        wcg = weighted_clique_graph(g)
        if not (2 <= len(wcg.nodes) <= 7):
            pytest.skip("keep brute enumeration small")
        classes = classify_edges(wcg)
        trees = max_weight_spanning_trees(wcg)
        for i, j, w in wcg.edges:
            appearances = sum(1 for t in trees if (i, j, w) in t)
            if appearances == len(trees):
                expected = INDISPENSABLE
            elif appearances == 0:
                expected = UNNECESSARY
            else:
                expected = OPTIONAL
            assert classes[(i, j)] == expected, (wcg.nodes, (i, j, w))


class TestLeafCliques:
    def test_path4_endpoints(self):
        assert leaf_cliques(path_graph(4)) == [(0, 1), (2, 3)]

    def test_claw_all(self):
        assert leaf_cliques(star_graph(3)) == [(0, 1), (0, 2), (0, 3)]

    def test_single_clique(self):
        assert leaf_cliques(complete_graph(4)) == [(0, 1, 2, 3)]

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_leaf_of_some_tree(self, seed):
        g = random_chordal(7, 400 + seed)
        wcg = weighted_clique_graph(g)
        if not (2 <= len(wcg.nodes) <= 7):
            pytest.skip("keep brute enumeration small")
        got = set(leaf_cliques(g))
        expect = set()
        k = len(wcg.nodes)
        for tree in max_weight_spanning_trees(wcg):
            deg = [0] * k
            for i, j, _w in tree:
                deg[i] += 1
                deg[j] += 1
            for i in range(k):
                if deg[i] <= 1:
                    expect.add(wcg.nodes[i])
        assert got == expect


def brute_minimal_separators(g):
    out = set()
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v):
                continue
            others = [x for x in range(g.n) if x not in (u, v)]
            for size in range(len(others) + 1):
                for s in combinations(others, size):
                    if not separates(g, s, [u], [v]):
                        continue
                    if any(separates(g, set(s) - {x}, [u], [v]) for x in s):
                        continue
                    out.add(tuple(sorted(s)))
    return out


class TestMinimalSeparators:
    def test_path3(self):
        seps = minimal_separators(path_graph(3))
        assert [s.vertices for s in seps] == [(1,)]

    def test_complete(self):
        assert minimal_separators(complete_graph(5)) == []

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_exhaustive_scan(self, seed):
        g = random_chordal(8, 500 + seed)
        got = {s.vertices for s in minimal_separators(g)}
        assert got == brute_minimal_separators(g)
        for s in minimal_separators(g):
            assert g.is_clique(s.vertices)


class TestSeparates:
    def test_path(self):
        g = path_graph(3)
        assert separates(g, [1], [0], [2])

    def test_triangle(self):
        g = complete_graph(3)
        assert not separates(g, [0], [1], [2])

    def test_vacuous(self):
        g = path_graph(4)
        assert separates(g, [0, 1], [0], [3])


class TestMarkedTreeObservation:
    """Any d+1 marked vertices of a d-leaf tree put 3 marks on one path."""

    @pytest.mark.parametrize("seed", range(25))
    def test_some_path_has_three_marks(self, seed):
        rng = random.Random(seed)
        n = rng.randint(3, 10)
        tree = random_tree(n, rng)
        d = sum(1 for v in range(n) if tree.degree(v) == 1)
        if d + 1 > n:
            pytest.skip("cannot mark d+1 distinct vertices")
        marks = rng.sample(range(n), d + 1)
        found = any(
            tree_path_contains(tree, a, b, c)
            for a, b, c in combinations(marks, 3)
        ) or any(
            tree_path_contains(tree, a, c, b) or tree_path_contains(tree, b, c, a)
            for a, b, c in combinations(marks, 3)
        )
        assert found
