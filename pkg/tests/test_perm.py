import random
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from tgraphs.errors import DomainMismatch, IndexBoundExceeded, NotAPartition, NotClosed
from tgraphs.graph import Graph, complete_graph, path_graph
from tgraphs.harness import brute_force_autgroup
from tgraphs.perm import (
    MembershipPredicate,
    Perm,
    PermGroup,
    build_group,
    direct_product,
    exists_block_swap,
    fhl_subgroup,
    find_block_swap,
    find_with_images,
    format_perm,
    parse_perm,
    symmetric_on_classes,
    tower_of_groups,
)


def closure(degree, gens, limit=20000):
    """Exhaustive closure of a generating set (small groups only)."""
    ident = Perm.identity(degree)
    seen = {ident.images: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = p * g
                if q.images not in seen:
                    seen[q.images] = q
                    nxt.append(q)
        frontier = nxt
        assert len(seen) <= limit
    return list(seen.values())


def random_perm(degree, rng):
    images = list(range(degree))
    rng.shuffle(images)
    return Perm(images)


perms5 = st.permutations(range(5)).map(Perm)


class TestPerm:
    def test_composition_order(self):
        p = Perm([1, 0, 2])  # swap 0,1
        q = Perm([0, 2, 1])  # swap 1,2
        assert (p * q)(0) == q(p(0)) == 2

    @given(perms5, perms5, perms5)
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(perms5)
    def test_inverse(self, p):
        assert (p * p.inverse()).is_identity()
        assert (p.inverse() * p).is_identity()

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            Perm([0, 0, 1])

    def test_serialization(self):
        p = Perm([2, 0, 1])
        assert format_perm(p) == "[2 0 1]"
        assert parse_perm("[2 0 1]") == p


class TestBuildGroup:
    def test_s3(self):
        g = build_group(3, [Perm([1, 0, 2]), Perm([1, 2, 0])])
        assert g.order() == 6

    def test_trivial(self):
        assert build_group(4, []).order() == 1

    def test_cyclic5(self):
        g = build_group(5, [Perm([1, 2, 3, 4, 0])])
        assert g.order() == 5

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatch):
            build_group(3, [Perm([1, 0])])

    @pytest.mark.parametrize("seed", range(20))
    def test_order_matches_closure(self, seed):
        rng = random.Random(seed)
        degree = rng.randint(2, 7)
        gens = [random_perm(degree, rng) for _ in range(rng.randint(1, 3))]
        group = build_group(degree, gens)
        assert group.order() == len(closure(degree, gens))

    def test_elements_enumeration(self):
        gens = [Perm([1, 0, 2, 3]), Perm([0, 2, 1, 3])]
        group = build_group(4, gens)
        elems = set(p.images for p in group.elements())
        assert len(elems) == group.order() == 6

    def test_contains_identity_always(self):
        group = build_group(4, [Perm([1, 2, 3, 0])])
        assert group.contains(Perm.identity(4))
        for g in group.generators:
            assert group.contains(g.inverse())


class TestContains:
    def test_s3_contains_transposition(self):
        g = build_group(3, [Perm([1, 0, 2]), Perm([1, 2, 0])])
        assert g.contains(Perm([2, 1, 0]))

    def test_cyclic_does_not_contain_swap(self):
        g = build_group(5, [Perm([1, 2, 3, 4, 0])])
        assert not g.contains(Perm([1, 0, 2, 3, 4]))

    @pytest.mark.parametrize("seed", range(10))
    def test_random_word_is_member(self, seed):
        rng = random.Random(seed)
        gens = [random_perm(6, rng) for _ in range(2)]
        group = build_group(6, gens)
        word = Perm.identity(6)
        for _ in range(rng.randint(1, 8)):
            word = word * rng.choice(gens)
        assert group.contains(word)


def s_n(n):
    return build_group(n, [Perm.from_cycles(n, [(0, 1)]), Perm.from_cycles(n, [tuple(range(n))])])


class TestFhlSubgroup:
    def test_point_stabilizer(self):
        pred = MembershipPredicate(lambda p: p(0) == 0, 4, "fixes-0")
        sub = fhl_subgroup(s_n(4), pred)
        assert sub.order() == 6

    def test_alternating(self):
        def is_even(p):
            seen = set()
            parity = 0
            for i in range(p.degree):
                if i in seen:
                    continue
                j, length = i, 0
                while j not in seen:
                    seen.add(j)
                    j = p(j)
                    length += 1
                parity ^= (length - 1) & 1
            return parity == 0

        sub = fhl_subgroup(s_n(4), MembershipPredicate(is_even, 2, "even"))
        assert sub.order() == 12

    def test_partition_preserving(self):
        blocks = [frozenset({0, 1}), frozenset({2, 3}), frozenset({4})]

        def preserves(p):
            return {p.image_of_set(b) for b in blocks} == set(blocks)

        sub = fhl_subgroup(s_n(5), MembershipPredicate(preserves, 15, "blocks"))
        expected = [p for p in permutations(range(5)) if preserves(Perm(p))]
        assert sub.order() == len(expected) == 8
        for p in expected:
            assert sub.contains(Perm(p))

    def test_index_bound_exceeded(self):
        pred = MembershipPredicate(lambda p: p(0) == 0, 3, "fixes-0")
        with pytest.raises(IndexBoundExceeded):
            fhl_subgroup(s_n(4), pred)

    def test_rejecting_identity_raises(self):
        pred = MembershipPredicate(lambda p: not p.is_identity(), 4, "bogus")
        with pytest.raises(NotClosed):
            fhl_subgroup(s_n(3), pred)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_exhaustive_filter(self, seed):
        rng = random.Random(seed)
        gens = [random_perm(6, rng) for _ in range(2)]
        group = build_group(6, gens)
        fixed = rng.randrange(6)
        pred = MembershipPredicate(lambda p: p(fixed) == fixed, group.order(), "stab")
        sub = fhl_subgroup(group, pred)
        want = [p for p in group.elements() if p(fixed) == fixed]
        assert sub.order() == len(want)
        assert all(sub.contains(p) for p in want)


class TestTower:
    def test_pointwise_stabilizer(self):
        preds = [
            MembershipPredicate(lambda p: p(0) == 0, 4, "fix0"),
            MembershipPredicate(lambda p: p(1) == 1, 3, "fix1"),
        ]
        assert tower_of_groups(s_n(4), preds).order() == 2

    def test_empty_tower(self):
        g = s_n(4)
        assert tower_of_groups(g, []).order() == g.order()

    def test_colored_cycle_demo(self):
        """Bounded color multiplicity: color classes of a 2-colored 6-cycle."""
        cycle = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
        colors = [[0, 2, 4], [1, 3, 5]]
        g0 = symmetric_on_classes(colors, degree=6)
        assert g0.order() == 36

        def preserves_edges(p):
            return all(cycle.has_edge(p(u), p(v)) for u, v in cycle.edges)

        preds = [MembershipPredicate(preserves_edges, 36, "edges-12")]
        got = tower_of_groups(g0, preds)
        brute = [
            p
            for p in permutations(range(6))
            if all(Perm(p)(v) % 2 == v % 2 for v in range(6))
            and all(cycle.has_edge(p[u], p[v]) for u, v in cycle.edges)
        ]
        assert got.order() == len(brute) == 6


class TestProducts:
    def test_s2_x_s2(self):
        s2 = s_n(2)
        assert direct_product([s2, s2]).order() == 4

    def test_s3_x_trivial(self):
        assert direct_product([s_n(3), build_group(2, [])]).order() == 6

    @pytest.mark.parametrize("seed", range(5))
    def test_order_is_product(self, seed):
        rng = random.Random(seed)
        a = build_group(4, [random_perm(4, rng)])
        b = build_group(3, [random_perm(3, rng)])
        assert direct_product([a, b]).order() == a.order() * b.order()


class TestSymmetricOnClasses:
    def test_one_class(self):
        assert symmetric_on_classes([[0, 1, 2]]).order() == 6

    def test_singletons(self):
        assert symmetric_on_classes([[0], [1]]).order() == 1

    def test_mixed(self):
        assert symmetric_on_classes([[0, 1], [2, 3, 4]]).order() == 12

    def test_not_a_partition(self):
        with pytest.raises(NotAPartition):
            symmetric_on_classes([[0, 1], [1, 2]])
        with pytest.raises(NotAPartition):
            symmetric_on_classes([[0], [2]])


class TestBlockSwap:
    def test_simple_swap(self):
        group = build_group(4, [Perm([2, 3, 0, 1])])
        assert exists_block_swap(group, {0, 1}, {2, 3})

    def test_trivial_group(self):
        assert not exists_block_swap(build_group(2, []), {0}, {1})

    def test_k3_plus_p3_components_do_not_swap(self):
        g = complete_graph(3).union_disjoint(path_graph(3))
        aut = brute_force_autgroup(g)
        assert not exists_block_swap(aut, {0, 1, 2}, {3, 4, 5})

    def test_twin_components_swap(self):
        g = path_graph(3).union_disjoint(path_graph(3))
        aut = brute_force_autgroup(g)
        swap = find_block_swap(aut, {0, 1, 2}, {3, 4, 5})
        assert swap is not None
        assert swap.image_of_set({0, 1, 2}) == {3, 4, 5}


class TestFindWithImages:
    def test_transporter(self):
        group = s_n(5)
        p = find_with_images(group, {0: 3, 1: 2})
        assert p is not None and p(0) == 3 and p(1) == 2

    def test_infeasible(self):
        group = build_group(4, [Perm([1, 2, 3, 0])])
        assert find_with_images(group, {0: 1, 1: 0}) is None


class TestSerialization:
    def test_group_json_roundtrip(self):
        g = s_n(4)
        h = PermGroup.from_json(4, g.to_json())
        assert h.order() == g.order()
