"""Self-test corpus: scaled-down or full runs of the acceptance checks."""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations


from .chordal import maximal_cliques
from .decompose import canonical_decomposition
from .graph import Graph, parse_graph_text
from .harness import (
    brute_force_autgroup,
    brute_force_isomorphism,
    random_relabel,
    random_t_graph,
    verify_t_representation,
)
from .interval import MarkedIntervalGraph, brute_marked_autgroup, build_pq_tree, marked_action_group
from .iso import ISOMORPHIC, NOT_T_GRAPH, combine, decomposition_autgroup, is_isomorphic, project_automorphism
from .perm import MembershipPredicate, Perm, PermGroup, build_group, symmetric_on_classes, tower_of_groups
from .setfamily import SetFamily, family_autgroup, is_family_automorphism, max_antichain_size


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


ANALYZE_FIXTURE = (
    "7 6\n0 1\n1 2\n0 3\n3 4\n0 5\n5 6\n",  # subdivided claw
    {"chordal": True, "cliques": 6, "separators": 4, "leaf_cliques": 3},
)


def _fixture_check(fixtures) -> CheckResult:
    text, expected = fixtures
    g = parse_graph_text(text)
    from .chordal import is_chordal, leaf_cliques, minimal_separators

    got = {
        "chordal": is_chordal(g) is not None,
        "cliques": len(maximal_cliques(g)) if is_chordal(g) else 0,
        "separators": len(minimal_separators(g)) if is_chordal(g) else 0,
        "leaf_cliques": len(leaf_cliques(g)) if is_chordal(g) else 0,
    }
    ok = got == expected
    return CheckResult("fixture-analysis", ok, f"got {got}" if not ok else "fixture matches")


def _oracle_pairs(count: int) -> CheckResult:
    import random

    bad = 0
    not_t = 0
    for seed in range(count):
        rng = random.Random(seed)
        d = [2, 3, 4][seed % 3]
        n = rng.randint(1, 10)
        g1, _ = random_t_graph(d, n, 31000 + seed)
        if seed % 2 == 0:
            g2, _ = random_relabel(g1, seed)
        else:
            g2, _ = random_t_graph(d, n, 32000 + seed)
        verdict = is_isomorphic(g1, g2, d)
        if verdict.kind == NOT_T_GRAPH:
            not_t += 1
            continue
        expected = brute_force_isomorphism(g1, g2) is not None
        if (verdict.kind == ISOMORPHIC) != expected:
            bad += 1
        if verdict.kind == ISOMORPHIC:
            if not all(g2.has_edge(verdict.witness[u], verdict.witness[v]) for u, v in g1.edges):
                bad += 1
    ok = bad == 0 and not_t == 0
    return CheckResult("oracle-agreement", ok, f"{count} pairs, {bad} disagreements, {not_t} spurious rejections")


def _canonicity(count: int) -> CheckResult:
    import random

    bad = 0
    for seed in range(count):
        rng = random.Random(seed)
        d = [2, 3, 4][seed % 3]
        n = rng.randint(2, 10)
        g, _ = random_t_graph(d, n, 33000 + seed)
        h, p = random_relabel(g, seed)
        dec_g = canonical_decomposition(g, d)
        dec_h = canonical_decomposition(h, d)
        if dec_g.depth != dec_h.depth:
            bad += 1
            continue
        for lv_g, lv_h in zip(dec_g.levels, dec_h.levels):
            if {frozenset(p(v) for v in f.vertices) for f in lv_g} != {f.vertices for f in lv_h}:
                bad += 1
                break
    return CheckResult("canonicity", bad == 0, f"{count} relabelings, {bad} mismatches")


def _bounds(count: int) -> CheckResult:
    import random

    bad = 0
    for seed in range(count):
        rng = random.Random(seed)
        d = [2, 3, 4][seed % 3]
        n = rng.randint(2, 12)
        g, rep = random_t_graph(d, n, 34000 + seed)
        if not verify_t_representation(g, rep):
            bad += 1
            continue
        try:
            dec = canonical_decomposition(g, d)
        except Exception:
            bad += 1
            continue
        for level in dec.levels[:-1]:
            if not (0 < len(level) <= 2 * d):
                bad += 1
                break
    return CheckResult("certified-bounds", bad == 0, f"{count} certified graphs, {bad} violations")


def _projection(count: int) -> CheckResult:
    import random

    bad = 0
    for seed in range(count):
        rng = random.Random(seed)
        d = [2, 3][seed % 2]
        n = rng.randint(1, 4)
        g, _ = random_t_graph(d, n, 35000 + seed)
        dec = canonical_decomposition(g, d)
        cd = combine(g, dec, g, dec)
        group = decomposition_autgroup(cd)
        aut = brute_force_autgroup(cd.h)
        projected = PermGroup(cd.degree, [project_automorphism(cd, s) for s in aut.generators])
        if projected.order() != group.order():
            bad += 1
            continue
        if not all(group.contains(x) for x in projected.generators):
            bad += 1
    return CheckResult("projection-equivalence", bad == 0, f"{count} instances, {bad} mismatches")


def _group_engine() -> CheckResult:
    from .perm import fhl_subgroup

    bad = 0

    def s_n(n):
        return build_group(n, [Perm.from_cycles(n, [(0, 1)]), Perm.from_cycles(n, [tuple(range(n))])])

    sub = fhl_subgroup(s_n(4), MembershipPredicate(lambda p: p(0) == 0, 4, "fix0"))
    want = [p for p in permutations(range(4)) if p[0] == 0]
    if sub.order() != len(want) or not all(sub.contains(Perm(p)) for p in want):
        bad += 1
    # bounded-color-multiplicity demo on the 2-colored 6-cycle
    cycle = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
    g0 = symmetric_on_classes([[0, 2, 4], [1, 3, 5]], degree=6)
    preds = [
        MembershipPredicate(
            lambda p: all(cycle.has_edge(p(u), p(v)) for u, v in cycle.edges), 36, "edges"
        )
    ]
    got = tower_of_groups(g0, preds)
    brute = [
        p
        for p in permutations(range(6))
        if all(p[v] % 2 == v % 2 for v in range(6))
        and all(cycle.has_edge(p[u], p[v]) for u, v in cycle.edges)
    ]
    if got.order() != len(brute):
        bad += 1
    return CheckResult("group-engine", bad == 0, f"{bad} fixture mismatches")


def _set_families(count: int) -> CheckResult:
    import random

    bad = 0
    for seed in range(count):
        rng = random.Random(seed)
        ground = rng.randint(1, 6)
        m = rng.randint(1, 4)
        fam = SetFamily(ground, [[z for z in range(ground) if rng.random() < 0.5] for _ in range(m)])
        images = list(range(m))
        rng.shuffle(images)
        p = Perm(images)
        got = is_family_automorphism(fam, p)
        want = False
        for zeta in permutations(range(ground)):
            if all(
                frozenset(zeta[z] for z in fam.sets[i]) == fam.sets[p(i)] for i in range(m)
            ):
                want = True
                break
        if got != want:
            bad += 1
        if seed % 5 == 0 and m <= 6:
            group = family_autgroup(fam, max(max_antichain_size(fam), 1))
            exhaustive = sum(
                1
                for images2 in permutations(range(m))
                if is_family_automorphism(fam, Perm(images2))
            )
            if group.order() != exhaustive:
                bad += 1
    return CheckResult("set-families", bad == 0, f"{count} cases, {bad} mismatches")


def _interval_corpus(pq_count: int, marked_count: int) -> CheckResult:
    import random

    bad = 0
    for seed in range(pq_count):
        rng = random.Random(seed)
        n = rng.randint(2, 8)
        g, _ = random_t_graph(rng.choice([2, 3]), n, 36000 + seed)
        comps = g.components()
        sub, _ = g.subgraph(comps[0])
        if len(maximal_cliques(sub)) > 7:
            continue
        tree = build_pq_tree(sub)
        cliques = maximal_cliques(sub)
        rows = [frozenset(i for i, c in enumerate(cliques) if v in c) for v in sub.vertices()]
        feasible = False
        for order in permutations(range(len(cliques))):
            pos = {c: i for i, c in enumerate(order)}
            if all(
                sorted(pos[c] for c in r) == list(range(min(pos[c] for c in r), max(pos[c] for c in r) + 1))
                for r in rows
            ):
                feasible = True
                break
        if (tree is not None) != feasible:
            bad += 1
    for seed in range(marked_count):
        rng = random.Random(seed)
        n = rng.randint(2, 9)
        g = None
        for s in range(37000 + seed, 37600 + seed):
            cand, _ = random_t_graph(2, n, s)
            if cand.is_connected():
                g = cand
                break
        if g is None:
            continue
        cliques = maximal_cliques(g)
        fams = []
        for _ in range(rng.randint(1, 3)):
            fam = []
            for _ in range(rng.randint(0, 3)):
                c = rng.choice(cliques)
                fam.append(frozenset(rng.sample(list(c), rng.randint(1, len(c)))))
            fams.append(tuple(fam))
        m = MarkedIntervalGraph(g, fams)
        got = marked_action_group(m)
        want = brute_marked_autgroup(m)
        if got.order() != want.order() or not all(got.contains(x) for x in want.generators):
            bad += 1
    return CheckResult("interval-pq", bad == 0, f"{pq_count}+{marked_count} cases, {bad} mismatches")


def _scaling() -> CheckResult:
    g1, _ = random_t_graph(4, 200, 1)
    g2, _ = random_relabel(g1, 7)
    start = time.time()
    verdict = is_isomorphic(g1, g2, 4)
    elapsed = time.time() - start
    ok = verdict.kind == ISOMORPHIC and elapsed < 60
    return CheckResult("scaling-smoke", ok, f"n=200 d=4 in {elapsed:.1f}s -> {verdict.kind}")


PROFILES = {
    "quick": {"pairs": 40, "canon": 20, "bounds": 20, "proj": 6, "families": 60, "pq": 40, "marked": 20, "scaling": False},
    "full": {"pairs": 500, "canon": 200, "bounds": 200, "proj": 50, "families": 300, "pq": 200, "marked": 100, "scaling": True},
}


def run_selftest(profile: str, fixtures=ANALYZE_FIXTURE) -> list[CheckResult]:
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r} (expected quick or full)")
    cfg = PROFILES[profile]
    results = [
        _fixture_check(fixtures),
        _group_engine(),
        _set_families(cfg["families"]),
        _interval_corpus(cfg["pq"], cfg["marked"]),
        _canonicity(cfg["canon"]),
        _bounds(cfg["bounds"]),
        _projection(cfg["proj"]),
        _oracle_pairs(cfg["pairs"]),
    ]
    if cfg["scaling"]:
        results.append(_scaling())
    return results
