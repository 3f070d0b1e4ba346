"""Interval graphs: PQ-trees, clean-subtree reduction, marked-set automorphisms.

The PQ-tree of a connected interval graph encodes all of its clique paths:
P-node children reorder freely, Q-node children only reverse. Vertices are
assigned to nodes MPQ-style (each vertex covers a full P-subtree, a
consecutive run of at least two Q-children, or a single leaf), which is what
the marked-set machinery consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence

from .chordal import is_chordal, maximal_cliques
from .errors import IndexBoundExceeded, TooLarge
from .graph import Graph
from .perm import Perm, PermGroup, find_block_swap, find_element
from .setfamily import SetFamily, family_autgroup, max_antichain_size


class PQNode:
    __slots__ = ("kind", "children", "clique", "nid", "leaf_set", "depth", "parent")

    def __init__(self, kind: str, children: Optional[list["PQNode"]] = None, clique: Optional[int] = None):
        self.kind = kind  # "P", "Q", or "L"
        self.children: list[PQNode] = children or []
        self.clique = clique  # clique index for leaves
        self.nid = -1
        self.leaf_set: frozenset[int] = frozenset()
        self.depth = 0
        self.parent: Optional[PQNode] = None


@dataclass
class PQTree:
    """PQ-tree of one connected interval graph."""

    graph: Graph
    cliques: tuple[tuple[int, ...], ...]
    root: PQNode
    nodes: tuple[PQNode, ...] = ()
    vertex_node: dict[int, PQNode] = field(default_factory=dict)
    vertex_run: dict[int, tuple[int, int]] = field(default_factory=dict)

    def assigned_vertices(self, node: PQNode) -> frozenset[int]:
        """Vertices whose minimal covering node is `node` (leaf privates included)."""
        return frozenset(v for v, nd in self.vertex_node.items() if nd is node)

    def belongs(self, node: PQNode) -> frozenset[int]:
        """Vertices of the subgraph belonging to the node: union of its leaf cliques."""
        out: set[int] = set()
        for ci in node.leaf_set:
            out.update(self.cliques[ci])
        return frozenset(out)

    def order_count(self) -> int:
        """Number of permissible reorderings (clique paths)."""
        from math import factorial

        total = 1
        for node in self.nodes:
            if node.kind == "P":
                total *= factorial(len(node.children))
            elif node.kind == "Q":
                total *= 2
        return total

    def permissible_orders(self, limit: int = 50000) -> list[tuple[int, ...]]:
        """All permissible leaf orders as clique-index tuples (guarded)."""
        if self.order_count() > limit:
            raise TooLarge(f"more than {limit} permissible orders")

        from itertools import permutations as iperm

        def rec(node: PQNode) -> list[tuple[int, ...]]:
            if node.kind == "L":
                return [(node.clique,)]
            child_orders = [rec(c) for c in node.children]
            out = []
            if node.kind == "P":
                arrangements = iperm(range(len(node.children)))
            else:
                arrangements = [tuple(range(len(node.children))), tuple(reversed(range(len(node.children))))]
            seen = set()
            for arr in arrangements:
                partial = [()]  # build concatenations
                for idx in arr:
                    partial = [p + o for p in partial for o in child_orders[idx]]
                for p in partial:
                    if p not in seen:
                        seen.add(p)
                        out.append(p)
            return out

        return rec(self.root)


def _bfs_rows(rows: list[frozenset[int]]) -> list[frozenset[int]]:
    """Rows of one overlap component in an order where each overlaps a predecessor."""
    rows = sorted(rows, key=lambda r: (len(r), sorted(r)))
    ordered = [rows[0]]
    remaining = rows[1:]
    while remaining:
        for i, w in enumerate(remaining):
            if any(_overlaps(w, r) for r in ordered):
                ordered.append(remaining.pop(i))
                break
        else:  # pragma: no cover - caller passes one overlap component
            raise AssertionError("rows do not form one overlap component")
    return ordered


def _overlaps(a: frozenset, b: frozenset) -> bool:
    return bool(a & b) and not (a <= b) and not (b <= a)


def _insert_row(cells: list[frozenset[int]], placed: frozenset[int], w: frozenset[int]) -> list[list[frozenset[int]]]:
    """Legal cell sequences after requiring w to be consecutive; empty when infeasible.

    New elements of w can only extend an end of the current sequence, and a
    partially covered end cell must face its covered part toward the run
    interior (or toward the new elements). Ambiguous attachments branch.
    """
    marks = []
    for c in cells:
        inter = c & w
        marks.append(0 if not inter else (2 if c <= w else 1))
    nz = [i for i, m in enumerate(marks) if m]
    if not nz:
        return []
    lo, hi = nz[0], nz[-1]
    if any(marks[i] == 0 for i in range(lo, hi + 1)):
        return []
    if any(marks[i] == 1 for i in range(lo + 1, hi)):
        return []
    extras = frozenset(w - placed)
    single = lo == hi
    if not extras:
        if single and marks[lo] == 1:
            return []  # nested in one cell: cannot overlap anything processed
        out = list(cells[:lo])
        if marks[lo] == 1:
            out += [cells[lo] - w, cells[lo] & w]
        else:
            out.append(cells[lo])
        out += list(cells[lo + 1 : hi])
        if hi > lo:
            if marks[hi] == 1:
                out += [cells[hi] & w, cells[hi] - w]
            else:
                out.append(cells[hi])
        out += list(cells[hi + 1 :])
        return [[c for c in out if c]]
    options: list[list[frozenset[int]]] = []
    attach_left = lo == 0 and (single or marks[lo] == 2)
    attach_right = hi == len(cells) - 1 and (single or marks[hi] == 2)
    if attach_left:
        out = [extras]
        if single and marks[lo] == 1:
            out += [cells[lo] & w, cells[lo] - w]
        else:
            out += list(cells[lo:hi])
            if marks[hi] == 1:
                out += [cells[hi] & w, cells[hi] - w]
            else:
                out.append(cells[hi])
        out += list(cells[hi + 1 :])
        options.append([c for c in out if c])
    if attach_right:
        out = list(cells[:lo])
        if single and marks[lo] == 1:
            out += [cells[lo] - w, cells[lo] & w]
        else:
            if marks[lo] == 1:
                out += [cells[lo] - w, cells[lo] & w]
            else:
                out.append(cells[lo])
            out += list(cells[lo + 1 : hi + 1])
        out.append(extras)
        out += list(cells[hi + 1 :])
        options.append([c for c in out if c])
    return options


def _order_component(comp_rows: list[frozenset[int]]) -> Optional[list[frozenset[int]]]:
    """A cell order realizing one overlap component consecutively, or None.

    The order is unique up to reversal; transiently ambiguous end attachments
    are resolved by backtracking against the later rows.
    """
    ordered = _bfs_rows(comp_rows)

    def valid(cells: list[frozenset[int]]) -> bool:
        for r in comp_rows:
            idx = [i for i, c in enumerate(cells) if c & r]
            if idx != list(range(idx[0], idx[-1] + 1)):
                return False
            if frozenset().union(*(cells[i] for i in idx)) != r:
                return False
        return True

    def extend(cells: list[frozenset[int]], placed: frozenset[int], k: int) -> Optional[list[frozenset[int]]]:
        if k == len(ordered):
            return cells if valid(cells) else None
        w = ordered[k]
        for option in _insert_row(cells, placed, w):
            found = extend(option, placed | w, k + 1)
            if found is not None:
                return found
        return None

    return extend([frozenset(ordered[0])], frozenset(ordered[0]), 1)


def _build_node(ground: list[int], rows: list[frozenset[int]]) -> Optional[PQNode]:
    gset = frozenset(ground)
    if len(ground) == 1:
        return PQNode("L", clique=ground[0])
    rows = sorted(
        {r for r in rows if 2 <= len(r) < len(ground)},
        key=lambda r: (len(r), sorted(r)),
    )
    if not rows:
        return PQNode("P", [PQNode("L", clique=c) for c in sorted(ground)])
    # overlap components
    comp_of = list(range(len(rows)))

    def find(x):
        while comp_of[x] != x:
            comp_of[x] = comp_of[comp_of[x]]
            x = comp_of[x]
        return x

    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if _overlaps(rows[i], rows[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    comp_of[ri] = rj
    comps: dict[int, list[int]] = {}
    for i in range(len(rows)):
        comps.setdefault(find(i), []).append(i)
    unions = {root: frozenset().union(*(rows[i] for i in members)) for root, members in comps.items()}
    # maximal unions form a laminar family; two components share a union only
    # when one is the single row equal to it, so duplicates collapse (their
    # rows reappear in the recursion on that union)
    maximal = []
    seen_unions: set[frozenset[int]] = set()
    for root, u in sorted(unions.items(), key=lambda item: (sorted(item[1]), item[0])):
        if u in seen_unions or any(u < u2 for u2 in unions.values()):
            continue
        seen_unions.add(u)
        maximal.append((root, u))
    spanning = [item for item in maximal if item[1] == gset]
    if spanning:
        root_id, _u = spanning[0]
        comp_rows = [rows[i] for i in comps[root_id]]
        cells = _order_component(comp_rows)
        if cells is None:
            return None
        children = []
        for cell in cells:
            sub_rows = [r for r in rows if r <= cell]
            child = _build_node(sorted(cell), sub_rows)
            if child is None:
                return None
            children.append(child)
        if len(children) == 2:
            return PQNode("P", children)
        return PQNode("Q", children)
    covered: set[int] = set()
    children = []
    for root_id, u in maximal:
        sub_rows = [r for r in rows if r <= u]
        child = _build_node(sorted(u), sub_rows)
        if child is None:
            return None
        children.append(child)
        covered |= set(u)
    for c in sorted(gset - covered):
        children.append(PQNode("L", clique=c))
    return PQNode("P", children)


def _finalize(tree: PQTree) -> Optional[PQTree]:
    """Assign ids/leaf sets and the MPQ vertex mapping; None if alignment fails."""
    nodes: list[PQNode] = []

    def visit(node: PQNode, depth: int, parent: Optional[PQNode]):
        node.nid = len(nodes)
        node.depth = depth
        node.parent = parent
        nodes.append(node)
        if node.kind == "L":
            node.leaf_set = frozenset([node.clique])
            return
        for c in node.children:
            visit(c, depth + 1, node)
        node.leaf_set = frozenset().union(*(c.leaf_set for c in node.children))

    visit(tree.root, 0, None)
    tree.nodes = tuple(nodes)
    clique_sets = [frozenset(c) for c in tree.cliques]
    for v in tree.graph.vertices():
        kv = frozenset(i for i, c in enumerate(clique_sets) if v in c)
        node = tree.root
        while node.kind != "L":
            inside = [c for c in node.children if kv <= c.leaf_set]
            if not inside:
                break
            node = inside[0]
        tree.vertex_node[v] = node
        if node.kind == "L":
            if kv != node.leaf_set:
                return None
            continue
        touched = [i for i, c in enumerate(node.children) if kv & c.leaf_set]
        lo, hi = touched[0], touched[-1]
        if touched != list(range(lo, hi + 1)) or hi == lo:
            return None
        full = frozenset().union(*(node.children[i].leaf_set for i in touched))
        if kv != full:
            return None
        if node.kind == "P" and len(touched) != len(node.children):
            return None
        tree.vertex_run[v] = (lo, hi)
    return tree


def build_pq_tree(g: Graph) -> Optional[PQTree]:
    """PQ-tree of g, or None when g is not a connected interval graph."""
    if g.n == 0 or not g.is_connected():
        return None
    peo = is_chordal(g)
    if peo is None:
        return None
    cliques = tuple(maximal_cliques(g, peo))
    rows = {frozenset(i for i, c in enumerate(cliques) if v in c) for v in g.vertices()}
    root = _build_node(list(range(len(cliques))), sorted(rows, key=sorted))
    if root is None:
        return None
    return _finalize(PQTree(g, cliques, root))


def inner_vertices(tree: PQTree, node: PQNode) -> frozenset[int]:
    """Vertices belonging to >= 2 children of the node but to no sibling.

    Vacuously empty for leaves; for P-nodes these vertices belong to all
    children.
    """
    if node.kind == "L":
        return frozenset()
    return tree.assigned_vertices(node)


def pq_tree_to_text(tree: PQTree) -> str:
    """Bracketed serialization: P(...), Q(...), L{v1,...}."""

    def rec(node: PQNode) -> str:
        if node.kind == "L":
            return "L{" + ",".join(str(v) for v in tree.cliques[node.clique]) + "}"
        return node.kind + "(" + ",".join(rec(c) for c in node.children) + ")"

    return rec(tree.root)


# ---------------------------------------------------------------------------
# Marked interval graphs


@dataclass(frozen=True)
class MarkedIntervalGraph:
    """Interval host with families of marked clique sets and an optional tail."""

    host: Graph
    families: tuple[tuple[frozenset[int], ...], ...]
    tail: Optional[int] = None

    def __init__(self, host: Graph, families: Sequence[Sequence[Any]], tail: Optional[int] = None):
        fams = tuple(tuple(frozenset(s) for s in fam) for fam in families)
        for fam in fams:
            for s in fam:
                if not host.is_clique(s):
                    raise ValueError("every marked set must induce a clique")
        if tail is not None and host.degree(tail) != 1:
            raise ValueError("tail must have degree 1")
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "tail", tail)

    def marked_union(self) -> frozenset[int]:
        out: set[int] = set()
        for fam in self.families:
            for s in fam:
                out |= s
        if self.tail is not None:
            out.add(self.tail)
        return frozenset(out)

    def flat_sets(self) -> list[frozenset[int]]:
        return [s for fam in self.families for s in fam]


def _subtree_code(tree: PQTree, node: PQNode) -> tuple:
    """Canonical isomorphism code of the subgraph belonging to a node.

    Vertices assigned inside the subtree are counted structurally;
    pass-through vertices (assigned above, uniform over the whole subtree)
    enter only as a count, which completes the isomorphism class.
    """
    assigned = len(tree.assigned_vertices(node))
    passthrough = len(tree.belongs(node)) - sum(
        len(tree.assigned_vertices(d)) for d in _subtree_nodes(node)
    )
    if node.kind == "L":
        return ("L", assigned, passthrough)
    child_codes = [_subtree_code(tree, c) for c in node.children]
    if node.kind == "P":
        return ("P", assigned, passthrough, tuple(sorted(child_codes)))
    runs: dict[tuple[int, int], int] = {}
    for v in tree.assigned_vertices(node):
        runs[tree.vertex_run[v]] = runs.get(tree.vertex_run[v], 0) + 1
    k = len(node.children)
    fwd = (tuple(child_codes), tuple(sorted(runs.items())))
    mirrored = {(k - 1 - hi, k - 1 - lo): c for (lo, hi), c in runs.items()}
    bwd = (tuple(reversed(child_codes)), tuple(sorted(mirrored.items())))
    return ("Q", assigned, passthrough) + min(fwd, bwd)


@dataclass
class CleanReduction:
    """Result of discarding maximal clean subtrees from a PQ-tree."""

    tree: PQTree
    retained: tuple[PQNode, ...]
    clean: dict[int, bool]  # nid -> subtree entirely clean
    discarded: dict[int, tuple[tuple[int, tuple], ...]]  # parent nid -> ((child pos, code), ...)
    annotations: dict[int, tuple]  # retained nid -> annotation


def reduce_clean(tree: PQTree, marked: frozenset[int], antichain_cap: Optional[int] = None) -> CleanReduction:
    """Discard maximal clean subtrees, annotating their parents with codes.

    A subtree is clean when no vertex assigned inside it is marked. The number
    of non-clean subtrees per depth is asserted against the antichain cap when
    one is supplied.
    """
    node_clean: dict[int, bool] = {}
    subtree_clean: dict[int, bool] = {}
    for node in reversed(tree.nodes):  # children first (preorder reversed)
        node_clean[node.nid] = not (tree.assigned_vertices(node) & marked)
        subtree_clean[node.nid] = node_clean[node.nid] and all(
            subtree_clean[c.nid] for c in node.children
        )
    retained: list[PQNode] = []
    discarded: dict[int, tuple[tuple[int, tuple], ...]] = {}

    def walk(node: PQNode):
        retained.append(node)
        drops = []
        for pos, c in enumerate(node.children):
            if subtree_clean[c.nid]:
                drops.append((pos, _subtree_code(tree, c)))
            else:
                walk(c)
        if drops:
            discarded[node.nid] = tuple(drops)

    walk(tree.root)
    if antichain_cap is not None:
        per_depth: dict[int, int] = {}
        for node in tree.nodes:
            if not subtree_clean[node.nid]:
                per_depth[node.depth] = per_depth.get(node.depth, 0) + 1
        for depth, count in per_depth.items():
            assert count <= max(antichain_cap, 1), (
                f"non-clean subtrees at depth {depth}: {count} > {antichain_cap}"
            )
    annotations: dict[int, tuple] = {}
    for node in retained:
        drops = discarded.get(node.nid, ())
        if node.kind == "Q":
            annotations[node.nid] = ("node", "Q", ())
        else:
            annotations[node.nid] = ("node", node.kind, tuple(sorted(code for _pos, code in drops)))
    return CleanReduction(tree, tuple(retained), subtree_clean, discarded, annotations)


@dataclass
class _Encoding:
    """Annotated set family capturing the full marked structure of a host."""

    marked: MarkedIntervalGraph
    family: SetFamily
    a_indices: list[list[int]]  # per marked family, global indices
    tail_index: Optional[int]
    trees: list[PQTree]
    backs: list[list[int]]  # per tree, local vertex id -> host vertex id
    b_index: dict[tuple[int, int], int]  # (tree idx, nid) -> family index
    reductions: list[CleanReduction]
    qrun_index: dict[tuple[int, int, str, int], int]  # (tree, nid, 'L'/'R', i) -> index
    component_of_index: list[int]


def _subtree_nodes(node: PQNode) -> Iterator[PQNode]:
    yield node
    for c in node.children:
        yield from _subtree_nodes(c)


def _component_trees(host: Graph) -> list[tuple[PQTree, list[int]]]:
    """Per-component PQ-trees plus new->host vertex maps."""
    out = []
    for comp in host.components():
        sub, idx = host.subgraph(comp)
        back = [0] * sub.n
        for old, new in idx.items():
            back[new] = old
        tree = build_pq_tree(sub)
        if tree is None:
            raise ValueError("host component is not an interval graph")
        out.append((tree, back))
    return out


def _marked_encoding(m: MarkedIntervalGraph) -> _Encoding:
    host = m.host
    marked_union = m.marked_union()
    sets: list[frozenset[int]] = []
    annotations: list[tuple] = []
    comp_of: list[int] = []
    a_indices: list[list[int]] = []

    def add(s: frozenset[int], ann: tuple, comp: int) -> int:
        sets.append(s)
        annotations.append(ann)
        comp_of.append(comp)
        return len(sets) - 1

    tree_comps = _component_trees(host)
    comp_id_of_vertex: dict[int, int] = {}
    for ti, (_tree, back) in enumerate(tree_comps):
        for v in back:
            comp_id_of_vertex[v] = ti

    for j, fam in enumerate(m.families):
        idxs = []
        for s in fam:
            comp = comp_id_of_vertex[min(s)] if s else -1
            idxs.append(add(s, ("A", j), comp))
        a_indices.append(idxs)
    tail_index = None
    if m.tail is not None:
        tail_index = add(frozenset([m.tail]), ("tail",), comp_id_of_vertex[m.tail])

    trees = []
    reductions = []
    b_index: dict[tuple[int, int], int] = {}
    qrun_index: dict[tuple[int, int, str, int], int] = {}
    for ti, (tree, back) in enumerate(tree_comps):
        trees.append(tree)
        local_marked = frozenset(
            i for i, hv in enumerate(back) if hv in marked_union
        )
        red = reduce_clean(tree, local_marked)
        reductions.append(red)
        retained_ids = {n.nid for n in red.retained}
        for node in red.retained:
            qpos: tuple = ()
            parent = node.parent
            if parent is not None and parent.kind == "Q" and parent.nid in retained_ids:
                k = len(parent.children)
                pos = parent.children.index(node)
                qpos = ("qpos", min(pos, k - 1 - pos), k)
            ann = red.annotations[node.nid] + (qpos,)
            bset = frozenset(back[v] for v in tree.belongs(node))
            b_index[(ti, node.nid)] = add(bset, ann, ti)
            # layer structure: vertices assigned within the subtree (excludes
            # pass-throughs from above, unlike the belonging set); laminar, so
            # it pins assignment depth without growing antichains per node
            sset = frozenset(
                back[v]
                for d in _subtree_nodes(node)
                for v in tree.assigned_vertices(d)
            )
            if sset:
                add(sset, ("layer",), ti)
        for node in red.retained:
            if node.kind != "Q":
                continue
            k = len(node.children)
            drops = dict(red.discarded.get(node.nid, ()))
            child_codes = [
                drops.get(pos, ("retained",)) for pos in range(k)
            ]
            prefix_leaves: list[frozenset[int]] = []
            acc: frozenset[int] = frozenset()
            for c in node.children:
                acc |= c.leaf_set
                prefix_leaves.append(acc)
            suffix_leaves: list[frozenset[int]] = []
            acc = frozenset()
            for c in reversed(node.children):
                acc |= c.leaf_set
                suffix_leaves.append(acc)
            clique_sets = [frozenset(c) for c in tree.cliques]

            def confined(leafset: frozenset[int]) -> frozenset[int]:
                out = set()
                for v in tree.belongs(node):
                    kv = frozenset(ci for ci, c in enumerate(clique_sets) if v in c)
                    if kv <= leafset:
                        out.add(v)
                return frozenset(back[v] for v in out)

            for i in range(1, k):
                lset = confined(prefix_leaves[i - 1])
                rset = confined(suffix_leaves[i - 1])
                lann = ("qrun", i, tuple(child_codes[:i]))
                rann = ("qrun", i, tuple(reversed(child_codes[k - i :])))
                qrun_index[(ti, node.nid, "L", i)] = add(lset, lann, ti)
                qrun_index[(ti, node.nid, "R", i)] = add(rset, rann, ti)

    family = SetFamily(host.n, sets, annotations)
    return _Encoding(
        m,
        family,
        a_indices,
        tail_index,
        trees,
        [back for _tree, back in tree_comps],
        b_index,
        reductions,
        qrun_index,
        comp_of,
    )


def _encoding_group(enc: _Encoding) -> PermGroup:
    bound = max(max_antichain_size(enc.family), 1)
    return family_autgroup(enc.family, bound)


def marked_action_group(m: MarkedIntervalGraph, antichain_bound: Optional[int] = None) -> PermGroup:
    """Action on marked-set indices of tail-fixing, family-preserving host automorphisms."""
    flat = m.flat_sets()
    if antichain_bound is not None:
        actual = max_antichain_size(SetFamily(m.host.n, flat))
        if actual > antichain_bound:
            raise IndexBoundExceeded(
                f"marked antichain {actual} exceeds declared bound {antichain_bound}",
                bound=antichain_bound,
                stage="marked-antichain",
            )
    enc = _marked_encoding(m)
    group = _encoding_group(enc)
    order = [i for fam in enc.a_indices for i in fam]
    return group.restriction(order)


def brute_marked_autgroup(m: MarkedIntervalGraph, guard: int = 10) -> PermGroup:
    """Desk-scale oracle: enumerate host automorphisms and project onto marked sets."""
    from .harness import iter_automorphisms

    host = m.host
    if host.n > guard:
        raise TooLarge(f"brute marked autgroup guarded at n <= {guard}")
    flat = m.flat_sets()
    fam_of = [j for j, fam in enumerate(m.families) for _ in fam]
    gens: list[Perm] = []
    for sigma in iter_automorphisms(host, guard):
        if m.tail is not None and sigma(m.tail) != m.tail:
            continue
        images: list[Optional[int]] = [None] * len(flat)
        used: set[int] = set()
        ok = True
        for i, s in enumerate(flat):
            target = sigma.image_of_set(s)
            choice = None
            for j, s2 in enumerate(flat):
                if j in used or fam_of[j] != fam_of[i]:
                    continue
                if s2 == target:
                    choice = j
                    break
            if choice is None:
                ok = False
                break
            images[i] = choice
            used.add(choice)
        if ok:
            gens.append(Perm(images))  # canonical matching for this automorphism
    # duplicate marked sets within a family are freely interchangeable
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            if fam_of[i] == fam_of[j] and flat[i] == flat[j]:
                images = list(range(len(flat)))
                images[i], images[j] = j, i
                gens.append(Perm(images))
    return PermGroup(len(flat), gens)


# ---------------------------------------------------------------------------
# Realizing index permutations as vertex maps


def _fwd_code_tuple(tree: PQTree, node: PQNode) -> tuple:
    child_codes = tuple(_subtree_code(tree, c) for c in node.children)
    runs: dict[tuple[int, int], int] = {}
    for v in tree.assigned_vertices(node):
        runs[tree.vertex_run[v]] = runs.get(tree.vertex_run[v], 0) + 1
    return (child_codes, tuple(sorted(runs.items())))


def _clean_iso(
    tree_a: PQTree,
    a: PQNode,
    tree_b: PQTree,
    b: PQNode,
    back_a: Sequence[int],
    back_b: Sequence[int],
    out: dict[int, int],
):
    """Extend `out` with a structural bijection between two equal-code clean subtrees."""
    assigned_a = sorted(tree_a.assigned_vertices(a))
    assigned_b = sorted(tree_b.assigned_vertices(b))
    assert len(assigned_a) == len(assigned_b), "clean subtree codes disagree with sizes"
    if a.kind == "L" or b.kind == "L":
        assert a.kind == b.kind == "L"
        for va, vb in zip(assigned_a, assigned_b):
            out[back_a[va]] = back_b[vb]
        return
    assert a.kind == b.kind
    if a.kind == "P":
        for va, vb in zip(assigned_a, assigned_b):
            out[back_a[va]] = back_b[vb]
        order_a = sorted(a.children, key=lambda c: (_subtree_code(tree_a, c), c.nid))
        order_b = sorted(b.children, key=lambda c: (_subtree_code(tree_b, c), c.nid))
        for ca, cb in zip(order_a, order_b):
            _clean_iso(tree_a, ca, tree_b, cb, back_a, back_b, out)
        return
    # Q-node: forward if the forward tuples agree, else reversed
    fa, fb = _fwd_code_tuple(tree_a, a), _fwd_code_tuple(tree_b, b)
    k = len(a.children)
    assert len(b.children) == k
    if fa == fb:
        pairing = list(range(k))
        flip = False
    else:
        pairing = list(reversed(range(k)))
        flip = True
    for pos, target in enumerate(pairing):
        _clean_iso(tree_a, a.children[pos], tree_b, b.children[target], back_a, back_b, out)
    buckets_a: dict[tuple[int, int], list[int]] = {}
    for v in assigned_a:
        buckets_a.setdefault(tree_a.vertex_run[v], []).append(v)
    buckets_b: dict[tuple[int, int], list[int]] = {}
    for v in assigned_b:
        buckets_b.setdefault(tree_b.vertex_run[v], []).append(v)
    for run, vs in buckets_a.items():
        lo, hi = run
        target_run = (k - 1 - hi, k - 1 - lo) if flip else run
        ws = buckets_b.get(target_run)
        assert ws is not None and len(ws) == len(vs), "run multisets disagree"
        for va, vb in zip(sorted(vs), sorted(ws)):
            out[back_a[va]] = back_b[vb]


def _realize_vertex_map(enc: _Encoding, tau: Perm) -> Perm:
    """A host automorphism/isomorphism acting on every encoded set as tau does."""
    host = enc.marked.host
    sets = enc.family.sets
    node_by_key = {}
    back_of_tree = enc.backs
    for ti, tree in enumerate(enc.trees):
        for node in tree.nodes:
            node_by_key[(ti, node.nid)] = node
    # node map from tau on B indices
    set_to_bkey = {}
    for key, idx in enc.b_index.items():
        set_to_bkey[idx] = key
    node_map: dict[tuple[int, int], tuple[int, int]] = {}
    for key, idx in enc.b_index.items():
        img = tau(idx)
        assert img in set_to_bkey, "tau must map node sets to node sets"
        node_map[key] = set_to_bkey[img]
    # consistency: parents map to parents
    for ti, red in enumerate(enc.reductions):
        retained_ids = {n.nid for n in red.retained}
        for node in red.retained:
            if node.parent is not None and node.parent.nid in retained_ids:
                tj, nj = node_map[(ti, node.nid)]
                pj = node_map[(ti, node.parent.nid)]
                mapped = node_by_key[(tj, nj)]
                assert mapped.parent is not None and (tj, mapped.parent.nid) == pj, (
                    "tau does not respect the tree structure"
                )

    out: dict[int, int] = {}
    pattern: dict[int, frozenset[int]] = {}
    for v in host.vertices():
        pattern[v] = frozenset(i for i, s in enumerate(sets) if v in s)
    buckets: dict[tuple[tuple[int, int], frozenset[int]], list[int]] = {}
    for ti, red in enumerate(enc.reductions):
        back = back_of_tree[ti]
        for node in red.retained:
            for v in enc.trees[ti].assigned_vertices(node):
                hv = back[v]
                buckets.setdefault(((ti, node.nid), pattern[hv]), []).append(hv)
    for (key, pat), vs in sorted(buckets.items(), key=lambda kv: (kv[0][0], repr(kv[0][1]))):
        target_key = node_map[key]
        target_pat = frozenset(tau(i) for i in pat)
        ws = buckets.get((target_key, target_pat))
        assert ws is not None and len(ws) == len(vs), "cell sizes disagree under tau"
        for va, vb in zip(sorted(vs), sorted(ws)):
            out[va] = vb

    # discarded clean subtrees
    for ti, red in enumerate(enc.reductions):
        tree = enc.trees[ti]
        back = back_of_tree[ti]
        for node in red.retained:
            drops = red.discarded.get(node.nid, ())
            if not drops:
                continue
            tj, nj = node_map[(ti, node.nid)]
            tree2 = enc.trees[tj]
            back2 = back_of_tree[tj]
            node2 = node_by_key[(tj, nj)]
            drops2 = enc.reductions[tj].discarded.get(node2.nid, ())
            assert len(drops) == len(drops2), "discarded subtree counts disagree"
            if node.kind == "Q":
                flip = _q_orientation(enc, tau, ti, node, tj, node2)
                k = len(node.children)
                target_of = {pos: (k - 1 - pos if flip else pos) for pos, _c in drops}
                drop2_by_pos = dict(drops2)
                for pos, code in drops:
                    t_pos = target_of[pos]
                    assert drop2_by_pos.get(t_pos) == code, "Q discard codes disagree"
                    _clean_iso(
                        tree,
                        node.children[pos],
                        tree2,
                        node2.children[t_pos],
                        back,
                        back2,
                        out,
                    )
            else:
                src = sorted(drops, key=lambda pc: (pc[1], pc[0]))
                dst = sorted(drops2, key=lambda pc: (pc[1], pc[0]))
                for (pos, code), (pos2, code2) in zip(src, dst):
                    assert code == code2, "P discard codes disagree"
                    _clean_iso(
                        tree,
                        node.children[pos],
                        tree2,
                        node2.children[pos2],
                        back,
                        back2,
                        out,
                    )

    assert len(out) == host.n and sorted(out) == list(range(host.n)), "vertex map incomplete"
    sigma = Perm([out[v] for v in range(host.n)])
    assert sorted(sigma.images) == list(range(host.n))
    for u, v in host.edges:
        assert host.has_edge(sigma(u), sigma(v)), "realized map breaks an edge"
    assert host.m == len({(min(sigma(u), sigma(v)), max(sigma(u), sigma(v))) for u, v in host.edges})
    for i, s in enumerate(sets):
        assert sigma.image_of_set(s) == sets[tau(i)], "realized map disagrees with tau on a set"
    return sigma


def _q_orientation(enc: _Encoding, tau: Perm, ti: int, node: PQNode, tj: int, node2: PQNode) -> bool:
    """False = forward, True = reversed, judged by tau's images of the run chains."""
    sets = enc.family.sets
    k = len(node.children)
    fwd_ok = True
    rev_ok = True
    for i in range(1, k):
        li = enc.qrun_index[(ti, node.nid, "L", i)]
        ri = enc.qrun_index[(ti, node.nid, "R", i)]
        li2 = enc.qrun_index[(tj, node2.nid, "L", i)]
        ri2 = enc.qrun_index[(tj, node2.nid, "R", i)]
        if sets[tau(li)] != sets[li2] or sets[tau(ri)] != sets[ri2]:
            fwd_ok = False
        if sets[tau(li)] != sets[ri2] or sets[tau(ri)] != sets[li2]:
            rev_ok = False
    # retained children pin the orientation as well
    red = enc.reductions[ti]
    retained_ids = {n.nid for n in red.retained}
    node_map_local: dict[int, int] = {}
    for pos, c in enumerate(node.children):
        if c.nid in retained_ids and (ti, c.nid) in enc.b_index:
            img = tau(enc.b_index[(ti, c.nid)])
            for pos2, c2 in enumerate(node2.children):
                key2 = (tj, c2.nid)
                if key2 in enc.b_index and enc.b_index[key2] == img:
                    node_map_local[pos] = pos2
    for pos, pos2 in node_map_local.items():
        if pos2 != pos:
            fwd_ok = False
        if pos2 != k - 1 - pos:
            rev_ok = False
    assert fwd_ok or rev_ok, "no orientation consistent with tau at a Q-node"
    return not fwd_ok


def marked_isomorphism(
    m1: MarkedIntervalGraph, m2: MarkedIntervalGraph
) -> Optional[tuple[list[int], list[list[int]]]]:
    """A witness isomorphism mapping family i of m1 onto family i of m2, or None.

    Returns (vertex images of m1.host into m2.host, per-family set-index maps).
    """
    if len(m1.families) != len(m2.families):
        raise ValueError("both sides must carry the same number of families")
    if (m1.tail is None) != (m2.tail is None):
        return None
    if m1.host.n != m2.host.n:
        return None
    n1 = m1.host.n
    host = m1.host.union_disjoint(m2.host)
    families: list[tuple[frozenset[int], ...]] = []
    for f1, f2 in zip(m1.families, m2.families):
        families.append(tuple(list(f1) + [frozenset(v + n1 for v in s) for s in f2]))
    if m1.tail is not None:
        families.append((frozenset([m1.tail]), frozenset([m2.tail + n1])))
    combined = MarkedIntervalGraph(host, families, tail=None)
    enc = _marked_encoding(combined)
    group = _encoding_group(enc)
    left, right = _side_indices(enc, host, n1)
    swap = find_block_swap(group, left, right)
    if swap is None:
        return None
    sigma = _realize_vertex_map(enc, swap)
    vertex_map = []
    for v in range(n1):
        img = sigma(v)
        assert img >= n1, "swap element does not exchange the two hosts"
        vertex_map.append(img - n1)
    set_maps: list[list[int]] = []
    for j, f1 in enumerate(m1.families):
        fam_map = []
        offset = len(f1)
        for pos in range(len(f1)):
            img = swap(enc.a_indices[j][pos])
            local = enc.a_indices[j].index(img)
            assert local >= offset, "marked set mapped within the same side"
            fam_map.append(local - offset)
        set_maps.append(fam_map)
    return vertex_map, set_maps


def _side_indices(enc: _Encoding, host: Graph, n1: int) -> tuple[list[int], list[int]]:
    comps = host.components()
    left_comps = {c for c in range(len(comps)) if min(comps[c]) < n1}
    left = [i for i, c in enumerate(enc.component_of_index) if c in left_comps]
    right = [i for i in range(len(enc.family.sets)) if enc.component_of_index[i] not in left_comps]
    return left, right


def marked_transport(
    m1: MarkedIntervalGraph,
    m2: MarkedIntervalGraph,
    set_action: dict[tuple[int, int], int],
) -> Optional[list[int]]:
    """A witness isomorphism realizing a prescribed set mapping, or None.

    set_action maps (family index, position in m1's family) to the required
    position in m2's family.
    """
    if len(m1.families) != len(m2.families):
        raise ValueError("both sides must carry the same number of families")
    if (m1.tail is None) != (m2.tail is None) or m1.host.n != m2.host.n:
        return None
    n1 = m1.host.n
    host = m1.host.union_disjoint(m2.host)
    families: list[tuple[frozenset[int], ...]] = []
    for f1, f2 in zip(m1.families, m2.families):
        families.append(tuple(list(f1) + [frozenset(v + n1 for v in s) for s in f2]))
    if m1.tail is not None:
        families.append((frozenset([m1.tail]), frozenset([m2.tail + n1])))
    combined = MarkedIntervalGraph(host, families, tail=None)
    enc = _marked_encoding(combined)
    group = _encoding_group(enc)
    prescribed: dict[int, int] = {}
    for (j, pos1), pos2 in set_action.items():
        offset = len(m1.families[j])
        prescribed[enc.a_indices[j][pos1]] = enc.a_indices[j][offset + pos2]
    left, right = _side_indices(enc, host, n1)
    element = find_element(group, prescribed, [(left, right), (right, left)])
    if element is None:
        return None
    sigma = _realize_vertex_map(enc, element)
    vertex_map = []
    for v in range(n1):
        img = sigma(v)
        assert img >= n1
        vertex_map.append(img - n1)
    return vertex_map


class MarkedContext:
    """Cached encoding and family group of one marked host.

    Shares the expensive structure between the action-group computation and
    later transporter queries (realizing prescribed actions as vertex maps).
    """

    def __init__(self, m: MarkedIntervalGraph):
        self.m = m
        self._enc: Optional[_Encoding] = None
        self._group: Optional[PermGroup] = None

    @property
    def enc(self) -> _Encoding:
        if self._enc is None:
            self._enc = _marked_encoding(self.m)
        return self._enc

    @property
    def group(self) -> PermGroup:
        if self._group is None:
            self._group = _encoding_group(self.enc)
        return self._group

    def flat_index(self, family: int, pos: int) -> int:
        return self.enc.a_indices[family][pos]

    def action_group(self) -> PermGroup:
        order = [i for fam in self.enc.a_indices for i in fam]
        return self.group.restriction(order)

    def automorphism_with_action(self, action: dict[tuple[int, int], tuple[int, int]]) -> Optional[list[int]]:
        """A host automorphism realizing (family, pos) -> (family, pos) set images."""
        prescribed = {}
        for (j, pos), (j2, pos2) in action.items():
            prescribed[self.flat_index(j, pos)] = self.flat_index(j2, pos2)
        element = find_element(self.group, prescribed, [])
        if element is None:
            return None
        sigma = _realize_vertex_map(self.enc, element)
        return [sigma(v) for v in range(self.m.host.n)]
