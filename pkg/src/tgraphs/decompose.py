"""Canonical fragment decomposition: clique relations, extraction, level structure.

The extraction procedure peels a bounded-size collection of interval fragments
off a bounded-leafage chordal graph in an automorphism-invariant way; iterating
it yields the level decomposition the isomorphism engine works on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Optional, Sequence

from .chordal import is_chordal, leaf_cliques, minimal_separators, simplicial_vertices
from .errors import BadSeparator, Disconnected, NotChordal, NotTGraph
from .graph import Graph, separates
from .interval import build_pq_tree


def _label_key(label: Hashable):
    return (isinstance(label, tuple), label)


@dataclass(frozen=True)
class Completion:
    """A fragment plus its separator, the rest contracted to l with pendant tail l'."""

    graph: Graph
    labels: tuple[Hashable, ...]
    tail: int
    contracted: int
    frag_ids: frozenset[int]
    sep_ids: frozenset[int]

    def id_of(self) -> dict[Hashable, int]:
        return {lab: i for i, lab in enumerate(self.labels)}


@dataclass(frozen=True)
class ExtractedFragment:
    """One fragment of an extraction: label set, provenance, attachment chain, completion."""

    vertices: frozenset
    provenance: str  # "simplicial" | "separator"
    attachments: tuple[frozenset, ...]  # inclusion chain, ascending
    completion: Completion


def clique_preceq(g: Graph, cliques: Sequence[Iterable[int]], i: int, j: int) -> Optional[int]:
    """Smallest witness k for cliques[i] below cliques[j] in the separation preorder.

    cliques[j] must separate cliques[i] from cliques[k] in g; None when no
    witness in the ambient collection works.
    """
    if i == j:
        return None
    sets = [frozenset(c) for c in cliques]
    for k in range(len(sets)):
        if k in (i, j):
            continue
        if separates(g, sets[j], sets[i], sets[k]):
            return k
    return None


def clique_approx(g: Graph, cliques: Sequence[Iterable[int]], i: int, j: int) -> bool:
    """Both separation directions hold with one common witness."""
    if i == j:
        return False
    sets = [frozenset(c) for c in cliques]
    for k in range(len(sets)):
        if k in (i, j):
            continue
        if separates(g, sets[j], sets[i], sets[k]) and separates(g, sets[i], sets[j], sets[k]):
            return True
    return False


def _component_signatures(g: Graph, removed: frozenset[int], cliques: Sequence[frozenset[int]]):
    """For each clique, the set of components of g - removed touched by clique - removed."""
    comp_id = [-1] * g.n
    cid = 0
    allowed = frozenset(v for v in g.vertices() if v not in removed)
    for v in g.vertices():
        if v in removed or comp_id[v] != -1:
            continue
        for w in g.connected_in(allowed, v):
            comp_id[w] = cid
        cid += 1
    sigs = []
    for c in cliques:
        sigs.append(frozenset(comp_id[v] for v in c if v not in removed))
    return sigs


def _relations(g: Graph, cliques: list[frozenset[int]]):
    """preceq and approx matrices over an ambient clique collection."""
    m = len(cliques)
    sig = [None] * m  # sig[j][i] = components touched by clique i after removing clique j
    for j in range(m):
        sig[j] = _component_signatures(g, cliques[j], cliques)
    preceq = [[False] * m for _ in range(m)]
    witness_sets: list[list[set[int]]] = [[set() for _ in range(m)] for _ in range(m)]
    for j in range(m):
        for i in range(m):
            if i == j:
                continue
            for k in range(m):
                if k in (i, j):
                    continue
                if not (sig[j][i] & sig[j][k]):
                    preceq[i][j] = True
                    witness_sets[i][j].add(k)
    approx = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j and witness_sets[i][j] & witness_sets[j][i]:
                approx[i][j] = True
    return preceq, approx


def _build_completion(
    g: Graph,
    labels: Sequence[Hashable],
    frag: frozenset[int],
    sep: frozenset[int],
    aux_tag: tuple,
    allow_trivial_rest: bool,
) -> Completion:
    rest = [v for v in g.vertices() if v not in frag and v not in sep]
    if not rest and not allow_trivial_rest:
        raise BadSeparator("nothing to contract: fragment plus separator covers the graph")
    order = sorted(frag, key=lambda v: _label_key(labels[v])) + sorted(
        sep, key=lambda v: _label_key(labels[v])
    )
    index = {v: i for i, v in enumerate(order)}
    l_id = len(order)
    tail_id = len(order) + 1
    edges = [
        (index[u], index[v])
        for u, v in g.edges
        if u in index and v in index
    ]
    edges += [(index[z], l_id) for z in sorted(sep)]
    edges.append((l_id, tail_id))
    new_labels = tuple([labels[v] for v in order] + [aux_tag + (0,), aux_tag + (1,)])
    comp_graph = Graph(len(order) + 2, edges)
    return Completion(
        comp_graph,
        new_labels,
        tail_id,
        l_id,
        frozenset(index[v] for v in frag),
        frozenset(index[v] for v in sep),
    )


def completion(g: Graph, frag: Iterable[int], sep: Iterable[int]) -> Completion:
    """Completion of a component union over its minimal separator.

    Validates the separator/component relationship; the contracted rest must
    be nonempty.
    """
    frag = frozenset(frag)
    sep = frozenset(sep)
    if not frag or frag & sep:
        raise BadSeparator("fragment must be nonempty and disjoint from the separator")
    allowed = frozenset(v for v in g.vertices() if v not in sep)
    covered: set[int] = set()
    for v in frag:
        if v in covered:
            continue
        comp = g.connected_in(allowed, v)
        if not comp <= frag:
            raise BadSeparator("fragment is not a union of components of g - separator")
        covered |= comp
    nbhd = frozenset(w for v in frag for w in g.adj[v]) - frag
    if nbhd != sep:
        raise BadSeparator("separator must be exactly the fragment's neighborhood")
    return _build_completion(g, tuple(range(g.n)), frag, sep, ("aux", 0, 0), allow_trivial_rest=False)


def attachment_sets(g: Graph, frag: Iterable[int], sep: Iterable[int]) -> tuple[frozenset[int], ...]:
    """Attachment chain of a separator fragment: distinct neighborhoods in the separator.

    Ascending by cardinality; chordality makes them nested.
    """
    frag = frozenset(frag)
    sep = frozenset(sep)
    seen = {frozenset(g.adj[v] & sep) for v in frag}
    seen.discard(frozenset())
    chain = sorted(seen, key=len)
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            raise NotChordal("attachment sets do not form a chain")
    return tuple(chain)


def _extract(g: Graph, labels: tuple, d: int, depth: int, budget: int) -> list[ExtractedFragment]:
    """Procedure for one fragment collection on a connected chordal labeled graph."""
    if depth > budget:
        raise NotTGraph("fragment extraction recursion exceeded its depth budget", depth=depth)
    n = g.n
    if n == 0:
        raise NotTGraph("empty graph in extraction")
    simplicial = simplicial_vertices(g)
    leaf = [frozenset(c) for c in leaf_cliques(g)]
    # Step 2: drop cliques strictly above another in the separation preorder
    preceq, _approx_full = _relations(g, leaf)
    strict_removed = set()
    for i in range(len(leaf)):
        for j in range(len(leaf)):
            if i != j and preceq[i][j] and not preceq[j][i]:
                strict_removed.add(j)
    l0 = [leaf[j] for j in range(len(leaf)) if j not in strict_removed]
    if not l0:
        raise NotTGraph("no leaf cliques survived the preorder filter")
    # Step 3: cliques incomparable with all others under the common-witness relation
    _p0, approx = _relations(g, l0)
    l1 = [
        l0[i]
        for i in range(len(l0))
        if not any(approx[i][j] for j in range(len(l0)) if j != i)
    ]
    if len(l1) > d:
        raise NotTGraph("more incomparable leaf cliques than leaves", count=len(l1), d=d)
    if l1:
        frags = []
        for idx, clique in enumerate(sorted(l1, key=lambda c: sorted(_label_key(labels[v]) for v in c))):
            f = frozenset(v for v in clique if v in simplicial)
            if not f:
                raise NotTGraph("leaf clique without simplicial vertices")
            sep = clique - f
            comp = _build_completion(g, labels, f, sep, ("aux", depth, idx), allow_trivial_rest=True)
            chain = (frozenset(labels[v] for v in sep),) if sep else ()
            frags.append(
                ExtractedFragment(
                    frozenset(labels[v] for v in f),
                    "simplicial",
                    chain,
                    comp,
                )
            )
        return frags
    # Step 4: minimal joint separators over approx-related pairs
    min_seps = [frozenset(s.vertices) for s in minimal_separators(g)]
    sep_comp_cache: dict[frozenset[int], Any] = {}
    joint: set[frozenset[int]] = set()
    order_l0 = sorted(range(len(l0)), key=lambda i: sorted(l0[i]))
    for ai in range(len(order_l0)):
        for bi in range(ai + 1, len(order_l0)):
            i, j = order_l0[ai], order_l0[bi]
            if not approx[i][j]:
                continue
            inter = l0[i] & l0[j]
            sym = l0[i] ^ l0[j]
            witness = min(
                (l0[k] for k in range(len(l0)) if k not in (i, j)),
                key=lambda c: sorted(c),
            )
            qualifying = []
            for z in min_seps:
                if not z <= inter:
                    continue
                if separates(g, z, sym, witness):
                    qualifying.append(z)
            minimal = [z for z in qualifying if not any(z2 < z for z2 in qualifying)]
            joint.update(minimal)
    if not joint:
        raise NotTGraph("approx-related leaf cliques without joint separators")
    for z in joint:
        if z & simplicial:
            raise NotChordal("joint separator contains a simplicial vertex")
    # Step 5: components incident to exactly one joint separator
    removed = frozenset().union(*joint)
    allowed = frozenset(v for v in g.vertices() if v not in removed)
    comps: list[frozenset[int]] = []
    seen: set[int] = set()
    for v in sorted(allowed):
        if v in seen:
            continue
        comp = frozenset(g.connected_in(allowed, v))
        seen |= comp
        comps.append(comp)
    joint_list = sorted(joint, key=sorted)
    c0: list[tuple[frozenset[int], frozenset[int]]] = []
    for comp in comps:
        nbhd = frozenset(w for v in comp for w in g.adj[v]) - comp
        incident = [z for z in joint_list if nbhd & z]
        if len(incident) == 1:
            c0.append((comp, incident[0]))
    if not c0:
        raise NotChordal("no component is incident to a single joint separator")
    z0 = sorted({z for _comp, z in c0}, key=sorted)
    if len(z0) > d:
        raise NotTGraph("more active joint separators than leaves", count=len(z0), d=d)
    # Step 6: merge fully-adjacent components per separator
    c0_prime: list[tuple[frozenset[int], frozenset[int]]] = []
    for z in z0:
        merged: set[int] = set()
        for comp, zf in c0:
            if zf == z and all(z <= g.adj[v] for v in comp):
                merged |= comp
        if merged:
            c0_prime.append((frozenset(merged), z))
        for comp, zf in c0:
            if zf == z and not all(z <= g.adj[v] for v in comp):
                c0_prime.append((comp, z))
    c0_prime.sort(key=lambda fz: sorted(fz[0]))
    completions = []
    for idx, (f, z) in enumerate(c0_prime):
        completions.append(_build_completion(g, labels, f, z, ("aux", depth, idx), allow_trivial_rest=True))
    c1 = [
        (f, z, comp)
        for (f, z), comp in zip(c0_prime, completions)
        if build_pq_tree(comp.graph) is not None
    ]
    if c1:
        # Step 7: the interval completions are the fragment collection
        if len(c1) > 2 * d:
            raise NotTGraph("fragment collection exceeds its size bound", count=len(c1), d=d)
        frags = []
        for f, z, comp in c1:
            chain_local = attachment_sets(g, f, z)
            chain = tuple(frozenset(labels[v] for v in a) for a in chain_local)
            frags.append(
                ExtractedFragment(
                    frozenset(labels[v] for v in f),
                    "separator",
                    chain,
                    comp,
                )
            )
        return frags
    # Step 8: recurse into each completion, keeping fragments inside the component
    out: list[ExtractedFragment] = []
    for (f, _z), comp in zip(c0_prime, completions):
        f_labels = frozenset(labels[v] for v in f)
        sub = _extract(comp.graph, comp.labels, d, depth + 1, budget)
        for frag in sub:
            if frag.vertices <= f_labels:
                out.append(frag)
    if not out:
        raise NotTGraph("recursive extraction produced no fragments inside components")
    if len(out) > 2 * d:
        raise NotTGraph("fragment collection exceeds its size bound", count=len(out), d=d)
    return out


def extract_fragments(g: Graph, d: int) -> list[ExtractedFragment]:
    """One canonical fragment collection of a connected chordal graph (size <= 2d)."""
    if d < 2:
        raise ValueError("need d >= 2")
    if g.n == 0:
        raise ValueError("need a nonempty graph")
    if not g.is_connected():
        raise Disconnected("extraction requires a connected graph")
    if is_chordal(g) is None:
        raise NotChordal("extraction requires a chordal graph")
    frags = _extract(g, tuple(range(g.n)), d, 0, g.n + 2)
    return sorted(frags, key=lambda fr: sorted(fr.vertices))


@dataclass(frozen=True)
class Fragment:
    """A decomposition fragment with its attachment chain and cached completion."""

    level: int  # 1-based, outermost first
    index: int  # position within the level
    vertices: frozenset[int]
    provenance: str  # "simplicial" | "separator" | "residual"
    attachments: tuple[frozenset[int], ...]
    completion: Optional[Completion]


@dataclass(frozen=True)
class TerminalSet:
    """A shard of some fragment's attachment set, hosted in a higher-level fragment."""

    host_level: int
    host_fragment: int
    origin_level: int
    origin_fragment: int
    position: int  # 1-based position in the origin's attachment chain
    vertices: frozenset[int]


@dataclass(frozen=True)
class Decomposition:
    graph: Graph
    levels: tuple[tuple[Fragment, ...], ...]
    terminal_sets: tuple[TerminalSet, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def fragment(self, level: int, index: int) -> Fragment:
        return self.levels[level - 1][index]

    def terminal_sets_in(self, level: int, index: int) -> list[TerminalSet]:
        return [t for t in self.terminal_sets if t.host_level == level and t.host_fragment == index]

    def to_json_dict(self) -> dict:
        return {
            "levels": [
                {
                    "fragments": [
                        {
                            "vertices": sorted(f.vertices),
                            "attachments": [sorted(a) for a in f.attachments],
                        }
                        for f in level
                    ]
                }
                for level in self.levels
            ],
            "terminal_sets": [
                {
                    "level": t.host_level,
                    "from_level": t.origin_level,
                    "fragment": t.host_fragment,
                    "origin_fragment": t.origin_fragment,
                    "position": t.position,
                    "vertices": sorted(t.vertices),
                }
                for t in self.terminal_sets
            ],
        }


def _is_interval_graph(g: Graph) -> bool:
    if g.n == 0:
        return True
    for comp in g.components():
        sub, _ = g.subgraph(comp)
        if build_pq_tree(sub) is None:
            return False
    return True


def canonical_decomposition(g: Graph, d: int) -> Decomposition:
    """Level decomposition: repeated extraction until the residue is interval.

    The interval residue's connected components become the final level.
    Disconnected inputs are decomposed per component and merged by level
    index.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if is_chordal(g) is None:
        raise NotChordal("decomposition requires a chordal graph")
    if g.n == 0:
        return Decomposition(g, (), ())
    if not g.is_connected():
        return _merge_component_decompositions(g, d)

    levels: list[list[Fragment]] = []
    terminal_sets: list[TerminalSet] = []
    active: list[dict] = []  # origin_level, origin_fragment, position, remaining
    residue: list[int] = list(range(g.n))
    level = 0
    while residue:
        sub, idx = g.subgraph(residue)
        back = {i: v for v, i in idx.items()}
        if not sub.is_connected():
            raise NotTGraph("residue disconnected during decomposition", level=level + 1)
        interval = _is_interval_graph(sub)
        level += 1
        if interval:
            fragments = [
                Fragment(level, i, comp, "residual", (), None)
                for i, comp in enumerate(
                    sorted((frozenset(back[x] for x in c) for c in sub.components()), key=sorted)
                )
            ]
            levels.append(fragments)
            _distribute_shards(active, fragments, terminal_sets)
            residue = []
            break
        extracted = _extract(sub, tuple(back[i] for i in range(sub.n)), d, 0, g.n + 2)
        extracted.sort(key=lambda fr: sorted(fr.vertices))
        fragments = [
            Fragment(level, i, frozenset(fr.vertices), fr.provenance, fr.attachments, fr.completion)
            for i, fr in enumerate(extracted)
        ]
        levels.append(fragments)
        _distribute_shards(active, fragments, terminal_sets)
        for f in fragments:
            for pos, att in enumerate(f.attachments, start=1):
                active.append(
                    {
                        "origin_level": level,
                        "origin_fragment": f.index,
                        "position": pos,
                        "remaining": set(att),
                    }
                )
        removed = frozenset().union(*(f.vertices for f in fragments))
        residue = [v for v in residue if v not in removed]
    for entry in active:
        if entry["remaining"]:
            raise AssertionError("terminal shards not fully distributed")
    return Decomposition(g, tuple(tuple(lv) for lv in levels), tuple(terminal_sets))


def _distribute_shards(active: list[dict], fragments: list[Fragment], terminal_sets: list[TerminalSet]):
    for entry in active:
        if not entry["remaining"]:
            continue
        for f in fragments:
            shard = frozenset(entry["remaining"] & f.vertices)
            if shard:
                terminal_sets.append(
                    TerminalSet(
                        f.level,
                        f.index,
                        entry["origin_level"],
                        entry["origin_fragment"],
                        entry["position"],
                        shard,
                    )
                )
                entry["remaining"] -= shard


def _merge_component_decompositions(g: Graph, d: int) -> Decomposition:
    levels: dict[int, list[Fragment]] = {}
    terminal_sets: list[TerminalSet] = []
    for comp in g.components():
        sub, idx = g.subgraph(comp)
        back = {i: v for v, i in idx.items()}
        dec = canonical_decomposition(sub, d)
        frag_renumber: dict[tuple[int, int], int] = {}
        for lv in dec.levels:
            for f in lv:
                target = levels.setdefault(f.level, [])
                frag_renumber[(f.level, f.index)] = len(target)
                target.append(
                    Fragment(
                        f.level,
                        len(target),
                        frozenset(back[v] for v in f.vertices),
                        f.provenance,
                        tuple(frozenset(back[v] for v in a) for a in f.attachments),
                        f.completion,
                    )
                )
        for t in dec.terminal_sets:
            terminal_sets.append(
                TerminalSet(
                    t.host_level,
                    frag_renumber[(t.host_level, t.host_fragment)],
                    t.origin_level,
                    frag_renumber[(t.origin_level, t.origin_fragment)],
                    t.position,
                    frozenset(back[v] for v in t.vertices),
                )
            )
    ordered = tuple(tuple(levels[k]) for k in sorted(levels))
    return Decomposition(g, ordered, tuple(terminal_sets))
