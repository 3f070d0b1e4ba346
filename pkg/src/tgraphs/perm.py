"""Permutation groups: base/strong generating sets, bounded-index subgroups, towers.

Composition convention: (p * q)(x) == q(p(x)), i.e. apply p first, then q.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import (
    DomainMismatch,
    DomainOverlap,
    IndexBoundExceeded,
    NotAPartition,
    NotClosed,
)


_IDENTITY_CACHE: dict[int, tuple[int, ...]] = {}


def _identity_images(m: int) -> tuple[int, ...]:
    images = _IDENTITY_CACHE.get(m)
    if images is None:
        images = _IDENTITY_CACHE[m] = tuple(range(m))
    return images


class Perm:
    """A permutation of 0..m-1 stored as a tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError("not a permutation of 0..m-1")
        self.images = images

    @classmethod
    def identity(cls, m: int) -> "Perm":
        p = cls.__new__(cls)
        p.images = tuple(range(m))
        return p

    @classmethod
    def from_cycles(cls, m: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        images = list(range(m))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:]):
                images[a] = b
            if cyc:
                images[cyc[-1]] = cyc[0]
        return cls(images)

    @classmethod
    def _raw(cls, images: tuple[int, ...]) -> "Perm":
        p = cls.__new__(cls)
        p.images = images
        return p

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Perm") -> "Perm":
        """Apply self first, then other."""
        return Perm._raw(tuple(map(other.images.__getitem__, self.images)))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm._raw(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == _identity_images(len(self.images))

    def moved_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i != j]

    def image_of_set(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[x] for x in s)

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm({list(self.images)})"


def format_perm(p: Perm) -> str:
    """One-line image array: '[i0 i1 ... i(m-1)]'."""
    return "[" + " ".join(str(i) for i in p.images) + "]"


def parse_perm(text: str) -> Perm:
    inner = text.strip()
    if inner.startswith("[") and inner.endswith("]"):
        inner = inner[1:-1]
    parts = inner.replace(",", " ").split()
    return Perm([int(x) for x in parts])


class _Level:
    __slots__ = ("point", "gens", "transversal", "inv_transversal", "processed")

    def __init__(self, point: int, degree: int):
        self.point = point
        self.gens: list[Perm] = []
        ident = Perm.identity(degree)
        self.transversal: dict[int, Perm] = {point: ident}
        self.inv_transversal: dict[int, Perm] = {point: ident}
        self.processed: set[tuple[int, int]] = set()


class PermGroup:
    """Permutation group with a base and strong generating set (Schreier-Sims).

    Immutable once constructed; derived groups are new values.
    """

    def __init__(self, degree: int, generators: Iterable[Perm] = (), base_hint: Sequence[int] = ()):
        self.degree = degree
        gens = []
        seen = set()
        for g in generators:
            if g.degree != degree:
                raise DomainMismatch(f"generator degree {g.degree} != {degree}")
            if g.is_identity() or g.images in seen:
                continue
            seen.add(g.images)
            gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._base_hint = list(base_hint)
        self._levels: list[_Level] = []
        self._sifted: set[tuple[int, ...]] = set()
        for g in self.generators:
            self._add_strong_gen(g)

    # -- construction ---------------------------------------------------

    def _pick_base_point(self, g: Perm) -> int:
        for b in self._base_hint:
            if g(b) != b:
                return b
        return min(g.moved_points())

    def _strip(self, g: Perm) -> tuple[Perm, int]:
        h = g
        for i, lvl in enumerate(self._levels):
            x = h(lvl.point)
            if x == lvl.point:
                continue
            inv = lvl.inv_transversal.get(x)
            if inv is None:
                return h, i
            h = h * inv
        return h, len(self._levels)

    def _add_strong_gen(self, g: Perm):
        queue = [g]
        while queue:
            h, l = self._strip(queue.pop())
            if h.is_identity():
                continue
            if l == len(self._levels):
                self._levels.append(_Level(self._pick_base_point(h), self.degree))
            for i in range(l + 1):
                self._levels[i].gens.append(h)
            for i in range(l, -1, -1):
                for sgen in self._close_orbit(i):
                    # conjugate Schreier generators recur; sift each form once
                    if sgen.images not in self._sifted:
                        self._sifted.add(sgen.images)
                        queue.append(sgen)

    def _close_orbit(self, i: int) -> list[Perm]:
        """Extend level i's transversal; return unsifted Schreier generators."""
        lvl = self._levels[i]
        out = []
        progress = True
        while progress:
            progress = False
            for x in list(lvl.transversal):
                tx = lvl.transversal[x]
                for gi, g in enumerate(lvl.gens):
                    if (x, gi) in lvl.processed:
                        continue
                    lvl.processed.add((x, gi))
                    progress = True
                    y = g(x)
                    if y not in lvl.transversal:
                        t = tx * g
                        lvl.transversal[y] = t
                        lvl.inv_transversal[y] = t.inverse()
                    else:
                        sgen = tx * g * lvl.inv_transversal[y]
                        if not sgen.is_identity():
                            out.append(sgen)
        return out

    # -- queries ---------------------------------------------------------

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(lvl.point for lvl in self._levels)

    def order(self) -> int:
        n = 1
        for lvl in self._levels:
            n *= len(lvl.transversal)
        return n

    def contains(self, p: Perm) -> bool:
        if p.degree != self.degree:
            raise DomainMismatch(f"permutation degree {p.degree} != {self.degree}")
        h, _ = self._strip(p)
        return h.is_identity()

    __contains__ = contains

    def elements(self, limit: int = 1_000_000) -> Iterator[Perm]:
        """All group elements (guarded; intended for small groups)."""
        if self.order() > limit:
            raise ValueError(f"group order {self.order()} exceeds limit {limit}")

        def rec(i: int) -> Iterator[Perm]:
            if i == len(self._levels):
                yield Perm.identity(self.degree)
                return
            for h in rec(i + 1):
                for t in self._levels[i].transversal.values():
                    yield h * t

        return rec(0)

    def random_element(self, rng: random.Random) -> Perm:
        g = Perm.identity(self.degree)
        for lvl in self._levels:
            x = rng.choice(sorted(lvl.transversal))
            g = g * lvl.transversal[x]
        return g

    def conjugate_or_copy(self, base_hint: Sequence[int]) -> "PermGroup":
        """Same group, rebuilt with a preferred base order (for searches)."""
        return PermGroup(self.degree, self.generators, base_hint=base_hint)

    def restriction(self, points: Sequence[int]) -> "PermGroup":
        """Action restricted to an invariant point subset, renumbered 0..len-1."""
        points = list(points)
        index = {p: i for i, p in enumerate(points)}
        gens = []
        for g in self.generators:
            if any(g(p) not in index for p in points):
                raise DomainMismatch("point set is not invariant under the group")
            gens.append(Perm([index[g(p)] for p in points]))
        return PermGroup(len(points), gens)

    def search(
        self,
        accept_partial: Callable[[int, Perm], bool],
        accept_full: Callable[[Perm], bool],
    ) -> Optional[Perm]:
        """Depth-first search over the stabilizer chain.

        accept_partial(i, R) sees a partial product whose images of
        base[0..i] are final; pruning must be sound w.r.t. accept_full.
        """
        levels = self._levels

        def dfs(i: int, r: Perm) -> Optional[Perm]:
            if i == len(levels):
                return r if accept_full(r) else None
            for x in sorted(levels[i].transversal):
                r2 = levels[i].transversal[x] * r
                if not accept_partial(i, r2):
                    continue
                found = dfs(i + 1, r2)
                if found is not None:
                    return found
            return None

        return dfs(0, Perm.identity(self.degree))

    def to_json(self) -> str:
        """Generators as a JSON array of image arrays."""
        return json.dumps([list(g.images) for g in self.generators])

    @classmethod
    def from_json(cls, degree: int, text: str) -> "PermGroup":
        return cls(degree, [Perm(images) for images in json.loads(text)])

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order()})"


def build_group(m: int, gens: Iterable[Perm]) -> PermGroup:
    """Group generated by gens acting on 0..m-1."""
    return PermGroup(m, gens)


def reduced_group(degree: int, gens: Iterable[Perm], base_hint: Sequence[int] = ()) -> PermGroup:
    """The same group from a greedily filtered generating set.

    Keeps only generators that grow the group, so the kept list stays within
    log2(order); worthwhile whenever many redundant generators accumulate.
    """
    group = PermGroup(degree, [], base_hint=base_hint)
    kept: list[Perm] = []
    for g in gens:
        if g.degree != degree:
            raise DomainMismatch(f"generator degree {g.degree} != {degree}")
        if not g.is_identity() and not group.contains(g):
            kept.append(g)
            group._add_strong_gen(g)
    group.generators = tuple(kept)
    return group


@dataclass
class MembershipPredicate:
    """Decidable subgroup membership test with a declared index bound.

    An optional coset signature accelerates subgroup computation. It must be
    a right-coset invariant: x and y in the same coset of the subgroup imply
    sig(x) == sig(y). Coarser-than-coset signatures stay correct (they only
    lengthen the within-bucket scan); sufficiency is not assumed.
    """

    test: Callable[[Perm], bool]
    index_bound: int
    name: str = ""
    signature: Optional[Callable[[Perm], "object"]] = None

    def __call__(self, p: Perm) -> bool:
        return self.test(p)


def fhl_subgroup(
    group: PermGroup,
    pred: MembershipPredicate,
    debug_closure_samples: int = 0,
    rng: Optional[random.Random] = None,
) -> PermGroup:
    """Generators of {p in group : pred(p)} via coset-representative discovery.

    Walks the coset graph of the subgroup, using pred (or its coset signature)
    to decide which coset a product falls in; Schreier generators of the
    subgroup are collected along the way. Aborts with IndexBoundExceeded when
    more than pred.index_bound cosets appear.
    """
    from collections import deque

    ident = Perm.identity(group.degree)
    if not pred(ident):
        raise NotClosed(f"predicate {pred.name!r} rejects the identity")
    reps: list[Perm] = [ident]
    inv_reps: list[Perm] = [ident]
    hgens: dict[tuple[int, ...], Perm] = {}
    buckets: dict[object, list[int]] = {}

    def bucket_of(x: Perm) -> list[int]:
        if pred.signature is None:
            return buckets.setdefault(None, [])
        return buckets.setdefault(pred.signature(x), [])

    bucket_of(ident).append(0)

    def translate(x: Perm, bucket: list[int]) -> bool:
        """Fold x into a known coset, collecting the subgroup translation."""
        for idx in bucket:
            h = x * inv_reps[idx]
            if pred(h):
                if not h.is_identity():
                    hgens.setdefault(h.images, h)
                return True
        return False

    queue = deque([ident])
    while queue:
        r = queue.popleft()
        for s in group.generators:
            x = r * s
            bucket = bucket_of(x)
            if translate(x, bucket):
                continue
            if len(reps) >= pred.index_bound:
                raise IndexBoundExceeded(
                    f"more than {pred.index_bound} cosets for predicate {pred.name!r}",
                    bound=pred.index_bound,
                    stage=pred.name,
                )
            bucket.append(len(reps))
            reps.append(x)
            inv_reps.append(x.inverse())
            queue.append(x)
    # the representatives form an exact transversal, so the subgroup order is
    # known; generator reduction can stop as soon as the chain reaches it
    target = group.order() // len(reps)
    sub = PermGroup(group.degree, [])
    kept: list[Perm] = []
    for h in hgens.values():
        if sub.order() >= target:
            break
        if not sub.contains(h):
            kept.append(h)
            sub._add_strong_gen(h)
    sub.generators = tuple(kept)
    if sub.order() != target or group.order() % len(reps) != 0:
        raise AssertionError(
            f"subgroup order {sub.order()} disagrees with coset count for {pred.name!r}"
        )
    if debug_closure_samples and rng is not None:
        _closure_check(sub, pred, debug_closure_samples, rng)
    return sub


def _closure_check(sub: PermGroup, pred: MembershipPredicate, samples: int, rng: random.Random):
    for _ in range(samples):
        a = sub.random_element(rng)
        b = sub.random_element(rng)
        if not pred(a * b) or not pred(a.inverse()):
            raise NotClosed(f"predicate {pred.name!r} is not closed under the group operation")


def tower_of_groups(
    g0: PermGroup,
    preds: Sequence[MembershipPredicate],
    debug_closure_samples: int = 0,
    rng: Optional[random.Random] = None,
) -> PermGroup:
    """Iterated subgroup computation along a chain of restrictions.

    Asserts the per-stage index ratio against each predicate's declared bound.
    """
    cur = g0
    for pred in preds:
        nxt = fhl_subgroup(cur, pred, debug_closure_samples, rng)
        prev_order, new_order = cur.order(), nxt.order()
        if prev_order % new_order != 0 or prev_order // new_order > pred.index_bound:
            raise IndexBoundExceeded(
                f"stage {pred.name!r} index {prev_order}/{new_order} exceeds {pred.index_bound}",
                bound=pred.index_bound,
                stage=pred.name,
            )
        cur = nxt
    return cur


def direct_product(groups: Sequence[PermGroup]) -> PermGroup:
    """Direct product on the concatenation of the factors' domains."""
    total = sum(g.degree for g in groups)
    gens = []
    offset = 0
    for g in groups:
        for gen in g.generators:
            images = list(range(total))
            for i, j in enumerate(gen.images):
                images[offset + i] = offset + j
            gens.append(Perm(images))
        offset += g.degree
    prod = PermGroup(total, gens)
    expected = 1
    for g in groups:
        expected *= g.order()
    if prod.order() != expected:
        raise DomainOverlap("direct product order mismatch (domains overlap?)")
    return prod


def symmetric_on_classes(classes: Sequence[Iterable[int]], degree: Optional[int] = None) -> PermGroup:
    """All permutations preserving each class setwise, arbitrary within."""
    classes = [sorted(c) for c in classes]
    covered = [v for c in classes for v in c]
    if degree is None:
        degree = max(covered) + 1 if covered else 0
    if sorted(covered) != list(range(degree)):
        raise NotAPartition("classes must partition 0..degree-1")
    gens = []
    for c in classes:
        if len(c) >= 2:
            gens.append(Perm.from_cycles(degree, [c[:2]]))
        if len(c) >= 3:
            gens.append(Perm.from_cycles(degree, [c]))
    return PermGroup(degree, gens)


def find_element(
    group: PermGroup,
    point_images: Optional[dict[int, int]] = None,
    set_images: Sequence[tuple[Iterable[int], Iterable[int]]] = (),
) -> Optional[Perm]:
    """An element with the prescribed point images mapping each set onto its target.

    Backtracks over the stabilizer chain, rebuilding the group with the
    constrained points first so pruning fires early. Exact (no sampling).
    """
    point_images = dict(point_images or {})
    pairs = [(frozenset(a), frozenset(b)) for a, b in set_images]
    for a, b in pairs:
        if len(a) != len(b):
            return None
    constrained = set(point_images)
    for a, _b in pairs:
        constrained |= a
    if not constrained:
        return Perm.identity(group.degree)
    search_group = group.conjugate_or_copy(base_hint=sorted(constrained))
    base = search_group.base

    def want(p: int, img: int) -> bool:
        target = point_images.get(p)
        if target is not None and img != target:
            return False
        for a, b in pairs:
            if p in a and img not in b:
                return False
        return True

    def accept_partial(i: int, r: Perm) -> bool:
        return want(base[i], r(base[i]))

    def accept_full(r: Perm) -> bool:
        return all(want(p, r(p)) for p in constrained)

    return search_group.search(accept_partial, accept_full)


def find_block_swap(group: PermGroup, block_a: Iterable[int], block_b: Iterable[int]) -> Optional[Perm]:
    """An element mapping block_a onto block_b and block_b onto block_a, or None."""
    a = frozenset(block_a)
    b = frozenset(block_b)
    if not a and not b:
        return Perm.identity(group.degree)
    return find_element(group, None, [(a, b), (b, a)])


def exists_block_swap(group: PermGroup, block_a: Iterable[int], block_b: Iterable[int]) -> bool:
    return find_block_swap(group, block_a, block_b) is not None


def find_with_images(group: PermGroup, prescribed: dict[int, int]) -> Optional[Perm]:
    """An element realizing the prescribed point images, or None."""
    return find_element(group, prescribed, ())
