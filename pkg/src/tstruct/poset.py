"""Finite posets of primes and their specialization-closed subsets.

A :class:`PrimePoset` stands in for ``Spec(R)`` ordered by inclusion:
``p <= q`` means ``p`` is contained in ``q``, so ``q`` is a specialization
of ``p``.  Specialization-closed subsets are therefore the up-closed ones.

Elements are kept in label-lexicographic order and every subset is carried
internally as an integer bitmask over that order.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import _backend
from .errors import InputError, ResourceError

MAX_ENUMERATION_SIZE = 20


def guards_lifted() -> bool:
    return os.environ.get("TSTRUCT_GUARD_OVERRIDE", "") not in ("", "0")


def _popcount(x: int) -> int:
    return bin(x).count("1")


class PrimePoset:
    """Immutable finite poset of prime labels.

    ``covers`` are ``(lower, upper)`` pairs; the order is their reflexive
    transitive closure.  A cycle among the covers is rejected since it
    would break antisymmetry.
    """

    __slots__ = (
        "elements", "index", "up", "down", "full_mask", "residues",
        "_hash", "_induced", "_memo",
    )

    def __init__(self, elements: Iterable[str], covers: Iterable = (),
                 residues: dict | None = None):
        labels = [str(e) for e in elements]
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise InputError(f"duplicate prime labels: {dup}")
        self.elements = tuple(sorted(labels))
        self.index = {p: i for i, p in enumerate(self.elements)}
        n = len(self.elements)
        # strict successors from the covers, then transitive closure
        succ = [0] * n
        for pair in covers:
            lo, hi = pair
            i, j = self._idx(lo), self._idx(hi)
            if i == j:
                continue
            succ[i] |= 1 << j
        up = [(1 << i) | succ[i] for i in range(n)]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = up[i]
                rest = acc & ~(1 << i)
                while rest:
                    b = rest & -rest
                    acc |= up[b.bit_length() - 1]
                    rest ^= b
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        for i in range(n):
            for j in range(i + 1, n):
                if (up[i] >> j) & 1 and (up[j] >> i) & 1:
                    raise InputError(
                        f"order is not antisymmetric: {self.elements[i]} and "
                        f"{self.elements[j]} lie above each other")
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if (up[i] >> j) & 1:
                    down[j] |= 1 << i
        self.up = tuple(up)
        self.down = tuple(down)
        self.full_mask = (1 << n) - 1
        res = dict(residues or {})
        for key in res:
            self._idx(key)
        self.residues = res
        self._hash = hash((self.elements, self.up))
        self._induced: dict[int, PrimePoset] = {}
        self._memo: dict = {}

    @classmethod
    def from_order(cls, elements: Iterable[str], leq_pairs: Iterable,
                   residues: dict | None = None) -> "PrimePoset":
        """Build from a full relation, checking it is a partial order."""
        labels = sorted(str(e) for e in elements)
        rel = {(str(a), str(b)) for a, b in leq_pairs}
        known = set(labels)
        for a, b in rel:
            if a not in known or b not in known:
                raise InputError(f"unknown label in relation: {(a, b)}")
        for p in labels:
            if (p, p) not in rel:
                raise InputError(f"relation is not reflexive at {p}")
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise InputError(f"relation is not antisymmetric: {a}, {b}")
        for a, b in rel:
            for c, d in rel:
                if b == c and (a, d) not in rel:
                    raise InputError(
                        f"relation is not transitive: {a}<={b}<={d}")
        return cls(labels, [(a, b) for a, b in rel if a != b], residues)

    def _idx(self, label) -> int:
        try:
            return self.index[str(label)]
        except KeyError:
            raise InputError(f"unknown prime label {label!r}") from None

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, label) -> bool:
        return label in self.index

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, PrimePoset):
            return NotImplemented
        return self.elements == other.elements and self.up == other.up

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"PrimePoset({list(self.elements)}, covers={self.covers()})"

    def leq(self, p, q) -> bool:
        return bool((self.up[self._idx(p)] >> self._idx(q)) & 1)

    def covers(self) -> list[tuple[str, str]]:
        """Hasse diagram edges as sorted ``(lower, upper)`` pairs."""
        cached = self._memo.get("covers")
        if cached is not None:
            return list(cached)
        out = []
        n = len(self.elements)
        for i in range(n):
            strict = self.up[i] & ~(1 << i)
            for j in range(n):
                if not (strict >> j) & 1:
                    continue
                between = strict & self.down[j] & ~(1 << j)
                if not between:
                    out.append((self.elements[i], self.elements[j]))
        out.sort()
        self._memo["covers"] = tuple(out)
        return out

    def mask_of(self, labels: Iterable) -> int:
        mask = 0
        for p in labels:
            mask |= 1 << self._idx(p)
        return mask

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(p for i, p in enumerate(self.elements) if (mask >> i) & 1)

    def up_closure_mask(self, mask: int) -> int:
        acc = 0
        rest = mask
        while rest:
            b = rest & -rest
            acc |= self.up[b.bit_length() - 1]
            rest ^= b
        return acc

    def down_closure_mask(self, mask: int) -> int:
        acc = 0
        rest = mask
        while rest:
            b = rest & -rest
            acc |= self.down[b.bit_length() - 1]
            rest ^= b
        return acc

    def is_up_closed_mask(self, mask: int) -> bool:
        return self.up_closure_mask(mask) == mask

    def residue(self, label: str) -> str:
        self._idx(label)
        return self.residues.get(label, f"k({label})")

    def to_dict(self) -> dict:
        doc = {"elements": list(self.elements),
               "covers": [list(c) for c in self.covers()]}
        if self.residues:
            doc["residues"] = dict(sorted(self.residues.items()))
        return doc


@dataclass(frozen=True)
class SpSubset:
    """An up-closed subset of a :class:`PrimePoset`."""

    poset: PrimePoset
    mask: int

    @property
    def members(self) -> frozenset[str]:
        return frozenset(self.poset.labels_of(self.mask))

    def labels(self) -> tuple[str, ...]:
        return self.poset.labels_of(self.mask)

    def __iter__(self):
        return iter(self.labels())

    def __len__(self) -> int:
        return _popcount(self.mask)

    def __contains__(self, label) -> bool:
        i = self.poset.index.get(label)
        return i is not None and bool((self.mask >> i) & 1)

    def __le__(self, other: "SpSubset") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "SpSubset") -> "SpSubset":
        return SpSubset(self.poset, self.mask | other.mask)

    def __and__(self, other: "SpSubset") -> "SpSubset":
        return SpSubset(self.poset, self.mask & other.mask)

    def is_empty(self) -> bool:
        return self.mask == 0

    def is_full(self) -> bool:
        return self.mask == self.poset.full_mask

    def __repr__(self) -> str:
        return "{" + ", ".join(self.labels()) + "}"


def sp_subset(poset: PrimePoset, labels: Iterable) -> SpSubset:
    """Wrap ``labels`` as an :class:`SpSubset`, rejecting non-up-closed sets."""
    mask = poset.mask_of(labels)
    if not poset.is_up_closed_mask(mask):
        missing = poset.labels_of(poset.up_closure_mask(mask) & ~mask)
        raise InputError(
            f"subset {list(poset.labels_of(mask))} is not stable under "
            f"specialization; missing {list(missing)}")
    return SpSubset(poset, mask)


def closure_up(poset: PrimePoset, seed: Iterable) -> SpSubset:
    """Smallest up-closed superset of ``seed``."""
    return SpSubset(poset, poset.up_closure_mask(poset.mask_of(seed)))


def _sort_key(poset: PrimePoset):
    def key(mask):
        return (_popcount(mask), poset.labels_of(mask))
    return key


def upset_masks(poset: PrimePoset) -> list[int]:
    """Bitmasks of all up-sets in the canonical order (size, then labels)."""
    n = len(poset)
    if n > MAX_ENUMERATION_SIZE and not guards_lifted():
        raise ResourceError(
            f"poset has {n} elements; enumeration is limited to "
            f"{MAX_ENUMERATION_SIZE} (set TSTRUCT_GUARD_OVERRIDE to lift)")
    masks = _backend.upset_masks(n, list(poset.up), list(poset.down))
    masks.sort(key=_sort_key(poset))
    return masks


def enumerate_sp_subsets(poset: PrimePoset) -> list[SpSubset]:
    return [SpSubset(poset, m) for m in upset_masks(poset)]


def connected_components(poset: PrimePoset) -> list[frozenset[str]]:
    """Components of the comparability graph, ordered by least label."""
    return [frozenset(poset.labels_of(m)) for m in component_masks(poset)]


def component_masks(poset: PrimePoset, within: int | None = None) -> list[int]:
    """Connected components of the subposet on ``within`` (default: all)."""
    if within is None:
        within = poset.full_mask
    key = ("components", within)
    cached = poset._memo.get(key)
    if cached is not None:
        return list(cached)
    comps = []
    remaining = within
    while remaining:
        low = remaining & -remaining
        comp = low
        frontier = low
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            i = b.bit_length() - 1
            nbrs = (poset.up[i] | poset.down[i]) & within & ~comp
            comp |= nbrs
            frontier |= nbrs
        comps.append(comp)
        remaining &= ~comp
    # lowest set bit is the smallest label, so this order is already by label
    poset._memo[key] = tuple(comps)
    return comps


def minimal_primes(poset: PrimePoset) -> frozenset[str]:
    return frozenset(poset.labels_of(minimal_mask(poset)))


def minimal_mask(poset: PrimePoset, within: int | None = None) -> int:
    if within is None:
        within = poset.full_mask
    out = 0
    for i in range(len(poset)):
        if (within >> i) & 1 and not (poset.down[i] & within & ~(1 << i)):
            out |= 1 << i
    return out


def induced_subposet(poset: PrimePoset, keep: Iterable) -> PrimePoset:
    return induced_by_mask(poset, poset.mask_of(keep))


def induced_by_mask(poset: PrimePoset, mask: int) -> PrimePoset:
    if mask == poset.full_mask:
        return poset
    cached = poset._induced.get(mask)
    if cached is not None:
        return cached
    labels = poset.labels_of(mask)
    pairs = []
    for i, p in enumerate(poset.elements):
        if not (mask >> i) & 1:
            continue
        above = poset.up[i] & mask & ~(1 << i)
        for q in poset.labels_of(above):
            pairs.append((p, q))
    residues = {k: v for k, v in poset.residues.items() if k in labels}
    sub = PrimePoset(labels, pairs, residues)
    poset._induced[mask] = sub
    return sub


def is_stable_within(poset: PrimePoset, S: Iterable, W: Iterable,
                     direction: str) -> bool:
    """Whether ``S`` is stable under ``direction`` inside ``W``.

    ``direction`` is ``"specialization"`` or ``"generalization"``.
    """
    s, w = poset.mask_of(S), poset.mask_of(W)
    if s & ~w:
        raise InputError(
            f"{list(poset.labels_of(s & ~w))} lie in S but not in W")
    if direction == "specialization":
        spread = poset.up
    elif direction == "generalization":
        spread = poset.down
    else:
        raise InputError(f"unknown direction {direction!r}")
    rest = s
    while rest:
        b = rest & -rest
        rest ^= b
        if spread[b.bit_length() - 1] & w & ~s:
            return False
    return True


def disjoint_union(*posets: PrimePoset, prefixes: Iterable[str] | None = None
                   ) -> PrimePoset:
    """Disjoint union; labels are prefixed when ``prefixes`` is given."""
    prefixes = list(prefixes) if prefixes is not None else [""] * len(posets)
    elements, covers, residues = [], [], {}
    for pre, P in zip(prefixes, posets):
        elements.extend(pre + p for p in P.elements)
        covers.extend((pre + a, pre + b) for a, b in P.covers())
        residues.update({pre + k: v for k, v in P.residues.items()})
    return PrimePoset(elements, covers, residues)


# -- isomorphism types, for exhaustive sweeps ---------------------------

def _canonical_relation(n: int, rel: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in rel))
        if best is None or key < best:
            best = key
    return best


def all_posets(n: int, connected: bool | None = None) -> list[PrimePoset]:
    """One representative per isomorphism type of ``n``-element posets.

    Labels are ``a, b, c, ...``.  ``connected=True`` keeps only connected
    types, ``connected=False`` only disconnected ones.
    """
    if n > 6 and not guards_lifted():
        raise ResourceError("isomorphism-type generation is limited to 6")
    labels = [chr(ord("a") + i) for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = {}
    for bits in range(1 << len(pairs)):
        rel = frozenset(pr for k, pr in enumerate(pairs) if (bits >> k) & 1)
        # transitivity
        if any((a, d) not in rel
               for a, b in rel for c, d in rel if b == c):
            continue
        key = _canonical_relation(n, rel)
        if key in seen:
            continue
        seen[key] = rel
    out = []
    for key in sorted(seen):
        P = PrimePoset(labels, [(labels[a], labels[b]) for a, b in key])
        if connected is None or (len(component_masks(P)) <= 1) == connected:
            out.append(P)
    return out
