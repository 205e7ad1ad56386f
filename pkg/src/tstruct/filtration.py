"""Filtrations by supports on a finite poset of primes.

A filtration is a decreasing map ``phi`` from the integers to up-closed
subsets.  On a finite poset it changes value only finitely often, so it is
stored canonically as

* ``values``: strictly decreasing tuple of up-set bitmasks ``v_0 > ... > v_t``
* ``jumps``: strictly increasing integers ``j_1 < ... < j_t``

with ``phi(i) = v_k`` where ``k`` counts the jumps strictly below ``i``.
So ``phi(i) = v_0`` for ``i <= j_1`` and ``phi(i) = v_t`` for ``i > j_t``.
Two filtrations are equal exactly when they agree at every integer.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError, ResourceError
from .poset import (
    PrimePoset, SpSubset, component_masks, guards_lifted, induced_by_mask,
    upset_masks,
)

INF = math.inf

MAX_WINDOW = 8
MAX_ENUM_POSET = 8


class SpFiltration:
    __slots__ = ("poset", "values", "jumps", "_hash")

    def __init__(self, poset: PrimePoset, values: Iterable[int],
                 jumps: Iterable[int]):
        values = tuple(values)
        jumps = tuple(int(j) for j in jumps)
        if not values:
            raise InputError("a filtration needs at least one value")
        if len(jumps) != len(values) - 1:
            raise InputError("need exactly one jump between consecutive values")
        for a, b in zip(jumps, jumps[1:]):
            if a >= b:
                raise InputError("jump indices must strictly increase")
        for v in values:
            if not poset.is_up_closed_mask(v):
                raise InputError(
                    f"value {list(poset.labels_of(v))} is not up-closed")
        for a, b in zip(values, values[1:]):
            if b & ~a or a == b:
                raise InputError("values must strictly decrease")
        self.poset = poset
        self.values = values
        self.jumps = jumps
        self._hash = hash((poset, values, jumps))

    # -- construction helpers ------------------------------------------

    @classmethod
    def _from_chain(cls, poset: PrimePoset, start: int, masks) -> "SpFiltration":
        """Filtration with ``phi(start + k) = masks[k]``, constant outside."""
        values = [masks[0]]
        jumps = []
        for k in range(1, len(masks)):
            if masks[k] != values[-1]:
                values.append(masks[k])
                jumps.append(start + k - 1)
        return cls(poset, values, jumps)

    @classmethod
    def _trusted(cls, poset: PrimePoset, values: tuple, jumps: tuple) -> "SpFiltration":
        """Skip validation; for values derived from an already valid filtration."""
        self = cls.__new__(cls)
        self.poset = poset
        self.values = values
        self.jumps = jumps
        self._hash = hash((poset, values, jumps))
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpFiltration):
            return NotImplemented
        return (self.values == other.values and self.jumps == other.jumps
                and self.poset == other.poset)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = [f"<= {j}: {list(self.poset.labels_of(v))}"
                 for j, v in zip(self.jumps, self.values)]
        parts.append(f"tail: {list(self.poset.labels_of(self.values[-1]))}")
        return "SpFiltration(" + "; ".join(parts) + ")"

    # -- evaluation ----------------------------------------------------

    def mask_at(self, i: int) -> int:
        return self.values[bisect_left(self.jumps, i)]

    def value_at(self, i: int) -> SpSubset:
        return SpSubset(self.poset, self.mask_at(i))

    @property
    def head(self) -> SpSubset:
        return SpSubset(self.poset, self.values[0])

    @property
    def tail(self) -> SpSubset:
        return SpSubset(self.poset, self.values[-1])

    def is_constant(self) -> bool:
        return not self.jumps

    def steps(self) -> list[tuple[int, SpSubset]]:
        """Canonical ``(threshold, value)`` list accepted by :func:`make_filtration`."""
        if not self.jumps:
            return [(0, self.head)]
        out = [(j, SpSubset(self.poset, v))
               for j, v in zip(self.jumps, self.values)]
        out.append((self.jumps[-1] + 1, self.tail))
        return out

    def window(self, pad: int = 1) -> range:
        """Indices covering every jump, padded on both sides."""
        if not self.jumps:
            return range(-pad, pad + 1)
        return range(self.jumps[0] - pad, self.jumps[-1] + pad + 1)

    def to_dict(self) -> dict:
        steps = [{"upto": j, "value": list(self.poset.labels_of(v))}
                 for j, v in zip(self.jumps, self.values)]
        return {"steps": steps, "tail": list(self.poset.labels_of(self.values[-1]))}


def make_filtration(poset: PrimePoset, steps) -> SpFiltration:
    """Build a filtration from ``(threshold, labels)`` steps.

    ``phi(i)`` is the value of the first step whose threshold is ``>= i``;
    beyond the last threshold the last value persists.  Equal consecutive
    values are merged.
    """
    steps = list(steps)
    if not steps:
        raise InputError("a filtration needs at least one step")
    thresholds = []
    masks = []
    for threshold, value in steps:
        if isinstance(value, SpSubset):
            if value.poset != poset:
                raise InputError("step value lives on a different poset")
            mask = value.mask
        else:
            mask = poset.mask_of(value)
        if not poset.is_up_closed_mask(mask):
            raise InputError(
                f"step value {list(poset.labels_of(mask))} is not stable "
                f"under specialization")
        thresholds.append(int(threshold))
        masks.append(mask)
    for a, b in zip(thresholds, thresholds[1:]):
        if a >= b:
            raise InputError(f"thresholds must strictly increase ({a}, {b})")
    for a, b in zip(masks, masks[1:]):
        if b & ~a:
            raise InputError(
                f"values must decrease: {list(poset.labels_of(b))} is not "
                f"contained in {list(poset.labels_of(a))}")
    values = [masks[0]]
    jumps = []
    for t, m in zip(thresholds, masks[1:]):
        if m != values[-1]:
            values.append(m)
            jumps.append(t)
    return SpFiltration(poset, values, jumps)


def constant_filtration(poset: PrimePoset, value) -> SpFiltration:
    mask = value.mask if isinstance(value, SpSubset) else poset.mask_of(value)
    return SpFiltration(poset, [mask], [])


def shift_filtration(poset: PrimePoset, m: int) -> SpFiltration:
    """``phi(i) = Spec`` for ``i <= m`` and empty above: the standard t-structure."""
    if poset.full_mask == 0:
        return SpFiltration(poset, [0], [])
    return SpFiltration(poset, [poset.full_mask, 0], [m])


def value_at(phi: SpFiltration, i: int) -> SpSubset:
    return phi.value_at(i)


def tail_intersection(phi: SpFiltration) -> SpSubset:
    return phi.tail


def jumps(phi: SpFiltration) -> list[int]:
    """All ``i`` with ``phi(i)`` strictly larger than ``phi(i + 1)``."""
    return list(phi.jumps)


def jumps_above_tail(phi: SpFiltration) -> list[int]:
    # every stored jump drops strictly, so phi(i) differs from the tail there
    tail = phi.values[-1]
    return [j for j, v in zip(phi.jumps, phi.values) if v != tail]


def shifted(phi: SpFiltration, k: int) -> SpFiltration:
    """``i -> phi(i - k)``."""
    return SpFiltration(phi.poset, phi.values, [j + k for j in phi.jumps])


def localize(phi: SpFiltration, p: str) -> SpFiltration:
    """Intersect every value with ``Spec(R_p) = {q : q <= p}``."""
    P = phi.poset
    i = P._idx(p)
    keep = P.down[i]
    sub = induced_by_mask(P, keep)
    return _restrict(phi, keep, sub)


def _transfer(keep: int, mask: int) -> int:
    """Compress the bits of ``mask`` at the positions set in ``keep``.

    Induced subposets keep the label order, so the element at the k-th set
    bit of ``keep`` has index k in the subposet.
    """
    out = 0
    k = 0
    while keep:
        b = keep & -keep
        if mask & b:
            out |= 1 << k
        keep ^= b
        k += 1
    return out


def _restrict(phi: SpFiltration, keep: int, sub: PrimePoset) -> SpFiltration:
    P = phi.poset
    if sub is P:
        masks = [v & keep for v in phi.values]
    else:
        masks = [_transfer(keep, v) for v in phi.values]
    values = [masks[0]]
    js = []
    for j, m in zip(phi.jumps, masks[1:]):
        if m != values[-1]:
            values.append(m)
            js.append(j)
    # images of up-sets under restriction to a down-set or component stay up-sets
    return SpFiltration._trusted(sub, tuple(values), tuple(js))


def truncate_leq(phi: SpFiltration, k: int) -> SpFiltration:
    """``phi(j)`` for ``j <= k`` and empty for ``j > k``."""
    idx = bisect_left(phi.jumps, k)
    values = list(phi.values[: idx + 1])
    js = list(phi.jumps[:idx])
    if values[-1] != 0:
        values.append(0)
        js.append(k)
    return SpFiltration(phi.poset, values, js)


def restrict_to_component(phi: SpFiltration, component) -> SpFiltration:
    P = phi.poset
    mask = component if isinstance(component, int) else P.mask_of(component)
    if mask not in component_masks(P):
        raise InputError(
            f"{list(P.labels_of(mask))} is not a connected component")
    return _restrict(phi, mask, induced_by_mask(P, mask))


@dataclass(frozen=True)
class FiltrationShape:
    is_constant: bool
    is_eventually_trivial: bool
    is_left_bounded: bool
    is_nondegenerate: bool
    is_two_step: bool
    canonical_shift: int | None
    length: int | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def classify_shape(phi: SpFiltration) -> FiltrationShape:
    P = phi.poset
    tail_empty = phi.values[-1] == 0
    constant = not phi.jumps
    two_step = len(phi.jumps) == 1 and phi.values[0] == P.full_mask
    shift = phi.jumps[0] if two_step and tail_empty else None
    length = None
    if tail_empty and not constant:
        # first index where phi is empty, minus the first strict drop
        length = (phi.jumps[-1] + 1) - phi.jumps[0]
    return FiltrationShape(
        is_constant=constant,
        is_eventually_trivial=tail_empty,
        is_left_bounded=True,  # finitely many jumps on a finite poset
        is_nondegenerate=tail_empty,
        is_two_step=two_step,
        canonical_shift=shift,
        length=length,
    )


def level_masks(phi: SpFiltration) -> list:
    """Level of each element in poset order: ``max{i : p in phi(i)}``."""
    n = len(phi.poset)
    levels = [-INF] * n
    values, js = phi.values, phi.jumps
    last = len(values) - 1
    for i in range(n):
        bit = 1 << i
        if not values[0] & bit:
            continue
        if values[last] & bit:
            levels[i] = INF
            continue
        # values decrease, so membership is a prefix of the list
        k = 0
        while values[k + 1] & bit:
            k += 1
        levels[i] = js[k]
    return levels


def level_function(phi: SpFiltration) -> dict:
    return dict(zip(phi.poset.elements, level_masks(phi)))


def enumerate_filtrations(poset: PrimePoset, window: tuple[int, int]
                          ) -> Iterator[SpFiltration]:
    """Every filtration whose jumps lie in ``[lo, hi - 1]``.

    Equivalently every weakly decreasing chain ``phi(lo) >= ... >= phi(hi)``
    of up-sets, extended constantly outside the window.  Order is
    lexicographic in the up-set indices of :func:`~tstruct.poset.upset_masks`.
    """
    lo, hi = (int(x) for x in window)
    if hi < lo:
        raise InputError(f"empty window {lo}:{hi}")
    if not guards_lifted():
        if hi - lo > MAX_WINDOW:
            raise ResourceError(
                f"window width {hi - lo} exceeds the limit of {MAX_WINDOW}")
        if len(poset) > MAX_ENUM_POSET:
            raise ResourceError(
                f"poset has {len(poset)} elements; filtration enumeration "
                f"is limited to {MAX_ENUM_POSET}")
    masks = upset_masks(poset)
    # indices of up-sets contained in each up-set, in enumeration order
    below = [[j for j, b in enumerate(masks) if b & ~a == 0] for a in masks]
    length = hi - lo + 1
    chain = [0] * length

    def rec(pos, allowed):
        for j in allowed:
            chain[pos] = j
            if pos + 1 == length:
                yield SpFiltration._from_chain(
                    poset, lo, [masks[k] for k in chain])
            else:
                yield from rec(pos + 1, below[j])

    yield from rec(0, range(len(masks)))


def count_filtrations(poset: PrimePoset, window: tuple[int, int]) -> int:
    """Number of filtrations :func:`enumerate_filtrations` yields (by DP)."""
    lo, hi = window
    masks = upset_masks(poset)
    counts = [1] * len(masks)
    for _ in range(hi - lo):
        counts = [sum(counts[j] for j, b in enumerate(masks) if b & ~a == 0)
                  for a in masks]
    return sum(counts)
