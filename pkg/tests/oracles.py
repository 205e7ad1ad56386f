"""Slow, independent reference computations used only by the tests.

Nothing here calls the package's SNF, Ext closed forms or up-set kernels.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product


# -- posets ---------------------------------------------------------------------

def brute_upsets(elements, leq) -> list[frozenset]:
    """All subsets closed upward under ``leq(p, q)`` (p below q)."""
    elements = list(elements)
    out = []
    for bits in product((0, 1), repeat=len(elements)):
        S = {e for e, b in zip(elements, bits) if b}
        if all(q in S for p in S for q in elements if leq(p, q)):
            out.append(frozenset(S))
    return out


def brute_filtrations(upsets, lo, hi) -> set[tuple]:
    """Weakly decreasing tuples ``(phi(lo), ..., phi(hi))`` of up-sets."""
    out = set()

    def rec(prefix):
        if len(prefix) == hi - lo + 1:
            out.add(tuple(prefix))
            return
        for U in upsets:
            if not prefix or U <= prefix[-1]:
                rec(prefix + [U])

    rec([])
    return out


# -- Ext by element counting ------------------------------------------------------

def _cyclic_order_of_kernel(mult: int, t_mod: int) -> int:
    return sum(1 for x in range(t_mod) if (mult * x) % t_mod == 0)


def _image_size(mult: int, t_mod: int) -> int:
    return len({(mult * x) % t_mod for x in range(t_mod)})


def ext_local_order(p: int, a: int, s: int, t: int, i: int) -> int:
    """``|Ext^i_{Z/p^a}(Z/p^s, Z/p^t)|`` from the periodic resolution.

    ``Hom(-, Z/p^t)`` of ``... R -> R -> R`` has differentials
    ``d^0 = p^s, d^1 = p^(a-s), d^2 = p^s, ...`` on ``Z/p^t``; the orders of
    kernels and images are counted element by element.
    """
    N = p ** t

    def d(j):
        return p ** s if j % 2 == 0 else p ** (a - s)

    ker = _cyclic_order_of_kernel(d(i), N)
    img = 1 if i == 0 else _image_size(d(i - 1), N)
    assert ker % img == 0
    return ker // img


def ext_z_order(a: int, b: int, i: int):
    """``|Ext^i_Z(Z/a, Z/b)|`` with ``0`` meaning ``Z``; ``None`` if infinite.

    Uses the resolution ``0 -> Z --a--> Z -> Z/a``.
    """
    if i >= 2:
        return 1
    if b == 0:
        if a == 0:
            return None if i == 0 else 1
        # Hom(Z/a, Z) = 0, Ext^1 = Z / aZ
        return 1 if i == 0 else a
    if a == 0:
        return b if i == 0 else 1
    ker = _cyclic_order_of_kernel(a, b)
    img = _image_size(a, b)
    return ker if i == 0 else b // img


# -- finite modules by elements ------------------------------------------------------

def elements_of(invariants):
    return list(product(*[range(d) for d in invariants]))


def element_order(x, invariants) -> int:
    k = 1
    while any((k * xi) % d for xi, d in zip(x, invariants)):
        k += 1
    return k


def brute_hom_count(presentation, n_target_invariants) -> int:
    """Number of homomorphisms ``coker(A) -> prod Z/d_j`` over ``Z``.

    Generator images are tried exhaustively; a choice is a homomorphism iff
    every relation (column of ``A``) maps to zero.
    """
    inv = list(n_target_invariants)
    elems = elements_of(inv)
    g = len(presentation)
    ncols = len(presentation[0]) if g else 0
    count = 0
    for images in product(elems, repeat=g):
        ok = True
        for c in range(ncols):
            for j, d in enumerate(inv):
                if sum(presentation[r][c] * images[r][j] for r in range(g)) % d:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


@lru_cache(maxsize=None)
def brute_support_primes(invariants: tuple) -> frozenset[int]:
    """Primes dividing the order of some element of a finite module."""
    primes = set()
    for x in elements_of(invariants):
        o = element_order(x, invariants)
        q = 2
        while o > 1:
            while o % q == 0:
                primes.add(q)
                o //= q
            q += 1
    return frozenset(primes)
