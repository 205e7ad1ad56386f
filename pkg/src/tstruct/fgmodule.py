"""Finitely generated modules over ``Z`` and ``Z/n``.

A module is the cokernel of an integer matrix ``A`` with one row per
generator and one column per relation.  Over ``Z/n`` the presentation is
lifted to ``Z`` and the relations ``n * e_j`` are appended, so a single SNF
path serves both bases.

Ext groups come from closed forms on cyclic summands:

* over ``Z`` (hereditary): ``Hom(Z/a, Z/b) = Z/gcd(a, b)`` and
  ``Ext^1(Z/a, Z/b) = Z/gcd(a, b)`` with ``a = 0`` meaning ``Z``;
* over ``Z/p^a`` the cyclic ``Z/p^s`` has the 2-periodic free resolution
  ``... -> R --p^s--> R --p^(a-s)--> R --p^s--> R -> Z/p^s``, which gives
  explicit kernels and images on ``Hom(R, Z/p^t) = Z/p^t``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from math import gcd, prod
from typing import Iterable, NamedTuple

import sympy

from .errors import InputError, PreconditionError
from .poset import PrimePoset, SpSubset, closure_up
from .rings import DedekindMarked, ZmodN, spectrum
from .snf import smith_normal_form, snf_diagonal

DEFAULT_BOUND = 4096


def _normalize_base(base):
    if base in ("Z", "ZZ", 0) or (isinstance(base, DedekindMarked) and base.base == "Z"):
        return "Z"
    if isinstance(base, ZmodN):
        return base
    if isinstance(base, int):
        return ZmodN(base)
    raise InputError(f"modules are supported over Z and Z/n only, got {base!r}")


def _modulus(base) -> int:
    return 0 if base == "Z" else base.n


@dataclass(frozen=True)
class FgModule:
    """Cokernel of ``presentation`` (generators x relations) over ``base``."""

    base: object
    presentation: tuple

    def __post_init__(self):
        base = _normalize_base(self.base)
        rows = [tuple(int(x) for x in r) for r in self.presentation]
        if rows and len({len(r) for r in rows}) > 1:
            raise InputError("presentation rows have different lengths")
        n = _modulus(base)
        if n:
            rows = [tuple(x % n for x in r) for r in rows]
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "presentation", tuple(rows))

    # construction ------------------------------------------------------

    @classmethod
    def from_invariants(cls, base, factors: Iterable[int]) -> "FgModule":
        """``⊕ base/(d)``; over ``Z`` a factor ``0`` is a free summand."""
        fs = [int(d) for d in factors]
        if any(d < 0 for d in fs):
            raise InputError("invariant factors must be non-negative")
        k = len(fs)
        return cls(base, [[fs[i] if i == j else 0 for j in range(k)]
                          for i in range(k)])

    @classmethod
    def cyclic(cls, base, d: int) -> "FgModule":
        return cls.from_invariants(base, [d])

    @classmethod
    def zero(cls, base) -> "FgModule":
        return cls(base, ())

    @classmethod
    def free(cls, base, rank: int = 1) -> "FgModule":
        return cls(base, [()] * rank)

    @property
    def modulus(self) -> int:
        """``0`` over ``Z``, otherwise ``n``."""
        return _modulus(self.base)

    @property
    def ngens(self) -> int:
        return len(self.presentation)

    # structure -----------------------------------------------------------

    @cached_property
    def invariants(self) -> tuple[int, ...]:
        """Invariant factors ``d_1 | d_2 | ...`` with units dropped.

        Over ``Z`` free summands appear as trailing zeros; over ``Z/n`` a
        free summand appears as ``n``.
        """
        g, n = self.ngens, self.modulus
        if g == 0:
            return ()
        rows = [list(r) for r in self.presentation]
        if n:
            rows = [r + [n if i == j else 0 for j in range(g)]
                    for i, r in enumerate(rows)]
        diag = snf_diagonal(rows) if rows[0] else []
        diag = diag + [0] * (g - len(diag))
        return tuple(d for d in diag if d != 1)

    @cached_property
    def elementary(self) -> tuple[tuple[int, int], ...]:
        """Elementary divisors as sorted ``(p, exponent)`` pairs."""
        out = []
        for d in self.invariants:
            if d:
                out.extend(_prime_powers(d))
        return tuple(sorted(out))

    @property
    def free_rank(self) -> int:
        if self.modulus:
            return 0
        return sum(1 for d in self.invariants if d == 0)

    @property
    def torsion_invariants(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariants if d)

    def is_zero(self) -> bool:
        return not self.invariants

    def order(self) -> int | None:
        """Cardinality, or ``None`` when infinite."""
        if self.free_rank:
            return None
        return prod(self.invariants)

    def isomorphic(self, other: "FgModule") -> bool:
        return self.base == other.base and self.invariants == other.invariants

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        name = "Z" if self.base == "Z" else self.base.name
        parts = [name if d in (0, self.modulus) else f"Z/{d}" for d in self.invariants]
        return " + ".join(parts)

    def to_dict(self) -> dict:
        base = "Z" if self.base == "Z" else {"zmod": self.base.n}
        return {"base": base, "presentation": [list(r) for r in self.presentation]}

    def __add__(self, other: "FgModule") -> "FgModule":
        return direct_sum(self, other)

    def __repr__(self) -> str:
        return f"FgModule({self.describe()})"


class ExtResult(NamedTuple):
    degree: int
    value: FgModule

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero()


class TorsionSplit(NamedTuple):
    """``t = Gamma_Z(M)`` and ``M/t``; ``kept`` lists the summands of ``t``
    as ``(p, exponent)`` pairs, which is how ``t`` sits inside ``M``."""

    torsion: FgModule
    quotient: FgModule
    kept: tuple


def _prime_powers(d: int) -> list[tuple[int, int]]:
    return sorted(sympy.factorint(d).items())


def direct_sum(*modules: FgModule) -> FgModule:
    if not modules:
        raise InputError("direct_sum needs at least one module")
    base = modules[0].base
    for M in modules[1:]:
        if M.base != base:
            raise InputError("direct sum of modules over different bases")
    # block-diagonal presentation
    g = sum(M.ngens for M in modules)
    r = sum(len(M.presentation[0]) if M.ngens else 0 for M in modules)
    rows = [[0] * r for _ in range(g)]
    gi = ri = 0
    for M in modules:
        cols = len(M.presentation[0]) if M.ngens else 0
        for i, row in enumerate(M.presentation):
            rows[gi + i][ri:ri + cols] = row
        gi += M.ngens
        ri += cols
    return FgModule(base, rows)


def from_elementary(base, pairs: Iterable[tuple[int, int]], free_rank: int = 0
                    ) -> FgModule:
    """Assemble invariant factors from ``(p, exponent)`` elementary divisors."""
    by_prime: dict[int, list[int]] = {}
    for p, e in pairs:
        if e > 0:
            by_prime.setdefault(p, []).append(e)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * width
    for p, exps in by_prime.items():
        exps.sort(reverse=True)
        for j, e in enumerate(exps):
            factors[j] *= p ** e
    factors.reverse()
    return FgModule.from_invariants(base, factors + [0] * free_rank)


def decompose(M: FgModule) -> list[int]:
    return list(M.invariants)


# -- primes ------------------------------------------------------------------

_PRIME_LABEL = re.compile(r"^\((\d+)\)$")


def prime_of_label(label: str) -> int:
    """``"(p)" -> p`` and ``"(0)" -> 0``."""
    m = _PRIME_LABEL.match(label)
    if not m:
        raise InputError(f"{label!r} is not a prime of Z or Z/n")
    return int(m.group(1))


def default_ambient(M: FgModule, extra: Iterable[int] = ()) -> PrimePoset:
    """Spectrum of the base; over ``Z`` marks exactly the primes ``M`` needs."""
    if M.base != "Z":
        return spectrum(M.base)
    primes = sorted({p for p, _ in M.elementary} | set(extra))
    return spectrum(DedekindMarked("Z", tuple(primes)))


def _check_ambient(M: FgModule, ambient: PrimePoset) -> None:
    labels = set(ambient.elements)
    if M.base == "Z":
        if "(0)" not in labels:
            raise InputError("ambient poset is not a spectrum of Z (no generic point)")
        for p, _ in M.elementary:
            if f"({p})" not in labels:
                raise InputError(f"prime ({p}) is needed but not marked in the ambient spectrum")
    else:
        want = {f"({p})" for p, _ in M.base.factorization}
        if labels != want:
            raise InputError(
                f"ambient poset {sorted(labels)} is not the spectrum of {M.base.name}")


def associated_primes(M: FgModule, ambient: PrimePoset | None = None) -> frozenset[str]:
    ambient = ambient if ambient is not None else default_ambient(M)
    _check_ambient(M, ambient)
    out = {f"({p})" for p, _ in M.elementary}
    if M.free_rank:
        out.add("(0)")
    return frozenset(out)


def support(M: FgModule, ambient: PrimePoset | None = None) -> SpSubset:
    ambient = ambient if ambient is not None else default_ambient(M)
    return closure_up(ambient, associated_primes(M, ambient))


def _z_labels(Z) -> frozenset[str]:
    if isinstance(Z, SpSubset):
        return Z.members
    return frozenset(Z)


def is_torsion_member(M: FgModule, Z, ambient: PrimePoset | None = None) -> bool:
    if isinstance(Z, SpSubset):
        ambient = Z.poset if ambient is None else ambient
    return set(support(M, ambient).members) <= _z_labels(Z)


def torsion_radical(M: FgModule, Z) -> TorsionSplit:
    """Largest submodule supported in ``Z`` and the quotient by it."""
    Zl = _z_labels(Z)
    if isinstance(Z, SpSubset):
        P = Z.poset
        _check_ambient(M, P)
        if not P.is_up_closed_mask(Z.mask):
            raise InputError(f"{Z!r} is not stable under specialization")
    if "(0)" in Zl:
        return TorsionSplit(M, FgModule.zero(M.base), M.elementary)
    kept = tuple(pe for pe in M.elementary if f"({pe[0]})" in Zl)
    rest = [pe for pe in M.elementary if f"({pe[0]})" not in Zl]
    return TorsionSplit(from_elementary(M.base, kept),
                        from_elementary(M.base, rest, M.free_rank), kept)


# -- Hom and Ext ----------------------------------------------------------------

def _ext_cyclic_z(i: int, a: int, b: int) -> int:
    """Invariant factor of ``Ext^i_Z(Z/a, Z/b)`` (``0`` means ``Z``, ``1`` zero)."""
    if i == 0:
        if a == 0:
            return b
        return 1 if b == 0 else gcd(a, b)
    if i == 1:
        if a == 0:
            return 1
        return a if b == 0 else gcd(a, b)
    return 1


def _ext_exponent_local(i: int, a: int, s: int, t: int) -> int:
    """Exponent ``e`` with ``Ext^i_{Z/p^a}(Z/p^s, Z/p^t) = Z/p^e``.

    Applying ``Hom(-, Z/p^t)`` to the periodic resolution gives the complex
    ``Z/p^t --p^s--> Z/p^t --p^(a-s)--> Z/p^t --p^s--> ...``.  On ``Z/p^t``
    multiplication by ``p^c`` has kernel of exponent ``min(c, t)`` and image
    of exponent ``max(t - c, 0)``.
    """
    if i == 0:
        return min(s, t)
    if i % 2:
        # kernel of p^(a-s), modulo image of p^s
        return min(a - s, t) - max(t - s, 0)
    return min(s, t) - max(t - (a - s), 0)


def _p_parts(M: FgModule, p: int) -> list[int]:
    return [e for q, e in M.elementary if q == p]


def ext(i: int, M: FgModule, N: FgModule) -> ExtResult:
    if i < 0:
        raise InputError("Ext degree must be non-negative")
    if M.base != N.base:
        raise InputError(f"Ext between modules over {M.base!r} and {N.base!r}")
    base = M.base
    if base == "Z":
        factors = [_ext_cyclic_z(i, a, b) for a in M.invariants for b in N.invariants]
        factors = [f for f in factors if f != 1]
        free = sum(1 for f in factors if f == 0)
        pairs = [pe for f in factors if f for pe in _prime_powers(f)]
        return ExtResult(i, from_elementary(base, pairs, free))
    pairs = []
    for p, a in base.factorization:
        for s in _p_parts(M, p):
            for t in _p_parts(N, p):
                e = _ext_exponent_local(i, a, s, t)
                if e:
                    pairs.append((p, e))
    return ExtResult(i, from_elementary(base, pairs))


def hom(M: FgModule, N: FgModule) -> FgModule:
    return ext(0, M, N).value


def quotient_by_prime(base, label: str) -> FgModule:
    """The cyclic module ``R/p`` for a prime label ``"(p)"`` or ``"(0)"``."""
    base = _normalize_base(base)
    p = prime_of_label(label)
    if base == "Z":
        return FgModule.free(base) if p == 0 else FgModule.cyclic(base, p)
    if p == 0 or base.n % p:
        raise InputError(f"{label} is not a prime of {base.name}")
    return FgModule.cyclic(base, p)


# -- TF membership --------------------------------------------------------------

class TFResult(NamedTuple):
    verdict: bool
    certificates: tuple  # of (k, p, Ext^{k-1}(R/p, Y))


def tf_membership(Y: FgModule, m: int, phi, kmax: int = 3) -> TFResult:
    """Ext-vanishing test for ``Y`` in ``TF_m`` of the filtration ``phi``.

    The condition is ``Ext^{k-1}(R/p, Y) = 0`` for all ``k >= 1`` and
    ``p in phi(m + k)``.  Checking ``k <= 3`` suffices.  Over ``Z``,
    ``Ext^{k-1}`` vanishes for ``k >= 3``.  Over ``Z/n``, ``Ext^j`` is
    2-periodic for ``j >= 1``, so condition ``k >= 4`` asks the same as
    condition ``k - 2`` on the smaller set ``phi(m + k)``.
    """
    P = phi.poset
    if Y.base == "Z" and "(0)" not in P:
        raise InputError("filtration is not on a spectrum of Z")
    if not is_torsion_member(Y, phi.value_at(m), P):
        raise PreconditionError(
            f"{Y.describe()} is not supported in phi({m}); it is not in T_{m}")
    certs = []
    for k in range(1, kmax + 1):
        for p in phi.value_at(m + k).labels():
            E = ext(k - 1, quotient_by_prime(Y.base, p), Y)
            if not E.is_zero:
                certs.append((k, p, E.value))
    return TFResult(not certs, tuple(certs))


# -- catalogs -------------------------------------------------------------------

def _partitions(total_cap: int, part_cap: int | None, max_part: int | None = None):
    """Partitions (descending tuples) of every size ``<= total_cap``."""
    max_part = total_cap if max_part is None else min(max_part, total_cap)
    if part_cap is not None:
        max_part = min(max_part, part_cap)
    yield ()
    for first in range(1, max_part + 1):
        for rest in _partitions(total_cap - first, part_cap, first):
            yield (first,) + rest


def torsion_catalog(base, primes: Iterable[int], bound: int = DEFAULT_BOUND
                    ) -> list[FgModule]:
    """All modules up to isomorphism with support in ``primes`` and order
    at most ``bound``, smallest first."""
    base = _normalize_base(base)
    primes = sorted(set(primes))
    caps = {}
    for p in primes:
        if base == "Z":
            caps[p] = None
        else:
            caps[p] = dict(base.factorization).get(p)
            if caps[p] is None:
                raise InputError(f"{p} does not divide {base.n}")
    per_prime = []
    for p in primes:
        budget = 0
        while p ** (budget + 1) <= bound:
            budget += 1
        per_prime.append([(p, lam) for lam in _partitions(budget, caps[p])])
    out = []
    for combo in iproduct(*per_prime):
        order = prod(p ** sum(lam) for p, lam in combo)
        if order > bound:
            continue
        pairs = [(p, e) for p, lam in combo for e in lam]
        out.append((order, from_elementary(base, pairs)))
    out.sort(key=lambda t: (t[0], t[1].invariants))
    return [M for _, M in out]


def module_catalog(n: int, bound: int = DEFAULT_BOUND) -> list[FgModule]:
    """Every ``Z/n``-module of order ``<= bound`` up to isomorphism."""
    base = ZmodN(n)
    return torsion_catalog(base, [p for p, _ in base.factorization], bound)


# -- Ext-vanishing check ------------------------------------------------------------

class Lemma31Result(NamedTuple):
    holds: bool
    counterexample: FgModule | None
    catalog_side: bool
    prime_side: bool
    catalog_size: int


def verify_lemma31(ring, Z, i: int, M: FgModule, bound: int = DEFAULT_BOUND
                   ) -> Lemma31Result:
    """Compare ``Ext^i(T, M) = 0`` for all ``T`` supported in ``Z`` with
    ``Ext^i(R/p, M) = 0`` for all ``p in Z``, over a bounded catalog."""
    base = _normalize_base(ring)
    if base != M.base:
        raise InputError("module base differs from the ring")
    Zl = sorted(_z_labels(Z))
    if "(0)" in Zl:
        raise PreconditionError("Z must consist of maximal ideals for a finite catalog")
    primes = [prime_of_label(p) for p in Zl]
    prime_side = all(ext(i, quotient_by_prime(base, p), M).is_zero for p in Zl)
    catalog = torsion_catalog(base, primes, bound)
    witness = None
    for T in catalog:
        if not ext(i, T, M).is_zero:
            witness = T
            break
    catalog_side = witness is None
    if catalog_side == prime_side:
        return Lemma31Result(True, None, catalog_side, prime_side, len(catalog))
    if witness is None:
        witness = next(quotient_by_prime(base, p) for p in Zl
                       if not ext(i, quotient_by_prime(base, p), M).is_zero)
    return Lemma31Result(False, witness, catalog_side, prime_side, len(catalog))


__all__ = [
    "FgModule", "ExtResult", "TorsionSplit", "TFResult", "Lemma31Result",
    "smith_normal_form", "decompose", "direct_sum", "from_elementary",
    "support", "associated_primes", "torsion_radical", "is_torsion_member",
    "ext", "hom", "quotient_by_prime", "prime_of_label", "tf_membership",
    "torsion_catalog", "module_catalog", "verify_lemma31", "default_ambient",
]
