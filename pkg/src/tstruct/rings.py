"""Concrete ring families, their spectra and rings of fractions.

Every ring is handled through its connected components (the factors
``R e_i`` for the primitive idempotents ``e_i``).  A component knows its
primes, residue fields and which specialization-closed subsets of its
spectrum are perfect; whole-ring answers are products of component
answers.

Perfectness is decided by rules only.  A subset no rule covers gets an
``unknown`` status rather than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable

import sympy

from .errors import InputError
from .poset import (
    PrimePoset, component_masks, disjoint_union, induced_by_mask, minimal_mask,
)

YES, NO, UNKNOWN = "yes", "no", "unknown"


# -- ring variants ----------------------------------------------------------

@dataclass(frozen=True)
class ZmodN:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"Z/n needs an integer n >= 2, got {self.n!r}")
        if prod(p ** a for p, a in self.factorization) != self.n:
            raise InputError(f"factorization of {self.n} does not multiply back")

    @cached_property
    def factorization(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(sympy.factorint(self.n).items()))

    @property
    def name(self) -> str:
        return f"Z/{self.n}"


@dataclass(frozen=True)
class PolyOverField:
    """``k[x]`` for a field named ``Q`` or ``F_p`` (other names are opaque)."""

    field: str

    @property
    def name(self) -> str:
        return f"{self.field}[x]"


@dataclass(frozen=True)
class DedekindMarked:
    """A Dedekind domain seen through finitely many named maximal ideals.

    ``base`` is ``"Z"`` or a :class:`PolyOverField`.  ``marked`` holds prime
    numbers for ``Z`` and irreducible polynomials (as strings in ``x``) for
    ``k[x]``.  The spectrum is the generic point ``(0)`` below the marked
    maximals.
    """

    base: object
    marked: tuple

    def __post_init__(self):
        object.__setattr__(self, "marked", tuple(self.marked))
        if self.base == "Z":
            for p in self.marked:
                if not isinstance(p, int) or not sympy.isprime(p):
                    raise InputError(f"marked ideal ({p}) of Z is not a nonzero prime")
        elif isinstance(self.base, PolyOverField):
            for g in self.marked:
                _parse_irreducible(self.base.field, g)
        else:
            raise InputError(f"unsupported Dedekind base {self.base!r}")
        labels = self.maximal_labels
        if len(set(labels)) != len(labels):
            raise InputError("marked maximal ideals must be distinct")
        if "(0)" in labels:
            raise InputError("label (0) is reserved for the generic point")

    @property
    def maximal_labels(self) -> tuple[str, ...]:
        if self.base == "Z":
            return tuple(f"({p})" for p in self.marked)
        return tuple(f"({_poly_text(self.base.field, g)})" for g in self.marked)

    @property
    def name(self) -> str:
        return "Z" if self.base == "Z" else self.base.name


@dataclass(frozen=True)
class PolyQuotient:
    """``k[x]/(f)`` with ``f = prod g_i^{e_i}`` given factored; Artinian."""

    field: str
    factors: tuple  # of (g, exponent)

    def __post_init__(self):
        facs = tuple((str(g), int(e)) for g, e in self.factors)
        if not facs:
            raise InputError("k[x]/(f) needs at least one factor of f")
        for g, e in facs:
            if e < 1:
                raise InputError(f"exponent of {g} must be positive")
            _parse_irreducible(self.field, g)
        texts = [_poly_text(self.field, g) for g, _ in facs]
        if len(set(texts)) != len(texts):
            raise InputError("irreducible factors must be distinct")
        object.__setattr__(self, "factors", facs)

    @property
    def name(self) -> str:
        parts = []
        for g, e in self.factors:
            t = _poly_text(self.field, g)
            parts.append(f"({t})" + (f"^{e}" if e > 1 else ""))
        return f"{self.field}[x]/({''.join(parts)})"


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InputError("a product ring needs at least one factor")

    @property
    def name(self) -> str:
        return " x ".join(f.name for f in self.factors)


@dataclass(frozen=True, eq=False)
class AbstractPoset:
    """A ring known only through its spectrum and declared facts.

    ``perfect`` / ``not_perfect`` list sp-subsets whose perfectness is known;
    ``reduced`` enables the minimal-primes rule.
    """

    poset: PrimePoset
    perfect: tuple = ()
    not_perfect: tuple = ()
    reduced: bool = False
    name: str = "R"

    def __post_init__(self):
        for attr in ("perfect", "not_perfect"):
            masks = []
            for labels in getattr(self, attr):
                m = self.poset.mask_of(labels)
                if not self.poset.is_up_closed_mask(m):
                    raise InputError(
                        f"declared {attr} subset {sorted(labels)} is not "
                        f"stable under specialization")
                masks.append(m)
            object.__setattr__(self, attr, tuple(
                frozenset(self.poset.labels_of(m)) for m in masks))
        clash = set(self.perfect) & set(self.not_perfect)
        if clash:
            raise InputError(f"subsets declared both perfect and not: {clash}")


RingSpec = ZmodN | DedekindMarked | PolyQuotient | Product | AbstractPoset


# -- rings of fractions -----------------------------------------------------

@dataclass(frozen=True)
class LocalizationDescription:
    """Description of ``R_Z`` as a product of factors.

    Each factor carries the set of primes of ``Spec(R)`` it lives over
    (a subset of the complement of ``Z``), so sub-products over a set of
    primes can be read off with :meth:`restrict`.
    """

    kind: str
    factors: tuple = ()  # of (frozenset of labels, text)
    is_flat_over_R: str = UNKNOWN
    label: str | None = None

    @property
    def text(self) -> str:
        if self.label is not None:
            return self.label
        if not self.factors:
            return "0"
        return " x ".join(t for _, t in self.factors)

    def restrict(self, labels: Iterable[str]) -> "LocalizationDescription":
        keep = frozenset(labels)
        facs = tuple(f for f in self.factors if f[0] <= keep)
        if not facs:
            return LocalizationDescription("zero", (), YES)
        if facs == self.factors:
            return self
        kind = "product" if self.kind == "identity" else self.kind
        return LocalizationDescription(kind, facs, self.is_flat_over_R)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class PerfectVerdict:
    status: str
    description: LocalizationDescription | None = None
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.status == YES


# -- components -------------------------------------------------------------

@dataclass
class Component:
    """One connected component of ``Spec(R)`` with its local rules."""

    labels: tuple[str, ...]
    covers: list
    residues: dict
    name: str
    idempotent: str
    kind: str
    data: dict = field(default_factory=dict)

    @property
    def label_set(self) -> frozenset:
        return frozenset(self.labels)

    def perfect(self, Z: frozenset) -> PerfectVerdict:
        """Perfectness of ``Z`` (a subset of this component) in ``R e``."""
        mine = self.label_set
        if not Z:
            return PerfectVerdict(YES, LocalizationDescription(
                "identity", ((mine, self.name),), YES))
        if Z == mine:
            return PerfectVerdict(YES, LocalizationDescription("zero", (), YES))
        if self.kind == "artinian":
            # a local Artinian ring has a single prime
            raise AssertionError("unreachable: proper nonempty Z on a point")
        if self.kind == "dedekind":
            generic = self.data["generic"]
            if generic in Z:
                raise InputError("Z contains (0) but is not all of Spec")
            rest = mine - Z
            text = self.data["localize"](sorted(Z))
            return PerfectVerdict(YES, LocalizationDescription(
                "localized_dedekind", ((frozenset(rest), text),), YES))
        if self.kind == "abstract":
            return self._abstract_perfect(Z)
        raise AssertionError(self.kind)

    def _abstract_perfect(self, Z: frozenset) -> PerfectVerdict:
        P: PrimePoset = self.data["poset"]
        mine = self.label_set
        zmask = P.mask_of(Z)
        if self.data["reduced"]:
            mins = frozenset(P.labels_of(minimal_mask(P)))
            if Z == mine - mins:
                facs = tuple((frozenset([p]), P.residue(p)) for p in sorted(mins))
                return PerfectVerdict(YES, LocalizationDescription(
                    "residue_fields", facs, YES))
        if Z in self.data["perfect"]:
            rest = P.full_mask & ~zmask
            facs = []
            comps = component_masks(P, rest)
            for c in comps:
                labs = frozenset(P.labels_of(c))
                txt = "R_Z" if len(comps) == 1 else \
                    "R_Z[" + ",".join(sorted(labs)) + "]"
                facs.append((labs, txt))
            return PerfectVerdict(YES, LocalizationDescription(
                "symbolic", tuple(facs), YES))
        if Z in self.data["not_perfect"]:
            return PerfectVerdict(
                NO, witness=f"{{{', '.join(sorted(Z))}}} declared not perfect")
        return PerfectVerdict(
            UNKNOWN,
            witness=f"perfectness of {{{', '.join(sorted(Z))}}} is not "
                    f"decided by any rule")


def _poly_symbols():
    return sympy.Symbol("x")


def _field_modulus(fieldname: str) -> int | None:
    if fieldname == "Q":
        return None
    if fieldname.startswith("F_"):
        try:
            p = int(fieldname[2:])
        except ValueError:
            raise InputError(f"unknown field {fieldname!r}") from None
        if not sympy.isprime(p):
            raise InputError(f"F_{p}: only prime fields are supported")
        return p
    raise InputError(f"unknown field {fieldname!r}; use Q or F_p")


def _to_poly(fieldname: str, g) -> sympy.Poly:
    x = _poly_symbols()
    p = _field_modulus(fieldname)
    try:
        expr = sympy.sympify(str(g).replace("^", "**"), locals={"x": x})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise InputError(f"cannot parse polynomial {g!r}") from exc
    if p is None:
        return sympy.Poly(expr, x, domain="QQ")
    return sympy.Poly(expr, x, modulus=p)


def _parse_irreducible(fieldname: str, g) -> sympy.Poly:
    poly = _to_poly(fieldname, g)
    if poly.degree() < 1:
        raise InputError(f"{g!r} is constant, not an irreducible polynomial")
    if not poly.is_irreducible:
        raise InputError(f"{g!r} is not irreducible over {fieldname}")
    return poly


def _poly_text(fieldname: str, g) -> str:
    poly = _to_poly(fieldname, g).monic()
    if _field_modulus(fieldname) is None:
        expr = poly.as_expr()
    else:
        expr = _symmetric_to_positive(poly, _field_modulus(fieldname))
    return str(expr).replace("**", "^").replace(" ", "")


def _symmetric_to_positive(poly: sympy.Poly, p: int):
    x = _poly_symbols()
    coeffs = [int(c) % p for c in poly.all_coeffs()]
    deg = len(coeffs) - 1
    return sum(c * x ** (deg - k) for k, c in enumerate(coeffs))


def _residue_of_poly(fieldname: str, g) -> str:
    d = _to_poly(fieldname, g).degree()
    p = _field_modulus(fieldname)
    if d == 1:
        return fieldname
    if p is not None:
        return f"F_{p ** d}"
    return f"{fieldname}[x]/({_poly_text(fieldname, g)})"


def _poly_idempotents(fieldname: str, factors) -> list[str]:
    """CRT idempotents of ``k[x]/(prod g_i^{e_i})`` as polynomial texts."""
    p = _field_modulus(fieldname)
    powers = [_to_poly(fieldname, g) ** e for g, e in factors]
    if len(powers) == 1:
        return ["1"]
    f = powers[0]
    for q in powers[1:]:
        f = f * q
    out = []
    for q in powers:
        rest = f.exquo(q)
        inv = rest.rem(q).invert(q)
        e = (rest * inv).rem(f)
        if p is not None:
            e = _symmetric_to_positive(e, p)
        else:
            e = e.as_expr()
        out.append(str(e).replace("**", "^").replace(" ", ""))
    return out


def crt_idempotents(n: int) -> dict[int, int]:
    """``{p: e_p}`` with ``e_p = 1 mod p^a`` and ``0`` modulo the rest of ``n``."""
    out = {}
    for p, a in ZmodN(n).factorization:
        q = p ** a
        rest = n // q
        out[p] = rest * pow(rest, -1, q) % n
    return out


def _components(ring, prefix: str = "") -> list[Component]:
    if isinstance(ring, ZmodN):
        idem = crt_idempotents(ring.n)
        out = []
        for p, a in ring.factorization:
            lab = f"{prefix}({p})"
            out.append(Component(
                labels=(lab,), covers=[], residues={lab: f"F_{p}"},
                name=f"Z/{p ** a}", idempotent=f"{idem[p]} mod {ring.n}",
                kind="artinian", data={"prime": p, "exponent": a,
                                       "idempotent": idem[p]}))
        return out
    if isinstance(ring, PolyQuotient):
        idems = _poly_idempotents(ring.field, ring.factors)
        out = []
        for (g, e), idem in zip(ring.factors, idems):
            t = _poly_text(ring.field, g)
            lab = f"{prefix}({t})"
            power = f"({t})" + (f"^{e}" if e > 1 else "")
            out.append(Component(
                labels=(lab,), covers=[],
                residues={lab: _residue_of_poly(ring.field, g)},
                name=f"{ring.field}[x]/{power}" if e > 1 or len(ring.factors) > 1
                else ring.name,
                idempotent=idem, kind="artinian", data={}))
        return out
    if isinstance(ring, DedekindMarked):
        gen = f"{prefix}(0)"
        maxl = [prefix + m for m in ring.maximal_labels]
        if ring.base == "Z":
            residues = {gen: "Q"}
            residues.update({prefix + f"({p})": f"F_{p}" for p in ring.marked})
            by_label = {prefix + f"({p})": str(p) for p in ring.marked}

            def localize(Z, _m=by_label):
                inv = [_m[z] for z in Z]
                return "Z[" + ", ".join(f"1/{q}" for q in sorted(inv, key=int)) + "]"
        else:
            fld = ring.base.field
            residues = {gen: f"{fld}(x)"}
            by_label = {}
            for g in ring.marked:
                t = _poly_text(fld, g)
                residues[prefix + f"({t})"] = _residue_of_poly(fld, g)
                by_label[prefix + f"({t})"] = t

            def localize(Z, _m=by_label, _f=fld):
                inv = [_m[z] for z in Z]
                return f"{_f}[x][" + ", ".join(f"1/({q})" for q in sorted(inv)) + "]"
        return [Component(
            labels=tuple(sorted([gen] + maxl)),
            covers=[(gen, m) for m in maxl], residues=residues,
            name=ring.name, idempotent="1", kind="dedekind",
            data={"generic": gen, "localize": localize})]
    if isinstance(ring, Product):
        out = []
        k = len(ring.factors)
        for i, fac in enumerate(ring.factors):
            for c in _components(fac, prefix=f"{prefix}f{i}."):
                slots = ["0"] * k
                slots[i] = c.idempotent
                c.idempotent = "(" + ", ".join(slots) + ")"
                out.append(c)
        return out
    if isinstance(ring, AbstractPoset):
        P = ring.poset
        declared_perfect, declared_not = ring.perfect, ring.not_perfect
        if prefix:
            P = disjoint_union(P, prefixes=[prefix])
            declared_perfect = tuple(frozenset(prefix + p for p in D) for D in declared_perfect)
            declared_not = tuple(frozenset(prefix + p for p in D) for D in declared_not)
        comps = component_masks(P)
        out = []
        for cm in comps:
            sub = induced_by_mask(P, cm)
            labs = frozenset(sub.elements)
            # a declared subset restricts to a component only when every
            # other component gets a trivially perfect part (empty or all)
            perfect = {D & labs for D in declared_perfect}
            not_perfect = set()
            for D in declared_not:
                others_trivial = all(
                    not (D & frozenset(P.labels_of(om)))
                    or frozenset(P.labels_of(om)) <= D
                    for om in comps if om != cm)
                if others_trivial:
                    not_perfect.add(D & labs)
            name = ring.name if len(comps) == 1 else \
                f"{ring.name}e[{','.join(sorted(labs))}]"
            out.append(Component(
                labels=tuple(sub.elements),
                covers=sub.covers(),
                residues={p: sub.residue(p) for p in sub.elements},
                name=name,
                idempotent="1" if len(comps) == 1 else
                f"e[{','.join(sorted(labs))}]",
                kind="abstract",
                data={"poset": sub, "perfect": perfect,
                      "not_perfect": not_perfect - perfect,
                      "reduced": ring.reduced}))
        return out
    raise InputError(f"unsupported ring {ring!r}")


@lru_cache(maxsize=512)
def _sorted_components(ring) -> tuple[Component, ...]:
    return tuple(sorted(_components(ring), key=lambda c: min(c.labels)))


def components(ring) -> list[Component]:
    """Connected components, sorted by least label (cached per ring)."""
    return list(_sorted_components(ring))


# -- operations ---------------------------------------------------------------

def spectrum(ring) -> PrimePoset:
    if isinstance(ring, AbstractPoset):
        return ring.poset
    elements, covers, residues = [], [], {}
    for c in components(ring):
        elements.extend(c.labels)
        covers.extend(c.covers)
        residues.update(c.residues)
    return PrimePoset(elements, covers, residues)


def connected_idempotents(ring) -> list[tuple[frozenset, str]]:
    return [(c.label_set, c.idempotent) for c in components(ring)]


def residue_field(ring, p: str) -> str:
    for c in components(ring):
        if p in c.label_set:
            return c.residues.get(p, f"k({p})")
    raise InputError(f"unknown prime {p!r}")


def _as_labels(ring, Z) -> frozenset:
    P = spectrum(ring)
    labels = Z.labels() if hasattr(Z, "labels") else Z
    mask = P.mask_of(labels)
    if not P.is_up_closed_mask(mask):
        raise InputError(
            f"{sorted(P.labels_of(mask))} is not stable under specialization")
    return frozenset(P.labels_of(mask))


def combine(ring, parts: list[tuple[Component, PerfectVerdict]],
            Z: frozenset) -> PerfectVerdict:
    """Whole-ring verdict from per-component verdicts."""
    for c, v in parts:
        if v.status == NO:
            return PerfectVerdict(NO, witness=f"component {c.name}: {v.witness}")
    unknown = [(c, v) for c, v in parts if v.status == UNKNOWN]
    if unknown:
        return PerfectVerdict(UNKNOWN, witness="; ".join(
            v.witness or c.name for c, v in unknown))
    factors = tuple(f for _, v in parts for f in v.description.factors)
    if not Z:
        return PerfectVerdict(YES, LocalizationDescription(
            "identity", factors, YES, label=ring.name))
    if not factors:
        return PerfectVerdict(YES, LocalizationDescription("zero", (), YES))
    if all(c.kind == "artinian" for c, _ in parts):
        kind = "locals"
    else:
        kinds = {v.description.kind for _, v in parts if v.description.factors}
        kind = kinds.pop() if len(kinds) == 1 else "product"
        if kind == "identity":
            kind = "product"
    return PerfectVerdict(YES, LocalizationDescription(kind, factors, YES))


def is_perfect(ring, Z) -> PerfectVerdict:
    """Rule-based perfectness of the sp-subset ``Z`` of ``spectrum(ring)``."""
    Zl = _as_labels(ring, Z)
    parts = [(c, c.perfect(Zl & c.label_set)) for c in components(ring)]
    return combine(ring, parts, Zl)


def fraction_ring_description(ring, Z) -> LocalizationDescription:
    v = is_perfect(ring, Z)
    if v.status == YES:
        return v.description
    return LocalizationDescription("symbolic", (), UNKNOWN, label="R_Z")
