"""Decision procedures for hearts of t-structures given by filtrations.

For a filtration ``phi`` on a finite spectrum the heart is always a
Grothendieck category.  Whether it is a module category is decided here
from three pieces of data:

* the tail ``Z`` (the value of ``phi`` at large indices),
* the level function ``l(p) = max{i : p in phi(i)}``,
* perfectness of ``Z``, which comes from the ring.

The heart is ``A``-Mod exactly when ``l`` is constant on every connected
component of ``Spec \\ Z`` and the localization at ``Z`` is perfect on
the part carrying finite levels.  Then ``A`` is the product, over the
finite levels ``m_1 < ... < m_t``, of the corresponding factors of
``R_Z``.  Primes with level ``-inf`` never enter the aisle and
contribute nothing to ``A``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InputError
from .fgmodule import FgModule, TFResult, support, tf_membership
from .filtration import (
    SpFiltration, classify_shape, level_masks, localize, restrict_to_component,
)
from .poset import PrimePoset, SpSubset, component_masks, minimal_mask
from .rings import (
    NO, UNKNOWN, YES, AbstractPoset, Component, LocalizationDescription,
    PerfectVerdict, components, spectrum,
)

NEG_INF = -math.inf


class Verdict(str, enum.Enum):
    DEGENERATE = "degenerate"
    ZERO_AISLE = "zero_aisle"
    GROTHENDIECK_ONLY = "grothendieck_only"  # never produced on finite posets
    MODULE = "module"
    NOT_MODULE = "not_module"
    CONDITIONAL = "conditional"

    def __str__(self) -> str:
        return self.value


CONSTANT_VERDICTS = (Verdict.DEGENERATE, Verdict.ZERO_AISLE)

LEFT_BOUNDED_REASON = (
    "left bounded filtration (automatic on a finite spectrum): the heart of "
    "the compactly generated t-structure is a Grothendieck category")


def _level_json(v):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return int(v)


# -- complexes and aisles -----------------------------------------------------

@dataclass(frozen=True)
class ComplexDescriptor:
    """A complex seen through its homology: degree -> module or support."""

    entries: Mapping[int, object] = field(default_factory=dict)

    def __post_init__(self):
        ents = {}
        for d, v in dict(self.entries).items():
            if not isinstance(v, (FgModule, SpSubset)):
                raise InputError(f"degree {d}: expected a module or a support set")
            ents[int(d)] = v
        object.__setattr__(self, "entries", ents)

    def shifted(self, k: int) -> "ComplexDescriptor":
        """``X[k]``, whose ``H^i`` is ``H^{i+k}(X)``."""
        return ComplexDescriptor({d - k: v for d, v in self.entries.items()})


@dataclass(frozen=True)
class AisleResult:
    member: bool
    violations: tuple  # of (degree, offending primes)


def _support_of(entry, ambient: PrimePoset) -> SpSubset:
    if isinstance(entry, SpSubset):
        if entry.poset != ambient:
            raise InputError("support set lives on a different poset")
        return entry
    return support(entry, ambient)


def aisle_membership(X: ComplexDescriptor, phi: SpFiltration,
                     ambient: PrimePoset | None = None) -> AisleResult:
    """``X`` is in the aisle iff ``Supp H^i(X)`` lies in ``phi(i)`` for all ``i``."""
    ambient = phi.poset if ambient is None else ambient
    if ambient != phi.poset:
        raise InputError("filtration and ambient spectrum differ")
    bad = []
    for d in sorted(X.entries):
        S = _support_of(X.entries[d], ambient)
        extra = S.mask & ~phi.mask_at(d)
        if extra:
            bad.append((d, ambient.labels_of(extra)))
    return AisleResult(not bad, tuple(bad))


# -- Grothendieck verdict -------------------------------------------------------

@dataclass(frozen=True)
class GrothendieckVerdict:
    is_grothendieck: bool
    reason: str
    flag: Verdict | None = None


def grothendieck_verdict(phi: SpFiltration) -> GrothendieckVerdict:
    shape = classify_shape(phi)
    if shape.is_constant:
        if phi.values[0] == 0:
            return GrothendieckVerdict(
                True, "phi is empty everywhere: the aisle is zero and the "
                "heart is the zero category", Verdict.ZERO_AISLE)
        return GrothendieckVerdict(
            True, "phi is constant: U = U[-1] and the heart is the zero "
            "category", Verdict.DEGENERATE)
    assert shape.is_left_bounded
    return GrothendieckVerdict(True, LEFT_BOUNDED_REASON)


# -- module verdict -------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    labels: tuple[str, ...]
    level: float  # an int, or -inf for the part outside every phi(i)

    def to_dict(self) -> dict:
        return {"component": list(self.labels), "m": _level_json(self.level)}


@dataclass(frozen=True)
class HeartClassification:
    verdict: Verdict
    grothendieck: bool
    reason: str
    Z: SpSubset
    jumps: tuple[int, ...] = ()
    pieces: tuple[Piece, ...] = ()
    ring_A: LocalizationDescription | None = None
    witness: dict | None = None
    heart: str | None = None

    @property
    def t(self) -> int:
        return len(self.jumps)

    def finite_pieces(self) -> list[Piece]:
        return [pc for pc in self.pieces if pc.level != NEG_INF]

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "grothendieck": self.grothendieck,
            "reason": self.reason,
            "Z": list(self.Z.labels()),
            "jumps": list(self.jumps),
            "pieces": [pc.to_dict() for pc in self.pieces],
            "ring_A": self.ring_A.text if self.ring_A is not None else None,
        }
        if self.heart is not None:
            out["heart"] = self.heart
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _mod_category(ring_text: str) -> str:
    return f"({ring_text})-Mod" if " x " in ring_text else f"{ring_text}-Mod"


def _constant_verdict(phi: SpFiltration) -> HeartClassification | None:
    if not phi.is_constant():
        return None
    g = grothendieck_verdict(phi)
    return HeartClassification(g.flag, True, g.reason, phi.tail, heart="0")


def _level_break(P: PrimePoset, levels, within: int):
    """A Hasse edge ``p < q`` inside ``within`` whose levels differ."""
    for a, b in P.covers():
        i, j = P.index[a], P.index[b]
        if (within >> i) & 1 and (within >> j) & 1 and levels[i] != levels[j]:
            return a, b, levels[i], levels[j]
    return None


def _perfect_obligation(comp: Component, Z: frozenset, Zp: frozenset
                        ) -> PerfectVerdict:
    """Perfectness needed on one ring component.

    Only the part of ``R_Z`` over finite levels has to be a perfect
    localization, i.e. ``Z'`` = ``Z`` plus the level ``-inf`` primes.  A
    positive answer for ``Z`` itself settles it as well.
    """
    v = comp.perfect(Z)
    if v.status == YES or Zp == Z:
        return v
    w = comp.perfect(Zp)
    if w.status in (YES, NO):
        return w
    return PerfectVerdict(UNKNOWN, witness=w.witness or v.witness)


def _ring_components(ring, P: PrimePoset) -> list[Component]:
    if ring is None:
        ring = AbstractPoset(P)
    if isinstance(ring, Component):
        comps = [ring]
        labels = set(ring.labels)
    else:
        if spectrum(ring) != P:
            raise InputError("the filtration is not on the spectrum of the ring")
        comps = components(ring)
        labels = {p for c in comps for p in c.labels}
    if labels != set(P.elements):
        raise InputError("the filtration is not on the spectrum of the ring")
    return comps


def _assemble_ring_A(descs: list[LocalizationDescription], pieces: list[Piece],
                     whole_ring: str | None) -> LocalizationDescription:
    """Product of the ``R_Z`` factors over the finite-level pieces, in level
    order.  ``whole_ring`` names ``R`` when ``A = R``."""
    if whole_ring is not None:
        factors = tuple(f for d in descs for f in d.factors)
        return LocalizationDescription("identity", factors, YES, label=whole_ring)
    factors = []
    kinds = set()
    for pc in pieces:
        keep = frozenset(pc.labels)
        for d in descs:
            part = d.restrict(keep)
            factors.extend(part.factors)
            if part.factors:
                kinds.add("product" if part.kind == "identity" else part.kind)
    kind = kinds.pop() if len(kinds) == 1 else "product"
    return LocalizationDescription(kind, tuple(factors), YES)


def _classify(phi: SpFiltration, comps: list[Component],
              ring_name: str = "R") -> HeartClassification:
    const = _constant_verdict(phi)
    if const is not None:
        return const
    P = phi.poset
    g = GrothendieckVerdict(True, LEFT_BOUNDED_REASON)  # phi is not constant here
    Zmask = phi.values[-1]
    Z = SpSubset(P, Zmask)
    rest = P.full_mask & ~Zmask
    levels = level_masks(phi)

    # level constancy on each component of Spec \ Z
    pieces_by_level: dict = {}
    for cm in component_masks(P, rest):
        brk = _level_break(P, levels, cm)
        if brk is not None:
            p, q, lp, lq = brk
            return HeartClassification(
                Verdict.NOT_MODULE, True, g.reason, Z,
                witness={"kind": "levels", "pair": [p, q],
                         "levels": [_level_json(lp), _level_json(lq)],
                         "text": f"{p} <= {q} lie in one component of Spec \\ Z "
                                 f"but l({p}) = {_level_json(lp)} != "
                                 f"l({q}) = {_level_json(lq)}"})
        lev = levels[(cm & -cm).bit_length() - 1]
        pieces_by_level[lev] = pieces_by_level.get(lev, 0) | cm

    neg = pieces_by_level.pop(NEG_INF, 0)
    finite = sorted(pieces_by_level)
    pieces = [Piece(P.labels_of(pieces_by_level[m]), m) for m in finite]
    if neg:
        pieces.append(Piece(P.labels_of(neg), NEG_INF))
    Zprime = Zmask | neg

    Zl = frozenset(P.labels_of(Zmask))
    Zpl = frozenset(P.labels_of(Zprime))
    descs, unknown = [], []
    for c in comps:
        mine = c.label_set
        v = _perfect_obligation(c, Zl & mine, Zpl & mine)
        if v.status == NO:
            return HeartClassification(
                Verdict.NOT_MODULE, True, g.reason, Z, tuple(finite),
                tuple(pieces), witness={
                    "kind": "perfectness", "component": c.name,
                    "text": f"Z is not perfect on {c.name}: {v.witness}"})
        if v.status == UNKNOWN:
            unknown.append(f"{c.name}: {v.witness}")
        else:
            descs.append(v.description)
    if unknown:
        return HeartClassification(
            Verdict.CONDITIONAL, True, g.reason, Z, tuple(finite), tuple(pieces),
            witness={"kind": "perfectness_unknown", "text": "; ".join(unknown)})

    finite_pieces = [pc for pc in pieces if pc.level != NEG_INF]
    whole = ring_name if (not Zprime and len(finite_pieces) == 1) else None
    ring_A = _assemble_ring_A(descs, finite_pieces, whole)
    return HeartClassification(
        Verdict.MODULE, True, g.reason, Z, tuple(finite), tuple(pieces),
        ring_A=ring_A, heart=_mod_category(ring_A.text))


def module_verdict(ring, phi: SpFiltration) -> HeartClassification:
    """Classify the heart of the t-structure of ``phi`` over ``ring``.

    ``ring`` may be ``None``, meaning a ring known only through the poset
    (perfectness of nontrivial ``Z`` is then unknown).
    """
    comps = _ring_components(ring, phi.poset)
    name = getattr(ring, "name", "R") if ring is not None else "R"
    return _classify(phi, comps, name)


def componentwise_verdict(ring, phi: SpFiltration
                          ) -> tuple[Verdict, list[HeartClassification]]:
    """Conjunction of the verdicts on each connected component.

    A component on which ``phi`` is constant has zero heart, which is the
    module category of the zero ring.
    """
    comps = _ring_components(ring, phi.poset)
    P = phi.poset
    parts = []
    for c in comps:
        sub_phi = restrict_to_component(phi, P.mask_of(c.labels))
        parts.append(_classify(sub_phi, [c], c.name))
    if phi.is_constant():
        return (Verdict.ZERO_AISLE if phi.values[0] == 0 else Verdict.DEGENERATE,
                parts)
    verdicts = [h.verdict for h in parts]
    if Verdict.NOT_MODULE in verdicts:
        return Verdict.NOT_MODULE, parts
    if Verdict.CONDITIONAL in verdicts:
        return Verdict.CONDITIONAL, parts
    return Verdict.MODULE, parts


# -- fast paths -------------------------------------------------------------------

@dataclass(frozen=True)
class FastVerdict:
    verdict: Verdict
    m: int | None = None
    heart: str | None = None
    witness: str | None = None


def left_nondegenerate_fastpath(phi: SpFiltration) -> FastVerdict | None:
    """Empty tail on a connected spectrum: module iff ``phi`` is a shifted
    standard filtration."""
    P = phi.poset
    if len(component_masks(P)) != 1 or phi.values[-1] != 0 or phi.is_constant():
        return None
    shape = classify_shape(phi)
    if shape.canonical_shift is not None:
        return FastVerdict(Verdict.MODULE, shape.canonical_shift, "R-Mod")
    brk = _level_break(P, level_masks(phi), P.full_mask)
    p, q, lp, lq = brk
    return FastVerdict(Verdict.NOT_MODULE, witness=(
        f"{p} <= {q} with l({p}) = {_level_json(lp)} != l({q}) = {_level_json(lq)}"))


def irreducible_fastpath(ring, phi: SpFiltration) -> FastVerdict | None:
    """Unique minimal prime: module iff ``phi`` is two-step with perfect tail."""
    P = phi.poset
    if len(component_masks(P)) != 1 or phi.is_constant():
        return None
    mins = minimal_mask(P)
    if mins & (mins - 1):
        return None
    comps = _ring_components(ring, P)
    shape = classify_shape(phi)
    if not shape.is_two_step:
        return FastVerdict(Verdict.NOT_MODULE, witness=(
            "phi is not two-step: values "
            + " > ".join("{" + ", ".join(P.labels_of(v)) + "}" for v in phi.values)))
    Z = frozenset(P.labels_of(phi.values[-1]))
    v = comps[0].perfect(Z)
    if v.status == YES:
        return FastVerdict(Verdict.MODULE, phi.jumps[0], _mod_category(v.description.text))
    if v.status == NO:
        return FastVerdict(Verdict.NOT_MODULE, phi.jumps[0], witness=v.witness)
    return FastVerdict(Verdict.CONDITIONAL, phi.jumps[0], witness=v.witness)


def quotient_heart_description(phi: SpFiltration, ring=None) -> str | None:
    """Text description of the heart of a two-step filtration."""
    shape = classify_shape(phi)
    if not shape.is_two_step:
        return None
    P = phi.poset
    if phi.values[-1] == 0:
        return "heart ≃ R-Mod"
    Z = "{" + ", ".join(P.labels_of(phi.values[-1])) + "}"
    text = (f"heart ≃ R-Mod/T_Z with Z = {Z} (Giraud subcategory of Z-closed "
            f"modules); it is a module category iff Z is perfect")
    if ring is not None:
        comps = _ring_components(ring, P)
        Zl = frozenset(P.labels_of(phi.values[-1]))
        verdicts = [c.perfect(Zl & c.label_set) for c in comps]
        if all(v.status == YES for v in verdicts):
            text += "; Z is perfect"
        elif any(v.status == NO for v in verdicts):
            text += "; Z is not perfect"
        else:
            text += "; perfectness of Z is unknown"
    return text


# -- stalk complexes ----------------------------------------------------------------

@dataclass(frozen=True)
class StalkReport:
    in_heart: bool
    text: str
    certificates: tuple


def stalk_tf_report(phi: SpFiltration, m: int, Y: FgModule) -> StalkReport:
    """Whether the stalk complex ``Y[-m]`` lies in the heart."""
    res: TFResult = tf_membership(Y, m, phi)
    shift = -m
    name = f"Y[{shift}]" if shift else "Y"
    text = f"{name} lies in the heart: {'yes' if res.verdict else 'no'}"
    for k, p, E in res.certificates:
        text += f"\n  Ext^{k - 1}(R/{p}, Y) = {E.describe()} with {p} in phi({m + k})"
    return StalkReport(res.verdict, text, res.certificates)


def localized_is_canonical(phi: SpFiltration, p: str, level: int) -> bool:
    """``localize(phi, p)`` is the standard filtration shifted to ``level``."""
    loc = localize(phi, p)
    return (len(loc.jumps) == 1 and loc.jumps[0] == level
            and loc.values == (loc.poset.full_mask, 0))


__all__ = [
    "Verdict", "ComplexDescriptor", "AisleResult", "aisle_membership",
    "GrothendieckVerdict", "grothendieck_verdict", "Piece",
    "HeartClassification", "module_verdict", "componentwise_verdict",
    "FastVerdict", "left_nondegenerate_fastpath", "irreducible_fastpath",
    "quotient_heart_description", "StalkReport", "stalk_tf_report",
    "localized_is_canonical",
]
