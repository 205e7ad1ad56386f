"""JSON documents for posets, rings, filtrations, modules, complexes and jobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifier import ComplexDescriptor
from .errors import InputError
from .fgmodule import FgModule
from .filtration import SpFiltration, constant_filtration, make_filtration
from .poset import PrimePoset, sp_subset
from .rings import (
    AbstractPoset, DedekindMarked, PolyOverField, PolyQuotient, Product, ZmodN,
    spectrum,
)


def dumps(doc) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, newline)."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{where}: missing field {key!r}")
    return doc[key]


# -- posets -------------------------------------------------------------------

def poset_from_dict(doc: dict) -> PrimePoset:
    elements = _need(doc, "elements", "poset")
    covers = doc.get("covers", [])
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise InputError("poset: elements must be a list of strings")
    try:
        pairs = [(a, b) for a, b in covers]
    except (TypeError, ValueError) as exc:
        raise InputError("poset: covers must be [lower, upper] pairs") from exc
    return PrimePoset(elements, pairs, doc.get("residues"))


# -- rings --------------------------------------------------------------------

def _field_of(base: str) -> str:
    if not base.endswith("[x]"):
        raise InputError(f"dedekind base must be 'Z' or '<field>[x]', got {base!r}")
    return base[:-3]


def ring_from_dict(doc: dict):
    variant = _need(doc, "variant", "ring")
    if variant == "zmod":
        return ZmodN(_need(doc, "n", "ring"))
    if variant == "dedekind":
        base = doc.get("base", "Z")
        marked = _need(doc, "marked", "ring")
        if base == "Z":
            return DedekindMarked("Z", tuple(marked))
        return DedekindMarked(PolyOverField(_field_of(base)), tuple(marked))
    if variant == "polyquotient":
        return PolyQuotient(_need(doc, "field", "ring"),
                            tuple((g, e) for g, e in _need(doc, "factors", "ring")))
    if variant == "product":
        return Product(tuple(ring_from_dict(f) for f in _need(doc, "factors", "ring")))
    if variant == "abstract":
        P = poset_from_dict(_need(doc, "poset", "ring"))
        return AbstractPoset(
            P, tuple(tuple(s) for s in doc.get("perfect", [])),
            tuple(tuple(s) for s in doc.get("not_perfect", [])),
            bool(doc.get("reduced", False)), doc.get("name", "R"))
    raise InputError(f"unknown ring variant {variant!r}")


def ring_to_dict(ring) -> dict:
    if isinstance(ring, ZmodN):
        return {"variant": "zmod", "n": ring.n}
    if isinstance(ring, DedekindMarked):
        base = "Z" if ring.base == "Z" else ring.base.name
        return {"variant": "dedekind", "base": base, "marked": list(ring.marked)}
    if isinstance(ring, PolyQuotient):
        return {"variant": "polyquotient", "field": ring.field,
                "factors": [[g, e] for g, e in ring.factors]}
    if isinstance(ring, Product):
        return {"variant": "product", "factors": [ring_to_dict(f) for f in ring.factors]}
    if isinstance(ring, AbstractPoset):
        doc = {"variant": "abstract", "poset": ring.poset.to_dict(), "name": ring.name,
               "perfect": sorted(sorted(s) for s in ring.perfect),
               "not_perfect": sorted(sorted(s) for s in ring.not_perfect),
               "reduced": ring.reduced}
        return doc
    raise InputError(f"unsupported ring {ring!r}")


# -- filtrations --------------------------------------------------------------

def filtration_from_dict(P: PrimePoset, doc: dict) -> SpFiltration:
    """``steps`` give ``phi(i)`` for ``i <= upto``; ``tail`` applies beyond."""
    steps = doc.get("steps", [])
    tail = doc.get("tail")
    if not isinstance(steps, list):
        raise InputError("filtration: steps must be a list")
    pairs = []
    for s in steps:
        pairs.append((_need(s, "upto", "filtration step"),
                      _need(s, "value", "filtration step")))
    if not pairs:
        if tail is None:
            raise InputError("filtration: needs steps or a tail")
        return constant_filtration(P, sp_subset(P, tail))
    if tail is not None:
        last_mask = P.mask_of(pairs[-1][1])
        tail_mask = P.mask_of(tail)
        if tail_mask & ~last_mask:
            raise InputError("filtration: tail must be contained in the last step value")
        pairs.append((pairs[-1][0] + 1, tail))
    return make_filtration(P, pairs)


def filtration_to_dict(phi: SpFiltration) -> dict:
    return phi.to_dict()


# -- modules and complexes -------------------------------------------------------

def _base_from(doc):
    if doc == "Z" or doc == {"integers": True}:
        return "Z"
    if isinstance(doc, dict) and "zmod" in doc:
        return ZmodN(doc["zmod"])
    raise InputError(f"module base must be 'Z' or {{'zmod': n}}, got {doc!r}")


def module_from_dict(doc: dict) -> FgModule:
    base = _base_from(_need(doc, "base", "module"))
    if "invariants" in doc:
        return FgModule.from_invariants(base, doc["invariants"])
    pres = _need(doc, "presentation", "module")
    try:
        return FgModule(base, pres)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"module: bad presentation ({exc})") from exc


def module_to_dict(M: FgModule) -> dict:
    return M.to_dict()


def complex_from_dict(P: PrimePoset, doc: dict) -> ComplexDescriptor:
    entries = {}
    for e in _need(doc, "entries", "complex"):
        d = int(_need(e, "degree", "complex entry"))
        if d in entries:
            raise InputError(f"complex: degree {d} given twice")
        if "module" in e:
            entries[d] = module_from_dict(e["module"])
        elif "support" in e:
            entries[d] = sp_subset(P, e["support"])
        else:
            raise InputError("complex entry needs 'module' or 'support'")
    return ComplexDescriptor(entries)


# -- jobs -----------------------------------------------------------------------

@dataclass
class FiltrationItem:
    name: str
    phi: SpFiltration | None = None
    window: tuple[int, int] | None = None  # an enumerate directive


@dataclass
class Job:
    ring: object
    poset: PrimePoset
    filtrations: list[FiltrationItem] = field(default_factory=list)
    complexes: list[tuple[str, ComplexDescriptor]] = field(default_factory=list)
    verifications: list[dict] = field(default_factory=list)
    raw: dict = field(default_factory=dict)


def parse_window(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        lo, hi = text
    else:
        parts = str(text).split(":")
        if len(parts) != 2:
            raise InputError(f"window must look like lo:hi, got {text!r}")
        lo, hi = parts
    try:
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise InputError(f"window bounds must be integers, got {text!r}") from exc
    if hi < lo:
        raise InputError(f"empty window {lo}:{hi}")
    return lo, hi


def job_from_dict(doc: dict) -> Job:
    if "ring" in doc:
        ring = ring_from_dict(doc["ring"])
    elif "poset" in doc:
        ring = AbstractPoset(poset_from_dict(doc["poset"]))
    elif "variant" in doc:
        ring = ring_from_dict(doc)
    else:
        raise InputError("job: needs a 'ring' or 'poset' field")
    P = spectrum(ring)
    items = []
    for k, f in enumerate(doc.get("filtrations", [])):
        name = f.get("name", f"phi{k}") if isinstance(f, dict) else f"phi{k}"
        if isinstance(f, dict) and "enumerate" in f:
            items.append(FiltrationItem(name, window=parse_window(
                _need(f["enumerate"], "window", "enumerate directive"))))
        else:
            items.append(FiltrationItem(name, phi=filtration_from_dict(P, f)))
    cxs = []
    for k, c in enumerate(doc.get("complexes", [])):
        cxs.append((c.get("name", f"X{k}"), complex_from_dict(P, c)))
    return Job(ring, P, items, cxs, list(doc.get("verifications", [])), doc)


def load_job(path) -> Job:
    return job_from_dict(load_json(path))
