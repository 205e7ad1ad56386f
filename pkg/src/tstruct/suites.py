"""Exhaustive verification suites behind ``tstruct verify``.

Each suite sweeps a finite family (posets, filtrations, modules) and
reports one case per family member group.  A case passes when no
counterexample turns up.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Callable, Iterator

from .classifier import (
    Verdict, componentwise_verdict, irreducible_fastpath,
    left_nondegenerate_fastpath, localized_is_canonical, module_verdict,
)
from .errors import InputError
from .fgmodule import (
    FgModule, associated_primes, ext, is_torsion_member, module_catalog, quotient_by_prime,
    tf_membership, torsion_catalog, verify_lemma31,
)
from .filtration import (
    SpFiltration, classify_shape, enumerate_filtrations, level_masks,
)
from .poset import PrimePoset, all_posets, disjoint_union, upset_masks
from .rings import AbstractPoset, DedekindMarked, ZmodN, spectrum
from .snf import det, is_smith_form, matmul, smith_normal_form

DEFAULT_SEED = 20240611


@dataclass
class CaseResult:
    name: str
    passed: bool
    checked: int = 0
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checked": self.checked}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    suite: str
    cases: list[CaseResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def lines(self) -> list[str]:
        out = []
        for c in self.cases:
            out.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.checked} checked)")
            if c.counterexample is not None:
                for k in sorted(c.counterexample):
                    out.append(f"      {k}: {c.counterexample[k]}")
        out.append(f"{self.suite}: {'PASS' if self.passed else 'FAIL'} "
                   f"({sum(c.checked for c in self.cases)} checks)")
        return out

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "cases": [c.to_dict() for c in self.cases]}


def _phi_doc(phi: SpFiltration) -> dict:
    return phi.to_dict()


# -- sweeps -------------------------------------------------------------------

def connected_posets(max_elements: int) -> Iterator[PrimePoset]:
    for n in range(1, max_elements + 1):
        yield from all_posets(n, connected=True)


def eventually_trivial_sweep(posets, window) -> Iterator[tuple[PrimePoset, SpFiltration]]:
    """Non-constant filtrations with empty tail."""
    for P in posets:
        for phi in enumerate_filtrations(P, window):
            if phi.values[-1] == 0 and phi.jumps:
                yield P, phi


def has_standard_drop(phi: SpFiltration, window) -> bool:
    """Some ``m`` with ``phi(m) = Spec`` and ``phi(m + 1)`` empty."""
    full = phi.poset.full_mask
    lo, hi = window
    return any(phi.mask_at(m) == full and phi.mask_at(m + 1) == 0
               for m in range(lo - 1, hi + 1))


def localization_violations(phi: SpFiltration) -> list[str]:
    """Finite-level primes outside ``Z`` whose localized filtration is not
    the standard one at their level."""
    P = phi.poset
    levels = level_masks(phi)
    bad = []
    for i, p in enumerate(P.elements):
        lev = levels[i]
        if (phi.values[-1] >> i) & 1 or lev in (float("inf"), float("-inf")):
            continue
        if not localized_is_canonical(phi, p, int(lev)):
            bad.append(p)
    return bad


def disjoint_union_posets(max_part: int = 3, max_total: int = 6) -> list[PrimePoset]:
    """Disjoint unions of at least two connected types of size ``<= max_part``."""
    types = [Q for n in range(1, max_part + 1) for Q in all_posets(n, connected=True)]
    out = []
    for k in range(2, max_total + 1):
        for combo in combinations_with_replacement(range(len(types)), k):
            parts = [types[i] for i in combo]
            if sum(len(Q) for Q in parts) > max_total:
                continue
            out.append(disjoint_union(*parts, prefixes=[f"c{j}." for j in range(k)]))
    return out


def all_perfect_ring(P: PrimePoset) -> AbstractPoset:
    """A ring on ``P`` in which every sp-subset is declared perfect."""
    ups = [P.labels_of(m) for m in upset_masks(P)]
    return AbstractPoset(P, tuple(ups), name="R")


# -- suites ---------------------------------------------------------------------

def _ring_of(params: dict, default=None):
    from .io import ring_from_dict
    if "ring" in params:
        return ring_from_dict(params["ring"])
    if default is None:
        raise InputError("suite parameters need a 'ring'")
    return default


def suite_lemma31(params: dict) -> SuiteReport:
    """Ext-vanishing against all torsion modules vs against residue rings."""
    ring = _ring_of(params, ZmodN(8))
    bound = int(params.get("bound", 64))
    degrees = [int(i) for i in params.get("degrees", [0, 1, 2])]
    P = spectrum(ring)
    if isinstance(ring, ZmodN):
        base = ring
        maxl = list(P.elements)
        M_catalog = module_catalog(ring.n, bound)
    elif isinstance(ring, DedekindMarked) and ring.base == "Z":
        base = "Z"
        maxl = [p for p in P.elements if p != "(0)"]
        tors = torsion_catalog("Z", ring.marked, bound)
        M_catalog = tors + [T + FgModule.free("Z") for T in tors]
    else:
        raise InputError("lemma31 needs a zmod ring or the marked integers")
    if "Z" in params:
        Zs = [sorted(z) for z in params["Z"]]
    else:
        Zs = [list(c) for k in range(len(maxl) + 1) for c in combinations(maxl, k)]
    report = SuiteReport("lemma31")
    for Z in Zs:
        for i in degrees:
            case = CaseResult(f"Z={{{', '.join(Z)}}} i={i}", True)
            for M in M_catalog:
                res = verify_lemma31(base, Z, i, M, bound)
                case.checked += res.catalog_size
                if not res.holds:
                    case.passed = False
                    case.counterexample = {
                        "M": M.describe(), "T": res.counterexample.describe(),
                        "catalog_side": res.catalog_side, "prime_side": res.prime_side}
                    break
            report.cases.append(case)
    return report


def tf_direct(Y: FgModule, m: int, phi: SpFiltration, kmax: int = 8) -> bool:
    """The stalk condition checked literally for ``k = 1 .. kmax``."""
    for k in range(1, kmax + 1):
        for p in phi.value_at(m + k).labels():
            if not ext(k - 1, quotient_by_prime(Y.base, p), Y).is_zero:
                return False
    return True


def suite_prop32(params: dict) -> SuiteReport:
    """Finite reduction of the stalk test, and the worked two-step example."""
    ring = _ring_of(params, ZmodN(8))
    if not isinstance(ring, ZmodN):
        raise InputError("prop32 runs over zmod rings")
    bound = int(params.get("bound", 512))
    window = tuple(params.get("window", (0, 2)))
    P = spectrum(ring)
    catalog = module_catalog(ring.n, bound)
    report = SuiteReport("prop32")

    case = CaseResult("k<=3 agrees with k<=8", True)
    for phi in enumerate_filtrations(P, window):
        for m in range(window[0] - 1, window[1] + 1):
            S = phi.value_at(m)
            for Y in catalog:
                if not is_torsion_member(Y, S):
                    continue
                case.checked += 1
                if tf_membership(Y, m, phi).verdict != tf_direct(Y, m, phi):
                    case.passed = False
                    case.counterexample = {"phi": _phi_doc(phi), "m": m, "Y": Y.describe()}
                    break
            if not case.passed:
                break
        if not case.passed:
            break
    report.cases.append(case)

    # filtrations with phi(0) > phi(1) = empty
    ex = CaseResult("TF_0 = T_0 and TF_-1 = T_-1 n F_0", True)
    for phi in enumerate_filtrations(P, (-1, 1)):
        if not (phi.mask_at(1) == 0 and phi.mask_at(0) != 0 and phi.jumps == (0,)):
            continue
        phi0 = phi.value_at(0)
        for Y in catalog:
            for m in (0, -1):
                if not is_torsion_member(Y, phi.value_at(m)):
                    continue
                ex.checked += 1
                got = tf_membership(Y, m, phi).verdict
                if m == 0:
                    want = True
                else:
                    want = not (associated_primes(Y, P) & phi0.members)
                if got != want:
                    ex.passed = False
                    ex.counterexample = {"phi": _phi_doc(phi), "m": m, "Y": Y.describe()}
    report.cases.append(ex)
    return report


def _posets_param(params: dict, default_max: int) -> list[PrimePoset]:
    from .io import poset_from_dict
    if "poset" in params:
        return [poset_from_dict(params["poset"])]
    return list(connected_posets(int(params.get("max_elements", default_max))))


def suite_prop53(params: dict) -> SuiteReport:
    """Connected spectra, empty tail: module iff one drop from Spec to empty."""
    window = tuple(params.get("window", (0, 4)))
    posets = _posets_param(params, 4)
    report = SuiteReport("prop53")
    eq = CaseResult("module iff phi(m)=Spec and phi(m+1)=empty", True)
    loc = CaseResult("localized filtrations are standard", True)
    for P, phi in eventually_trivial_sweep(posets, window):
        h = module_verdict(None, phi)
        eq.checked += 1
        if (h.verdict == Verdict.MODULE) != has_standard_drop(phi, window):
            eq.passed = False
            eq.counterexample = {"poset": P.to_dict(), "phi": _phi_doc(phi),
                                 "verdict": h.verdict.value}
        if h.verdict == Verdict.MODULE:
            loc.checked += 1
            bad = localization_violations(phi)
            if bad:
                loc.passed = False
                loc.counterexample = {"phi": _phi_doc(phi), "primes": bad}
    report.cases += [eq, loc]
    return report


def suite_cor512(params: dict) -> SuiteReport:
    """Empty tail: module iff the filtration is a shifted standard one."""
    window = tuple(params.get("window", (0, 4)))
    posets = _posets_param(params, 4)
    report = SuiteReport("cor512")
    eq = CaseResult("module iff canonical shift", True)
    fast = CaseResult("fast paths agree with the full procedure", True)
    for P, phi in eventually_trivial_sweep(posets, window):
        h = module_verdict(None, phi)
        eq.checked += 1
        shift = classify_shape(phi).canonical_shift
        if (h.verdict == Verdict.MODULE) != (shift is not None):
            eq.passed = False
            eq.counterexample = {"poset": P.to_dict(), "phi": _phi_doc(phi),
                                 "verdict": h.verdict.value}
        for fp in (left_nondegenerate_fastpath(phi), irreducible_fastpath(None, phi)):
            if fp is None:
                continue
            fast.checked += 1
            if fp.verdict != h.verdict:
                fast.passed = False
                fast.counterexample = {"phi": _phi_doc(phi), "fast": fp.verdict.value,
                                       "full": h.verdict.value}
    report.cases += [eq, fast]
    return report


def suite_component_split(params: dict) -> SuiteReport:
    """Whole-spectrum verdict equals the conjunction over components."""
    window = tuple(params.get("window", (0, 3)))
    max_part = int(params.get("max_part", 3))
    max_total = int(params.get("max_total", 6))
    rings = params.get("rings", ["undeclared", "all_perfect"])
    report = SuiteReport("component-split")
    posets = disjoint_union_posets(max_part, max_total)
    for kind in rings:
        case = CaseResult(f"conjunction ({kind} ring)", True)
        loc = CaseResult(f"localized filtrations are standard ({kind} ring)", True)
        for P in posets:
            ring = all_perfect_ring(P) if kind == "all_perfect" else AbstractPoset(P)
            for phi in enumerate_filtrations(P, window):
                whole = module_verdict(ring, phi).verdict
                conj, _ = componentwise_verdict(ring, phi)
                case.checked += 1
                if whole != conj:
                    case.passed = False
                    case.counterexample = {"poset": P.to_dict(), "phi": _phi_doc(phi),
                                           "whole": whole.value, "components": conj.value}
                if whole == Verdict.MODULE:
                    loc.checked += 1
                    bad = localization_violations(phi)
                    if bad:
                        loc.passed = False
                        loc.counterexample = {"phi": _phi_doc(phi), "primes": bad}
        report.cases += [case, loc]
    return report


def random_matrix(rng: random.Random, max_dim: int = 6, lo: int = -20, hi: int = 20):
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def check_snf(A) -> str | None:
    """``None`` if the SNF of ``A`` passes every property, else the failure."""
    D, U, V = smith_normal_form(A)
    if matmul(matmul(U, A), V) != D:
        return "D != U A V"
    if abs(det(U)) != 1 or abs(det(V)) != 1:
        return "transform not unimodular"
    if not is_smith_form(D):
        return "D is not diagonal with a divisibility chain"
    return None


def suite_snf(params: dict, seed: int = DEFAULT_SEED) -> SuiteReport:
    count = int(params.get("count", 500))
    max_dim = int(params.get("max_dim", 6))
    lo, hi = params.get("entries", (-20, 20))
    rng = random.Random(seed)
    case = CaseResult(f"{count} random matrices up to {max_dim}x{max_dim} (seed {seed})", True)
    for _ in range(count):
        A = random_matrix(rng, max_dim, lo, hi)
        case.checked += 1
        err = check_snf(A)
        if err:
            case.passed = False
            case.counterexample = {"A": A, "problem": err}
            break
    return SuiteReport("snf", [case])


SUITES: dict[str, Callable] = {
    "lemma31": suite_lemma31,
    "prop32": suite_prop32,
    "prop53": suite_prop53,
    "cor512": suite_cor512,
    "component-split": suite_component_split,
    "snf": suite_snf,
}


def run_suite(name: str, params: dict, seed: int = DEFAULT_SEED) -> SuiteReport:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    fn = SUITES[name]
    report = fn(params, seed=seed) if name == "snf" else fn(params)
    report.seconds = time.perf_counter() - t0
    return report
