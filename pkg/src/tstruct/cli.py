"""Command line front end: ``tstruct {spectrum,classify,enumerate,verify}``.

Exit codes: 0 success, 1 a conditional verdict under ``--strict`` or a
failed verification, 2 bad input, 3 a size guard was hit.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .classifier import (
    Verdict, aisle_membership, grothendieck_verdict, irreducible_fastpath,
    left_nondegenerate_fastpath, module_verdict, quotient_heart_description,
)
from .errors import InputError, PreconditionError, ResourceError
from .filtration import classify_shape, enumerate_filtrations
from .io import dumps, job_from_dict, load_json, parse_window, ring_to_dict
from .poset import connected_components, minimal_primes
from .rings import connected_idempotents
from .suites import DEFAULT_SEED, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _fmt_set(labels) -> str:
    return "{" + ", ".join(labels) + "}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- spectrum ---------------------------------------------------------------

def cmd_spectrum(args) -> int:
    job = job_from_dict(load_json(args.file))
    P = job.poset
    comps = [sorted(c) for c in connected_components(P)]
    idems = [{"primes": sorted(s), "idempotent": e}
             for s, e in connected_idempotents(job.ring)]
    doc = {
        "ring": ring_to_dict(job.ring),
        "elements": list(P.elements),
        "covers": [list(c) for c in P.covers()],
        "components": comps,
        "minimal_primes": sorted(minimal_primes(P)),
        "residues": {p: P.residue(p) for p in P.elements},
        "idempotents": idems,
    }
    if args.json:
        _emit(dumps(doc), args.out)
        return EXIT_OK
    lines = [
        f"elements: {', '.join(P.elements)}",
        f"covers: {', '.join(f'{a} < {b}' for a, b in P.covers()) or 'none'}",
        f"components ({len(comps)}): " + "; ".join(_fmt_set(c) for c in comps),
        f"minimal primes: {_fmt_set(doc['minimal_primes'])}",
        "residue fields: " + ", ".join(f"{p} -> {r}" for p, r in doc["residues"].items()),
        "idempotents: " + "; ".join(f"{_fmt_set(d['primes'])}: {d['idempotent']}"
                                    for d in idems),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- classify ---------------------------------------------------------------

def _expand(job):
    for item in job.filtrations:
        if item.phi is not None:
            yield item.name, item.phi
        else:
            for k, phi in enumerate(enumerate_filtrations(job.poset, item.window)):
                yield f"{item.name}[{k}]", phi


def _fastpaths(ring, phi) -> dict:
    out = {}
    for name, fp in (("left_nondegenerate", left_nondegenerate_fastpath(phi)),
                     ("irreducible", irreducible_fastpath(ring, phi))):
        if fp is not None:
            out[name] = {"verdict": fp.verdict.value, "m": fp.m,
                         "heart": fp.heart, "witness": fp.witness}
    return out


def cmd_classify(args) -> int:
    job = job_from_dict(load_json(args.file))
    results = []
    any_conditional = False
    for name, phi in _expand(job):
        entry = {"name": name, "filtration": phi.to_dict()}
        entry["fastpaths"] = _fastpaths(job.ring, phi)
        if not args.fastpaths_only:
            h = module_verdict(job.ring, phi)
            any_conditional |= h.verdict == Verdict.CONDITIONAL
            entry["classification"] = h.to_dict()
            q = quotient_heart_description(phi, job.ring)
            if q is not None:
                entry["quotient_heart"] = q
        else:
            g = grothendieck_verdict(phi)
            entry["grothendieck"] = {"value": g.is_grothendieck, "reason": g.reason}
            any_conditional |= any(f["verdict"] == "conditional"
                                   for f in entry["fastpaths"].values())
        if job.complexes:
            entry["aisle"] = []
            for cname, X in job.complexes:
                a = aisle_membership(X, phi)
                entry["aisle"].append({
                    "complex": cname, "member": a.member,
                    "violations": [{"degree": d, "primes": list(ps)}
                                   for d, ps in a.violations]})
        results.append(entry)

    if args.json:
        _emit(dumps({"ring": ring_to_dict(job.ring), "results": results}), args.out)
    else:
        _emit(_classify_text(results), args.out)
    return EXIT_FAIL if (args.strict and any_conditional) else EXIT_OK


def _classify_text(results) -> str:
    lines = []
    for e in results:
        lines.append(f"== {e['name']} ==")
        fdoc = e["filtration"]
        steps = "; ".join(f"i <= {s['upto']}: {_fmt_set(s['value'])}" for s in fdoc["steps"])
        lines.append(f"filtration: {steps + '; ' if steps else ''}tail: {_fmt_set(fdoc['tail'])}")
        if "classification" in e:
            c = e["classification"]
            lines.append(f"grothendieck: {'yes' if c['grothendieck'] else 'no'} ({c['reason']})")
            lines.append(f"verdict: {c['verdict']}")
            lines.append(f"Z: {_fmt_set(c['Z'])}")
            if c["pieces"]:
                lines.append("pieces: " + "; ".join(
                    f"{_fmt_set(p['component'])} at level {p['m']}" for p in c["pieces"]))
            if c["ring_A"] is not None:
                lines.append(f"ring_A: {c['ring_A']}")
            if c.get("heart"):
                lines.append(f"heart: {c['heart']}")
            if c.get("witness"):
                lines.append(f"witness: {c['witness']['text']}")
            if "quotient_heart" in e:
                lines.append(e["quotient_heart"])
        else:
            g = e["grothendieck"]
            lines.append(f"grothendieck: {'yes' if g['value'] else 'no'} ({g['reason']})")
        if e["fastpaths"]:
            for fname, f in sorted(e["fastpaths"].items()):
                extra = f" m={f['m']}" if f["m"] is not None else ""
                why = f" ({f['witness']})" if f["witness"] else ""
                lines.append(f"fast path {fname}: {f['verdict']}{extra}{why}")
        elif "classification" not in e:
            lines.append("no fast path applies")
        for a in e.get("aisle", []):
            if a["member"]:
                lines.append(f"aisle: {a['complex']} is a member")
            else:
                bad = "; ".join(f"H^{v['degree']} has {_fmt_set(v['primes'])}"
                                for v in a["violations"])
                lines.append(f"aisle: {a['complex']} is not a member ({bad})")
        lines.append("")
    return "\n".join(lines)


# -- enumerate --------------------------------------------------------------

def cmd_enumerate(args) -> int:
    job = job_from_dict(load_json(args.file))
    if args.window is not None:
        window = parse_window(args.window)
    else:
        directives = [f.window for f in job.filtrations if f.window is not None]
        if not directives:
            raise InputError("enumerate needs --window lo:hi")
        window = directives[0]
    verdicts: Counter = Counter()
    shapes: Counter = Counter()
    listing = []
    total = 0
    for phi in enumerate_filtrations(job.poset, window):
        total += 1
        h = module_verdict(job.ring, phi)
        verdicts[h.verdict.value] += 1
        sh = classify_shape(phi)
        shapes["eventually_trivial"] += sh.is_eventually_trivial
        shapes["two_step"] += sh.is_two_step
        shapes["canonical_shift"] += sh.canonical_shift is not None
        if not args.stats:
            listing.append({"filtration": phi.to_dict(), "verdict": h.verdict.value})
    doc = {"window": list(window), "total": total,
           "verdicts": dict(sorted(verdicts.items()))}
    if args.stats:
        doc["shapes"] = dict(sorted(shapes.items()))
    else:
        doc["filtrations"] = listing
    if args.json:
        _emit(dumps(doc), args.out)
        return EXIT_OK
    lines = [f"window {window[0]}:{window[1]}: {total} filtrations"]
    lines += [f"  {k}: {v}" for k, v in doc["verdicts"].items()]
    if args.stats:
        lines += [f"  shape {k}: {v}" for k, v in doc["shapes"].items()]
    else:
        for k, item in enumerate(listing):
            f = item["filtration"]
            steps = "; ".join(f"<= {s['upto']}: {_fmt_set(s['value'])}" for s in f["steps"])
            lines.append(f"{k:5d}  {item['verdict']:<12} {steps + '; ' if steps else ''}"
                         f"tail: {_fmt_set(f['tail'])}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    params = load_json(args.file) if args.file else {}
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    report = run_suite(args.suite, params, seed=args.seed)
    if args.json:
        _emit(dumps(report.to_dict()), args.out)
    else:
        _emit("\n".join(report.lines()) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tstruct",
        description="Classify hearts of t-structures on finite prime spectra.",
        epilog="Set TSTRUCT_GUARD_OVERRIDE=1 to lift size guards (unsafe: "
               "enumerations can then run for a very long time).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--out", help="write the report to this path")

    p = sub.add_parser("spectrum", help="print the prime spectrum of a ring")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("classify", help="classify the hearts of a job's filtrations")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 if any verdict is conditional")
    p.add_argument("--fastpaths-only", action="store_true",
                   help="only run the shortcut criteria")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("enumerate", help="census of all filtrations in a window")
    p.add_argument("file")
    p.add_argument("--window", help="lo:hi, jumps range over lo..hi-1 "
                   "(write --window=-1:1 when lo is negative)")
    p.add_argument("--stats", action="store_true",
                   help="counts only, no per-filtration listing")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run an exhaustive verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("file", nargs="?", help="JSON parameters (defaults if omitted)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"tstruct: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, PreconditionError) as exc:
        print(f"tstruct: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
