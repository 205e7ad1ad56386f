"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 1]

Prints one line per workload with the best time of each backend and the
speedup.  Results are checked for equality before timing.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit

from tstruct import _pykernels
from tstruct.poset import PrimePoset, disjoint_union

try:
    from tstruct import _kernels
except ImportError:
    _kernels = None


def snf_workload(rng: random.Random, size: int, count: int):
    mats = [[[rng.randint(-20, 20) for _ in range(size)] for _ in range(size)]
            for _ in range(count)]

    def run(mod):
        return [mod.snf_diagonal(A, size, size) for A in mats]

    return run


def upset_workload(poset: PrimePoset):
    up, down, n = list(poset.up), list(poset.down), len(poset)

    def run(mod):
        return sorted(mod.upset_masks(n, up, down))

    return run


def workloads(seed: int):
    rng = random.Random(seed)
    chain = PrimePoset([f"c{i}" for i in range(4)], [(f"c{i}", f"c{i + 1}") for i in range(3)])
    vee = PrimePoset(["a", "b", "m"], [("a", "m"), ("b", "m")])
    yield "snf 4x4 x200", snf_workload(rng, 4, 200)
    yield "snf 8x8 x100", snf_workload(rng, 8, 100)
    yield "snf 12x12 x20", snf_workload(rng, 12, 20)
    yield "up-sets antichain(14)", upset_workload(PrimePoset([f"x{i:02d}" for i in range(14)]))
    yield "up-sets 4 chains of 4", upset_workload(
        disjoint_union(chain, chain, chain, chain, prefixes=["a", "b", "c", "d"]))
    yield "up-sets 5 vees", upset_workload(
        disjoint_union(*[vee] * 5, prefixes=[f"v{i}" for i in range(5)]))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; run `pip install -e .` first", file=sys.stderr)
        return 1
    print(f"{'workload':<24} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, run in workloads(args.seed):
        if run(_pykernels) != run(_kernels):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        t_py = min(timeit.repeat(lambda: run(_pykernels), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
        print(f"{name:<24} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
