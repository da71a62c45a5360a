"""Time the compiled kernels against the pure-Python ones.

    python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]

Each workload is run through both backends on identical inputs; results are
checked for equality before any timing is reported.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from causal_unfold import _kernels_py as py
from causal_unfold import fixtures as fx
from causal_unfold.realisations import enumerate_realisations

try:
    from causal_unfold import _speedups as cy
except ImportError:
    cy = None


def random_poset(rng, n, p=0.3):
    below = [0] * n
    for j in range(n):
        for i in range(j):
            if rng.random() < p:
                below[j] |= (1 << i) | below[i]
    return below


def workloads(rng):
    """(name, function name, argument builder) triples."""
    out = []
    wide = [0] * 16
    out.append(("down_sets, 16-node antichain", "down_sets", lambda k: (wide, (1 << 16) - 1)))
    posets = [random_poset(rng, 14) for _ in range(20)]
    out.append(("down_sets, 20 random 14-node posets", "down_sets_many",
                lambda k: ([(b, (1 << 14) - 1) for b in posets],)))
    fam = fx.appb_c().family
    rs = enumerate_realisations(fam, 4)
    cases = []
    for r in rs:
        lbits = [1 << fam.index[x] for x in r.labels]
        below = [sum(1 << j for j in r.below[i]) for i in range(r.n)]
        cases.append((below, lbits))
    out.append((f"clause_i_ok, {len(cases)} realisations over a fixture", "clause_i_many",
                lambda k: (cases, k.MaskSet(fam.masks))))
    masks = sorted(fx.noninj().family.masks)
    out.append((f"union_violations, {len(masks)} configurations", "union_violations",
                lambda k: (masks, k.MaskSet(masks))))
    return out


def call(kernels, fname, args):
    if fname == "down_sets_many":
        return [sorted(kernels.down_sets(b, w)) for b, w in args[0]]
    if fname == "clause_i_many":
        cases, fam = args
        return [kernels.clause_i_ok(b, lb, fam) for b, lb in cases]
    if fname == "down_sets":
        return sorted(kernels.down_sets(*args))
    return getattr(kernels, fname)(*args)


END_TO_END = """
import time
from causal_unfold import fixtures as fx, kernels
from causal_unfold.realisations import enumerate_realisations, is_extremal
t = time.perf_counter()
f = fx.appb_c().family
n = sum(is_extremal(r, f) for r in enumerate_realisations(f, 4))
print(kernels.BACKEND, n, time.perf_counter() - t)
"""


def end_to_end():
    """Enumerate and classify realisations in a fresh process per backend."""
    rows = {}
    for pure in (True, False):
        env = dict(os.environ)
        env.pop("CAUSAL_UNFOLD_PURE", None)
        if pure:
            env["CAUSAL_UNFOLD_PURE"] = "1"
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        rows[out[0]] = (int(out[1]), float(out[2]))
    (n_py, t_py), (n_cy, t_cy) = rows["python"], rows["cython"]
    assert n_py == n_cy
    print(f"{'end to end: extremal realisations, <= 4 nodes':48s} {t_py * 1e3:12.2f} {t_cy * 1e3:12.2f} "
          f"{t_py / t_cy:7.1f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)
    if cy is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    rng = random.Random(args.seed)
    print(f"{'workload':48s} {'python (ms)':>12s} {'cython (ms)':>12s} {'speedup':>8s}")
    for name, fname, build in workloads(rng):
        a_py, a_cy = build(py), build(cy)
        assert call(py, fname, a_py) == call(cy, fname, a_cy), name
        t_py = min(timeit.repeat(lambda: call(py, fname, a_py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: call(cy, fname, a_cy), number=1, repeat=args.repeat))
        print(f"{name:48s} {t_py * 1e3:12.2f} {t_cy * 1e3:12.2f} {t_py / t_cy:7.1f}x")
    end_to_end()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
