"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--vars 4] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from prefteam import _kernels
from prefteam.semantics import compile_formula
from prefteam.syntax import generate_corpus
from prefteam.teams import TeamDomain


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("--vars", type=int, default=4, help="domain size; the lattice has 2**(2**vars) teams")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--formulas", type=int, default=20)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the numpy backend is timed")
    d = TeamDomain.of("p q r s t u"[: 2 * args.vars - 1])
    m = d.num_valuations
    rng = np.random.default_rng(0)
    # sparse random families keep the pairwise joins meaningful
    a = (rng.random(1 << m) < 0.02).astype(np.uint8)
    b = (rng.random(1 << m) < 0.02).astype(np.uint8)
    corpus = generate_corpus(d, 3, "Mixed", seed=0, count=args.formulas)
    progs = [compile_formula(phi, d, range(m), "cover") for phi in corpus]

    cases = {
        "or_cover": lambda k: k.or_cover(a, b),
        "or_partition": lambda k: k.or_partition(a, b),
        "or_union": lambda k: k.or_union(a, b, m),
        "strict_down_exists": lambda k: k.strict_down_exists(a, m),
        f"eval_program x{len(progs)}": lambda k: [k.eval_program(
            p.ops, p.lit_masks, p.dep_table, p.dep_groups, p.inc_table, p.inc_lv, p.inc_rv, p.m)
            for p in progs],
    }
    names = sorted(backends)
    print(f"domain {d} ({1 << m} teams), best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{n:>12}" for n in names) + "     speedup")
    for label, fn in cases.items():
        times = {n: best(lambda: fn(backends[n]), args.repeat) for n in names}
        row = f"{label:<22}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"  {times['python'] / times['compiled']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
