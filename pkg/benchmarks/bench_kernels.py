"""Compare the pure-Python and compiled kernels on representative workloads.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Every workload is run on each importable backend, the results are checked
for equality, and the best wall time of N repeats is printed.
"""
from __future__ import annotations

import argparse
import random
import timeit
from fractions import Fraction
from math import lcm

from sigma_forge.algebra.series import monomials_upto
from sigma_forge.kernels import backends
from sigma_forge.lie_cohomology import adjoint_rep, build_so, ce_differential, standard_rep, tensor_rep


def _series_terms(rng, nvars, degree, nterms):
    mons = list(monomials_upto(nvars, degree))
    return {rng.choice(mons): Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 6)) for _ in range(nterms)}


def _int_rows(sparse_rows):
    out = []
    for r in sparse_rows:
        den = 1
        for v in r.values():
            den = lcm(den, v.denominator)
        out.append({k: int(v * den) for k, v in r.items() if v})
    return out


def workloads():
    rng = random.Random(7)
    a = _series_terms(rng, 4, 10, 400)
    b = _series_terms(rng, 4, 10, 400)
    g = build_so(4)
    rows = _int_rows(ce_differential(2, tensor_rep(adjoint_rep(g), standard_rep(g))))
    return [
        ("mul_terms 4 vars deg 10", lambda K: K.mul_terms(a, b, 4, 10)),
        (f"echelon CE d2 so(4) ({len(rows)} rows)", lambda K: K.echelon(list(rows))),
        ("back_substitute", lambda K: K.back_substitute(K.echelon(list(rows)))),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    impls = backends()
    print(f"backends: {', '.join(impls)}")
    print(f"{'workload':40s} " + " ".join(f"{name:>10s}" for name in impls) + "   speedup")
    for name, fn in workloads():
        results = {k: fn(K) for k, K in impls.items()}
        ref = results["python"]
        assert all(r == ref for r in results.values()), f"backend mismatch on {name}"
        times = {k: min(timeit.repeat(lambda K=K: fn(K), number=1, repeat=args.repeat)) for k, K in impls.items()}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:40s} " + " ".join(f"{t * 1e3:8.1f}ms" for t in times.values()) + f"   {speed:6.2f}x")


if __name__ == "__main__":
    main()
