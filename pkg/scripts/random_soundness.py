#!/usr/bin/env python3
"""Draw random instances and count hypothesis/conclusion outcomes for each pipeline.

A violation is an instance whose hypotheses were verified but whose conclusion
check failed.
"""
import argparse
import time
from collections import Counter

from metrika.contraction import Conclusion, establish_local_radial_contraction, establish_multival_contraction
from metrika.fixpoint import nadler_pipeline
from metrika.generators import contraction_instance, nadler_instance, rng


def single(r, n):
    c = Counter()
    for _ in range(n):
        inst = contraction_instance(r)
        rep = establish_local_radial_contraction(inst.g, inst.spec, inst.k, inst.D)
        held = rep.conclusion is Conclusion.LOCAL_RADIAL
        c["hypotheses held" if held else "not established"] += 1
        c["violations"] += held and not rep.cross_check.holds
        c[f"kind={inst.kind}"] += 1
    return c


def multi(r, n):
    c = Counter()
    for _ in range(n):
        inst = contraction_instance(r, multivalued=True)
        rep = establish_multival_contraction(inst.T, inst.spec, inst.k, inst.D)
        held = rep.conclusion is Conclusion.UNIFORM_MULTIVAL
        c["hypotheses held" if held else "not established"] += 1
        c["violations"] += held and not rep.cross_check.holds
    return c


def nadler(r, n):
    c = Counter()
    for _ in range(n):
        inst = nadler_instance(r)
        rep = nadler_pipeline(inst.T, inst.D, inst.eps, inst.k)
        c["hypotheses held" if rep.hypotheses_hold else "hypotheses failed"] += 1
        c["violations"] += not rep.consistent
        for h in rep.failed_hypotheses():
            c[f"failed: {h}"] += 1
    return c


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=300, help="instances per pipeline")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--only", choices=["single", "multi", "nadler"])
    args = ap.parse_args()
    r = rng(args.seed)
    for name, fn in (("single", single), ("multi", multi), ("nadler", nadler)):
        if args.only and args.only != name:
            continue
        t0 = time.perf_counter()
        counts = fn(r, args.n)
        print(f"{name} ({args.n} instances, {time.perf_counter() - t0:.1f}s)")
        for key, v in sorted(counts.items()):
            print(f"  {key:<28} {v}")


if __name__ == "__main__":
    main()
