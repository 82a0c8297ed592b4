#!/usr/bin/env python3
"""Fixed-point sets of the catalog plus a batch of random concave transforms, with shape tallies."""
import argparse
from collections import Counter
from fractions import Fraction

from metrika import scalars as S
from metrika.fixpoint import check_fix_interval_property, classify_fix_shape, compute_fix_set
from metrika.functions import catalog
from metrika.generators import random_concave_transform, rng
from metrika.properties import check_metric_transform

NAMED = [("ceiling", {}), ("floor_sqrt", {}), ("x_plus_abs_sin", {}), ("half", {}),
         ("sqrt_ax", {"a": 3}), ("identity", {}), ("clamp", {"a": 2}),
         ("example5_g", {}), ("example5_h", {}), ("tight_fixset", {})]


def describe(fs):
    parts = [S.scalar_to_json(p) for p in fs.points]
    parts += [f"[{S.scalar_to_json(a)}, {S.scalar_to_json(b)}]" for a, b in fs.intervals]
    parts += [f"Q∩[{S.scalar_to_json(a)}, {S.scalar_to_json(b)}]" for a, b in fs.rational_runs]
    return "{" + ", ".join(parts) + "}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--xmax", type=Fraction, default=Fraction(12))
    ap.add_argument("--step", type=Fraction, default=Fraction(1, 64))
    ap.add_argument("--random", type=int, default=50, help="number of random transforms")
    ap.add_argument("--seed", type=int, default=None, help="default: METRIKA_SEED or the package default")
    args = ap.parse_args()

    print(f"window [0, {args.xmax}], step {args.step}")
    for name, params in NAMED:
        f = catalog(name, **params)
        fs = compute_fix_set(f, args.xmax, args.step)
        shape = classify_fix_shape(fs).shape.value if check_metric_transform(f).holds else "(not a transform)"
        print(f"  {f.label:<30} {shape:<20} {describe(fs)}")
        for note in fs.caveats:
            print(f"  {'':<30} note: {note}")

    r = rng(args.seed)
    tally, lemma_failures = Counter(), 0
    for _ in range(args.random):
        f = random_concave_transform(r)
        fs = compute_fix_set(f, args.xmax, args.step)
        tally[classify_fix_shape(fs).shape.value] += 1
        lemma_failures += not check_fix_interval_property(f, fs).holds
    print(f"\n{args.random} random concave transforms:")
    for shape, n in sorted(tally.items()):
        print(f"  {shape:<20} {n}")
    print(f"  interval-property failures: {lemma_failures}")


if __name__ == "__main__":
    main()
