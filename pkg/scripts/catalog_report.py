#!/usr/bin/env python3
"""Property table for every catalog function: one row per function, one column per check."""
import argparse
import json
import math

from metrika.functions import catalog, catalog_names
from metrika.properties import analyze, estimate_derivative_at_zero

COLUMNS = ["amenable", "increasing", "strictly-increasing", "concave", "subadditive",
           "tightly-bounded", "doubling", "ratio-decreasing", "metric-transform"]
ABBREV = {"Holds": "+", "Fails": "-", "Unknown": "?"}


def row(name):
    f = catalog(name)
    v = analyze(f)
    mp = v["metric-preserving"]
    out = {"name": name, "checks": {c: v[c].status.value for c in COLUMNS},
           "metric_preserving": mp.status.value, "route": mp.basis.name}
    if "periodic-form" in v:
        out["periodic_form"] = v["periodic-form"].status.value
    if v["amenable"].holds:
        est = estimate_derivative_at_zero(f).estimate
        out["fprime0"] = "inf" if math.isinf(est) else round(est, 9)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    ap.add_argument("names", nargs="*", help="subset of catalog names (default: all)")
    args = ap.parse_args()
    rows = [row(n) for n in (args.names or catalog_names())]
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    head = f"{'function':<16}" + " ".join(f"{c[:6]:>6}" for c in COLUMNS) + "  f'(0)      metric-preserving"
    print(head)
    print("-" * len(head))
    for r in rows:
        cells = " ".join(f"{ABBREV[r['checks'][c]]:>6}" for c in COLUMNS)
        fp = str(r.get("fprime0", "n/a"))
        print(f"{r['name']:<16}{cells}  {fp:<10} {r['metric_preserving']} {r['route']}")


if __name__ == "__main__":
    main()
