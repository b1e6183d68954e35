#!/usr/bin/env python3
"""Print how the longest encoded label grows as the degree bound doubles.

Usage: python scripts/label_scaling.py [min_exp] [max_exp]

The witness tree at each degree is fixed (see harness.scaling_witness), so
the table is reproducible bit for bit.
"""

import sys

from radiotopo.harness import scaling_witness
from radiotopo.labels import encode
from radiotopo.scheme import label_tree


def main() -> int:
    lo = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    hi = int(sys.argv[2]) if len(sys.argv) > 2 else 16
    print(f"{'degree':>10} {'nodes':>8} {'max label bits':>15}")
    prev = None
    for exp in range(lo, hi + 1):
        delta = 1 << exp
        labeled = label_tree(scaling_witness(delta))
        worst = max(len(encode(lab.to_structured())) for lab in labeled.labels.values())
        step = "" if prev is None else f"  (+{worst - prev})"
        print(f"{f'2^{exp}':>10} {labeled.tree.n:>8} {worst:>15}{step}")
        prev = worst
    return 0


if __name__ == "__main__":
    sys.exit(main())
