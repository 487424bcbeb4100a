#!/usr/bin/env python3
"""Survey Schubert data: tower ranks vs fixed-point counts.

Enumerates all finite Schubert loci in Gr(n, d) for a chosen n and all
dominant GL_n coweights up to a size bound, printing the resolution tower
rank next to the cell-count oracle.  The gap between the two columns
measures how far the locus is from its resolution.
"""

import argparse
import sys
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from simploc.schubert import (
    CoweightDatum,
    FiniteSchubertDatum,
    affine_cell_count,
    cell_count_finite,
    demazure_tower_rank,
    minuscule_decomposition,
    tower_rank,
)


def finite_survey(n: int) -> None:
    print(f"finite Schubert loci in Gr({n}, d)")
    print("  d  j-sequence           tower  cells")
    seqs = [[0]]
    for i in range(1, n + 1):
        seqs = [s + [v] for s in seqs for v in range(s[-1], min(i, n) + 1)]
    for j in sorted(tuple(s) for s in seqs):
        d = j[-1]
        datum = FiniteSchubertDatum(n, d, j)
        print(
            f"  {d}  {str(j):<20} {tower_rank(datum):>5} {cell_count_finite(datum):>6}"
        )


def affine_survey(n: int, bound: int) -> None:
    print(f"affine Schubert varieties for GL_{n}, |mu| <= {bound}")
    print("  mu            decomposition  tower  cells")
    for entries in product(range(bound + 1), repeat=n):
        if list(entries) != sorted(entries, reverse=True) or sum(entries) > bound:
            continue
        datum = CoweightDatum(n, entries)
        ks, twist = minuscule_decomposition(datum)
        label = "+".join(f"w{k}" for k in ks) or "0"
        print(
            f"  {str(entries):<12} {label:<14} {demazure_tower_rank(datum):>5} "
            f"{affine_cell_count(datum):>6}"
        )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--bound", type=int, default=4, help="affine size bound")
    args = parser.parse_args()
    finite_survey(args.n)
    print()
    affine_survey(min(args.n, 4), args.bound)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
