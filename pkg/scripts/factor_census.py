"""Census of the parenthesis-matching cycle factor across a range of K(n, k).

For every pair in range the script prints the number of factor cycles, the
cycle length spread, and how the cycles distribute over speed partitions.
A partition row like (2,1): 5x12 means five cycles of length twelve whose
gliders have speeds 2 and 1.

Usage:
  python3 scripts/factor_census.py --max-n 14
  python3 scripts/factor_census.py --pair 12 4 --partitions
"""

import argparse
from collections import Counter
from math import comb

from kneser.bitstrings import CyclicBitstring, cycle_factor
from kneser.gliders import glider_partition, speed_partition


def census_row(n: int, k: int, show_partitions: bool) -> None:
    f = cycle_factor(n, k)
    lengths = sorted(len(c) for c in f.cycles)
    by_partition: Counter[tuple[int, ...]] = Counter()
    length_of: dict[tuple[tuple[int, ...], int], int] = Counter()
    for c in f.cycles:
        part = speed_partition(glider_partition(CyclicBitstring(n, k, c.key)))
        by_partition[part] += 1
        length_of[part, len(c)] += 1
    print(f"K({n},{k}): {comb(n, k)} vertices, {len(f.cycles)} cycles, "
          f"lengths {lengths[0]}..{lengths[-1]}, "
          f"{len(by_partition)} speed partitions")
    if show_partitions:
        for part in sorted(by_partition, reverse=True):
            runs = sorted(length for (q, length) in length_of if q == part)
            detail = " ".join(f"{length_of[part, length]}x{length}"
                              for length in runs)
            print(f"  {part}: {detail}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=5)
    ap.add_argument("--max-n", type=int, default=14)
    ap.add_argument("--max-vertices", type=int, default=10 ** 5,
                    help="skip pairs with more vertices than this")
    ap.add_argument("--pair", nargs=2, type=int, metavar=("N", "K"),
                    help="census a single pair instead of the range")
    ap.add_argument("--partitions", action="store_true",
                    help="break each row down by speed partition")
    args = ap.parse_args()

    if args.pair:
        census_row(args.pair[0], args.pair[1], show_partitions=True)
        return
    for n in range(args.min_n, args.max_n + 1):
        for k in range(1, (n - 1) // 2 + 1):
            if comb(n, k) <= args.max_vertices:
                census_row(n, k, args.partitions)


if __name__ == "__main__":
    main()
