#!/usr/bin/env python3
"""Regenerates the pinned period-frequency snapshots with a naive,
single-threaded expansion of sqrt(n^2 d), independent of the Rust code.

    python3 oracle.py 2 20000 20 10
"""
import math
import sys


def period(radicand):
    a0 = math.isqrt(radicand)
    p, q, a = 0, 1, a0
    length = 0
    while True:
        p = a * q - p
        q = (radicand - p * p) // q
        a = (a0 + p) // q
        length += 1
        if q == 1:
            return length


def main():
    d, n_max, threshold, k_max = map(int, sys.argv[1:5])
    counts = {}
    for n in range(1, n_max + 1):
        v = period(n * n * d)
        counts[v] = counts.get(v, 0) + 1
    with open(f"scan_d{d}_n{n_max}_counts.csv", "w", newline="\n") as f:
        f.write("D,count\n")
        for v in sorted(counts):
            f.write(f"{v},{counts[v]}\n")
    cand = {v for v, c in counts.items() if c >= threshold}
    with open(f"q3_d{d}_n{n_max}_k{k_max}_t{threshold}.csv", "w", newline="\n") as f:
        f.write("k,k_candidate,next_candidate,satisfied\n")
        for k in range(1, k_max + 1):
            a, b = k in cand, k + 1 in cand
            f.write(f"{k},{str(a).lower()},{str(b).lower()},{str(a or b).lower()}\n")


if __name__ == "__main__":
    main()
