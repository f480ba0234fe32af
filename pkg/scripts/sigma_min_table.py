#!/usr/bin/env python3
"""Tabulate the smallest singular value of the vectorized Sylvester system
matrix against the closed form 2*sin(pi/(4k)), for every structure kind,
including the fully reduced form and the block-size independence check."""

import argparse

import numpy as np

from strukt import StructureKind, build_TA, build_TA_reduced, sigma_min_formula


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--nmax", type=int, default=2)
    args = ap.parse_args()

    header = f"{'k':>3} {'n':>3} {'kind':>16} {'formula':>19} {'svd':>19} {'rel_err':>9}"
    print(header)
    print("-" * len(header))
    worst = 0.0
    for k in range(1, args.kmax + 1):
        want = sigma_min_formula(k)
        for n in range(1, args.nmax + 1):
            for kind in StructureKind:
                got = np.linalg.svd(build_TA(k, n, kind), compute_uv=False)[-1]
                rel = abs(got - want) / want
                worst = max(worst, rel)
                print(f"{k:>3} {n:>3} {kind.value:>16} {want:>19.15f} {got:>19.15f} {rel:>9.1e}")
        red = np.linalg.svd(build_TA_reduced(k, StructureKind.even), compute_uv=False)[-1]
        print(f"{k:>3} {'-':>3} {'reduced (even)':>16} {want:>19.15f} {red:>19.15f} {abs(red - want) / want:>9.1e}")
    print(f"\nworst relative error: {worst:.3e}")


if __name__ == "__main__":
    main()
