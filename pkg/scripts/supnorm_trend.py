"""Sup-norm ratios for q = 13, k = 2..12 and the log-log slope against T_k.

    python3 scripts/supnorm_trend.py --k-max 12 --out sup.csv
"""
import argparse
import csv

import numpy as np

from dihedral.acceptance import sup_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, default=13)
    ap.add_argument("--k-min", type=int, default=2)
    ap.add_argument("--k-max", type=int, default=12)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    rows = sup_rows(range(args.k_min, args.k_max + 1), args.q)
    for r in rows:
        print(f"k={r['k']:3d}  T={r['T_k']:8.3f}  sup/|phi|={r['sup_ratio']:.5f}  /T^3/8={r['ratio_over_T_to_3_8']:.5f}")
    T = np.array([r["T_k"] for r in rows])
    v = np.array([r["ratio_over_T_to_3_8"] for r in rows])
    print("slope:", np.polyfit(np.log(T), np.log(v), 1)[0])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
