"""Sign changes, restricted norms and the L1 <= M |phi| (S + 1) chain on {iy : a < y < b}."""
import argparse

from dihedral.acceptance import nodal_reports
from dihedral.nodal import GeodesicSegment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k-min", type=int, default=4)
    ap.add_argument("--k-max", type=int, default=12)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=2.0)
    args = ap.parse_args()
    seg = GeodesicSegment(args.a, args.b)
    print("k      T_k   S   L1        L2        M         slack   L2^2/|phi|^2")
    for r in nodal_reports(range(args.k_min, args.k_max + 1), seg):
        print(f"{r.k:<3d} {r.T:7.3f} {r.S_beta:3d}  {r.L1:.6f}  {r.L2:.6f}  {r.M:.6f}  {r.chain_slack:.4f}"
              f"  {r.L2 ** 2 / r.norm ** 2:.4f}")


if __name__ == "__main__":
    main()
