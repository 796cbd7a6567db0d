"""Central values L(1/2, phi_k) and the dyadic second moments for K = 8, 16, 32."""
import argparse

from dihedral.acceptance import lvalue_stability
from dihedral.lfunction import second_moment
from dihedral.quadfield import make_field_context


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, default=13)
    ap.add_argument("--K", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--t", type=float, default=0.0)
    args = ap.parse_args()
    for r in lvalue_stability(range(1, 9), args.q):
        print(f"k={r['k']}  sign={r['sign']:+d}  L(1/2)={r['value']:.10f}  swap={r['swap']:.1e}  double={r['double']:.1e}")
    ctx = make_field_context(args.q)
    prev = None
    for K in args.K:
        m = second_moment(ctx, K, args.t)
        extra = f"  ratio {m.average / prev:.3f}" if prev else ""
        print(f"K={K:3d}  average |L|^2 = {m.average:.6f}{extra}")
        prev = m.average


if __name__ == "__main__":
    main()
