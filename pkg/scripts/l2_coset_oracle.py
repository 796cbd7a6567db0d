"""Brute-force Petersson norm over the 14 cosets I, S T^j of Gamma_0(13) in SL2(Z).

No Fricke symmetry is used: each coset contributes int_F |phi(g z)|^2 dmu with
Gauss-Legendre in every region.  F is cut at y = 15 Ymax, high enough that the
cusp-0 pieces of the S T^j cosets are resolved.  Slow (about 10 minutes at n = 20);
the result for k = 1, n = 20 is frozen in tests/test_waveform.py.

    python3 scripts/l2_coset_oracle.py --k 1 --n 20
"""
import argparse
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from dihedral.quadfield import make_field_context
from dihedral.waveform import eval_points, eval_row, form_for_height, l2_norm_numeric, single_term_height


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--n", type=int, default=20)
    args = ap.parse_args()
    q = 13
    h = form_for_height(make_field_context(q), args.k, 0.002)
    gx, gw = leggauss(args.n)
    ymax = 2 * single_term_height(h.T)

    def coset_sum(xs, wx, y):
        w = xs + 1j * y
        acc = np.sum(wx * eval_row(h, xs, y) ** 2)
        for j in range(q):
            acc += np.sum(wx * eval_points(h, -1 / (w + j)) ** 2)
        return acc

    tot = 0.0
    half = np.concatenate([(gx + 1) / 4, -(gx + 1) / 4]), np.concatenate([gw / 4, gw / 4])
    for a, b in [(1.0, 2.0), (2.0, ymax), (ymax, 15 * ymax)]:
        la, lb = math.log(a), math.log(b)
        for u, wu in zip((gx + 1) / 2 * (lb - la) + la, gw * (lb - la) / 2):
            y = math.exp(u)
            tot += wu * y * coset_sum(*half, y) / y ** 2
    # arc band sqrt(3)/2 <= y <= 1 with y = 1 - c s^2
    c = 1 - math.sqrt(3) / 2
    for s, ws in zip((gx + 1) / 2, gw / 2):
        y = 1 - c * s * s
        lo = math.sqrt(1 - y * y)
        xs = lo + (0.5 - lo) * (gx + 1) / 2
        wx = gw * (0.5 - lo) / 2
        tot += ws * 2 * c * s * coset_sum(np.concatenate([xs, -xs]), np.concatenate([wx, wx]), y) / y ** 2
    print("brute force:", repr(math.sqrt(tot)))
    print("Fricke split:", repr(l2_norm_numeric(h).norm))


if __name__ == "__main__":
    main()
