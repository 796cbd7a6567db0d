"""Sign changes, restricted norms and the M functional along segments {iy : a < y < b}.

On x = 0 the form is phi(iy) = 2 sqrt(y) sum a(n) b(T, 2 pi n y), evaluated here
for a whole vector of heights at once.  Arclength is the hyperbolic one, dy/y.

The antiderivative F(y) = int_a^y phi(it) dt/t is monotone between consecutive
zeros of phi, so its range is attained at zeros or endpoints.  Both L1 and
M ||phi|| are therefore sums over the sign-constant pieces [xi_j, xi_{j+1}].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .besselk import bessel_row
from .quadfield import legendre
from .waveform import FormHandle, _require, truncation_length

ZERO_XTOL = 1e-10
CHAIN_TOL = 1e-6
_GX, _GW = leggauss(20)


class SamplingError(ArithmeticError):
    pass


class ChainViolation(AssertionError):
    pass


@dataclass(frozen=True)
class GeodesicSegment:
    a: float = 1.0
    b: float = 2.0
    measure: str = "dy/y"

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if self.measure != "dy/y":
            raise ValueError("only hyperbolic arclength dy/y is supported")

    @property
    def length(self) -> float:
        return math.log(self.b / self.a)


def phi_on_axis(handle: FormHandle, ys, tol: float = 1e-10) -> np.ndarray:
    """Scaled phi(iy) for an increasing vector of heights."""
    ys = np.asarray(ys, dtype=float)
    N = truncation_length(handle.T, float(ys[0]), tol)
    _require(handle, N)
    acc = np.zeros_like(ys)
    for n in range(1, N + 1):
        an = handle.coeffs.a[n]
        if an != 0.0:
            acc += an * bessel_row(handle.T, 2 * np.pi * n * ys)
    return 2 * np.sqrt(ys) * acc


def min_samples(handle: FormHandle, seg: GeodesicSegment) -> int:
    return max(64, math.ceil(20 * max(handle.T, 1.0) * (seg.b - seg.a) / seg.a))


def _grid(seg: GeodesicSegment, samples: int) -> np.ndarray:
    return np.exp(np.linspace(math.log(seg.a), math.log(seg.b), samples))


def _crossings(vals: np.ndarray) -> np.ndarray:
    s = np.sign(vals)
    return np.nonzero(s[:-1] * s[1:] < 0)[0]


def sign_changes(handle: FormHandle, seg: GeodesicSegment, samples: int | None = None,
                 tol: float = 1e-10) -> tuple[int, np.ndarray]:
    """(S_beta, refined zeros) with the count checked under doubled sampling."""
    samples = samples or min_samples(handle, seg)
    ys = _grid(seg, samples)
    vals = phi_on_axis(handle, ys, tol)
    cross = _crossings(vals)
    ys2 = _grid(seg, 2 * samples - 1)
    if len(_crossings(phi_on_axis(handle, ys2, tol))) != len(cross):
        raise SamplingError(f"k={handle.k}: sign-change count unstable under doubling at {samples} samples")
    f = lambda y: float(phi_on_axis(handle, [y], tol)[0])
    zeros = np.array([brentq(f, ys[i], ys[i + 1], xtol=ZERO_XTOL) for i in cross])
    return len(zeros), zeros


def _piece_integrals(handle: FormHandle, edges: np.ndarray, panels: int, tol: float,
                     power: int = 1) -> np.ndarray:
    """int phi(iy)^power dy/y over each [edges[j], edges[j+1]], in log y with GL panels."""
    out = np.empty(len(edges) - 1)
    # panels per unit of T-scaled log length keeps the resolution tied to the oscillation
    per_unit = panels * max(handle.T, 1.0)
    for j in range(len(edges) - 1):
        la, lb = math.log(edges[j]), math.log(edges[j + 1])
        m = max(1, math.ceil((lb - la) * per_unit))
        e = np.linspace(la, lb, m + 1)
        h = 0.5 * np.diff(e)
        mid = 0.5 * (e[1:] + e[:-1])
        s = (mid[:, None] + h[:, None] * _GX[None, :]).ravel()
        w = (h[:, None] * _GW[None, :]).ravel()
        out[j] = np.dot(w, phi_on_axis(handle, np.exp(s), tol) ** power)
    return out


def _pieces(handle: FormHandle, seg: GeodesicSegment, zeros, tol: float):
    edges = np.concatenate([[seg.a], zeros, [seg.b]])
    p1 = _piece_integrals(handle, edges, 1, tol)
    p2 = _piece_integrals(handle, edges, 2, tol)
    drift = float(np.max(np.abs(p2 - p1))) / max(float(np.sum(np.abs(p2))), 1e-300)
    return edges, p2, drift


def restricted_norms(handle: FormHandle, seg: GeodesicSegment, tol: float = 1e-10,
                     zeros=None) -> tuple[float, float]:
    """(L1, L2) of phi on the segment with respect to dy/y."""
    if zeros is None:
        zeros = sign_changes(handle, seg, tol=tol)[1]
    edges = np.concatenate([[seg.a], zeros, [seg.b]])
    l1 = float(np.sum(np.abs(_piece_integrals(handle, edges, 2, tol))))
    l2 = math.sqrt(float(np.sum(_piece_integrals(handle, edges, 2, tol, power=2))))
    return l1, l2


def m_functional(handle: FormHandle, seg: GeodesicSegment, norm: float, tol: float = 1e-10,
                 zeros=None) -> float:
    """(max F - min F) / ||phi||_2 with F the antiderivative of phi(iy) dy/y from a."""
    if zeros is None:
        zeros = sign_changes(handle, seg, tol=tol)[1]
    edges = np.concatenate([[seg.a], zeros, [seg.b]])
    F = np.concatenate([[0.0], np.cumsum(_piece_integrals(handle, edges, 2, tol))])
    return float(F.max() - F.min()) / norm


def genus_x0(q: int) -> int:
    """Genus of X_0(q), q prime: 1 + mu/12 - nu2/4 - nu3/3 - nu_inf/2 with mu = q + 1."""
    mu = q + 1
    nu2 = 1 + legendre(-1, q)
    nu3 = 1 + legendre(-3, q) if q != 3 else 1
    g = 1 + mu / 12 - nu2 / 4 - nu3 / 3 - 1
    return int(round(g))


@dataclass
class NodalReport:
    k: int
    T: float
    S_beta: int
    zeros: np.ndarray = field(repr=False)
    L1: float = 0.0
    L2: float = 0.0
    M: float = 0.0
    norm: float = 1.0
    chain_slack: float = 0.0
    lower_bound_floor: int = 0
    genus: int = 0
    nodal_domain_floor: float = 0.0
    quadrature_drift: float = 0.0

    def row(self) -> dict:
        return {"k": self.k, "T_k": self.T, "S_beta": self.S_beta, "L1": self.L1, "L2": self.L2,
                "M": self.M, "chain_slack": self.chain_slack, "lower_bound_floor": self.lower_bound_floor}


def nodal_chain_report(handle: FormHandle, seg: GeodesicSegment, norm: float,
                       tol: float = 1e-10) -> NodalReport:
    """All segment statistics for one form, asserting L1 <= M ||phi|| (S + 1)."""
    S, zeros = sign_changes(handle, seg, tol=tol)
    edges, pieces, drift = _pieces(handle, seg, zeros, tol)
    if drift > 1e-6:
        raise ArithmeticError(f"k={handle.k}: segment quadrature drift {drift:.2e} under doubling")
    l1 = float(np.sum(np.abs(pieces)))
    l2 = math.sqrt(float(np.sum(_piece_integrals(handle, edges, 2, tol, power=2))))
    F = np.concatenate([[0.0], np.cumsum(pieces)])
    spread = float(F.max() - F.min())
    slack = l1 / (spread * (S + 1)) if spread > 0 else 0.0
    if slack > 1 + CHAIN_TOL:
        raise ChainViolation(f"k={handle.k}: L1 / (M ||phi|| (S+1)) = {slack:.9f} > 1")
    g = genus_x0(handle.ctx.q)
    return NodalReport(k=handle.k, T=handle.T, S_beta=S, zeros=zeros, L1=l1, L2=l2,
                       M=spread / norm, norm=norm, chain_slack=slack,
                       lower_bound_floor=math.floor(l1 / spread) - 1 if spread > 0 else -1,
                       genus=g, nodal_domain_floor=0.5 * S - g + 1, quadrature_drift=drift)
