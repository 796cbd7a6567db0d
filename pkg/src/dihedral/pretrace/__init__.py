"""Selberg transforms, lattice counts, the amplifier and the amplified pre-trace inequality."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..waveform import FormHandle, SurfacePoint, eval_form
from .amplifier import (AmplifierCheck, AmplifierSpec, B_of_N, amplifier_asymptotic_check, bump,
                        build_amplifier, log_deriv_coeffs, mellin, w_tilde_one)
from .lattice import (LatticeQuery, BoundReport, MatrixBatch, count_matrices, count_matrices_oracle,
                      count_sums_vs_bounds, enumerate_matrices)
from .selberg import (TransformPair, gaussian_h, h_test, kernel_shape, selberg_chain,
                      spherical_transform, test_kernel)

# the kernel is dropped where |k(u)| < KERNEL_CUT |k(0)|; dropping terms of
# sum |k| only shrinks the geometric side, so the inequality test stays honest
KERNEL_CUT = 1e-8


@dataclass
class GeometricSide:
    total: float
    support_u: float
    per_ell: dict = field(default_factory=dict)
    matrices: int = 0


def geometric_side(handle: FormHandle, spec: AmplifierSpec, z: SurfacePoint, T: float | None = None,
                   kernel: TransformPair | None = None, cut: float = KERNEL_CUT) -> GeometricSide:
    """sum_ell |y_ell|/sqrt(ell) sum_{gamma in M(ell, q)/+-1} |k(u(gamma z, z))|.

    gamma and -gamma act identically on H, so each pair is counted once.
    """
    T = handle.T if T is None else T
    kernel = kernel or test_kernel(T)
    U = kernel.support(cut)
    zc = z.z if isinstance(z, SurfacePoint) else complex(z)
    total = 0.0
    per_ell = {}
    count = 0
    for ell, yl in sorted(spec.y.items()):
        if yl == 0:
            continue
        batch = enumerate_matrices(zc, ell, U, handle.ctx.q)
        s = 0.5 * float(abs(kernel.kernel_k(batch.u)).sum())
        per_ell[ell] = s
        count += len(batch)
        total += abs(yl) / math.sqrt(ell) * s
    return GeometricSide(total=total, support_u=U, per_ell=per_ell, matrices=count)


@dataclass
class PretraceCheck:
    z: complex
    lhs_squared: float       # h(T) A^2 |phi(z)|^2 / ||phi||^2
    lhs_linear: float        # h(T) A |phi(z)|^2 / ||phi||^2
    rhs: float
    holds: bool


def pretrace_inequality(handle: FormHandle, spec: AmplifierSpec, z, norm: float,
                        kernel: TransformPair | None = None, cut: float = KERNEL_CUT) -> PretraceCheck:
    kernel = kernel or test_kernel(handle.T)
    zc = z.z if isinstance(z, SurfacePoint) else complex(z)
    val = eval_form(handle, zc) / norm
    hT = float(kernel.h(handle.T))
    rhs = geometric_side(handle, spec, zc, handle.T, kernel, cut).total
    sq = hT * spec.A ** 2 * val * val
    lin = hT * spec.A * val * val
    return PretraceCheck(z=zc, lhs_squared=sq, lhs_linear=lin, rhs=rhs, holds=max(sq, lin) <= rhs)
