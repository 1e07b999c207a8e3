"""Weighted Bergman projection, coefficient multipliers, and the relation

    B_mu f = R[ B_lambda (f M) ],     R: f_n -> (b_n / a_n) f_n,

between the projection for mu = M (1 - r^2)^alpha and the one for the pure
Jacobi weight lambda = (1 - r^2)^alpha.

Projections are computed one angular mode at a time: for a radial weight the
n-th Taylor coefficient of B_w f only sees the n-th Fourier mode of f,

    c_n = int_0^1 f_hat_n(r) r^(n+1) w(r) dr / I_n(w).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .funcspace import GridFunction, TaylorCoeffs, angular_modes
from .moments import moment_table, qdot, quad_order
from .weights import WeightSpec, lambda_alpha

__all__ = [
    "ProjectionError",
    "MultiplierSeq",
    "multiplier_seq",
    "default_degree",
    "grid_moments",
    "project",
    "multiplier_apply",
    "project_via_identity",
    "identity_residual",
]


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplierSeq:
    weight: WeightSpec
    alpha: float
    n_max: int
    t: np.ndarray
    method: str = "ratio-of-moments"

    @property
    def differences(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def scaled_differences(self) -> np.ndarray:
        n = np.arange(1, self.n_max + 1)
        return n**2 * self.differences

    def bv_partial_sums(self) -> np.ndarray:
        return abs(self.t[0]) + np.concatenate(([0.0], np.cumsum(np.abs(self.differences))))


def multiplier_seq(mu: WeightSpec, n_max: int, order: int | None = None,
                   precision: str = "double") -> MultiplierSeq:
    """t_n = b_n / a_n = I_n(lambda_alpha) / I_n(mu), both from one shared rule."""
    lam = lambda_alpha(mu.alpha)
    q = order or max(quad_order(mu, n_max), quad_order(lam, n_max))
    num = moment_table(lam, n_max, order=q, precision=precision)
    den = moment_table(mu, n_max, order=q, precision=precision)
    t = num.I / den.I
    t.setflags(write=False)
    return MultiplierSeq(mu, mu.alpha, n_max, t)


def default_degree(f: GridFunction) -> int:
    g = f.grid
    return min(g.K // 2 - 1, g.R - 2, 128)


def _check_degree(f: GridFunction, N: int):
    g = f.grid
    if N < 0 or N >= g.K // 2 or N > g.R - 2:
        raise ProjectionError(
            f"degree N={N} too large for grid (R={g.R}, K={g.K}); need N < K/2 and N <= R-2"
        )


def grid_moments(w: WeightSpec, grid, N: int) -> np.ndarray:
    """I_0..I_N of ``w`` computed with the grid's own radial rule."""
    vals = np.power(grid.u[None, :], np.arange(N + 1, dtype=float)[:, None]) * w.M_u(grid.u)
    return 0.5 * qdot(vals, grid.omega)


def _mode_integrals(f: GridFunction, w: WeightSpec, N: int) -> np.ndarray:
    if f.modes is None:
        f = angular_modes(f)
    g = f.grid
    # FFT ordering puts m = 0..K/2-1 first; only non-negative modes are read
    pos = f.modes[:, : N + 1].T  # (N+1, R)
    rn = np.power(g.r[None, :], np.arange(N + 1, dtype=float)[:, None])
    radial = w.M_u(g.u) * g.omega
    vals = pos * rn
    return 0.5 * (qdot(vals.real, radial) + 1j * qdot(vals.imag, radial))


def project(f: GridFunction, w: WeightSpec, N: int | None = None) -> TaylorCoeffs:
    if w.alpha != f.grid.alpha:
        raise ProjectionError("grid was built for a different alpha")
    N = default_degree(f) if N is None else N
    _check_degree(f, N)
    return TaylorCoeffs(_mode_integrals(f, w, N) / grid_moments(w, f.grid, N))


def multiplier_apply(m: MultiplierSeq, f: TaylorCoeffs) -> TaylorCoeffs:
    if f.degree > m.n_max:
        raise ProjectionError(f"degree {f.degree} exceeds multiplier length {m.n_max}")
    return TaylorCoeffs(m.t[: f.degree + 1] * f.coeffs)


def project_via_identity(f: GridFunction, mu: WeightSpec, N: int | None = None,
                         mult: MultiplierSeq | None = None) -> TaylorCoeffs:
    """B_mu f computed as R[B_lambda(f M)]."""
    N = default_degree(f) if N is None else N
    _check_degree(f, N)
    mult = mult or multiplier_seq(mu, N)
    fM = GridFunction(f.grid, f.samples * mu.M_u(f.grid.u)[:, None])
    inner = project(fM, lambda_alpha(mu.alpha), N)
    return multiplier_apply(mult, inner)


def identity_residual(f: GridFunction, mu: WeightSpec, N: int | None = None) -> float:
    N = default_degree(f) if N is None else N
    f = angular_modes(f) if f.modes is None else f
    direct = project(f, mu, N).coeffs
    via = project_via_identity(f, mu, N).coeffs
    return float(np.max(np.abs(direct - via)))
