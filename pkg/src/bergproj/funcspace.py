"""Functions on the disc: polar grid samples, angular modes, norms, Taylor sums.

The grid is a tensor product of a Gauss-Jacobi rule in u = r^2 (carrying
the (1 - r^2)^alpha factor) and K equispaced angles.  Since
dA = r dr dtheta = (1/2) du dtheta, a disc integral of F against
M (1 - r^2)^alpha becomes

    sum_j sum_k F(r_j e^{i theta_k}) M(r_j) omega_j (2 pi / K) (1/2).
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass

import numpy as np

from .moments import gauss_jacobi_rule
from .weights import WeightSpec

__all__ = [
    "FunctionSpecError",
    "PolarGrid",
    "GridFunction",
    "TaylorCoeffs",
    "make_grid",
    "parse_fn",
    "sample",
    "angular_modes",
    "lp_norm",
    "inner",
    "p_mean",
    "p_means",
    "partial_sum",
    "eval_taylor",
    "taylor_coeffs_of",
    "DEFAULT_R",
    "DEFAULT_K",
]

DEFAULT_R = 256
DEFAULT_K = 512


class FunctionSpecError(ValueError):
    pass


@dataclass(frozen=True)
class PolarGrid:
    alpha: float
    R: int
    K: int
    u: np.ndarray
    omega: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return np.sqrt(self.u)

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.K) / self.K

    def points(self) -> np.ndarray:
        """Complex grid points, shape (R, K)."""
        return self.r[:, None] * np.exp(1j * self.theta)[None, :]

    def refined(self) -> "PolarGrid":
        return make_grid(self.alpha, 2 * self.R, 2 * self.K)


def make_grid(alpha: float, R: int = DEFAULT_R, K: int = DEFAULT_K) -> PolarGrid:
    if K < 4 or K & (K - 1):
        raise ValueError(f"K must be a power of two >= 4, got {K}")
    if R < 1:
        raise ValueError("R must be >= 1")
    u, om = gauss_jacobi_rule(R, alpha)
    return PolarGrid(float(alpha), R, K, u, om)


@dataclass
class GridFunction:
    grid: PolarGrid
    samples: np.ndarray  # (R, K) complex
    modes: np.ndarray | None = None  # (R, K), numpy FFT ordering

    def mode(self, m: int) -> np.ndarray:
        """f_hat_m(r_j) for -K/2 <= m < K/2."""
        if self.modes is None:
            raise ValueError("modes not computed; call angular_modes first")
        K = self.grid.K
        if not -K // 2 <= m < K // 2:
            raise IndexError(m)
        return self.modes[:, m % K]

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["r", "theta", "re", "im"])
        for j, r in enumerate(self.grid.r):
            for k, th in enumerate(self.grid.theta):
                v = self.samples[j, k]
                out.writerow([f"{r:.17g}", f"{th:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()


@dataclass(frozen=True)
class TaylorCoeffs:
    coeffs: np.ndarray  # complex, f_0..f_N

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("Taylor coefficients must be a finite non-empty 1-D sequence")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]


# --------------------------------------------------------------------------
# test-function registry
# --------------------------------------------------------------------------

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_FN_RE = re.compile(
    rf"^(?:holo-poly:(?P<poly>{_NUM}(?:,{_NUM})*)"
    rf"|mono:(?P<k>\d+),(?P<m>[+-]?\d+)"
    rf"|sing:(?P<s>{_NUM})"
    rf"|(?P<log>logsing))$"
)


def parse_fn(spec: str) -> tuple[str, tuple]:
    m = _FN_RE.match(spec)
    if m is None:
        raise FunctionSpecError(f"unknown function spec {spec!r}")
    if m["poly"]:
        return "holo-poly", tuple(float(c) for c in m["poly"].split(","))
    if m["k"] is not None:
        return "mono", (int(m["k"]), int(m["m"]))
    if m["s"] is not None:
        return "sing", (float(m["s"]),)
    return "logsing", ()


def _eval_fn(spec: str, z: np.ndarray) -> np.ndarray:
    tag, par = parse_fn(spec)
    if tag == "holo-poly":
        return np.polynomial.polynomial.polyval(z, np.asarray(par, dtype=complex))
    if tag == "mono":
        k, m = par
        base = np.abs(z) ** (2 * k)
        return base * (z**m if m >= 0 else np.conj(z) ** (-m))
    if tag == "sing":
        return np.power(1 - z, -par[0])
    return -np.log1p(-z)


def sample(fn_spec: str, grid: PolarGrid) -> GridFunction:
    vals = _eval_fn(fn_spec, grid.points()).astype(complex)
    if not np.all(np.isfinite(vals)):
        raise FunctionSpecError(f"{fn_spec} produced non-finite samples on the grid")
    return GridFunction(grid, vals)


def taylor_coeffs_of(fn_spec: str, N: int) -> TaylorCoeffs:
    """Analytic Taylor coefficients 0..N for the holomorphic registry members."""
    tag, par = parse_fn(fn_spec)
    n = np.arange(N + 1)
    if tag == "holo-poly":
        c = np.zeros(N + 1, dtype=complex)
        k = min(N + 1, len(par))
        c[:k] = par[:k]
        return TaylorCoeffs(c)
    if tag == "sing":
        s = par[0]
        c = np.ones(N + 1)
        for j in range(1, N + 1):
            c[j] = c[j - 1] * (j - 1 + s) / j
        return TaylorCoeffs(c)
    if tag == "logsing":
        c = np.zeros(N + 1)
        c[1:] = 1.0 / n[1:]
        return TaylorCoeffs(c)
    k, m = par
    if k == 0 and m >= 0:
        c = np.zeros(N + 1)
        if m <= N:
            c[m] = 1.0
        return TaylorCoeffs(c)
    raise FunctionSpecError(f"{fn_spec} is not holomorphic")


# --------------------------------------------------------------------------
# transforms and norms
# --------------------------------------------------------------------------


def angular_modes(f: GridFunction) -> GridFunction:
    """Per-radius DFT: f_hat_m(r_j) = (1/K) sum_k f(r_j e^{i theta_k}) e^{-i m theta_k}."""
    modes = np.fft.fft(f.samples, axis=1) / f.grid.K
    return GridFunction(f.grid, f.samples, modes)


def _check_p(p):
    if not (1 < p < math.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")


def lp_norm(f: GridFunction, p: float, w: WeightSpec) -> float:
    _check_p(p)
    if w.alpha != f.grid.alpha:
        raise ValueError("grid was built for a different alpha")
    if not np.all(np.isfinite(f.samples)):
        raise ValueError("non-finite samples")
    g = f.grid
    radial = w.M_u(g.u) * g.omega * (np.pi / g.K)  # (2 pi / K) * 1/2
    ring = np.sum(np.abs(f.samples) ** p, axis=1)
    return float(math.fsum((ring * radial).tolist()) ** (1 / p))


def inner(f: GridFunction, g: GridFunction, w: WeightSpec) -> complex:
    """Discrete <f, g>_w with the same quadrature as :func:`lp_norm`."""
    grid = f.grid
    radial = w.M_u(grid.u) * grid.omega * (np.pi / grid.K)
    ring = np.sum(f.samples * np.conj(g.samples), axis=1)
    return complex(math.fsum((ring.real * radial).tolist()),
                   math.fsum((ring.imag * radial).tolist()))


def p_means(f: GridFunction, p: float) -> np.ndarray:
    """Integral p-means M_p(r_j, f) for every radius."""
    return np.mean(np.abs(f.samples) ** p, axis=1) ** (1 / p)


def p_mean(f: GridFunction, j: int, p: float) -> float:
    return float(np.mean(np.abs(f.samples[j]) ** p) ** (1 / p))


def partial_sum(f: TaylorCoeffs, N: int) -> TaylorCoeffs:
    if N < 0:
        raise ValueError("N must be >= 0")
    return TaylorCoeffs(f.coeffs[: N + 1].copy())


def eval_taylor(f: TaylorCoeffs, grid: PolarGrid) -> GridFunction:
    # same Horner path as the holo-poly registry entry
    return GridFunction(grid, np.polynomial.polynomial.polyval(grid.points(), f.coeffs))
