"""Weighted Bergman kernel as a truncated power series in zeta = z conj(w)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moments import moment_table
from .weights import WeightSpec

__all__ = [
    "KernelError",
    "KernelSeries",
    "kernel_constant",
    "majorant_constant",
    "truncation_degree",
    "kernel_series",
    "eval_kernel_series",
    "eval_kernel_closed",
]

TRUNCATION_CAP = 10**6


class KernelError(ValueError):
    pass


def kernel_constant(alpha: float) -> float:
    """c_alpha = (alpha + 1) / pi, i.e. a_0 = 1 / (2 pi I_0(lambda_alpha))."""
    return (alpha + 1) / math.pi


def majorant_constant(alpha: float) -> float:
    """C with a_n <= C (n+1)^(alpha+1) for the Jacobi weight.

    a_n = Gamma(n+alpha+2) / (pi Gamma(n+1) Gamma(alpha+1)).  For alpha <= 0
    Wendel's inequality Gamma(x+s)/Gamma(x) <= x^s (0 < s <= 1) gives
    C = 1 / (pi Gamma(alpha+1)); for alpha > 0 the ratio peaks at n = 0
    below (alpha+1) 2^alpha / pi.
    """
    if alpha <= 0:
        return 1.0 / (math.pi * math.gamma(alpha + 1))
    return (alpha + 1) * 2.0**alpha / math.pi


def truncation_degree(alpha: float, rho: float, tol: float, scale: float = 1.0) -> int:
    """Least N with sum_{n>N} scale * C (n+1)^(alpha+1) rho^n < tol.

    ``scale`` lets a general weight reuse the Jacobi majorant (pass 1/min M).
    Terms are summed until they fall below tol (1 - rho) / 2 past their
    peak; the remainder beyond that point is bounded geometrically.
    """
    if not 0 <= rho < 1:
        raise KernelError(f"rho must lie in [0, 1), got {rho}")
    if tol <= 0:
        raise KernelError("tol must be positive")
    if rho == 0:
        return 0
    C = scale * majorant_constant(alpha)
    log_rho = math.log(rho)
    peak = max(0, math.ceil(-(alpha + 1) / log_rho - 1))
    stop_at = tol * (1 - rho) / 2

    block = 4096
    start = 0
    chunks = []
    while True:
        n = np.arange(start, start + block, dtype=float)
        logs = math.log(C) + (alpha + 1) * np.log1p(n) + n * log_rho
        terms = np.exp(logs)
        chunks.append(terms)
        below = np.nonzero((n >= peak) & (terms < stop_at))[0]
        if below.size:
            last = start + int(below[0])
            break
        start += block
        if start > TRUNCATION_CAP:
            raise KernelError(f"truncation degree exceeds cap {TRUNCATION_CAP}")
    terms = np.concatenate(chunks)[: last + 1]
    # geometric remainder past `last`: ratio of consecutive terms <= rho (1 + 1/(last+1))^(alpha+1)
    q = rho * (1 + 1 / (last + 1)) ** max(alpha + 1, 0.0)
    remainder = terms[-1] * q / (1 - q) if q < 1 else math.inf
    # tails[N] = sum_{N < n <= last} terms[n] + remainder
    tails = np.concatenate((np.cumsum(terms[::-1])[::-1][1:], [0.0])) + remainder
    ok = np.nonzero(tails < tol)[0]
    if not ok.size:
        raise KernelError("could not certify the tail below tol")
    N = int(ok[0])
    if N > TRUNCATION_CAP:
        raise KernelError(f"truncation degree exceeds cap {TRUNCATION_CAP}")
    return N


@dataclass(frozen=True)
class KernelSeries:
    weight: WeightSpec
    coeffs: np.ndarray

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1


def kernel_series(w: WeightSpec, N: int) -> KernelSeries:
    """Bergman coefficients 0..N of ``w`` packed for evaluation."""
    table = moment_table(w, N)
    coeffs = table.bergman()
    coeffs.setflags(write=False)
    return KernelSeries(w, coeffs)


def eval_kernel_series(k: KernelSeries, z: complex, w: complex) -> complex:
    if abs(z) >= 1 or abs(w) >= 1:
        raise KernelError("z and w must lie in the open unit disc")
    zeta = complex(z) * complex(w).conjugate()
    acc = 0j
    for c in k.coeffs[::-1]:
        acc = acc * zeta + c
    return acc


def eval_kernel_closed(alpha: float, z: complex, w: complex) -> complex:
    """c_alpha / (1 - z conj(w))^(2 + alpha), principal branch."""
    if abs(z) * abs(w) >= 1:
        raise KernelError("|z||w| must be < 1")
    zeta = complex(z) * complex(w).conjugate()
    return kernel_constant(alpha) / (1 - zeta) ** (2 + alpha)
