"""Radial moments and Bergman coefficients.

    I_n(w) = int_0^1 r^(2n+1) M(r) (1 - r^2)^alpha dr
           = 1/2 int_0^1 u^n (1 - u)^alpha M(sqrt u) du

The Jacobi factor is always carried by a Gauss-Jacobi rule on (0, 1); it is
never sampled, which keeps -1 < alpha < 0 as accurate as alpha >= 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal
from scipy.special import bernoulli

from ._io import dumps
from .weights import WeightSpec, parse_weight

__all__ = [
    "QuadratureError",
    "gauss_jacobi_rule",
    "quad_order",
    "qdot",
    "moment",
    "moments_at",
    "moment_closed_lambda_alpha",
    "log_gamma_ratio",
    "bergman_coeff",
    "MomentTable",
    "moment_table",
]

ERR_ORDER_BUMP = 8


class QuadratureError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Gauss-Jacobi rule for (1 - u)^alpha du on (0, 1)
# --------------------------------------------------------------------------


def _jacobi_matrix(order: int, a: float, b: float = 0.0):
    """Recurrence coefficients of the orthonormal Jacobi(a, b) family on (-1, 1).

    Returns diag[0:order], off[0:order+1] with off[0] = 0 and off[k] the
    coupling between degrees k-1 and k; off[order] is needed to evaluate
    the degree-``order`` polynomial itself.
    """
    k = np.arange(order, dtype=float)
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2))
    diag[0] = (b - a) / (a + b + 2)

    k = np.arange(1, order + 1, dtype=float)
    s = 2 * k + a + b
    off = np.sqrt(4 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1)))
    return diag, np.concatenate(([0.0], off))


def _orthonormal_eval(x, diag, off, mu0, upto):
    """Values p_0..p_{upto} (and derivatives) of the orthonormal family at x.

    Returns (sum_{k<upto} p_k^2, p_upto, p_upto').
    """
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mu0))
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    christoffel = np.full_like(x, 1.0 / mu0)
    for k in range(upto):
        if k:
            christoffel += p * p
        p_next = ((x - diag[k]) * p - off[k] * p_prev) / off[k + 1]
        dp_next = (p + (x - diag[k]) * dp - off[k] * dp_prev) / off[k + 1]
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return christoffel, p, dp


@lru_cache(maxsize=128)
def _rule(order: int, alpha: float):
    a, b = float(alpha), 0.0
    mu0 = 2.0 ** (a + 1) / (a + 1)  # int (1 - x)^a dx over (-1, 1)
    diag, off = _jacobi_matrix(order, a, b)
    if order == 1:
        x = diag.copy()
    else:
        try:
            x = eigvalsh_tridiagonal(diag, off[1:order], lapack_driver="stemr")
        except LinAlgError as exc:
            raise QuadratureError(
                f"tridiagonal eigensolver failed (order={order}, alpha={alpha})"
            ) from exc
        x = np.sort(x)

    # one Newton step on p_order, kept only where it is a genuine polish
    _, p, dp = _orthonormal_eval(x, diag, off, mu0, order)
    step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
    x = np.where(np.abs(step) < 1e-10, x - step, x)

    christoffel, _, _ = _orthonormal_eval(x, diag, off, mu0, order)
    wx = 1.0 / christoffel
    if not (np.all(np.isfinite(x)) and np.all(wx > 0) and np.all(np.abs(x) < 1)):
        raise QuadratureError(f"degenerate Gauss-Jacobi rule (order={order}, alpha={alpha})")

    u = 0.5 * (1.0 + x)
    w = wx / 2.0 ** (a + 1)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def gauss_jacobi_rule(order: int, alpha: float):
    """Nodes and weights of the ``order``-point rule for (1 - u)^alpha du on (0, 1).

    Exact for polynomials of degree <= 2*order - 1.  Built from the
    eigenvalues of the Jacobi matrix; weights are the Christoffel numbers
    1 / sum_k p_k(x_i)^2, which stay relatively accurate near u = 1.
    """
    if int(order) != order or order < 1:
        raise QuadratureError(f"order must be a positive integer, got {order}")
    if not alpha > -1:
        raise QuadratureError(f"alpha must be > -1, got {alpha}")
    u, w = _rule(int(order), float(alpha))
    return u.copy(), w.copy()


# --------------------------------------------------------------------------
# compensated dot products
# --------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_product(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def qdot(values, weights, precision: str = "double"):
    """Row-wise sum(values * weights) with compensated summation.

    ``values`` may be 1-D or 2-D (rows are independent integrals).  Terms
    are accumulated in a fixed node order, so results do not depend on how
    rows are batched.  "double" compensates the summation (Neumaier);
    "extended" also carries the rounding error of every product (Dot2), so
    the result is as accurate as a dot product in twice the working
    precision.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    weights = np.asarray(weights, dtype=float)
    if precision not in ("double", "extended"):
        raise ValueError(f"unknown precision mode {precision!r}")
    s = np.zeros(values.shape[0])
    c = np.zeros(values.shape[0])
    for j in range(values.shape[1]):
        if precision == "double":
            s, e = _two_sum(s, values[:, j] * weights[j])
            c += e
        else:
            p, pe = _two_product(values[:, j], weights[j])
            s, e = _two_sum(s, p)
            c += e + pe
    return s + c


# --------------------------------------------------------------------------
# moments
# --------------------------------------------------------------------------


def quad_order(w: WeightSpec, n: int, extra_degree: int = 0) -> int:
    """Default rule order for the moment of index n.

    Exact for polynomial M (including the ``extra_degree`` of any polynomial
    factor riding along), generous otherwise.
    """
    d = w.poly_degree
    if d is not None:
        return math.ceil((n + d + extra_degree + 1) / 2) + 2
    return max(64, math.ceil(n / 2) + 16 + math.ceil(extra_degree / 2))


def _powers(u, ns):
    return np.power(u[None, :], np.asarray(ns, dtype=float)[:, None])


def _moments_with_rule(w: WeightSpec, ns, order: int, precision: str):
    u, om = _rule(order, float(w.alpha))
    out = np.empty(len(ns))
    for lo in range(0, len(ns), 512):
        chunk = ns[lo:lo + 512]
        out[lo:lo + len(chunk)] = 0.5 * qdot(_powers(u, chunk) * w.M_u(u), om, precision)
    return out


def moments_at(w: WeightSpec, ns, order: int | None = None, precision: str = "double"):
    """I_n for each n in ``ns`` from one shared rule (default policy for max(ns))."""
    ns = np.asarray(ns, dtype=int)
    q = order or quad_order(w, int(ns.max()))
    return _moments_with_rule(w, ns, q, precision)


def moment(w: WeightSpec, n: int, order: int | None = None, precision: str = "double"):
    """Return (I_n, err) with err = |I_n(Q) - I_n(Q + 8)|."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q = order or quad_order(w, n)
    a = _moments_with_rule(w, [n], q, precision)[0]
    b = _moments_with_rule(w, [n], q + ERR_ORDER_BUMP, precision)[0]
    return float(a), float(abs(a - b))


_ASYMPTOTIC_FROM = 20.0
_BERN_TERMS = 14


def _bernoulli_poly_coeffs(kmax: int):
    """Coefficients (ascending in s) of B_k(s) - B_k for k = 2..kmax."""
    B = bernoulli(kmax)
    out = {}
    for k in range(2, kmax + 1):
        c = np.array([math.comb(k, j) * B[k - j] for j in range(k + 1)])  # c[j] s^j
        c[0] = 0.0
        out[k] = c
    return out


_BPOLY = _bernoulli_poly_coeffs(_BERN_TERMS)


def log_gamma_ratio(x, s: float):
    """ln Gamma(x + s) - ln Gamma(x) for x > 0, s >= 0, to a few ulps of the result.

    Subtracting two log-gammas loses about log10(x ln x) digits; here the
    integer part of s is peeled off as a product, x is shifted past 20 by
    the recurrence, and the remaining fractional shift uses the asymptotic
    series  f ln X + sum_k (-1)^k (B_k(f) - B_k) / (k (k-1) X^(k-1)).
    """
    x = np.asarray(x, dtype=float)
    if s < 0 or np.any(x <= 0):
        raise ValueError("need x > 0 and s >= 0")
    s_int = math.floor(s)
    f = s - s_int
    acc = np.zeros_like(x)
    for j in range(s_int):
        acc += np.log(x + f + j)
    if f == 0.0:
        return _out(acc)
    m = np.maximum(0, np.ceil(_ASYMPTOTIC_FROM - x)).astype(int)
    for j in range(int(m.max(initial=0))):
        live = j < m
        acc -= np.where(live, np.log1p(f / np.where(live, x + j, 1.0)), 0.0)
    X = x + m
    series = f * np.log(X)
    for k in range(_BERN_TERMS, 1, -1):
        bk = np.polynomial.polynomial.polyval(f, _BPOLY[k])
        series += (-1) ** k * bk / (k * (k - 1) * X ** (k - 1))
    return _out(acc + series)


def moment_closed_lambda_alpha(n, alpha: float):
    """1/2 B(n+1, alpha+1) = 1/2 Gamma(alpha+1) Gamma(n+1) / Gamma(n+alpha+2)."""
    n = np.asarray(n, dtype=float)
    return _out(0.5 * math.gamma(alpha + 1) * np.exp(-log_gamma_ratio(n + 1, alpha + 1)))


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def bergman_coeff(w: WeightSpec, n: int, **kw) -> float:
    """1 / (2 pi I_n): a_n for the Jacobi weight, b_n otherwise."""
    return 1.0 / (2 * math.pi * moment(w, n, **kw)[0])


@dataclass
class MomentTable:
    weight: WeightSpec
    n_max: int
    I: np.ndarray
    err: np.ndarray
    orders: np.ndarray = field(repr=False)

    def __getitem__(self, n):
        return self.I[n]

    def bergman(self):
        return 1.0 / (2 * math.pi * self.I)

    def to_dict(self) -> dict:
        entries = [[n, float(i), float(e)] for n, (i, e) in enumerate(zip(self.I, self.err))]
        return {"weight": self.weight.spec_string(), "n_max": self.n_max, "entries": entries}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MomentTable":
        doc = json.loads(text)
        ent = np.array(doc["entries"], dtype=float).reshape(-1, 3)
        return cls(
            weight=parse_weight(doc["weight"]),
            n_max=int(doc["n_max"]),
            I=ent[:, 1],
            err=ent[:, 2],
            orders=np.zeros(len(ent), dtype=int),
        )


def moment_table(
    w: WeightSpec, n_max: int, order: int | None = None, precision: str = "double"
) -> MomentTable:
    """Moments I_0..I_{n_max}, all from one shared rule.

    The shared order is the default policy for n_max, so every smaller n gets
    at least the accuracy its own policy would give.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    q = order or quad_order(w, n_max)
    ns = np.arange(n_max + 1)
    I = _moments_with_rule(w, ns, q, precision)
    I2 = _moments_with_rule(w, ns, q + ERR_ORDER_BUMP, precision)
    return MomentTable(w, n_max, I, np.abs(I - I2), np.full(n_max + 1, q))
