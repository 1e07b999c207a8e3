"""Bounded-variation analysis of t_n = b_n / a_n and the boundedness experiments.

With J_n = I_n(lambda_alpha), K_n = I_n(mu):

    t_n - t_{n-1} = B(n) / A(n),   A(n) = K_n K_{n-1},
    B(n) = C1 C2 / ((2n+2) 2n) - C3 C4 / (2n (2n+1)),

where, after two integrations by parts (no boundary terms because M(1) = 1),

    C1 = int r^(2n+2) [(1-M)(1-r^2)^alpha]'       C2 = int r^(2n) [M (1-r^2)^(alpha+1)]'
    C3 = int r^(2n+1) [(1-M)(1-r^2)^(alpha+1)]''  C4 = K_n.

Each bracket is expanded so that it reads (1-r^2)^alpha * (smooth), with
g = (1-M)/(1-r^2) absorbing the would-be (1-r^2)^(alpha-1) factor.  The
direct difference t_n - t_{n-1} loses all digits once it drops below the
rounding level of t_n ~ 1; the C1..C4 route does not, so it is used for
large n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funcspace import (
    DEFAULT_K,
    DEFAULT_R,
    eval_taylor,
    lp_norm,
    make_grid,
    parse_fn,
    partial_sum,
    sample,
    taylor_coeffs_of,
)
from .moments import _rule, moments_at, qdot, quad_order
from .projector import default_degree, multiplier_seq, project
from .weights import WeightSpec, lambda_alpha

__all__ = [
    "AnalysisError",
    "CrossValidationError",
    "LemmaQuantities",
    "BVReport",
    "lemma_quantities",
    "lemma_table",
    "lemma_limits",
    "limit_convergence",
    "richardson",
    "bv_report",
    "default_bv_order",
    "opnorm_experiment",
    "sn_experiment",
]

CROSSOVER = 100
OVERLAP = (50, 100)
CROSS_TOL = 1e-6


class AnalysisError(RuntimeError):
    pass


class CrossValidationError(AnalysisError):
    """The direct and integration-by-parts differences disagree."""


@dataclass(frozen=True)
class LemmaQuantities:
    n: int
    A: float
    C1: float
    C2: float
    C3: float
    C4: float
    delta_direct: float
    delta_ibp: float

    @property
    def B1(self) -> float:
        return self.C1 * self.C2 / ((2 * self.n + 2) * 2 * self.n)

    @property
    def B2(self) -> float:
        return self.C3 * self.C4 / (2 * self.n * (2 * self.n + 1))

    @property
    def ratio12(self) -> float:
        return self.C1 * self.C2 / self.A

    @property
    def ratio34(self) -> float:
        return self.C3 * self.C4 / self.A


def _lemma_order(mu: WeightSpec, n_top: int) -> int:
    return quad_order(mu, n_top, extra_degree=2)


def lemma_table(mu: WeightSpec, ns, order: int | None = None,
                precision: str = "double") -> dict[str, np.ndarray]:
    """C1..C4, A and delta_ibp for every n in ``ns`` (all n >= 1), one shared rule."""
    ns = np.asarray(ns, dtype=int)
    if np.any(ns < 1):
        raise AnalysisError("the lemma quantities need n >= 1")
    a = mu.alpha
    q = order or _lemma_order(mu, int(ns.max()))
    u, om = _rule(q, float(a))

    M, m1, m2, g = mu.M_u(u), mu.m1_u(u), mu.m2_u(u), mu.g_u(u)
    h = (1 - u) * g  # 1 - M without cancellation
    f1 = u * (-m1 - 2 * a * g)
    f2 = m1 * (1 - u) - 2 * (a + 1) * M
    f3 = -m2 * (1 - u) - 2 * (a + 1) * (-2 * u * m1 + h) + 4 * a * (a + 1) * u * g

    out = {k: np.empty(len(ns)) for k in ("C1", "C2", "C3")}
    for lo in range(0, len(ns), 256):
        chunk = ns[lo:lo + 256]
        P = np.power(u[None, :], chunk.astype(float)[:, None])
        sl = slice(lo, lo + len(chunk))
        out["C1"][sl] = 0.5 * qdot(P * f1, om, precision)
        out["C2"][sl] = 0.5 * qdot(P * f2, om, precision)
        out["C3"][sl] = 0.5 * qdot(P * f3, om, precision)

    K = moments_at(mu, np.concatenate((ns, ns - 1)), order=q, precision=precision)
    Kn, Knm1 = K[: len(ns)], K[len(ns):]
    n = ns.astype(float)
    A = Kn * Knm1
    out["C4"] = Kn
    out["A"] = A
    out["n"] = ns
    out["delta_ibp"] = (out["C1"] * out["C2"] / ((2 * n + 2) * 2 * n)
                        - out["C3"] * Kn / (2 * n * (2 * n + 1))) / A
    return out


def _t_values(mu: WeightSpec, ns, order: int | None = None, precision: str = "double"):
    lam = lambda_alpha(mu.alpha)
    ns = np.asarray(ns, dtype=int)
    top = int(ns.max())
    q = order or max(quad_order(mu, top), quad_order(lam, top))
    return (moments_at(lam, ns, order=q, precision=precision)
            / moments_at(mu, ns, order=q, precision=precision))


def lemma_quantities(mu: WeightSpec, n: int, order: int | None = None) -> LemmaQuantities:
    if n < 1:
        raise AnalysisError("the lemma quantities need n >= 1")
    tab = lemma_table(mu, [n], order=order)
    t = _t_values(mu, [n - 1, n], order=order)
    return LemmaQuantities(
        n=n,
        A=float(tab["A"][0]),
        C1=float(tab["C1"][0]),
        C2=float(tab["C2"][0]),
        C3=float(tab["C3"][0]),
        C4=float(tab["C4"][0]),
        delta_direct=float(t[1] - t[0]),
        delta_ibp=float(tab["delta_ibp"][0]),
    )


def lemma_limits(mu: WeightSpec, alpha: float | None = None) -> tuple[float, float, float]:
    """Predicted limits (L12, L34, delta_inf) of C1C2/A, C3C4/A and n^2 dt_n."""
    a = mu.alpha if alpha is None else alpha
    Mp1 = float(mu.m1_u(1.0))  # M'(1) = 1 * m1(1)
    M1 = float(mu.M_u(1.0))
    L12 = 2 * (a + 1) ** 2 * Mp1
    L34 = 2 * (a + 2) * (a + 1) * Mp1 - 2 * (1 + a) * (1 - M1)
    return L12, L34, (L12 - L34) / 4


def richardson(x_n: float, x_half: float) -> float:
    """One dyadic Richardson step for an O(1/n) approach: 2 x(n) - x(n/2)."""
    return 2 * x_n - x_half


def limit_convergence(mu: WeightSpec, alpha: float | None, ns, order: int | None = None,
                      precision: str = "double"):
    """Rows (n, t_n, n^2 delta_ibp, C1C2/A, C3C4/A)."""
    ns = np.asarray(sorted(ns), dtype=int)
    tab = lemma_table(mu, ns, order=order, precision=precision)
    t = _t_values(mu, ns, order=order, precision=precision)
    n = ns.astype(float)
    return [
        {
            "n": int(k),
            "t": float(tk),
            "scaled_delta": float(nk**2 * d),
            "ratio12": float(c1 * c2 / A),
            "ratio34": float(c3 * c4 / A),
        }
        for k, nk, tk, d, c1, c2, c3, c4, A in zip(
            ns, n, t, tab["delta_ibp"], tab["C1"], tab["C2"], tab["C3"], tab["C4"], tab["A"]
        )
    ]


@dataclass
class BVReport:
    weight: WeightSpec
    n_max: int
    sup_scaled: float
    bv_partial: float
    limit_gap: float
    predicted: tuple[float, float, float]
    t: np.ndarray = field(repr=False)
    deltas: np.ndarray = field(repr=False)
    overlap_discrepancy: float = 0.0

    @property
    def scaled(self) -> np.ndarray:
        n = np.arange(1, self.n_max + 1)
        return n**2 * np.abs(self.deltas)

    def tail_sup(self, n_from: int) -> float:
        return float(self.scaled[n_from - 1:].max())

    def summary(self) -> dict:
        L12, L34, dinf = self.predicted
        return {
            "weight": self.weight.spec_string(),
            "alpha": self.weight.alpha,
            "n_max": self.n_max,
            "predicted": {"L12": L12, "L34": L34, "delta_inf": dinf},
            "observed": {
                "sup_scaled": self.sup_scaled,
                "bv_partial": self.bv_partial,
                "limit_gap": self.limit_gap,
                "scaled_delta_at_n_max": float(self.n_max**2 * self.deltas[-1]),
                "overlap_discrepancy": self.overlap_discrepancy,
            },
        }


def default_bv_order(mu: WeightSpec, n_max: int) -> int:
    """Shared rule order used by :func:`bv_report` for both difference routes."""
    return max(_lemma_order(mu, n_max), quad_order(lambda_alpha(mu.alpha), n_max))


def bv_report(mu: WeightSpec, alpha: float | None = None, n_max: int = 2000,
              order: int | None = None, crossover: int = CROSSOVER,
              overlap: tuple[int, int] = OVERLAP, precision: str = "double") -> BVReport:
    """Bounded-variation summary of t_n up to n_max.

    Differences come from the direct route for n <= crossover and from the
    integration-by-parts route beyond; both routes are compared on the
    overlap window and a disagreement raises AnalysisError.
    """
    if n_max < 16:
        raise AnalysisError("n_max must be >= 16")
    q = order or default_bv_order(mu, n_max)
    ms = multiplier_seq(mu, n_max, order=q, precision=precision)
    t = np.asarray(ms.t)
    direct = np.diff(t)
    ns = np.arange(1, n_max + 1)
    ibp = lemma_table(mu, ns, order=q, precision=precision)["delta_ibp"]

    lo, hi = overlap
    hi = min(hi, n_max)
    win = slice(lo - 1, hi)
    scale = np.maximum(np.abs(direct[win]), 1.0 / ns[win].astype(float) ** 2)
    gap = np.abs(direct[win] - ibp[win])
    discrepancy = float(np.max(gap / scale))
    if discrepancy > CROSS_TOL:
        raise CrossValidationError(
            f"direct and integration-by-parts differences disagree on [{lo},{hi}] "
            f"(relative {discrepancy:.3g}); quadrature misconfigured?"
        )

    deltas = np.where(ns <= crossover, direct, ibp)
    scaled = ns.astype(float) ** 2 * np.abs(deltas)
    limit = 1.0 / float(mu.M_u(1.0))
    return BVReport(
        weight=mu,
        n_max=n_max,
        sup_scaled=float(scaled.max()),
        bv_partial=float(abs(t[0]) + math.fsum(np.abs(deltas))),
        limit_gap=float(abs(t[-1] - limit)),
        predicted=lemma_limits(mu, alpha),
        t=t,
        deltas=deltas,
        overlap_discrepancy=discrepancy,
    )


# --------------------------------------------------------------------------
# empirical boundedness experiments
# --------------------------------------------------------------------------


def _sing_guard_opnorm(spec: str, p: float, alpha: float):
    tag, par = parse_fn(spec)
    if tag == "sing" and p * par[0] > 2 + alpha - 0.1:
        raise AnalysisError(
            f"{spec} is too singular for L^{p} with alpha={alpha} (need p*s <= 2+alpha-0.1)"
        )


def opnorm_experiment(mu: WeightSpec, p: float, battery, N: int | None = None,
                      R: int = DEFAULT_R, K: int = DEFAULT_K) -> dict:
    """||B_mu f||_p / ||f||_p for each battery member on one polar grid."""
    if not battery:
        raise AnalysisError("empty battery")
    for spec in battery:
        _sing_guard_opnorm(spec, p, mu.alpha)
    grid = make_grid(mu.alpha, R, K)
    rows = []
    for spec in battery:
        f = sample(spec, grid)
        deg = default_degree(f) if N is None else N
        Pf = eval_taylor(project(f, mu, deg), grid)
        num, den = lp_norm(Pf, p, mu), lp_norm(f, p, mu)
        if not (math.isfinite(num) and math.isfinite(den)):
            raise AnalysisError(f"non-finite norm for {spec}")
        rows.append({"fn": spec, "norm_f": den, "norm_Pf": num, "ratio": num / den})
    return {
        "weight": mu.spec_string(),
        "p": p,
        "R": R,
        "K": K,
        "rows": rows,
        "max_ratio": max(r["ratio"] for r in rows),
    }


def sn_experiment(w: WeightSpec, p: float, fn: str, N_max: int,
                  R: int = DEFAULT_R, K: int = DEFAULT_K) -> list[dict]:
    """Rows (N, ||S_N f|| / ||f||, ||S_N f - f||) for N = 1, 2, 4, ..., N_max."""
    tag, par = parse_fn(fn)
    if tag not in ("holo-poly", "sing", "logsing"):
        raise AnalysisError(f"{fn} has no registered Taylor sequence")
    if tag == "sing" and not par[0] < (2 + w.alpha) / p:
        raise AnalysisError(f"{fn} is not in A^{p} for alpha={w.alpha}")
    grid = make_grid(w.alpha, R, K)
    f = sample(fn, grid)
    norm_f = lp_norm(f, p, w)
    full = taylor_coeffs_of(fn, N_max)
    rows = []
    N = 1
    while N <= N_max:
        SN = eval_taylor(partial_sum(full, N), grid)
        diff = type(f)(grid, SN.samples - f.samples)
        rows.append({
            "N": N,
            "ratio": lp_norm(SN, p, w) / norm_f,
            "error": lp_norm(diff, p, w),
        })
        N *= 2
    return rows
