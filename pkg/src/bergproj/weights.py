"""Radial weights mu(r) = M(r) (1 - r^2)^alpha on the unit disc.

M is drawn from a closed registry so that M', M'' and the quotient
g = (1 - M) / (1 - r^2) are available in closed form:

    one           M = 1
    poly-r2       M = sum_k c_k r^(2k),  sum_k c_k = 1
    exp-r2        M = exp(a (r^2 - 1))

Besides the r-parametrised evaluators, every form exposes the same
quantities as functions of u = r^2 (the ``*_u`` helpers).  The odd
derivative M'(r) is exposed as ``m1_u(u) = M'(r) / r`` so that every
quadrature integrand used downstream is a smooth function of u.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "WeightError",
    "WeightSpec",
    "parse_weight",
    "lambda_alpha",
    "eval_M",
    "eval_M_prime",
    "eval_M_second",
    "eval_g",
]

VALIDATION_POINTS = 1001
SUM_TOL = 1e-12

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SPEC_RE = re.compile(
    rf"^alpha=(?P<alpha>{_NUM});M=(?:(?P<one>one)"
    rf"|poly-r2:(?P<poly>{_NUM}(?:,{_NUM})*)"
    rf"|exp-r2:(?P<exp>{_NUM}))$"
)


class WeightError(ValueError):
    """Raised for malformed or inadmissible weight specifications."""


@dataclass(frozen=True)
class WeightSpec:
    alpha: float
    form: str  # "one" | "poly-r2" | "exp-r2"
    params: tuple[float, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha <= -1:
            raise WeightError(f"alpha must be > -1, got {self.alpha}")
        if self.form not in ("one", "poly-r2", "exp-r2"):
            raise WeightError(f"unknown M form {self.form!r}")
        if self.form == "poly-r2":
            if not self.params:
                raise WeightError("poly-r2 needs at least one coefficient")
            if abs(math.fsum(self.params) - 1.0) > SUM_TOL:
                raise WeightError(
                    f"M(1) = {math.fsum(self.params)!r} != 1 for poly-r2 coefficients"
                )
        elif self.form == "exp-r2":
            if len(self.params) != 1 or not math.isfinite(self.params[0]):
                raise WeightError("exp-r2 takes exactly one finite parameter")
        elif self.params:
            raise WeightError("M=one takes no parameters")
        if not self.label:
            object.__setattr__(self, "label", self.spec_string())
        grid = np.linspace(0.0, 1.0, VALIDATION_POINTS)
        values = self.M_u(grid * grid)
        if not np.all(values > 0):
            raise WeightError(f"M is not strictly positive on [0,1] for {self.label}")

    # -- derived facts -------------------------------------------------

    @property
    def is_lambda(self) -> bool:
        """True for the pure Jacobi weight (1 - r^2)^alpha."""
        return self.form == "one"

    @property
    def poly_degree(self) -> int | None:
        """Degree of M in u = r^2, or None if M is not polynomial."""
        if self.form == "one":
            return 0
        if self.form == "poly-r2":
            return len(self.params) - 1
        return None

    def spec_string(self) -> str:
        a = _fmt(self.alpha)
        if self.form == "one":
            return f"alpha={a};M=one"
        if self.form == "poly-r2":
            return f"alpha={a};M=poly-r2:" + ",".join(_fmt(c) for c in self.params)
        return f"alpha={a};M=exp-r2:{_fmt(self.params[0])}"

    def validation_bounds(self) -> tuple[float, float]:
        """(min M, max M) over the validation grid."""
        grid = np.linspace(0.0, 1.0, VALIDATION_POINTS)
        values = self.M_u(grid * grid)
        return float(values.min()), float(values.max())

    def comparison(self) -> "WeightSpec":
        """The Jacobi weight (1 - r^2)^alpha with the same exponent."""
        return lambda_alpha(self.alpha)

    # -- evaluators in u = r^2 ----------------------------------------

    def M_u(self, u):
        u = np.asarray(u, dtype=float)
        if self.form == "one":
            return np.ones_like(u)
        if self.form == "poly-r2":
            return np.polynomial.polynomial.polyval(u, self.params)
        a = self.params[0]
        return np.exp(a * (u - 1.0))

    def m1_u(self, u):
        """M'(r) / r as a function of u."""
        u = np.asarray(u, dtype=float)
        if self.form == "one":
            return np.zeros_like(u)
        if self.form == "poly-r2":
            c = self.params
            return np.polynomial.polynomial.polyval(
                u, [2 * k * c[k] for k in range(1, len(c))] or [0.0]
            )
        a = self.params[0]
        return 2 * a * np.exp(a * (u - 1.0))

    def m2_u(self, u):
        """M''(r) as a function of u."""
        u = np.asarray(u, dtype=float)
        if self.form == "one":
            return np.zeros_like(u)
        if self.form == "poly-r2":
            c = self.params
            return np.polynomial.polynomial.polyval(
                u, [2 * k * (2 * k - 1) * c[k] for k in range(1, len(c))] or [0.0]
            )
        a = self.params[0]
        return (2 * a + 4 * a * a * u) * np.exp(a * (u - 1.0))

    def g_u(self, u):
        """(1 - M) / (1 - u), with the removable singularity at u = 1 resolved."""
        u = np.asarray(u, dtype=float)
        if self.form == "one":
            return np.zeros_like(u)
        if self.form == "poly-r2":
            # 1 - sum c_k u^k = (1 - u) sum_k c_k (1 + u + ... + u^(k-1))
            c = self.params
            tail = [math.fsum(c[j + 1:]) for j in range(len(c) - 1)]
            return np.polynomial.polynomial.polyval(u, tail or [0.0])
        a = self.params[0]
        x = a * (u - 1.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(x == 0.0, 1.0, np.expm1(x) / np.where(x == 0.0, 1.0, x))
        return a * q


def _fmt(x: float) -> str:
    return repr(float(x)) if x != int(x) else str(int(x))


def lambda_alpha(alpha: float) -> WeightSpec:
    return WeightSpec(float(alpha), "one")


def parse_weight(spec: str) -> WeightSpec:
    """Parse ``alpha=<real>;M=<one | poly-r2:c0,c1,... | exp-r2:a>``.

    Whitespace is not allowed anywhere.  Coefficients of poly-r2 must sum to
    one within 1e-12; they are never rescaled.
    """
    m = _SPEC_RE.match(spec)
    if m is None:
        raise WeightError(f"malformed weight spec {spec!r}")
    alpha = float(m["alpha"])
    if m["one"]:
        return WeightSpec(alpha, "one", label=spec)
    if m["poly"]:
        coeffs = tuple(float(c) for c in m["poly"].split(","))
        return WeightSpec(alpha, "poly-r2", coeffs, label=spec)
    return WeightSpec(alpha, "exp-r2", (float(m["exp"]),), label=spec)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise WeightError("r must lie in [0, 1]")
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_M(w: WeightSpec, r):
    r = _check_r(r)
    return _out(w.M_u(r * r))


def eval_M_prime(w: WeightSpec, r):
    r = _check_r(r)
    return _out(r * w.m1_u(r * r))


def eval_M_second(w: WeightSpec, r):
    r = _check_r(r)
    return _out(w.m2_u(r * r))


def eval_g(w: WeightSpec, r):
    """g(r) = (1 - M(r)) / (1 - r^2); finite at r = 1."""
    r = _check_r(r)
    return _out(w.g_u(r * r))
