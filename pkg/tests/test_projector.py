import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergproj.funcspace import GridFunction, TaylorCoeffs, angular_modes, eval_taylor, inner, make_grid, sample
from bergproj.moments import moment_table
from bergproj.projector import (
    ProjectionError,
    default_degree,
    grid_moments,
    identity_residual,
    multiplier_apply,
    multiplier_seq,
    project,
    project_via_identity,
)
from bergproj.weights import lambda_alpha, parse_weight

MU = parse_weight("alpha=0;M=poly-r2:2,-1")


def small_grid(w, R=48, K=128):
    return make_grid(w.alpha, R, K)


def test_closed_form_multiplier():
    ms = multiplier_seq(MU, 500)
    n = np.arange(501)
    assert np.max(np.abs(ms.t / ((n + 2) / (n + 3)) - 1)) <= 1e-12
    assert ms.t[0] == pytest.approx(2 / 3, rel=1e-15)


def test_multiplier_sandwich(registry_weight):
    lo, hi = registry_weight.validation_bounds()
    t = multiplier_seq(registry_weight, 400).t
    assert np.all(t >= 1 / hi * (1 - 1e-13)) and np.all(t <= 1 / lo * (1 + 1e-13))


def test_multiplier_approaches_limit(registry_weight):
    t = multiplier_seq(registry_weight, 256).t
    limit = 1 / float(registry_weight.M_u(1.0))
    if registry_weight.is_lambda:
        assert np.allclose(t, 1, rtol=0, atol=1e-14)
    else:
        assert abs(t[256] - limit) < abs(t[64] - limit)


def test_multiplier_apply_examples():
    lam = multiplier_seq(lambda_alpha(0.7), 5)
    f = TaylorCoeffs([1, -2j, 3, 0.5])
    assert np.allclose(multiplier_apply(lam, f).coeffs, f.coeffs, rtol=1e-14, atol=0)
    out = multiplier_apply(multiplier_seq(MU, 3), TaylorCoeffs([1, 1]))
    assert np.allclose(out.coeffs, [2 / 3, 3 / 4], rtol=1e-14, atol=0)
    assert np.all(multiplier_apply(multiplier_seq(MU, 3), TaylorCoeffs([0])).coeffs == 0)
    with pytest.raises(ProjectionError):
        multiplier_apply(multiplier_seq(MU, 3), TaylorCoeffs(np.ones(6)))


def test_bv_partial_sums_telescope():
    ms = multiplier_seq(MU, 100)
    # t_n increasing, so sum |dt| = t_N - t_0
    assert ms.bv_partial_sums()[-1] == pytest.approx(ms.t[0] + (ms.t[-1] - ms.t[0]), abs=1e-14)
    n = np.arange(1, 101)
    assert np.allclose(ms.scaled_differences, n**2 / ((n + 2) * (n + 3)), rtol=1e-10, atol=0)


def test_grid_moments_match_table(registry_weight):
    g = small_grid(registry_weight)
    gm = grid_moments(registry_weight, g, 40)
    tab = moment_table(registry_weight, 40).I
    tol = 5e-14 if registry_weight.poly_degree is not None else 1e-12
    assert np.allclose(gm, tab, rtol=tol, atol=0)


def test_reproduces_polynomial(registry_weight):
    g = small_grid(registry_weight)
    c = project(sample("holo-poly:3,0,2", g), registry_weight, 10).coeffs
    assert np.max(np.abs(c - np.r_[3, 0, 2, np.zeros(8)])) <= 1e-12


def test_annihilates_conjugates(registry_weight):
    g = small_grid(registry_weight)
    for fn in ("mono:0,-1", "mono:0,-3", "mono:2,-1"):
        assert np.max(np.abs(project(sample(fn, g), registry_weight, 20).coeffs)) <= 1e-14


def test_radial_example():
    g = small_grid(lambda_alpha(0))
    c = project(sample("mono:1,0", g), lambda_alpha(0), 6).coeffs
    assert c[0] == pytest.approx(0.5, rel=1e-14) and np.max(np.abs(c[1:])) <= 1e-15


def test_worked_identity_value():
    g = make_grid(0.0)
    f = sample("mono:1,0", g)
    direct, via = project(f, MU, 3).coeffs, project_via_identity(f, MU, 3).coeffs
    assert direct[0] == pytest.approx(4 / 9, abs=1e-12) and via[0] == pytest.approx(4 / 9, abs=1e-12)
    assert np.max(np.abs(direct - via)) <= 1e-12


def test_identity_lambda_is_exact():
    w = lambda_alpha(0.5)
    assert identity_residual(sample("sing:0.4", small_grid(w)), w, 30) <= 1e-15


def test_identity_residual_matches_reference():
    w = parse_weight("alpha=0.5;M=exp-r2:1")
    f = sample("sing:0.4", make_grid(w.alpha))
    assert identity_residual(f, w, 64) <= 1e-8


def test_negative_modes_never_read(registry_weight):
    g = small_grid(registry_weight)
    f = angular_modes(sample("sing:0.4", g))
    N = 20
    poisoned = f.modes.copy()
    poisoned[:, N + 1:] = np.nan
    c = project(GridFunction(g, f.samples, poisoned), registry_weight, N).coeffs
    assert np.all(np.isfinite(c))
    assert np.array_equal(c, project(f, registry_weight, N).coeffs)


def test_idempotent(registry_weight):
    g = small_grid(registry_weight)
    c1 = project(sample("logsing", g), registry_weight, 30)
    c2 = project(eval_taylor(c1, g), registry_weight, 30)
    assert np.max(np.abs(c2.coeffs - c1.coeffs)) <= 1e-11


def test_degree_checks():
    g = make_grid(0.0, 16, 16)
    f = sample("logsing", g)
    assert default_degree(f) == 7
    with pytest.raises(ProjectionError):
        project(f, lambda_alpha(0), 8)
    with pytest.raises(ProjectionError):
        project(sample("logsing", make_grid(0.5, 16, 16)), lambda_alpha(0), 4)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["alpha=0;M=poly-r2:2,-1", "alpha=0.5;M=exp-r2:1"]))
def test_self_adjoint(seed, spec):
    w = parse_weight(spec)
    grid = make_grid(w.alpha, 16, 16)
    rng = np.random.default_rng(seed)
    f, g = (GridFunction(grid, rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
            for _ in range(2))
    N = default_degree(f)
    Bf = eval_taylor(project(f, w, N), grid)
    Bg = eval_taylor(project(g, w, N), grid)
    lhs, rhs = inner(Bf, g, w), inner(f, Bg, w)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))
