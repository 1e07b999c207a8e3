import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bergproj.funcspace import (
    FunctionSpecError,
    GridFunction,
    TaylorCoeffs,
    angular_modes,
    eval_taylor,
    lp_norm,
    make_grid,
    p_mean,
    p_means,
    parse_fn,
    partial_sum,
    sample,
    taylor_coeffs_of,
)
from bergproj.moments import moment_closed_lambda_alpha
from bergproj.weights import lambda_alpha, parse_weight

GRID = make_grid(0.0, 32, 64)


def test_grid_shape():
    g = make_grid(0.5, 16, 8)
    assert np.all((g.r > 0) & (g.r < 1)) and np.all(g.omega > 0)
    assert np.all(np.diff(g.r) > 0)
    assert g.points().shape == (16, 8)
    with pytest.raises(ValueError):
        make_grid(0.0, 16, 12)
    with pytest.raises(ValueError):
        make_grid(0.0, 16, 2)


@pytest.mark.parametrize("alpha", [-0.5, 0, 1.5])
def test_grid_exactness(alpha):
    g = make_grid(alpha, 24, 8)
    lam = lambda_alpha(alpha)
    for n in range(g.R):
        f = GridFunction(g, np.broadcast_to(g.u[:, None] ** n, (g.R, g.K)).astype(complex))
        disc = lp_norm(f, 2, lam) ** 2  # int |z|^{4n}: I_{2n}
        assert disc == pytest.approx(2 * math.pi * moment_closed_lambda_alpha(2 * n, alpha), rel=1e-12)


def test_sample_examples():
    z = GRID.points()
    assert np.array_equal(sample("holo-poly:0,1", GRID).samples, z)
    s = sample("mono:1,0", GRID).samples
    assert np.allclose(s, GRID.r[:, None] ** 2, rtol=1e-15, atol=0) and np.all(s.imag == 0)
    assert np.allclose(sample("mono:0,-1", GRID).samples, np.conj(z), rtol=1e-15, atol=0)


def test_parse_fn():
    assert parse_fn("holo-poly:3,0,2") == ("holo-poly", (3.0, 0.0, 2.0))
    assert parse_fn("mono:2,-1") == ("mono", (2, -1))
    assert parse_fn("sing:0.4") == ("sing", (0.4,))
    assert parse_fn("logsing") == ("logsing", ())
    for bad in ("poly:1", "mono:1", "sing:", "logsing:2"):
        with pytest.raises(FunctionSpecError):
            parse_fn(bad)


def test_modes_examples():
    f = angular_modes(sample("holo-poly:0,1", GRID))
    expected = np.zeros_like(f.modes)
    expected[:, 1] = GRID.r
    assert np.max(np.abs(f.modes - expected)) <= 1e-14
    f = angular_modes(sample("mono:1,0", GRID))
    expected = np.zeros_like(f.modes)
    expected[:, 0] = GRID.r**2
    assert np.max(np.abs(f.modes - expected)) <= 1e-14


def test_modes_geometric_aliasing():
    f = angular_modes(sample("sing:1", GRID))
    r = GRID.r
    bound = r ** (GRID.K // 2) / (1 - r)
    for m in range(GRID.K // 2):
        assert np.all(np.abs(f.modes[:, m] - r**m) <= bound + 1e-14)


def test_parseval_per_radius(registry_weight):
    f = angular_modes(sample("sing:0.4", GRID))
    lhs = np.mean(np.abs(f.samples) ** 2, axis=1)
    rhs = np.sum(np.abs(f.modes) ** 2, axis=1)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)


def test_norm_examples():
    lam = lambda_alpha(0)
    assert lp_norm(sample("holo-poly:1", GRID), 2, lam) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert lp_norm(sample("holo-poly:0,1", GRID), 2, lam) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)
    assert lp_norm(sample("holo-poly:0", GRID), 2, lam) == 0
    with pytest.raises(ValueError):
        lp_norm(sample("holo-poly:1", GRID), 1, lam)
    with pytest.raises(ValueError):
        lp_norm(sample("holo-poly:1", GRID), math.inf, lam)


def test_norm_through_modes(registry_weight):
    g = make_grid(registry_weight.alpha, 32, 64)
    f = angular_modes(sample("mono:2,1", g))
    via_modes = 2 * math.pi * np.sum(np.sum(np.abs(f.modes) ** 2, axis=1)
                                     * registry_weight.M_u(g.u) * g.omega * 0.5)
    assert lp_norm(f, 2, registry_weight) ** 2 == pytest.approx(via_modes, rel=1e-10)


def test_p_mean_examples():
    f = sample("holo-poly:0,1", GRID)
    for p in (1.5, 2, 4):
        assert np.allclose(p_means(f, p), GRID.r, rtol=1e-14, atol=0)
    assert p_mean(sample("holo-poly:-2.5", GRID), 3, 3) == pytest.approx(2.5, rel=1e-15)
    pm = p_means(sample("holo-poly:1,1", GRID), 2)
    assert np.allclose(pm, np.sqrt(1 + GRID.r**2), rtol=1e-14, atol=0)


@pytest.mark.parametrize("fn", ["holo-poly:1,-2,0.5,3", "sing:0.4", "sing:1.2", "logsing"])
@pytest.mark.parametrize("p", [1.5, 2, 3, 4])
def test_p_means_monotone(fn, p):
    pm = p_means(sample(fn, make_grid(0.0, 64, 256)), p)
    assert np.all(np.diff(pm) >= -1e-12 * pm[1:])


def test_partial_sum_examples():
    f = TaylorCoeffs([1, 1, 0.5, 1 / 6])
    assert np.array_equal(partial_sum(f, 2).coeffs, [1, 1, 0.5])
    assert np.array_equal(partial_sum(f, 0).coeffs, [1])
    assert np.array_equal(partial_sum(f, 10).coeffs, f.coeffs)


@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=20),
       st.integers(0, 25), st.integers(0, 25))
def test_partial_sum_composition(c, N, M):
    f = TaylorCoeffs(c)
    a = partial_sum(partial_sum(f, N), M).coeffs
    assert np.array_equal(a, partial_sum(f, min(N, M)).coeffs)


def test_eval_taylor_examples():
    assert np.array_equal(eval_taylor(TaylorCoeffs([0, 1]), GRID).samples,
                          sample("holo-poly:0,1", GRID).samples)
    assert np.all(eval_taylor(TaylorCoeffs([1]), GRID).samples == 1)


@given(st.lists(st.complex_numbers(max_magnitude=5), min_size=1, max_size=31))
def test_eval_taylor_round_trip(c):
    f = TaylorCoeffs(c)
    modes = angular_modes(eval_taylor(f, GRID)).modes
    rm = GRID.r[:, None] ** np.arange(len(c))[None, :]
    scale = max(1.0, float(np.max(np.abs(c))))
    assert np.max(np.abs(modes[:, : len(c)] - f.coeffs[None, :] * rm)) <= 1e-12 * scale * len(c)


def test_taylor_coeffs_of():
    assert np.allclose(taylor_coeffs_of("sing:1", 5).coeffs, 1)
    assert np.allclose(taylor_coeffs_of("sing:2", 4).coeffs, [1, 2, 3, 4, 5])
    assert np.allclose(taylor_coeffs_of("logsing", 3).coeffs, [0, 1, 0.5, 1 / 3])
    with pytest.raises(FunctionSpecError):
        taylor_coeffs_of("mono:1,0", 4)


def test_weighted_norm_uses_M():
    w = parse_weight("alpha=0;M=poly-r2:2,-1")
    # int (2 - r^2) dA = 2 pi (1 - 1/4) = 3 pi / 2
    assert lp_norm(sample("holo-poly:1", GRID), 2, w) ** 2 == pytest.approx(1.5 * math.pi, rel=1e-14)
