import math

import numpy as np
import pytest

from bergproj.acceptance import REGISTRY_WEIGHTS, opnorm_battery
from bergproj.analysis import (
    AnalysisError,
    CrossValidationError,
    bv_report,
    lemma_limits,
    lemma_quantities,
    lemma_table,
    limit_convergence,
    opnorm_experiment,
    richardson,
    sn_experiment,
)
from bergproj.projector import multiplier_seq
from bergproj.weights import lambda_alpha, parse_weight

MU = parse_weight("alpha=0;M=poly-r2:2,-1")


def test_lambda_lemma_vanishes():
    tab = lemma_table(lambda_alpha(0.5), [1, 10, 100])
    assert np.all(tab["C1"] == 0) and np.all(tab["C3"] == 0) and np.all(tab["delta_ibp"] == 0)


def test_lemma_closed_form_n10():
    q = lemma_quantities(MU, 10)
    assert q.delta_ibp == pytest.approx(1 / 156, rel=1e-12)
    assert abs(q.delta_direct - q.delta_ibp) <= 1e-10
    assert q.A > 0 and q.C4 > 0


def test_lemma_ibp_matches_closed_form_everywhere():
    n = np.arange(1, 3001)
    tab = lemma_table(MU, n)
    exact = 1 / ((n + 2) * (n + 3))
    assert np.max(np.abs(tab["delta_ibp"] / exact - 1)) <= 1e-12


@pytest.mark.parametrize("spec", REGISTRY_WEIGHTS)
def test_cross_method_agreement(spec):
    mu = parse_weight(spec)
    ns = np.arange(8, 101)
    tab = lemma_table(mu, ns)
    t = multiplier_seq(mu, 100).t
    direct = np.diff(t)[ns - 1]
    scale = np.maximum(np.abs(direct), 1.0 / ns**2)
    assert np.max(np.abs(direct - tab["delta_ibp"]) / scale) <= 1e-6


def test_limit_examples():
    assert lemma_limits(MU) == pytest.approx((-4, -8, 1))
    assert lemma_limits(lambda_alpha(2)) == (0, 0, 0)
    assert lemma_limits(parse_weight("alpha=1;M=exp-r2:1")) == pytest.approx((16, 24, -2), rel=1e-14)


def test_limit_convergence_closed_form():
    (row,) = limit_convergence(MU, None, [1000])
    assert row["t"] == pytest.approx(1002 / 1003, rel=1e-14)
    assert abs(row["scaled_delta"] - 1) <= 6e-3
    assert row["scaled_delta"] == pytest.approx(1000**2 / (1002 * 1003), rel=1e-10)


def test_limit_convergence_lambda():
    for row in limit_convergence(lambda_alpha(1), None, [10, 100, 1000]):
        assert row["t"] == pytest.approx(1, abs=1e-14)
        assert row["scaled_delta"] == 0 and row["ratio12"] == 0 and row["ratio34"] == 0


def test_richardson_exp_weight():
    mu = parse_weight("alpha=0.5;M=exp-r2:1")
    L12, L34, _ = lemma_limits(mu)
    rows = limit_convergence(mu, None, [1250, 2500, 5000])
    assert abs(richardson(rows[2]["ratio12"], rows[1]["ratio12"]) - L12) / abs(L12) <= 0.01
    assert abs(richardson(rows[2]["ratio34"], rows[1]["ratio34"]) - L34) / abs(L34) <= 0.01


@pytest.mark.parametrize("spec", ["alpha=0;M=poly-r2:2,-1", "alpha=1;M=exp-r2:1", "alpha=2;M=exp-r2:-0.7"])
def test_gaps_shrink_dyadically(spec):
    mu = parse_weight(spec)
    L12, L34, dinf = lemma_limits(mu)
    rows = limit_convergence(mu, None, [256, 512, 1024, 2048])
    limit = 1 / float(mu.M_u(1.0))
    for key, target in (("t", limit), ("scaled_delta", dinf), ("ratio12", L12), ("ratio34", L34)):
        gaps = [abs(r[key] - target) for r in rows]
        assert all(b < a for a, b in zip(gaps, gaps[1:])), key


def test_bv_closed_form():
    rep = bv_report(MU, n_max=2000)
    assert rep.sup_scaled <= 1.01
    N = rep.n_max
    # |t_0| + sum_{n=1}^{N} 1/((n+2)(n+3)) = 2/3 + 1/3 - 1/(N+3)
    assert rep.bv_partial == pytest.approx(1 - 1 / (N + 3), abs=1e-12)
    assert rep.bv_partial == pytest.approx(rep.t[0] + (rep.t[-1] - rep.t[0]), abs=1e-12)
    assert math.fsum(rep.deltas) == pytest.approx(rep.t[-1] - rep.t[0], abs=1e-12)


def test_bv_lambda():
    rep = bv_report(lambda_alpha(0.5), n_max=200)
    assert rep.sup_scaled == 0 and rep.bv_partial == pytest.approx(1, abs=1e-15)


def test_bv_exp_tail():
    rep = bv_report(parse_weight("alpha=1;M=exp-r2:1"), n_max=2000)
    assert math.isfinite(rep.sup_scaled)
    assert abs(rep.tail_sup(500) - 2) <= 0.2


@pytest.mark.parametrize("spec", REGISTRY_WEIGHTS)
def test_bv_bounded_and_increasing(spec):
    mu = parse_weight(spec)
    rep = bv_report(mu, n_max=2000)
    dinf = rep.predicted[2]
    assert rep.sup_scaled <= 2 * (abs(dinf) + 1)
    partial = abs(rep.t[0]) + np.cumsum(np.abs(rep.deltas))
    assert np.all(np.diff(partial) >= 0)
    n = np.arange(2, rep.n_max + 1)
    # slack for rounding of the running sum itself
    assert np.all(np.diff(partial) <= rep.sup_scaled / n**2 + 4e-16 * partial[1:])


def test_bv_cross_validation_trips():
    # a far too small shared rule makes the two routes disagree
    with pytest.raises(CrossValidationError):
        bv_report(parse_weight("alpha=0.5;M=exp-r2:1"), n_max=200, order=20)


def test_opnorm_examples():
    res = opnorm_experiment(MU, 3, ["holo-poly:1,-0.5,0.25", "mono:0,-1"], R=64, K=128)
    by_fn = {r["fn"]: r["ratio"] for r in res["rows"]}
    assert by_fn["holo-poly:1,-0.5,0.25"] == pytest.approx(1, abs=1e-12)
    assert by_fn["mono:0,-1"] <= 1e-13


def test_opnorm_guard():
    with pytest.raises(AnalysisError):
        opnorm_experiment(MU, 4, ["sing:0.5"], R=32, K=64)
    with pytest.raises(AnalysisError):
        opnorm_experiment(MU, 2, [], R=32, K=64)


def test_opnorm_battery_respects_guard():
    for p in (1.5, 2, 3, 4):
        for a in (-0.5, 0, 1):
            for spec in opnorm_battery(p, a):
                if spec.startswith("sing:"):
                    assert p * float(spec[5:]) <= 2 + a - 0.1


def test_sn_polynomial():
    rows = sn_experiment(lambda_alpha(0), 2, "holo-poly:1,2,3", 8, R=32, K=64)
    for r in rows:
        if r["N"] >= 2:
            assert r["ratio"] == pytest.approx(1, abs=1e-14) and r["error"] == 0


def test_sn_logsing_tail():
    rows = sn_experiment(lambda_alpha(0), 2, "logsing", 32, R=128, K=8192)
    err2 = rows[-1]["error"] ** 2
    n = np.arange(33, 10**6, dtype=float)
    assert err2 == pytest.approx(math.pi * math.fsum(1 / (n**2 * (n + 1))), rel=0.01)
    assert err2 <= math.pi / 2 * 32**-2


def test_sn_guards():
    with pytest.raises(AnalysisError):
        sn_experiment(lambda_alpha(0), 2, "mono:1,0", 8, R=16, K=32)
    with pytest.raises(AnalysisError):
        sn_experiment(lambda_alpha(0), 2, "sing:1", 8, R=16, K=32)


def test_sn_sing_grid_stable():
    lam = lambda_alpha(0)
    a = max(r["ratio"] for r in sn_experiment(lam, 1.5, "sing:0.4", 256))
    b = max(r["ratio"] for r in sn_experiment(lam, 1.5, "sing:0.4", 256, R=512, K=1024))
    assert math.isfinite(a) and abs(b / a - 1) <= 0.05
