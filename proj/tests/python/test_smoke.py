"""Smoke tests for the python bindings.

Every expectation here is computed independently in python (math module
closed forms), so these double as a tiny cross-language oracle for the
compiled core.
"""

import math

import pytest

import plate_spectral as ps


def test_grid_properties():
    g = ps.Grid(1, 64, 10.0)
    assert g.n == 1
    assert g.N == 64
    assert g.L == 10.0
    assert g.size == 64
    assert g.dx == pytest.approx(20.0 / 64, abs=0)
    assert g.coord(0, 0) == pytest.approx(-10.0)
    xi = g.xi_sq()
    assert xi[0] == 0.0
    assert xi[1] == pytest.approx((math.pi / 10.0) ** 2, rel=1e-14)


def test_grid_rejects_bad_arguments():
    with pytest.raises(ValueError):
        ps.Grid(3, 16, 1.0)
    with pytest.raises(ValueError):
        ps.Grid(1, 15, 1.0)
    with pytest.raises(ValueError):
        ps.Grid(1, 16, -1.0)


def test_multiplier_closed_form():
    # S(xi_sq=1, t=1) against the root formula evaluated right here
    a = 1.0 / (2.0 * 2.0)
    phi = math.sqrt(3.0 + 4.0) / (2.0 * 2.0)
    expect = math.exp(-a) * math.sin(phi) / phi
    assert ps.multiplier("S", 1.0, 1.0) == pytest.approx(expect, rel=1e-13)
    assert ps.symbol_decay(1.0) == pytest.approx(a, rel=1e-13)
    assert ps.symbol_oscillation(1.0) == pytest.approx(phi, rel=1e-13)
    with pytest.raises(ValueError):
        ps.multiplier("nonsense", 1.0, 1.0)


def test_identity_at_time_zero():
    g = ps.Grid(1, 64, 10.0)
    f = ps.gaussian(g, 1.0, 1.0)
    restored = ps.apply("P_ivp", g, f, 0.0)
    assert max(abs(x - y) for x, y in zip(f, restored)) < 1e-12
    state = ps.linear_solution(g, f, [0.0] * g.size, 0.0, convention="ivp")
    assert max(abs(x - y) for x, y in zip(f, state["u"])) < 1e-12


def test_norms_against_closed_forms():
    g = ps.Grid(1, 256, 20.0)
    f = ps.gaussian(g, 1.0, 1.0)
    # || e^{-x^2/2} ||_2 = pi^{1/4} on the line, and the tails are far below
    # double precision at L = 20
    assert ps.lp_norm(g, f, 2.0) == pytest.approx(math.pi ** 0.25, rel=1e-12)
    assert ps.sobolev_norm(g, f, 0.0) == pytest.approx(
        ps.lp_norm(g, f, 2.0), rel=1e-12
    )
    assert ps.bessel_norm(g, f, 0.0, 2.0) == ps.sobolev_norm(g, f, 0.0)
    assert ps.lp_norm(g, f, math.inf) == pytest.approx(1.0, rel=1e-12)


def test_gamma_lemma_spot_value():
    rep = ps.check_gamma_lemma(0.0, 1, [4.0])
    assert rep["pass"]
    assert rep["lhs"][0] / math.sqrt(math.pi) == pytest.approx(
        math.erf(1.0), abs=1e-12
    )


def test_fit_decay_recovers_synthetic_slope():
    ts = ps.log_spaced(1.0, 1000.0, 16)
    series = [(t, 3.0 * t ** -0.75) for t in ts]
    fit = ps.fit_decay(series, -0.75, 1.0, 1000.0)
    assert fit["pass"]
    assert fit["slope"] == pytest.approx(-0.75, abs=1e-10)


def test_theorem_predicates():
    assert ps.theorem_global_hs(n=2, s=1.0, lam=4.0, theta=1.0) == []
    violated = ps.theorem_global_hs(n=2, s=1.0, lam=2.0, theta=1.0)
    assert "lambda >= 3" in violated
    assert "0 <= theta <= 1" in ps.theorem_local(n=3, s=0.45, p=2.0, q=8.0,
                                                 sigma=0.39, lam=2.0, theta=-0.1)


def test_march_and_picard_smoke():
    g = ps.Grid(1, 64, 10.0)
    u0 = ps.gaussian(g, 0.1, 1.0)
    u1 = [0.0] * g.size
    sol = ps.march(g, u0, u1, lam=3.0, theta=1.0, delta=-1.0, dt=0.05, K=20)
    assert not sol["diverged"]
    assert len(sol["records"]["t"]) == 21
    assert all(math.isfinite(v) for v in sol["records"]["linf"])
    assert all(math.isfinite(v) for v in sol["u_final"])

    res = ps.picard(g, u0, u1, dt=0.05, K=20, max_iters=20, tol=1e-10)
    assert res["converged"]
    assert not res["non_contraction"]
    assert all(r < 1.0 for r in res["ratios"])


def test_decay_scan_matches_sup_norm_rate():
    g = ps.Grid(1, 1024, 100.0)
    f = ps.gaussian(g, 1.0, 1.0)
    series = []
    for t in ps.log_spaced(10.0, 100.0, 16):
        series.append((t, ps.lp_norm(g, ps.apply("dtS", g, f, t), math.inf)))
    fit = ps.fit_decay(series, -0.5, 10.0, 100.0, tol=0.15)
    assert fit["r_squared"] > 0.98
    assert abs(fit["slope"] + 0.5) < 0.15
