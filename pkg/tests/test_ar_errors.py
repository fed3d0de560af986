import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from econo.ar_errors import expand_fisher, fit_ar_errors, inverted_ar_roots, sse_innovations
from econo.eqspec import parse_equation
from econo.ols import NumericalError, fit_ols
from econo.series import PeriodSpan

from conftest import make_dataset


def rel(a, b):
    return abs(a - b) / abs(b)


def test_ar2_fisher_model(data):
    fit = fit_ar_errors(parse_equation("PIB C ZCF ZIED AR(1) AR(2)"), data)
    assert fit.sample == PeriodSpan.parse("2010Q2 2023Q1")
    assert fit.converged and 0 < fit.iterations < 500
    assert fit.names == ["C", "ZCF", "ZIED", "AR(1)", "AR(2)"]
    assert fit.ar_coefficients == (fit["AR(1)"].estimate, fit["AR(2)"].estimate)
    assert rel(fit.adj_r2, 0.953148) < 1e-3
    assert rel(fit.log_likelihood, -478.1884) < 1e-3
    assert rel(fit.f_stat, 260.3833) < 1e-2
    roots = sorted(abs(z) for z in fit.inverted_roots)
    assert roots == pytest.approx([0.2229, 1.0165], abs=1e-3)


def test_ar1_break_model_footer(data):
    fit = fit_ar_errors(parse_equation("PIB C CAPITALFIJO IED D1 D2 D3 AR(1)"), data)
    assert fit.n == 60
    assert fit["AR(1)"].estimate < 1.0
    assert not fit.nonstationary_flag


def test_fisher_regression_without_ar(data):
    fit = fit_ar_errors(parse_equation("PIB C ZCF ZIED"), data)
    assert fit.n == 54
    for name, want in (("C", -6285.03), ("ZCF", 0.0819059), ("ZIED", 0.0120644)):
        assert rel(fit[name].estimate, want) < 1e-4
    assert rel(fit.dw, 0.156848) < 1e-4
    ols = fit_ols(parse_equation("PIB C ZCF ZIED"), data)
    assert np.array_equal(fit.params, ols.params)
    assert fit.ar_orders == ()


def _simulate(rng, n, rho, beta=(2.0, 1.5)):
    x = rng.normal(size=n + 50).cumsum() * 0.1 + rng.normal(size=n + 50)
    u = np.zeros(n + 50)
    e = rng.normal(size=n + 50)
    for t in range(2, n + 50):
        u[t] = sum(r * u[t - j - 1] for j, r in enumerate(rho)) + e[t]
    y = beta[0] + beta[1] * x + u
    return make_dataset({"Y": y[50:], "X": x[50:]})


def test_recovers_simulated_ar1():
    rng = np.random.default_rng(8)
    est = [fit_ar_errors(parse_equation("Y C X AR(1)"), _simulate(rng, 200, [0.6]))
           for _ in range(200)]
    assert np.mean([f["AR(1)"].estimate for f in est]) == pytest.approx(0.6, abs=0.02)
    assert np.mean([f["X"].estimate for f in est]) == pytest.approx(1.5, abs=0.02)
    assert all(f.converged for f in est)


def test_rho_zero_is_found_near_zero():
    rng = np.random.default_rng(9)
    rhos = [fit_ar_errors(parse_equation("Y C X AR(1)"), _simulate(rng, 150, [0.0]))["AR(1)"].estimate
            for _ in range(200)]
    assert abs(np.mean(rhos)) < 0.02
    # t-based 5% test of rho = 0 should reject at about the nominal rate
    rng = np.random.default_rng(10)
    rej = np.mean([abs(fit_ar_errors(parse_equation("Y C X AR(1)"),
                                     _simulate(rng, 150, [0.0]))["AR(1)"].t_stat) > 1.976
                   for _ in range(400)])
    assert 0.02 <= rej <= 0.09


def test_sse_matches_reported_ssr(data):
    spec = parse_equation("PIB C CAPITALFIJO IED D1 D2 D3 AR(1)")
    fit = fit_ar_errors(spec, data)
    assert sse_innovations(spec, data, fit.params) == pytest.approx(fit.ssr, rel=1e-12)
    assert np.sum(fit.residuals**2) == pytest.approx(fit.ssr, rel=1e-12)


@settings(max_examples=60)
@given(st.floats(-1.5, 1.5), st.floats(-0.9, 0.9))
def test_inverted_roots_vieta(r1, r2):
    roots, flag = inverted_ar_roots([r1, r2])
    assert len(roots) == 2
    assert sum(roots) == pytest.approx(r1, abs=1e-9)
    assert roots[0] * roots[1] == pytest.approx(-r2, abs=1e-9)
    assert flag == any(abs(z) >= 1 - 1e-9 for z in roots)
    assert abs(roots[0]) >= abs(roots[1])


def test_inverted_roots_sparse_orders():
    roots, flag = inverted_ar_roots([0.5], [4])
    assert len(roots) == 4
    assert all(abs(abs(z) - 0.5**0.25) < 1e-12 for z in roots)
    assert not flag
    roots, flag = inverted_ar_roots([1.02])
    assert flag and roots[0] == pytest.approx(1.02)
    assert all(cmath.isfinite(z) for z in roots)
    with pytest.raises(ValueError):
        inverted_ar_roots([])


def test_expand_fisher():
    e = expand_fisher(0.5, 3)
    assert e.implied == (2.0, 1.5, 1.0, 0.5)
    assert expand_fisher(0.3, 0).implied == (0.3,)
    d = 0.137854
    assert sum(expand_fisher(d, 7).implied) == pytest.approx(36 * d)
    with pytest.raises(ValueError):
        expand_fisher(1.0, -1)


@given(st.floats(-10, 10), st.integers(0, 12))
def test_expand_fisher_is_arithmetic(delta, L):
    imp = expand_fisher(delta, L).implied
    assert len(imp) == L + 1
    assert imp[-1] == pytest.approx(delta)
    steps = np.diff(imp)
    assert np.allclose(steps, -delta, atol=1e-12)


def test_too_few_observations():
    d = make_dataset({"Y": [1.0, 2.0, 1.5, 3.0, 2.0], "X": [0.0, 1.0, 0.5, 2.0, 1.0]})
    with pytest.raises(NumericalError):
        fit_ar_errors(parse_equation("Y C X AR(1) AR(2)"), d)
