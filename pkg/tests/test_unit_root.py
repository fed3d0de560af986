import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from econo.eqspec import parse_equation
from econo.ols import NumericalError, fit_ols, ols_arrays
from econo.series import QuarterPeriod, QuarterlySeries, diff
from econo.unit_root import (HacConfig, engle_granger, hac_variance, mackinnon_critical_values,
                             mackinnon_pvalue, newey_west_bandwidth, phillips_perron)

from conftest import make_dataset


def _series(values, name="X"):
    return QuarterlySeries(name, QuarterPeriod(2000, 1), values)


def _df_residuals(s):
    y = s.values
    X = np.column_stack([np.ones(y.size - 1), y[:-1]])
    return ols_arrays(np.diff(y), X, ["C", "LAG"])


@pytest.mark.parametrize("name,p", [("PIB", 0.9997), ("CAPITALFIJO", 0.0478), ("IED", 0.4125),
                                    ("D(PIB)", 0.0), ("D(CAPITALFIJO)", 0.0), ("D(IED)", 0.0)])
def test_reference_p_values(data, name, p):
    s = diff(data[name[2:-1]]) if name.startswith("D(") else data[name]
    rep = phillips_perron(s)
    assert abs(rep.p_value - p) < 5e-4
    assert rep.n_used == len(s) - 1
    assert rep.crit_1 < rep.crit_5 < rep.crit_10 < 0
    assert rep.hac_variance > 0 and rep.resid_variance > 0


def test_reference_bandwidths(data):
    bws = {n: newey_west_bandwidth(_df_residuals(data[n]).residuals) for n in ("IED",)}
    bws.update({f"D({n})": newey_west_bandwidth(_df_residuals(diff(data[n])).residuals)
                for n in ("PIB", "CAPITALFIJO", "IED")})
    assert bws == {"IED": 5, "D(PIB)": 28, "D(CAPITALFIJO)": 19, "D(IED)": 4}


def test_critical_values_at_reference_sizes():
    for T, want in ((60, (-3.544063, -2.910860, -2.593090)), (59, (-3.546099, -2.911730, -2.593551))):
        got = mackinnon_critical_values(T)
        assert np.allclose(got, want, atol=5e-4)
    with pytest.raises(ValueError):
        mackinnon_critical_values(19)
    with pytest.raises(ValueError):
        mackinnon_critical_values(60, "trend")


@pytest.mark.parametrize("T", [25, 60, 200, 1000])
def test_p_value_surface_agrees_with_critical_values(T):
    for level, c in zip((0.01, 0.05, 0.10), mackinnon_critical_values(T)):
        assert mackinnon_pvalue(c, T) == pytest.approx(level, abs=2e-3)


@settings(max_examples=60)
@given(st.floats(-20, 10), st.floats(-20, 10), st.integers(20, 500))
def test_p_value_is_monotone(a, b, T):
    lo, hi = sorted((a, b))
    assert 0.0 <= mackinnon_pvalue(lo, T) <= mackinnon_pvalue(hi, T) <= 1.0


def test_zero_bandwidth_gives_dickey_fuller_t(data):
    s = data["IED"]
    rep = phillips_perron(s, hac=HacConfig(bandwidth=0))
    assert rep.adj_t_stat == pytest.approx(_df_residuals(s).coefficients[1].t_stat, rel=1e-12)
    assert rep.hac_variance == pytest.approx(rep.resid_variance, rel=1e-14)
    assert not rep.automatic_bandwidth


def test_hac_variance_definition():
    u = np.array([1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, -0.5])
    g = [float(u[j:] @ u[: u.size - j]) / u.size for j in range(3)]
    assert hac_variance(u, 0) == pytest.approx(g[0])
    assert hac_variance(u, 2) == pytest.approx(g[0] + 2 * (2 / 3 * g[1] + 1 / 3 * g[2]))
    with pytest.raises(ValueError):
        hac_variance(u, 8)
    with pytest.raises(ValueError):
        HacConfig(bandwidth=-1)
    with pytest.raises(ValueError):
        HacConfig(kernel="parzen")


def test_white_noise_bandwidth_is_small():
    rng = np.random.default_rng(3)
    bws = [newey_west_bandwidth(rng.normal(size=60)) for _ in range(1000)]
    assert np.median(bws) <= 3


def test_degenerate_inputs():
    with pytest.raises(NumericalError):
        newey_west_bandwidth(np.zeros(20))
    with pytest.raises(ValueError):
        newey_west_bandwidth(np.ones(5))
    with pytest.raises(NumericalError):
        phillips_perron(_series(np.full(30, 4.0)))
    with pytest.raises(NumericalError):
        phillips_perron(_series(np.arange(30.0)))   # exact trend: DF residuals vanish
    with pytest.raises(ValueError):
        phillips_perron(_series(np.arange(5.0)))


def test_size_under_random_walk():
    rng = np.random.default_rng(5)
    rej = np.mean([phillips_perron(_series(np.cumsum(rng.normal(size=100)))).p_value < 0.05
                   for _ in range(2000)])
    assert 0.03 <= rej <= 0.07


def test_power_against_stationary_ar():
    rng = np.random.default_rng(6)
    rej = []
    for _ in range(300):
        e = rng.normal(size=200)
        y = np.zeros(200)
        for t in range(1, 200):
            y[t] = 0.5 * y[t - 1] + e[t]
        rej.append(phillips_perron(_series(y)).p_value < 0.05)
    assert np.mean(rej) > 0.95


def test_engle_granger_residual_statistics(data):
    r1 = engle_granger(fit_ols(parse_equation("PIB C CAPITALFIJO IED"), data), name="RESID01")
    assert r1.series == "RESID01"
    assert r1.bandwidth_used == 4
    assert r1.resid_variance == pytest.approx(4481992.0, rel=1e-3)
    assert r1.hac_variance == pytest.approx(3828350.0, rel=1e-3)
    r2 = engle_granger(fit_ols(parse_equation("PIB C CAPITALFIJO IED D1 D2 D3"), data), name="RESID02")
    assert r2.resid_variance == pytest.approx(5120541.0, rel=1e-3)
    assert r2.hac_variance == pytest.approx(4941592.0, rel=1e-3)
    assert abs(r2.p_value - 0.0002) < 3e-4


def test_engle_granger_perfect_fit_is_an_error():
    x = np.arange(1.0, 30.0)
    d = {"Y": 1 + 2 * x, "X": x}
    with pytest.raises(NumericalError):
        engle_granger(fit_ols(parse_equation("Y C X"), make_dataset(d)))
