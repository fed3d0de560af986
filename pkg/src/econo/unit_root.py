"""Phillips-Perron unit-root test, MacKinnon critical values and p-values,
and the Engle-Granger residual cointegration test."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.special import ndtr, ndtri

from .ols import NumericalError, RegressionSummary, ols_arrays
from .series import QuarterlySeries

# MacKinnon (2010), Table 2, tau_c with one variable: (beta_inf, beta_1, beta_2, beta_3)
MACKINNON_TAU_C = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}

SUPPORTED_DETERMINISTIC = ("constant",)


@dataclass(frozen=True)
class HacConfig:
    """Bartlett kernel with either the Newey-West automatic bandwidth or a fixed one."""

    kernel: str = "bartlett"
    bandwidth: int | None = None   # None means automatic

    def __post_init__(self):
        if self.kernel != "bartlett":
            raise ValueError(f"unsupported kernel {self.kernel!r}")
        if self.bandwidth is not None and (int(self.bandwidth) != self.bandwidth or self.bandwidth < 0):
            raise ValueError("fixed bandwidth must be a non-negative integer")

    @property
    def automatic(self) -> bool:
        return self.bandwidth is None


@dataclass(frozen=True)
class UnitRootReport:
    series: str
    adj_t_stat: float
    p_value: float
    crit_1: float
    crit_5: float
    crit_10: float
    resid_variance: float
    hac_variance: float
    bandwidth_used: int
    n_used: int
    deterministic: str = "constant"
    automatic_bandwidth: bool = True
    verdict: str | None = None


def _autocov(u: np.ndarray, j: int) -> float:
    return float(u[j:] @ u[: u.size - j]) / u.size


def _check_variance(u: np.ndarray) -> None:
    if u.size == 0 or float(u @ u) <= 1e-24 * max(1.0, float(np.abs(u).max()) ** 2) * u.size:
        raise NumericalError("degenerate residuals: zero variance")


def newey_west_bandwidth(u) -> int:
    """Newey-West (1994) automatic bandwidth for the Bartlett kernel."""
    u = np.asarray(u, dtype=float)
    if u.size < 8:
        raise ValueError("need at least 8 residuals for the bandwidth rule")
    _check_variance(u)
    T = u.size
    n0 = int(4.0 * (T / 100.0) ** (2.0 / 9.0))
    g = [_autocov(u, j) for j in range(n0 + 1)]
    s1 = 2.0 * sum(j * g[j] for j in range(1, n0 + 1))
    s0 = g[0] + 2.0 * sum(g[1:])
    if s0 == 0:
        raise NumericalError("degenerate residuals: zero long-run variance")
    return int(math.floor(1.1447 * ((s1 / s0) ** 2 * T) ** (1.0 / 3.0)))


def hac_variance(u, bandwidth: int) -> float:
    """Bartlett-weighted long-run variance gamma_0 + 2 sum (1 - j/(l+1)) gamma_j."""
    u = np.asarray(u, dtype=float)
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    if bandwidth >= u.size:
        raise ValueError(f"bandwidth {bandwidth} must be below the sample length {u.size}")
    lam = _autocov(u, 0)
    for j in range(1, bandwidth + 1):
        lam += 2.0 * (1.0 - j / (bandwidth + 1.0)) * _autocov(u, j)
    return lam


def mackinnon_critical_values(T: int, deterministic: str = "constant") -> tuple[float, float, float]:
    if deterministic not in SUPPORTED_DETERMINISTIC:
        raise ValueError(f"unsupported deterministic case {deterministic!r}")
    if T < 20:
        raise ValueError("response surface is only valid for T >= 20")
    out = []
    for level in (0.01, 0.05, 0.10):
        b = MACKINNON_TAU_C[level]
        out.append(b[0] + b[1] / T + b[2] / T**2 + b[3] / T**3)
    return tuple(out)


@lru_cache(maxsize=1)
def _surface():
    raw = json.loads(resources.files("econo.data").joinpath("df_tau_c_surface.json").read_text())
    return np.asarray(raw["probabilities"]), np.asarray(raw["coefficients"])


def _quantiles(T: float) -> tuple[np.ndarray, np.ndarray]:
    probs, coef = _surface()
    powers = np.array([1.0, 1.0 / T, 1.0 / T**2, 1.0 / T**3])
    return probs, coef @ powers


def mackinnon_pvalue(stat: float, T: int, deterministic: str = "constant", window: int = 11) -> float:
    """Finite-sample left-tail p-value of the constant-only DF tau statistic.

    Quantiles at sample size T come from the response surface; the p-value is
    a local quadratic fit of probit(p) on the quantiles nearest ``stat``.
    """
    if deterministic not in SUPPORTED_DETERMINISTIC:
        raise ValueError(f"unsupported deterministic case {deterministic!r}")
    if not math.isfinite(stat):
        raise ValueError("statistic must be finite")
    probs, q = _quantiles(max(T, 20))
    i = int(np.argmin(np.abs(q - stat)))
    lo = min(max(i - window // 2, 0), q.size - window)
    sl = slice(lo, lo + window)
    design = np.column_stack([np.ones(window), q[sl], q[sl] ** 2])
    gamma, *_ = np.linalg.lstsq(design, ndtri(probs[sl]), rcond=None)
    z = gamma[0] + gamma[1] * stat + gamma[2] * stat**2
    # beyond the tabulated range the quadratic may turn over; use the linear tail
    if stat < q[0] or stat > q[-1]:
        edge = q[0] if stat < q[0] else q[-1]
        slope = gamma[1] + 2 * gamma[2] * edge
        z = gamma[0] + gamma[1] * edge + gamma[2] * edge**2 + slope * (stat - edge)
    return float(min(1.0, max(0.0, ndtr(z))))


def _df_regression(y: np.ndarray):
    dy = np.diff(y)
    X = np.column_stack([np.ones(dy.size), y[:-1]])
    return ols_arrays(dy, X, ["C", "LAG"], has_constant=True)


def _pp_core(y: np.ndarray, hac: HacConfig, name: str) -> UnitRootReport:
    if y.size < 10:
        raise ValueError(f"series {name} too short for a unit-root test ({y.size} < 10)")
    if np.ptp(y) == 0:
        raise NumericalError(f"series {name} has zero variance")
    fit = _df_regression(y)
    u = fit.residuals
    _check_variance(u)
    T = u.size
    bw = newey_west_bandwidth(u) if hac.automatic else int(hac.bandwidth)
    g0 = float(u @ u) / T
    lam2 = hac_variance(u, bw)
    if not lam2 > 0:
        raise NumericalError("non-positive long-run variance")
    alpha = fit.coefficients[1]
    s = fit.se_regression
    z = alpha.t_stat * math.sqrt(g0 / lam2) - T * (lam2 - g0) * alpha.std_error / (2.0 * math.sqrt(lam2) * s)
    c1, c5, c10 = mackinnon_critical_values(T)
    return UnitRootReport(name, z, mackinnon_pvalue(z, T), c1, c5, c10, g0, lam2, bw, T,
                          automatic_bandwidth=hac.automatic)


def phillips_perron(s: QuarterlySeries, deterministic: str = "constant",
                    hac: HacConfig = HacConfig()) -> UnitRootReport:
    """Phillips-Perron Z_t for H0: ``s`` has a unit root, with a constant."""
    if deterministic not in SUPPORTED_DETERMINISTIC:
        raise ValueError(f"unsupported deterministic case {deterministic!r}")
    return _pp_core(np.asarray(s.values, dtype=float), hac, s.name)


def engle_granger(fit: RegressionSummary, hac: HacConfig = HacConfig(),
                  name: str = "RESID") -> UnitRootReport:
    """Phillips-Perron test on the residuals of a levels regression.

    Cointegration is declared when the unit-root null is rejected at 5%.
    """
    if fit.residuals is None:
        raise ValueError("fit carries no residuals")
    u = np.asarray(fit.residuals, dtype=float)
    _check_variance(u)
    rep = _pp_core(u, hac, name)
    verdict = "cointegrated" if rep.p_value < 0.05 else "not cointegrated"
    return UnitRootReport(**{**rep.__dict__, "verdict": verdict})
