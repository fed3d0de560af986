"""Vector autoregressions: estimation, lag-order selection, stability,
Granger block exogeneity, Cholesky impulse responses and variance
decompositions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import ChiSquare, tail_prob
from .ols import NumericalError, RegressionSummary, lstsq_svd, ols_arrays
from .series import Dataset, PeriodSpan, common_span

LOG2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class VarModel:
    variables: tuple
    p: int
    coefs: np.ndarray          # (p, k, k); coefs[j-1][i, l] multiplies variable l at lag j in equation i
    intercept: np.ndarray      # (k,)
    residuals: np.ndarray      # (T, k)
    sigma_u: np.ndarray        # dof-adjusted, divisor T - m
    sigma_u_ml: np.ndarray     # divisor T
    equations: tuple           # per-equation RegressionSummary
    log_likelihood: float
    aic: float
    sc: float
    hq: float
    sample: PeriodSpan
    X: np.ndarray = field(repr=False, default=None)   # (T, m) common regressor matrix
    Y: np.ndarray = field(repr=False, default=None)
    xtx_inv: np.ndarray = field(repr=False, default=None)

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]

    @property
    def m(self) -> int:
        """Regressors per equation."""
        return self.k * self.p + 1

    @property
    def regressor_names(self) -> list[str]:
        return _regressor_names(self.variables, self.p)

    def index(self, name: str) -> int:
        up = [v.upper() for v in self.variables]
        try:
            return up.index(name.upper())
        except ValueError:
            raise KeyError(f"{name!r} is not a VAR variable") from None

    def coefficient_matrix(self) -> np.ndarray:
        """(m, k) matrix B with Y = X B + U, columns ordered like ``regressor_names``."""
        return np.column_stack([eq.params for eq in self.equations])

    def companion(self) -> np.ndarray:
        k, p = self.k, self.p
        top = np.hstack(list(self.coefs))
        if p == 1:
            return top
        bottom = np.hstack([np.eye(k * (p - 1)), np.zeros((k * (p - 1), k))])
        return np.vstack([top, bottom])


def _regressor_names(variables, p) -> list[str]:
    return [f"{v}(-{j})" for v in variables for j in range(1, p + 1)] + ["C"]


def _system_stats(resid: np.ndarray, m: int):
    T, k = resid.shape
    sig_ml = resid.T @ resid / T
    sign, logdet = np.linalg.slogdet(sig_ml)
    if sign <= 0:
        raise NumericalError("residual covariance is singular")
    ll = -0.5 * T * (k * (1.0 + LOG2PI) + logdet)
    nparam = k * m
    aic = -2.0 * ll / T + 2.0 * nparam / T
    sc = -2.0 * ll / T + nparam * math.log(T) / T
    hq = -2.0 * ll / T + 2.0 * nparam * math.log(math.log(T)) / T
    return sig_ml, logdet, ll, aic, sc, hq


def _raw_arrays(data: Dataset, variables: Sequence[str]):
    series = [data[v] for v in variables]
    span = common_span(series)
    Z = np.column_stack([s.window(span) for s in series])
    return span, Z


def _design(Z: np.ndarray, p: int, rows: slice):
    """Regressors [y1(-1..-p), y2(-1..-p), ..., 1] for the target rows of Z."""
    idx = np.arange(Z.shape[0])[rows]
    if idx.size and idx[0] < p:
        raise ValueError("target rows need p earlier observations")
    cols = [Z[idx - j, v] for v in range(Z.shape[1]) for j in range(1, p + 1)]
    cols.append(np.ones(idx.size))
    return Z[idx], np.column_stack(cols)


def _effective_rows(span: PeriodSpan, p: int, sample: Optional[PeriodSpan]) -> slice:
    first = span.first.shift(p)
    last = span.last
    if sample is not None:
        first = max(first, sample.first)
        last = min(last, sample.last)
    if first > last:
        raise NumericalError("no observations left after lag adjustment")
    return slice(first - span.first, last - span.first + 1)


def fit_var(data: Dataset, variables: Sequence[str], p: int,
            sample: Optional[PeriodSpan] = None) -> VarModel:
    """Equation-by-equation OLS of each variable on p lags of all variables and a constant.

    Observations before ``sample`` are used as lags when available.
    """
    variables = tuple(data[v].name for v in variables)
    if p < 1:
        raise ValueError("VAR order must be at least 1")
    k = len(variables)
    span, Z = _raw_arrays(data, variables)
    rows = _effective_rows(span, p, sample)
    Y, X = _design(Z, p, rows)
    T, m = X.shape
    if T <= m:
        raise NumericalError(f"{T} observations for {m} regressors per equation")
    names = _regressor_names(variables, p)
    first = span.first.shift(rows.start)
    eff = PeriodSpan(first, first.shift(T - 1))
    equations = tuple(
        ols_arrays(Y[:, i], X, names, sample=eff, dependent=variables[i], has_constant=True)
        for i in range(k))
    _, xtx_inv = lstsq_svd(X, Y[:, 0], names)
    B = np.column_stack([eq.params for eq in equations])
    U = Y - X @ B
    sig_ml, _, ll, aic, sc, hq = _system_stats(U, m)
    coefs = np.stack([B[[v * p + (j - 1) for v in range(k)], :].T for j in range(1, p + 1)])
    return VarModel(variables, p, coefs, B[-1].copy(), U, U.T @ U / (T - m), sig_ml,
                    equations, ll, aic, sc, hq, eff, X=X, Y=Y, xtx_inv=xtx_inv)


# ----------------------------------------------------------- lag selection

@dataclass(frozen=True)
class LagSelectionRow:
    lag: int
    logl: float
    lr: Optional[float]
    fpe: float
    aic: float
    sc: float
    hq: float
    stars: frozenset = frozenset()


def lag_order_selection(data: Dataset, variables: Sequence[str], max_lag: int,
                        alpha: float = 0.05) -> list[LagSelectionRow]:
    """Information criteria for orders 0..max_lag on one common sample.

    The LR column is the sequential small-sample-corrected statistic; it is
    starred at the largest lag whose test rejects at ``alpha``.
    """
    variables = tuple(data[v].name for v in variables)
    k = len(variables)
    span, Z = _raw_arrays(data, variables)
    rows = slice(max_lag, len(span))
    T = rows.stop - rows.start
    if max_lag < 0 or T <= k * max_lag + 1:
        raise ValueError(f"max_lag {max_lag} too large for {len(span)} observations")
    stats = []
    for lag in range(max_lag + 1):
        if lag == 0:
            Y = Z[rows]
            U = Y - Y.mean(axis=0)
        else:
            Y, X = _design(Z, lag, rows)
            B, _ = lstsq_svd(X, Y, _regressor_names(variables, lag))
            U = Y - X @ B
        m = 1 + k * lag
        sig_ml, logdet, ll, aic, sc, hq = _system_stats(U, m)
        fpe = math.exp(logdet) * ((T + m) / (T - m)) ** k
        stats.append([lag, ll, logdet, m, fpe, aic, sc, hq])

    lr = [None]
    for prev, cur in zip(stats, stats[1:]):
        lr.append((T - cur[3]) * (prev[2] - cur[2]))
    crit_p = [None] + [tail_prob(ChiSquare(k * k), v) for v in lr[1:]]
    rejecting = [i for i in range(1, len(lr)) if crit_p[i] < alpha]
    star_lr = max(rejecting) if rejecting else 0

    def argmin(col):
        vals = [s[col] for s in stats]
        return int(np.argmin(vals))  # first occurrence, so ties go to the smaller lag

    starred = {"LR": star_lr, "FPE": argmin(4), "AIC": argmin(5), "SC": argmin(6), "HQ": argmin(7)}
    out = []
    for i, s in enumerate(stats):
        flags = frozenset(c for c, j in starred.items() if j == i)
        out.append(LagSelectionRow(s[0], s[1], lr[i], s[4], s[5], s[6], s[7], flags))
    return out


def selected_lag(rows: list[LagSelectionRow], criterion: str) -> int:
    for r in rows:
        if criterion in r.stars:
            return r.lag
    raise KeyError(criterion)


# ------------------------------------------------------------- stability

def companion_roots(model: VarModel) -> list[complex]:
    """Companion-matrix eigenvalues ordered by descending modulus."""
    z = np.linalg.eigvals(model.companion())
    return sorted((complex(v) for v in z), key=lambda v: (-abs(v), -v.real, -v.imag))


def stability_roots(model: VarModel) -> tuple[list[float], bool]:
    """Moduli of the companion-matrix eigenvalues, descending; stable iff all < 1."""
    mod = [abs(z) for z in companion_roots(model)]
    return mod, mod[0] < 1.0


# ---------------------------------------------------------------- Granger

@dataclass(frozen=True)
class GrangerRow:
    excluded: str
    chi2: float
    df: int
    p_value: float


def _wald(b: np.ndarray, V: np.ndarray) -> float:
    try:
        c = np.linalg.cholesky(V)
    except np.linalg.LinAlgError:
        raise NumericalError("coefficient covariance block is not positive definite") from None
    z = np.linalg.solve(c, b)
    return float(z @ z)


def granger_block_exogeneity(model: VarModel, target: str) -> list[GrangerRow]:
    """Wald tests that all lags of each other variable (and of all jointly) are
    zero in the ``target`` equation."""
    i = model.index(target)
    eq = model.equations[i]
    b, V = eq.params, eq.cov
    p = model.p
    rows, joint = [], []
    for v, name in enumerate(model.variables):
        if v == i:
            continue
        idx = list(range(v * p, (v + 1) * p))
        joint += idx
        w = _wald(b[idx], V[np.ix_(idx, idx)])
        rows.append(GrangerRow(name, w, p, tail_prob(ChiSquare(p), w)))
    w = _wald(b[joint], V[np.ix_(joint, joint)])
    rows.append(GrangerRow("All", w, len(joint), tail_prob(ChiSquare(len(joint)), w)))
    return rows


# --------------------------------------------------------- impulse responses

def ma_coefficients(coefs: np.ndarray, horizon: int) -> np.ndarray:
    """Psi_0 = I, Psi_h = sum_{j=1..min(h,p)} A_j Psi_{h-j}; returns (horizon, k, k)."""
    p, k, _ = coefs.shape
    psi = np.zeros((horizon, k, k))
    psi[0] = np.eye(k)
    for h in range(1, horizon):
        for j in range(1, min(h, p) + 1):
            psi[h] += coefs[j - 1] @ psi[h - j]
    return psi


def _ordering_perm(model: VarModel, ordering) -> list[int]:
    ordering = tuple(ordering) if ordering is not None else model.variables
    perm = [model.index(v) for v in ordering]
    if sorted(perm) != list(range(model.k)):
        raise ValueError("ordering must be a permutation of the VAR variables")
    return perm


def _cholesky(sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NumericalError("residual covariance is not positive definite") from None


def _orthogonal_responses(coefs, sigma, perm, horizon):
    psi = ma_coefficients(coefs, horizon)[:, perm][:, :, perm]
    P = _cholesky(sigma[np.ix_(perm, perm)])
    return psi @ P


@dataclass(frozen=True)
class MonteCarloBands:
    replications: int = 1000
    seed: int = 0


@dataclass(frozen=True, eq=False)
class ImpulseResponseSet:
    horizon: int
    ordering: tuple
    responses: np.ndarray                 # (H, k, k) in ordering order; [h, responder, shock]
    band: Optional[np.ndarray] = None     # 2 * Monte Carlo standard deviation, same shape
    replications: int = 0
    seed: Optional[int] = None

    def response(self, responder: str, shock: str) -> np.ndarray:
        up = [v.upper() for v in self.ordering]
        return self.responses[:, up.index(responder.upper()), up.index(shock.upper())]

    def band_of(self, responder: str, shock: str) -> np.ndarray:
        up = [v.upper() for v in self.ordering]
        return self.band[:, up.index(responder.upper()), up.index(shock.upper())]


def _replication(model: VarModel, chol_cov: np.ndarray, perm, horizon, seed, r):
    rng = np.random.default_rng([seed, r])
    B = model.coefficient_matrix()
    draw = B + (chol_cov @ rng.standard_normal(B.size)).reshape(B.shape, order="F")
    k, p = model.k, model.p
    coefs = np.stack([draw[[v * p + (j - 1) for v in range(k)], :].T for j in range(1, p + 1)])
    return _orthogonal_responses(coefs, model.sigma_u, perm, horizon)


def cholesky_irf(model: VarModel, horizon: int = 10, ordering=None,
                 bands: Optional[MonteCarloBands] = None) -> ImpulseResponseSet:
    """Responses to one-standard-deviation Cholesky shocks.

    Bands redraw the coefficients from N(B, Sigma_u kron (X'X)^-1) with the
    residual covariance held fixed; replication r uses the generator seeded by
    (seed, r) so results do not depend on execution order.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    perm = _ordering_perm(model, ordering)
    resp = _orthogonal_responses(model.coefs, model.sigma_u, perm, horizon)
    ordering = tuple(model.variables[i] for i in perm)
    if bands is None:
        return ImpulseResponseSet(horizon, ordering, resp)
    if bands.replications < 2:
        raise ValueError("need at least two Monte Carlo replications")
    # vec(B) is column-stacked by equation: cov = Sigma_u kron (X'X)^-1
    chol_cov = _cholesky(np.kron(model.sigma_u, model.xtx_inv))
    draws = np.stack([_replication(model, chol_cov, perm, horizon, bands.seed, r)
                      for r in range(bands.replications)])
    band = 2.0 * draws.std(axis=0, ddof=1)
    return ImpulseResponseSet(horizon, ordering, resp, band, bands.replications, bands.seed)


# -------------------------------------------------- variance decomposition

@dataclass(frozen=True, eq=False)
class FevdTable:
    variable: str
    ordering: tuple
    se: np.ndarray        # (H,) forecast standard error per period
    shares: np.ndarray    # (H, k) percentages, columns follow ``ordering``


def fevd(model: VarModel, horizon: int = 10, ordering=None) -> dict[str, FevdTable]:
    """Cholesky forecast-error variance decomposition for every variable."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    perm = _ordering_perm(model, ordering)
    resp = _orthogonal_responses(model.coefs, model.sigma_u, perm, horizon)
    cum = np.cumsum(resp**2, axis=0)          # (H, responder, shock)
    total = cum.sum(axis=2)
    ordering = tuple(model.variables[i] for i in perm)
    out = {}
    for r, name in enumerate(ordering):
        out[name] = FevdTable(name, ordering, np.sqrt(total[:, r]),
                              100.0 * cum[:, r, :] / total[:, r, None])
    return out
