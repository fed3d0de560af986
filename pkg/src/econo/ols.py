"""Least squares with the full statistics panel, residual diagnostics and
recursive residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .distributions import ChiSquare, FDist, StudentT, tail_prob
from .eqspec import Design, EquationSpec, build_design
from .series import Dataset, PeriodSpan, QuarterPeriod, QuarterlySeries

RANK_RTOL = 1e-10


class NumericalError(ArithmeticError):
    """Estimation cannot proceed (rank deficiency, degenerate data, ...)."""


class RankDeficient(NumericalError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__("design matrix is rank deficient; collinear columns: "
                         + ", ".join(self.columns))


@dataclass(frozen=True)
class Coefficient:
    name: str
    estimate: float
    std_error: float
    t_stat: float
    p_value: float


@dataclass(frozen=True, eq=False)
class RegressionSummary:
    dependent: str
    coefficients: tuple
    n: int
    k: int
    r2: float
    adj_r2: float
    se_regression: float
    ssr: float
    log_likelihood: float
    f_stat: float
    prob_f: float
    dw: float
    aic: float
    sc: float
    hq: float
    mean_dep: float
    sd_dep: float
    sample: PeriodSpan
    method: str = "Least Squares"
    # fit context used by the diagnostics
    y: np.ndarray = field(default=None, repr=False)
    X: np.ndarray = field(default=None, repr=False)
    residuals: np.ndarray = field(default=None, repr=False)
    fitted: np.ndarray = field(default=None, repr=False)
    cov: np.ndarray = field(default=None, repr=False)
    spec: Optional[EquationSpec] = field(default=None, repr=False)
    data: Optional[Dataset] = field(default=None, repr=False)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.coefficients]

    @property
    def params(self) -> np.ndarray:
        return np.array([c.estimate for c in self.coefficients])

    @property
    def bse(self) -> np.ndarray:
        return np.array([c.std_error for c in self.coefficients])

    def __getitem__(self, name: str) -> Coefficient:
        for c in self.coefficients:
            if c.name.upper() == name.upper():
                return c
        raise KeyError(name)

    def residual_series(self, name: str = "RESID") -> QuarterlySeries:
        return QuarterlySeries(name, self.sample.first, self.residuals)

    def fitted_series(self, name: str = "FITTED") -> QuarterlySeries:
        return QuarterlySeries(name, self.sample.first, self.fitted)


@dataclass(frozen=True)
class DiagnosticReport:
    test: str
    statistics: tuple  # (label, value, distribution label, p-value)
    verdict: str = ""
    note: str = ""
    test_equation: Optional[RegressionSummary] = None

    def __getitem__(self, label: str):
        for row in self.statistics:
            if row[0] == label:
                return row
        raise KeyError(label)

    def stat(self, label: str) -> float:
        return self[label][1]

    def pvalue(self, label: str) -> float:
        return self[label][3]


# --------------------------------------------------------------- core solve

def lstsq_svd(X: np.ndarray, y: np.ndarray, names=None):
    """Least squares via SVD.  Returns (beta, (X'X)^-1).

    Columns are scaled to unit length first, so the rank tolerance does not
    depend on the units of the regressors.
    """
    n, k = X.shape
    if k == 0:
        return np.empty(0), np.empty((0, 0))
    norms = np.linalg.norm(X, axis=0)
    names = names or [f"x{i}" for i in range(k)]
    if np.any(norms == 0):
        raise RankDeficient([names[i] for i in np.nonzero(norms == 0)[0]])
    U, s, Vt = np.linalg.svd(X / norms, full_matrices=False)
    tol = RANK_RTOL * s[0]
    if np.any(s <= tol):
        null = Vt[s <= tol]
        involved = np.nonzero(np.any(np.abs(null) > 1e-8, axis=0))[0]
        raise RankDeficient([names[i] for i in involved])
    y = np.asarray(y, dtype=float)
    scale = s if y.ndim == 1 else s[:, None]
    beta = Vt.T @ ((U.T @ y) / scale)
    beta = beta / (norms if y.ndim == 1 else norms[:, None])
    xtx_inv = ((Vt.T / s**2) @ Vt) / np.outer(norms, norms)
    return beta, xtx_inv


def durbin_watson(residuals) -> float:
    e = np.asarray(residuals, dtype=float)
    if e.size < 2:
        raise ValueError("Durbin-Watson needs at least two residuals")
    ssr = float(e @ e)
    if ssr == 0:
        raise NumericalError("Durbin-Watson undefined for zero residuals")
    return float(np.sum(np.diff(e) ** 2) / ssr)


def gaussian_loglik(ssr: float, n: int) -> float:
    if ssr <= 0:
        return math.inf
    return -0.5 * n * (1.0 + math.log(2 * math.pi) + math.log(ssr / n))


def info_criteria(loglik: float, n: int, k: int) -> tuple[float, float, float]:
    base = -2.0 * loglik / n
    return (base + 2.0 * k / n,
            base + k * math.log(n) / n,
            base + 2.0 * k * math.log(math.log(n)) / n)


def summarize(y, X, names, beta, cov, residuals, *, sample, dependent,
              has_constant, method="Least Squares", dw_residuals=None,
              spec=None, data=None, summary_cls=RegressionSummary, **extra):
    """Assemble the statistics panel from a finished fit."""
    y = np.asarray(y, dtype=float)
    n, k = y.size, len(beta)
    e = np.asarray(residuals, dtype=float)
    ssr = float(e @ e)
    dfree = n - k
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    rows = []
    for name, b, s in zip(names, beta, se):
        t = b / s if s > 0 else math.copysign(math.inf, b) if b else math.nan
        p = tail_prob(StudentT(dfree), t, two_sided=True) if math.isfinite(t) else 0.0
        rows.append(Coefficient(name, float(b), float(s), float(t), p))
    mean_dep = float(y.mean())
    sd_dep = float(y.std(ddof=1)) if n > 1 else 0.0
    tss = float(np.sum((y - mean_dep) ** 2)) if has_constant else float(y @ y)
    r2 = 1.0 - ssr / tss if tss > 0 else 1.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / dfree if dfree > 0 else math.nan
    ll = gaussian_loglik(ssr, n)
    aic, sc, hq = info_criteria(ll, n, k)
    if k > 1 and dfree > 0 and r2 < 1:
        f = (r2 / (k - 1)) / ((1 - r2) / dfree)
        pf = tail_prob(FDist(k - 1, dfree), f)
    else:
        f, pf = (math.inf, 0.0) if k > 1 else (math.nan, math.nan)
    dwr = e if dw_residuals is None else dw_residuals
    dw = float(np.sum(np.diff(dwr) ** 2) / (dwr @ dwr)) if ssr > 0 else math.nan
    return summary_cls(
        dependent=dependent, coefficients=tuple(rows), n=n, k=k, r2=r2, adj_r2=adj,
        se_regression=math.sqrt(ssr / dfree) if dfree > 0 else math.nan, ssr=ssr,
        log_likelihood=ll, f_stat=f, prob_f=pf, dw=dw, aic=aic, sc=sc, hq=hq,
        mean_dep=mean_dep, sd_dep=sd_dep, sample=sample, method=method,
        y=y, X=X, residuals=e, fitted=y - e, cov=cov, spec=spec, data=data, **extra)


def ols_arrays(y, X, names, *, sample=None, dependent="Y", has_constant=None,
               spec=None, data=None) -> RegressionSummary:
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    if n <= k:
        raise NumericalError(f"{n} observations for {k} parameters")
    beta, xtx_inv = lstsq_svd(X, y, names)
    e = y - X @ beta
    ssr = float(e @ e)
    s2 = ssr / (n - k)
    if has_constant is None:
        has_constant = bool(np.any(np.all(X == 1.0, axis=0)))
    return summarize(y, X, list(names), beta, s2 * xtx_inv, e, sample=sample,
                     dependent=dependent, has_constant=has_constant, spec=spec, data=data)


def fit_ols(spec: EquationSpec, data: Dataset, sample: PeriodSpan | None = None) -> RegressionSummary:
    """Ordinary least squares for an equation without AR terms."""
    if spec.ar_orders:
        raise ValueError("fit_ols does not handle AR terms; use fit_ar_errors")
    d = build_design(spec, data, sample)
    return ols_arrays(d.y, d.X, d.names, sample=d.sample, dependent=d.dependent,
                      has_constant=spec.has_constant, spec=spec, data=data)


# --------------------------------------------------------------- diagnostics

def jarque_bera(residuals) -> DiagnosticReport:
    e = np.asarray(residuals, dtype=float)
    n = e.size
    if n < 4:
        raise ValueError("Jarque-Bera needs at least 4 observations")
    c = e - e.mean()
    m2 = float(np.mean(c**2))
    if m2 == 0:
        raise NumericalError("Jarque-Bera undefined for zero-variance residuals")
    skew = float(np.mean(c**3)) / m2**1.5
    kurt = float(np.mean(c**4)) / m2**2
    jb = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    p = tail_prob(ChiSquare(2), jb)
    return DiagnosticReport(
        "Jarque-Bera",
        (("Jarque-Bera", jb, "Chi-Square(2)", p),
         ("Skewness", skew, "", math.nan),
         ("Kurtosis", kurt, "", math.nan)),
        verdict="normality rejected at 5%" if p < 0.05 else "normality not rejected at 5%")


def glejser(fit: RegressionSummary) -> DiagnosticReport:
    """Regress |residuals| on the fit's regressors."""
    absres = np.abs(fit.residuals)
    X = fit.X
    names = fit.names[: X.shape[1]]
    aux = ols_arrays(absres, X, names, sample=fit.sample, dependent="ARESID")
    n, q = aux.n, aux.k - 1
    if q < 1:
        raise ValueError("Glejser test needs at least one non-constant regressor")
    ess = float(np.sum((aux.fitted - absres.mean()) ** 2))
    s2 = fit.ssr / (fit.n - fit.k)
    scaled = ess / ((1.0 - 2.0 / math.pi) * s2)
    if np.ptp(absres) == 0 or aux.r2 <= 0:
        # nothing to explain
        f, pf, r2, scaled = 0.0, 1.0, 0.0, 0.0
    else:
        f = aux.f_stat if math.isfinite(aux.f_stat) else 0.0
        pf = aux.prob_f if math.isfinite(aux.prob_f) else 1.0
        r2 = aux.r2
    obs_r2 = n * r2
    return DiagnosticReport(
        "Heteroskedasticity Test: Glejser",
        (("F-statistic", f, f"F({q},{n - aux.k})", pf),
         ("Obs*R-squared", obs_r2, f"Chi-Square({q})", tail_prob(ChiSquare(q), obs_r2)),
         ("Scaled explained SS", scaled, f"Chi-Square({q})", tail_prob(ChiSquare(q), scaled))),
        verdict=("homoskedasticity rejected at 5%" if pf < 0.05
                 else "homoskedasticity not rejected at 5%"),
        note="Decision rule: a small p-value is evidence OF heteroskedasticity.",
        test_equation=aux)


def ramsey_reset(fit: RegressionSummary, powers: int = 2) -> DiagnosticReport:
    """Append FITTED^2..FITTED^powers and test them jointly.

    AR-error fits are re-estimated with the same AR structure.  Their FITTED
    series is y - e on the estimation sample; the pre-sample rows needed as AR
    lags carry the structural fit X*beta, so the test sample is unchanged.
    """
    from .ar_errors import ArFit, fit_ar_errors  # circular at import time

    if powers < 2:
        raise ValueError("RESET needs powers >= 2")
    if fit.spec is None or fit.data is None:
        raise ValueError("RESET needs a fit with its specification and data attached")
    spec, data = fit.spec, fit.data
    base = build_design(spec.without_ar(), data)
    beta = fit.params[: base.X.shape[1]]
    struct = base.X @ beta
    if isinstance(fit, ArFit):
        struct[fit.sample.first - base.sample.first:][: fit.n] = fit.fitted
    if np.ptp(struct) == 0 or np.allclose(fit.residuals, 0, atol=1e-12 * np.abs(fit.y).max()):
        raise NumericalError("RESET undefined for a perfect or constant fit")
    from .eqspec import SeriesRef
    ext = data
    terms = list(spec.regressors)
    for m in range(2, powers + 1):
        nm = f"FITTED^{m}"
        ext = ext.with_series(QuarterlySeries(nm, base.sample.first, struct**m), overwrite=True)
        terms.append(SeriesRef(nm))
    aug = EquationSpec(spec.dependent, tuple(terms), spec.ar_orders)
    if isinstance(fit, ArFit):
        sample = fit.sample
        unres = fit_ar_errors(aug, ext, sample=sample)
    else:
        unres = fit_ols(aug, ext, sample=fit.sample)
    q = powers - 1
    dfree = unres.n - unres.k
    f = ((fit.ssr - unres.ssr) / q) / (unres.ssr / dfree)
    lr = 2.0 * (unres.log_likelihood - fit.log_likelihood)
    pf = tail_prob(FDist(q, dfree), f)
    return DiagnosticReport(
        "Ramsey RESET Test",
        (("F-statistic", f, f"F({q},{dfree})", pf),
         ("Log likelihood ratio", lr, f"Chi-Square({q})", tail_prob(ChiSquare(q), lr))),
        verdict="misspecification detected at 5%" if pf < 0.05 else "no misspecification at 5%",
        test_equation=unres)


# --------------------------------------------------------- recursive residuals

@dataclass(frozen=True)
class RecursiveResiduals:
    periods: list
    residuals: np.ndarray      # one-step-ahead prediction errors y_t - x_t'b_{t-1}
    standardized: np.ndarray   # divided by sqrt(1 + x_t'(X'X)^-1 x_t)
    band: np.ndarray           # 2 * standard error of the prediction error (nan if undefined)
    flagged: list
    skipped: Optional[PeriodSpan] = None

    def flagged_years(self) -> set[int]:
        return {p.year for p in self.flagged}


def recursive_residuals(spec: EquationSpec, data: Dataset,
                        sample: PeriodSpan | None = None) -> RecursiveResiduals:
    """Standardized recursive residuals by rank-one least-squares updating.

    The recursion starts from the first block of observations whose design has
    full column rank; earlier rows are reported as ``skipped``.
    """
    d = build_design(spec.without_ar(), data, sample)
    X, y = d.X, d.y
    n, k = X.shape
    if n <= k + 1:
        raise NumericalError(f"{n} observations, need more than {k + 1}")
    start = k
    while start <= n:
        if np.linalg.matrix_rank(X[:start]) == k:
            break
        start += 1
    if start >= n:
        raise NumericalError("design never reaches full rank")
    skipped = PeriodSpan(d.sample.first, d.sample.first.shift(start - k - 1)) if start > k else None

    P = np.linalg.inv(X[:start].T @ X[:start])
    b = P @ X[:start].T @ y[:start]
    ssr = float(np.sum((y[:start] - X[:start] @ b) ** 2))
    raw, std, band, periods, flagged = [], [], [], [], []
    for t in range(start, n):
        x = X[t]
        f = 1.0 + x @ P @ x
        v = y[t] - x @ b
        w = v / math.sqrt(f)
        dof = t - k
        s = math.sqrt(ssr / dof) if dof > 0 and ssr > 0 else math.nan
        bw = 2.0 * s * math.sqrt(f) if dof > 0 else math.nan
        p = d.sample.first.shift(t)
        periods.append(p)
        raw.append(v)
        std.append(w)
        band.append(bw)
        if math.isfinite(bw) and abs(v) > bw:
            flagged.append(p)
        # rank-one update of (X'X)^-1 and b
        Px = P @ x
        P = P - np.outer(Px, Px) / f
        b = b + Px * v / f
        ssr += w * w
    return RecursiveResiduals(periods, np.array(raw), np.array(std), np.array(band),
                              flagged, skipped)


# ------------------------------------------------------------ break search

@dataclass(frozen=True)
class BreakSearchResult:
    breaks: tuple            # one QuarterPeriod per dummy
    score: float
    fit: RegressionSummary


def search_break_quarters(spec: EquationSpec, data: Dataset, candidates,
                          names=("D1", "D2", "D3"), target=None) -> BreakSearchResult:
    """Exhaustive search over step-dummy break quarters.

    ``candidates`` holds one iterable of quarters per dummy name.  Without a
    ``target`` the combination with the smallest SSR wins; with a target
    (coefficient name -> value) the largest relative deviation is minimized.
    """
    import itertools

    from .series import step_dummy

    names = tuple(names)
    pools = [list(c) for c in candidates]
    if len(pools) != len(names):
        raise ValueError("need one candidate list per dummy name")
    best = None
    for combo in itertools.product(*pools):
        d = data
        for nm, q in zip(names, combo):
            d = d.with_series(step_dummy(d.range, q, nm), overwrite=True)
        try:
            fit = fit_ols(spec, d)
        except NumericalError:
            continue
        if target is None:
            score = fit.ssr
        else:
            score = max(abs(fit[n].estimate - v) / abs(v) for n, v in target.items())
        if best is None or score < best.score:
            best = BreakSearchResult(tuple(combo), score, fit)
    if best is None:
        raise NumericalError("no admissible break combination")
    return best
