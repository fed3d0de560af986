"""Build :class:`Report` objects from estimation results."""
from __future__ import annotations

import math

import numpy as np

from .ar_errors import ArFit, FisherLagExpansion
from .ols import DiagnosticReport, RecursiveResiduals, RegressionSummary
from .report import Report, Table
from .unit_root import UnitRootReport
from .var import FevdTable, GrangerRow, ImpulseResponseSet, LagSelectionRow, VarModel

STAT_ROWS = (
    ("R-squared", "r2"), ("Adjusted R-squared", "adj_r2"), ("S.E. of regression", "se_regression"),
    ("Sum squared resid", "ssr"), ("Log likelihood", "log_likelihood"), ("F-statistic", "f_stat"),
    ("Prob(F-statistic)", "prob_f"), ("Mean dependent var", "mean_dep"),
    ("S.D. dependent var", "sd_dep"), ("Akaike info criterion", "aic"),
    ("Schwarz criterion", "sc"), ("Hannan-Quinn criter.", "hq"), ("Durbin-Watson stat", "dw"),
)


def _root_text(z: complex) -> str:
    def short(v):
        s = f"{v:.2f}"
        return s.replace("0.", ".", 1) if s.startswith(("0.", "-0.")) else s
    if abs(z.imag) < 1e-12:
        return short(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{short(z.real)}{sign}{short(abs(z.imag))}i"


def regression_report(fit: RegressionSummary, title: str = "Least Squares") -> Report:
    ar = isinstance(fit, ArFit) and fit.ar_orders
    meta = [f"Dependent Variable: {fit.dependent}",
            f"Method: {fit.method}",
            f"Sample (adjusted): {fit.sample}" if fit.sample is not None else "Sample: n/a",
            f"Included observations: {fit.n} after adjustments"]
    if ar:
        verb = "achieved" if fit.converged else "not achieved"
        meta.append(f"Convergence {verb} after {fit.iterations} iterations")
    coef = Table(None, ["Coefficient", "Std. Error", "t-Statistic", "Prob."],
                 ["num", "num", "num", "prob"], label_header="Variable")
    for c in fit.coefficients:
        coef.add(c.name, c.estimate, c.std_error, c.t_stat, c.p_value)
    stats = Table(None, ["Value"], ["num"])
    for label, attr in STAT_ROWS:
        stats.add(label, getattr(fit, attr), kind="prob" if label.startswith("Prob") else None)
    footer = []
    if ar:
        footer.append("Inverted AR Roots  " + "  ".join(_root_text(z) for z in fit.inverted_roots))
        if fit.nonstationary_flag:
            footer.append("Estimated AR process is nonstationary")
    return Report(title, meta, [coef, stats], footer)


def diagnostic_report(rep: DiagnosticReport) -> Report:
    t = Table(None, ["Statistic", "Distribution", "Prob."], ["num", "text", "prob"])
    for label, value, dist, p in rep.statistics:
        t.add(label, value, dist, None if not math.isfinite(p) else p)
    footer = [s for s in (rep.verdict and f"Verdict: {rep.verdict}", rep.note) if s]
    return Report(rep.test, [], [t], footer)


def unit_root_report(rep: UnitRootReport, title: str | None = None) -> Report:
    how = "Newey-West automatic" if rep.automatic_bandwidth else "Fixed"
    meta = [f"Null Hypothesis: {rep.series} has a unit root",
            "Exogenous: Constant",
            f"Bandwidth: {rep.bandwidth_used} ({how} using Bartlett kernel)",
            f"Included observations: {rep.n_used} after adjustments"]
    t = Table(None, ["Adj. t-Stat", "Prob.*"], ["num", "prob"])
    t.add("Phillips-Perron test statistic", rep.adj_t_stat, rep.p_value)
    t.add("Test critical values:", None, None)
    for label, v in (("1% level", rep.crit_1), ("5% level", rep.crit_5), ("10% level", rep.crit_10)):
        t.add(label, v, None)
    t.notes.append("*MacKinnon one-sided p-values (finite-sample response surface).")
    var = Table(None, ["Value"], ["num"])
    var.add("Residual variance (no correction)", rep.resid_variance)
    var.add("HAC corrected variance (Bartlett kernel)", rep.hac_variance)
    footer = [f"Verdict: {rep.verdict}"] if rep.verdict else []
    return Report(title or f"Phillips-Perron Unit Root Test on {rep.series}", meta, [t, var], footer)


def fisher_report(expansions: dict[str, FisherLagExpansion]) -> Report:
    names = list(expansions)
    t = Table(None, names, ["num"] * len(names), label_header="Lag")
    L = max(e.L for e in expansions.values()) if expansions else -1
    for i in range(L + 1):
        t.add(f"t-{i}", *(e.implied[i] if i <= e.L else None for e in expansions.values()))
    meta = [f"{n}: delta = {e.delta!r}, L = {e.L}" for n, e in expansions.items()]
    return Report("Fisher arithmetic lag: implied coefficients (L+1-i)*delta", meta, [t])


def recursive_report(rr: RecursiveResiduals) -> Report:
    t = Table(None, ["Recursive residual", "+/- 2 S.E.", "Outside"], ["num", "num", "text"],
              label_header="Period")
    flagged = set(rr.flagged)
    for p, v, b in zip(rr.periods, rr.residuals, rr.band):
        t.add(str(p), v, None if not math.isfinite(b) else b, "*" if p in flagged else "")
    meta = [f"Flagged periods: {' '.join(str(p) for p in rr.flagged) or 'none'}"]
    if rr.skipped is not None:
        meta.append(f"Skipped (rank-deficient start): {rr.skipped}")
    return Report("Recursive Residuals", meta, [t])


def var_report(model: VarModel) -> Report:
    meta = ["Vector Autoregression Estimates",
            f"Sample (adjusted): {model.sample}",
            f"Included observations: {model.nobs} after adjustments",
            "Standard errors in ( ) & t-statistics in [ ]"]
    cols = list(model.variables)
    t = Table(None, cols, ["num"] * len(cols))
    for r, name in enumerate(model.regressor_names):
        t.add(name, *(eq.coefficients[r].estimate for eq in model.equations))
        t.add("", *(eq.coefficients[r].std_error for eq in model.equations), kind="paren")
        t.add("", *(eq.coefficients[r].t_stat for eq in model.equations), kind="bracket")
    eqs = Table(None, cols, ["num"] * len(cols))
    for label, attr in (("R-squared", "r2"), ("Adj. R-squared", "adj_r2"), ("Sum sq. resids", "ssr"),
                        ("S.E. equation", "se_regression"), ("F-statistic", "f_stat"),
                        ("Log likelihood", "log_likelihood"), ("Akaike AIC", "aic"),
                        ("Schwarz SC", "sc"), ("Mean dependent", "mean_dep"), ("S.D. dependent", "sd_dep")):
        eqs.add(label, *(getattr(eq, attr) for eq in model.equations))
    sysw = Table(None, ["Value"], ["num"])
    sysw.add("Determinant resid covariance (dof adj.)", float(np.linalg.det(model.sigma_u)))
    sysw.add("Determinant resid covariance", float(np.linalg.det(model.sigma_u_ml)))
    sysw.add("Log likelihood", model.log_likelihood)
    sysw.add("Akaike information criterion", model.aic)
    sysw.add("Schwarz criterion", model.sc)
    sysw.add("Number of coefficients", model.k * model.m, kind="int")
    return Report("VAR Estimates", meta, [t, eqs, sysw])


def lag_selection_report(rows: list[LagSelectionRow], variables, nobs: int | None = None) -> Report:
    crit = ["LogL", "LR", "FPE", "AIC", "SC", "HQ"]
    t = Table(None, crit, ["num"] * len(crit), label_header="Lag")
    for i, r in enumerate(rows):
        t.add(str(r.lag), r.logl, "NA" if r.lr is None else r.lr, r.fpe, r.aic, r.sc, r.hq)
        for c in r.stars:
            t.mark(i, crit.index(c))
    meta = ["VAR Lag Order Selection Criteria",
            f"Endogenous variables: {' '.join(variables)}",
            "Exogenous variables: C"]
    if nobs is not None:
        meta.append(f"Included observations: {nobs}")
    footer = ["* indicates lag order selected by the criterion",
              "LR: sequential modified LR test statistic (each test at 5% level)",
              "FPE: Final prediction error", "AIC: Akaike information criterion",
              "SC: Schwarz information criterion", "HQ: Hannan-Quinn information criterion"]
    return Report("VAR Lag Order Selection", meta, [t], footer)


def stability_report(moduli: list[float], roots: list[complex], stable: bool) -> Report:
    t = Table(None, ["Modulus"], ["num"], label_header="Root")
    for z, m in zip(roots, moduli):
        t.add(_root_text(z), m)
    footer = (["No root lies outside the unit circle.", "VAR satisfies the stability condition."]
              if stable else
              ["Warning: at least one root lies outside the unit circle.",
               "VAR does not satisfy the stability condition."])
    return Report("Roots of Characteristic Polynomial", [], [t], footer)


def granger_report(rows: list[GrangerRow], target: str) -> Report:
    t = Table(None, ["Chi-sq", "df", "Prob."], ["num", "int", "prob"], label_header="Excluded")
    for r in rows:
        t.add(r.excluded, r.chi2, r.df, r.p_value)
    return Report("VAR Granger Causality/Block Exogeneity Wald Tests",
                  [f"Dependent variable: {target}"], [t])


def fevd_report(tables: dict[str, FevdTable], variables=None) -> Report:
    out = Report("Variance Decomposition", [])
    for name, ft in tables.items():
        if variables is not None and name.upper() not in {v.upper() for v in variables}:
            continue
        t = Table(f"Variance Decomposition of {name}:", ["S.E.", *ft.ordering],
                  ["num"] * (1 + len(ft.ordering)), label_header="Period")
        for h in range(ft.se.size):
            t.add(str(h + 1), ft.se[h], *ft.shares[h])
        out.tables.append(t)
    if tables:
        ordering = next(iter(tables.values())).ordering
        out.footer.append("Cholesky Ordering: " + " ".join(ordering))
    return out


def irf_report(irf: ImpulseResponseSet, responders=None) -> Report:
    out = Report("Impulse Responses (Cholesky, one S.D. innovations)", [])
    if irf.band is not None:
        out.meta.append(f"Bands: +/- 2 S.E. from {irf.replications} Monte Carlo replications, seed {irf.seed}")
    for name in irf.ordering:
        if responders is not None and name.upper() not in {v.upper() for v in responders}:
            continue
        cols, kinds = [], []
        for shock in irf.ordering:
            cols.append(shock)
            if irf.band is not None:
                cols.append(f"{shock} 2SE")
        kinds = ["num"] * len(cols)
        t = Table(f"Response of {name}:", cols, kinds, label_header="Period")
        for h in range(irf.horizon):
            cells = []
            for shock in irf.ordering:
                cells.append(irf.response(name, shock)[h])
                if irf.band is not None:
                    cells.append(irf.band_of(name, shock)[h])
            t.add(str(h + 1), *cells)
        out.tables.append(t)
    out.footer.append("Cholesky Ordering: " + " ".join(irf.ordering))
    return out
