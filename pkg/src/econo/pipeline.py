"""Analysis steps shared by the command-line subcommands and the full replay."""
from __future__ import annotations

from . import tables
from .ar_errors import expand_fisher, fit_ar_errors
from .config import PipelineConfig
from .eqspec import Constant, parse_equation, resolve
from .ols import fit_ols, glejser, jarque_bera, ramsey_reset, recursive_residuals
from .report import Report
from .series import Dataset, PeriodSpan, QuarterlySeries, common_span
from .unit_root import HacConfig, engle_granger, phillips_perron
from .var import (MonteCarloBands, cholesky_irf, companion_roots, fevd, fit_var,
                  granger_block_exogeneity, lag_order_selection, stability_roots)


def fit_equation(text: str, data: Dataset, cfg: PipelineConfig):
    spec = parse_equation(text)
    if spec.ar_orders:
        return fit_ar_errors(spec, data, cfg.sample)
    return fit_ols(spec, data, cfg.sample)


def ols_step(text: str, data: Dataset, cfg: PipelineConfig, diagnostics: bool = False,
             title: str | None = None) -> Report:
    fit = fit_equation(text, data, cfg)
    rep = tables.regression_report(fit, title or f"Equation: {text}")
    if diagnostics:
        for diag in (jarque_bera(fit.residuals), glejser(fit), ramsey_reset(fit)):
            rep.extend(tables.diagnostic_report(diag))
    return rep


def pp_step(series: str, data: Dataset, cfg: PipelineConfig) -> Report:
    # accepts plain names and terms such as D(PIB)
    term = parse_equation(series).dependent
    s = resolve(term, data)
    if cfg.sample is not None:
        first = max(s.start, cfg.sample.first)
        last = min(s.end, cfg.sample.last)
        s = QuarterlySeries(s.name, first, s.window(PeriodSpan(first, last)))
    return tables.unit_root_report(phillips_perron(s, "constant", HacConfig(bandwidth=cfg.bandwidth)))


def coint_step(text: str, data: Dataset, cfg: PipelineConfig, label: str = "RESID") -> Report:
    fit = fit_ols(parse_equation(text), data, cfg.sample)
    rep = engle_granger(fit, HacConfig(bandwidth=cfg.bandwidth), name=label)
    return tables.unit_root_report(rep, f"Engle-Granger (Phillips-Perron) test on residuals of: {text}")


def fisher_step(text: str, data: Dataset, cfg: PipelineConfig) -> Report:
    fit = fit_equation(text, data, cfg)
    spec = parse_equation(text)
    exp = {str(t): expand_fisher(fit[str(t)].estimate, cfg.fisher_L)
           for t in spec.regressors if not isinstance(t, Constant)}
    rep = tables.regression_report(fit, f"Equation: {text}")
    rep.extend(tables.fisher_report(exp))
    return rep


def recursive_step(text: str, data: Dataset, cfg: PipelineConfig) -> Report:
    return tables.recursive_report(recursive_residuals(parse_equation(text), data, cfg.sample))


def var_model(data: Dataset, cfg: PipelineConfig, lags: int | None = None):
    return fit_var(data, cfg.var_variables, lags or cfg.var_lags, cfg.sample)


def var_step(data, cfg) -> Report:
    return tables.var_report(var_model(data, cfg))


def select_lag_step(data, cfg) -> Report:
    rows = lag_order_selection(data, cfg.var_variables, cfg.max_lag)
    span = common_span(data[v] for v in cfg.var_variables)
    return tables.lag_selection_report(rows, cfg.var_variables, len(span) - cfg.max_lag)


def stability_step(data, cfg) -> Report:
    model = var_model(data, cfg)
    mod, stable = stability_roots(model)
    return tables.stability_report(mod, companion_roots(model), stable)


def granger_step(data, cfg) -> Report:
    return tables.granger_report(granger_block_exogeneity(var_model(data, cfg), cfg.target), cfg.target)


def irf_step(data, cfg, bands: bool = True) -> Report:
    model = var_model(data, cfg)
    mc = None
    if bands:
        if cfg.seed is None:
            raise ValueError("a Monte Carlo seed is required for IRF bands")
        mc = MonteCarloBands(cfg.replications, cfg.seed)
    irf = cholesky_irf(model, cfg.horizon, cfg.ordering, mc)
    return tables.irf_report(irf)


def fevd_step(data, cfg) -> Report:
    return tables.fevd_report(fevd(var_model(data, cfg), cfg.horizon, cfg.ordering))


def replay(data: Dataset, cfg: PipelineConfig) -> Report:
    """The full sequence: levels regression, unit roots, cointegration, break
    dummies, AR-error fits, Fisher lags, then the VAR suite."""
    out = Report("Replay", [f"Dataset: {cfg.dataset}",
                            f"Monte Carlo seed: {cfg.seed}, replications: {cfg.replications}",
                            "Breaks: " + " ".join(f"{n}={q}" for n, q in cfg.breaks)])
    out.extend(ols_step(cfg.baseline_eq, data, cfg, title="Baseline regression in levels"))
    out.extend(recursive_step(cfg.baseline_eq, data, cfg))
    for name in cfg.unit_root_series:
        out.extend(pp_step(name, data, cfg))
    for name in cfg.unit_root_series:
        out.extend(pp_step(f"D({name})", data, cfg))
    out.extend(coint_step(cfg.baseline_eq, data, cfg, "RESID01"))
    out.extend(ols_step(cfg.breaks_eq, data, cfg, diagnostics=True, title="Regression with break dummies"))
    out.extend(coint_step(cfg.breaks_eq, data, cfg, "RESID02"))
    out.extend(ols_step(cfg.ar1_eq, data, cfg, title="AR(1) error correction"))
    out.extend(fisher_step(cfg.fisher_eq, data, cfg))
    out.extend(fisher_step(cfg.ar2_eq, data, cfg))
    fit = fit_equation(cfg.ar2_eq, data, cfg)
    for diag in (jarque_bera(fit.residuals), glejser(fit), ramsey_reset(fit)):
        out.extend(tables.diagnostic_report(diag))
    out.extend(select_lag_step(data, cfg))
    model = var_model(data, cfg)
    out.extend(tables.var_report(model))
    mod, stable = stability_roots(model)
    out.extend(tables.stability_report(mod, companion_roots(model), stable))
    mc = MonteCarloBands(cfg.replications, cfg.seed) if cfg.seed is not None else None
    out.extend(tables.irf_report(cholesky_irf(model, cfg.horizon, cfg.ordering, mc)))
    out.extend(tables.fevd_report(fevd(model, cfg.horizon, cfg.ordering)))
    out.extend(tables.granger_report(granger_block_exogeneity(model, cfg.target), cfg.target))
    return out
