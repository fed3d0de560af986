"""Regression with AR(p) errors by conditional nonlinear least squares."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .eqspec import EquationSpec, build_design
from .ols import NumericalError, RegressionSummary, fit_ols, lstsq_svd, summarize
from .series import Dataset, PeriodSpan, fisher_weights

log = logging.getLogger(__name__)

UNIT_ROOT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ArFit(RegressionSummary):
    ar_orders: tuple = ()
    ar_coefficients: tuple = ()
    inverted_roots: tuple = ()
    nonstationary_flag: bool = False
    iterations: int = 0
    converged: bool = True


def inverted_ar_roots(rho, orders=None) -> tuple[list[complex], bool]:
    """Roots of z^p - rho_1 z^(p-1) - ... - rho_p, i.e. the inverted AR roots.

    ``orders`` gives the lag attached to each coefficient (default 1..len(rho)).
    """
    rho = list(rho)
    if not rho:
        raise ValueError("need at least one AR coefficient")
    orders = list(orders) if orders is not None else list(range(1, len(rho) + 1))
    p = max(orders)
    poly = np.zeros(p + 1)
    poly[0] = 1.0
    for j, r in zip(orders, rho):
        poly[j] -= r
    roots = np.roots(poly) if p > 0 else np.array([])
    roots = sorted((complex(r) for r in roots), key=lambda z: (-abs(z), -z.real, -z.imag))
    nonstat = any(abs(z) >= 1.0 - UNIT_ROOT_TOL for z in roots)
    return roots, nonstat


@dataclass(frozen=True)
class FisherLagExpansion:
    delta: float
    L: int
    implied: tuple


def expand_fisher(delta: float, L: int = 7) -> FisherLagExpansion:
    """Implied distributed-lag coefficients (L+1-i)*delta for i = 0..L."""
    if L < 0:
        raise ValueError("L must be non-negative")
    return FisherLagExpansion(delta, L, tuple(float(w * delta) for w in fisher_weights(L)))


def _quasi_diff(y, X, beta, rho, orders, start):
    """Innovations e_t, structural residuals u and quasi-differenced X from row ``start``."""
    u = y - X @ beta
    e = u[start:].copy()
    Xq = X[start:].copy()
    n = y.size
    for j, r in zip(orders, rho):
        e -= r * u[start - j:n - j]
        Xq -= r * X[start - j:n - j]
    return e, u, Xq


def fit_ar_errors(spec: EquationSpec, data: Dataset, sample: PeriodSpan | None = None,
                  tol: float = 1e-12, max_iter: int = 500) -> ArFit:
    """Estimate y = X*beta + u, u_t = sum_j rho_j u_{t-j} + e_t.

    Gauss-Newton on the conditional sum of squared innovations (the first
    max(p) rows of the regressor range are used only as lags).  Starting
    values: beta from OLS of the equation without AR terms on its own maximal
    sample, rho from OLS of those residuals on their lags.

    When the equation has a constant, the intercept is only identified through
    (1 - sum rho); a step is never allowed to carry sum(rho) across 1, so the
    iterate stays on the side of the unit-root surface where it started.
    """
    if not spec.ar_orders:
        fit = fit_ols(spec, data, sample)
        return ArFit(**{f: getattr(fit, f) for f in fit.__dataclass_fields__})

    orders = list(spec.ar_orders)
    p = max(orders)
    eff = build_design(spec, data, sample)
    full = build_design(spec.without_ar(), data, PeriodSpan(eff.sample.first.shift(-p), eff.sample.last))
    y, X = full.y, full.X
    k = X.shape[1]
    n_eff = eff.y.size
    if n_eff <= k + len(orders):
        raise NumericalError(f"{n_eff} observations for {k + len(orders)} parameters")

    start_design = build_design(spec.without_ar(), data, sample)
    beta, _ = lstsq_svd(start_design.X, start_design.y, start_design.names)
    u = y - X @ beta
    lags = np.column_stack([u[p - j:y.size - j] for j in orders])
    rho, _ = lstsq_svd(lags, u[p:], [f"AR({j})" for j in orders])

    guard = spec.has_constant
    e, u, Xq = _quasi_diff(y, X, beta, rho, orders, p)
    ssr = float(e @ e)
    converged = False
    it = 0
    names = eff.names + [f"AR({j})" for j in orders]
    while it < max_iter:
        it += 1
        J = -np.column_stack([Xq] + [u[p - j:y.size - j] for j in orders])
        step, *_ = np.linalg.lstsq(J, -e, rcond=None)
        side = math.copysign(1.0, 1.0 - rho.sum())
        lam = 1.0
        accepted = False
        while lam > 1e-12:
            b_new = beta + lam * step[:k]
            r_new = rho + lam * step[k:]
            e_new, u_new, Xq_new = _quasi_diff(y, X, b_new, r_new, orders, p)
            s_new = float(e_new @ e_new)
            crosses = guard and math.copysign(1.0, 1.0 - r_new.sum()) != side
            if s_new <= ssr and not crosses:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            # no admissible descent direction left: first-order stationary
            converged = True
            break
        rel = abs(ssr - s_new) / ssr if ssr > 0 else 0.0
        beta, rho, e, u, Xq, ssr = b_new, r_new, e_new, u_new, Xq_new, s_new
        if rel < tol:
            converged = True
            break
    if not converged:
        log.warning("AR-error estimation did not converge after %d iterations", it)

    J = -np.column_stack([Xq] + [u[p - j:y.size - j] for j in orders])
    theta = np.concatenate([beta, rho])
    dfree = n_eff - theta.size
    try:
        _, jtj_inv = lstsq_svd(J, e, names)
    except NumericalError as exc:
        raise NumericalError(f"singular Jacobian at the AR solution: {exc}") from None
    cov = (ssr / dfree) * jtj_inv
    roots, nonstat = inverted_ar_roots(rho, orders)
    if nonstat:
        log.warning("estimated AR process is nonstationary (max inverted root %.4f)",
                    max(abs(z) for z in roots))
    return summarize(
        eff.y, eff.X, names, theta, cov, e, sample=eff.sample, dependent=eff.dependent,
        has_constant=spec.has_constant, spec=spec, data=data, summary_cls=ArFit,
        ar_orders=tuple(orders), ar_coefficients=tuple(float(r) for r in rho),
        inverted_roots=tuple(roots), nonstationary_flag=nonstat, iterations=it,
        converged=converged)


def sse_innovations(spec: EquationSpec, data: Dataset, theta, sample=None) -> float:
    """Sum of squared innovations at an arbitrary (beta, rho) vector."""
    orders = list(spec.ar_orders)
    p = max(orders)
    eff = build_design(spec, data, sample)
    full = build_design(spec.without_ar(), data, PeriodSpan(eff.sample.first.shift(-p), eff.sample.last))
    k = full.X.shape[1]
    theta = np.asarray(theta, dtype=float)
    e, _, _ = _quasi_diff(full.y, full.X, theta[:k], theta[k:], orders, p)
    return float(e @ e)
