"""Time-series econometrics workbench.

Quarterly series handling, an equation mini-language, least squares with
residual diagnostics, Phillips-Perron unit-root tests, regressions with AR
errors and vector autoregressions.
"""
from .ar_errors import ArFit, expand_fisher, fit_ar_errors, inverted_ar_roots
from .eqspec import build_design, generate, parse_equation
from .ols import (NumericalError, RegressionSummary, fit_ols, glejser, jarque_bera,
                  ramsey_reset, recursive_residuals)
from .series import Dataset, PeriodSpan, QuarterPeriod, QuarterlySeries, load_dataset
from .unit_root import HacConfig, engle_granger, mackinnon_critical_values, phillips_perron
from .var import cholesky_irf, fevd, fit_var, granger_block_exogeneity, lag_order_selection

__version__ = "0.1.0"
