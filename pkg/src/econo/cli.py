"""Command-line driver.

Exit codes: 0 success, 2 numerical failure, 3 configuration or usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, PipelineConfig, build_dataset, check_equations, load_config
from .eqspec import SpecSyntaxError, UnresolvedName
from .ols import NumericalError
from .report import FORMATS, render
from .series import PeriodSpan, SeriesError

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 2, 3

SUBCOMMANDS = ("ols", "pp", "coint", "ar", "fisher", "recursive", "var", "select-lag",
               "granger", "irf", "fevd", "stability", "replay-paper")

log = logging.getLogger("econo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (default: $ECONO_CONFIG)")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--sample", help="estimation span, e.g. '2009Q1 2023Q1'")

    p = _Parser(prog="econo", description="Time-series econometrics workbench.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def eq_cmd(name, help_, **kw):
        c = sub.add_parser(name, parents=[common], help=help_)
        c.add_argument("--eq", help="equation, e.g. 'PIB C CAPITALFIJO IED'", **kw)
        return c

    c = eq_cmd("ols", "least squares with the statistics panel")
    c.add_argument("--diagnostics", action="store_true", help="append Jarque-Bera, Glejser and RESET")
    c = sub.add_parser("pp", parents=[common], help="Phillips-Perron unit-root test")
    c.add_argument("--series", required=True, help="series name or term such as D(PIB)")
    c.add_argument("--det", default="constant", choices=("constant",))
    c.add_argument("--bandwidth", type=int, help="fixed Bartlett bandwidth (default: Newey-West)")
    c = eq_cmd("coint", "Engle-Granger test on regression residuals")
    c.add_argument("--bandwidth", type=int)
    c = eq_cmd("ar", "regression with AR error terms")
    c.add_argument("--diagnostics", action="store_true")
    c = eq_cmd("fisher", "Fisher arithmetic-lag expansion of an estimated equation")
    c.add_argument("--L", type=int, dest="fisher_L", help="lag length of the scheme")
    eq_cmd("recursive", "recursive residuals with +/- 2 S.E. bands")
    for name, help_ in (("var", "VAR estimates"), ("stability", "companion-matrix roots"),
                        ("granger", "block exogeneity Wald tests"), ("irf", "Cholesky impulse responses"),
                        ("fevd", "variance decomposition")):
        c = sub.add_parser(name, parents=[common], help=help_)
        c.add_argument("--lags", type=int, dest="var_lags")
        c.add_argument("--variables", help="VAR variables, space separated")
        if name in ("irf", "fevd"):
            c.add_argument("--ordering", help="Cholesky ordering, space separated")
            c.add_argument("--horizon", type=int)
        if name == "irf":
            c.add_argument("--seed", type=int)
            c.add_argument("--replications", type=int)
            c.add_argument("--no-bands", action="store_true")
        if name == "granger":
            c.add_argument("--target")
    c = sub.add_parser("select-lag", parents=[common], help="lag-order selection grid")
    c.add_argument("--max-lag", type=int, dest="max_lag")
    c.add_argument("--variables")
    c = sub.add_parser("replay-paper", parents=[common], help="run the whole pipeline")
    c.add_argument("--seed", type=int)
    c.add_argument("--replications", type=int)
    return p


def _config_from_args(args) -> PipelineConfig:
    cfg = load_config(args.config)
    kw = {}
    for key in ("var_lags", "max_lag", "horizon", "seed", "replications", "target", "fisher_L",
                "bandwidth"):
        kw[key] = getattr(args, key, None)
    if getattr(args, "format", None):
        kw["output_format"] = args.format
    if getattr(args, "sample", None):
        try:
            kw["sample"] = PeriodSpan.parse(args.sample)
        except SeriesError as exc:
            raise ConfigError(f"--sample: {exc}") from None
    if getattr(args, "variables", None):
        kw["var_variables"] = tuple(args.variables.split())
        if not getattr(args, "ordering", None):
            kw["ordering"] = kw["var_variables"]
    if getattr(args, "ordering", None):
        kw["ordering"] = tuple(args.ordering.split())
    return cfg.override(**kw)


def _dispatch(args, cfg: PipelineConfig, data):
    cmd = args.command
    eq = getattr(args, "eq", None)
    if cmd in ("ols", "coint", "ar", "fisher", "recursive") and not eq:
        eq = {"ols": cfg.baseline_eq, "coint": cfg.baseline_eq, "ar": cfg.ar2_eq,
              "fisher": cfg.ar2_eq, "recursive": cfg.baseline_eq}[cmd]
    if cmd in ("ols", "ar"):
        return pipeline.ols_step(eq, data, cfg, diagnostics=args.diagnostics)
    if cmd == "pp":
        return pipeline.pp_step(args.series, data, cfg)
    if cmd == "coint":
        return pipeline.coint_step(eq, data, cfg)
    if cmd == "fisher":
        return pipeline.fisher_step(eq, data, cfg)
    if cmd == "recursive":
        return pipeline.recursive_step(eq, data, cfg)
    if cmd == "var":
        return pipeline.var_step(data, cfg)
    if cmd == "select-lag":
        return pipeline.select_lag_step(data, cfg)
    if cmd == "stability":
        return pipeline.stability_step(data, cfg)
    if cmd == "granger":
        return pipeline.granger_step(data, cfg)
    if cmd == "irf":
        return pipeline.irf_step(data, cfg, bands=not args.no_bands)
    if cmd == "fevd":
        return pipeline.fevd_step(data, cfg)
    if cmd == "replay-paper":
        check_equations(cfg, data)
        return pipeline.replay(data, cfg)
    raise UsageError(f"unknown subcommand {cmd!r}")


def run(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        cfg = _config_from_args(args)
        data = build_dataset(cfg)
        report = _dispatch(args, cfg, data)
        payload = render(report, cfg.output_format)
    except UsageError as exc:
        print(f"econo: usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, SeriesError, SpecSyntaxError, UnresolvedName) as exc:
        msg = exc.args[0] if isinstance(exc, UnresolvedName) else str(exc)
        print(f"econo: configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"econo: numerical failure in {_where(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"econo: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        stdout.write(payload.decode("utf-8"))
        stdout.flush()
    return EXIT_OK


def _where(exc: BaseException) -> str:
    tb = exc.__traceback__
    module = "econo"
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", "")
        if name.startswith("econo.") and name not in ("econo.cli", "econo.pipeline"):
            module = name
        tb = tb.tb_next
    return module


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
