"""Pipeline configuration read from an INI file."""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .eqspec import Constant, SpecSyntaxError, UnresolvedName, generate, parse_equation, resolve
from .series import (LOCALES, Dataset, PeriodSpan, QuarterPeriod, SeriesError, load_dataset,
                     step_dummy)

ENV_VAR = "ECONO_CONFIG"
BUILTIN_PREFIX = "builtin:"


def _fisher_line(target: str, source: str, L: int = 7) -> str:
    terms = [f"{L + 1}*{source}"] + [f"{L + 1 - i}*{source}(-{i})" for i in range(1, L + 1)]
    return f"{target} = " + " + ".join(terms)


DEFAULT_BREAKS = (("D1", QuarterPeriod(2012, 1)), ("D2", QuarterPeriod(2017, 1)),
                  ("D3", QuarterPeriod(2021, 1)))
DEFAULT_GENERATE = ("CF = CAPITALFIJO", _fisher_line("ZCF", "CF"), _fisher_line("ZIED", "IED"))


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class PipelineConfig:
    dataset: str = "builtin:anexo1.csv"
    numeric_locale: str = "comma-decimal"
    sample: PeriodSpan | None = None
    generate: tuple = DEFAULT_GENERATE   # GENR lines in order
    breaks: tuple = DEFAULT_BREAKS       # (name, QuarterPeriod) pairs
    baseline_eq: str = "PIB C CAPITALFIJO IED"
    breaks_eq: str = "PIB C CAPITALFIJO IED D1 D2 D3"
    ar1_eq: str = "PIB C CAPITALFIJO IED D1 D2 D3 AR(1)"
    fisher_eq: str = "PIB C ZCF ZIED"
    ar2_eq: str = "PIB C ZCF ZIED AR(1) AR(2)"
    fisher_L: int = 7
    unit_root_series: tuple = ("PIB", "CAPITALFIJO", "IED")
    bandwidth: int | None = None
    var_variables: tuple = ("PIB", "CF", "IED")
    var_lags: int = 5
    max_lag: int = 7
    ordering: tuple = ("CF", "IED", "PIB")
    horizon: int = 10
    seed: int | None = 20230801
    replications: int = 1000
    target: str = "PIB"
    output_format: str = "text"
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.numeric_locale not in LOCALES:
            raise ConfigError(f"numeric_locale must be one of {LOCALES}")
        if self.output_format not in ("text", "csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        for name in ("var_lags", "horizon", "replications"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.max_lag < 0 or self.fisher_L < 0:
            raise ConfigError("max_lag and fisher_L must be non-negative")
        if self.bandwidth is not None and self.bandwidth < 0:
            raise ConfigError("bandwidth must be non-negative")
        if sorted(v.upper() for v in self.ordering) != sorted(v.upper() for v in self.var_variables):
            raise ConfigError("ordering must be a permutation of the VAR variables")

    def override(self, **kw) -> "PipelineConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def dataset_path(self):
        if self.dataset.startswith(BUILTIN_PREFIX):
            return resources.files("econo.data").joinpath(self.dataset[len(BUILTIN_PREFIX):])
        p = Path(self.dataset)
        if not p.is_absolute() and self.source:
            p = Path(self.source).parent / p
        return p


def _words(text: str) -> tuple:
    return tuple(text.replace(",", " ").split())


def _int(sec, key, default):
    raw = sec.get(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key} must be an integer, got {raw!r}") from None


def load_config(path: str | os.PathLike | None = None) -> PipelineConfig:
    """Read a config file; ``None`` falls back to $ECONO_CONFIG, then to defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str    # keep series names as written
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    known = {"data", "generate", "breaks", "equations", "unit_root", "var", "montecarlo", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    kw: dict = {"source": str(path)}
    if cp.has_section("data"):
        d = cp["data"]
        kw["dataset"] = d.get("path", PipelineConfig.dataset)
        kw["numeric_locale"] = d.get("numeric_locale", PipelineConfig.numeric_locale)
        if d.get("sample"):
            try:
                kw["sample"] = PeriodSpan.parse(d["sample"])
            except (SeriesError, ValueError) as exc:
                raise ConfigError(f"[data] sample: {exc}") from None
    if cp.has_section("generate"):
        kw["generate"] = tuple(f"{k} = {v}" for k, v in cp["generate"].items())
    if cp.has_section("breaks"):
        try:
            kw["breaks"] = tuple((k, QuarterPeriod.parse(v)) for k, v in cp["breaks"].items())
        except (SeriesError, ValueError) as exc:
            raise ConfigError(f"[breaks]: {exc}") from None
    if cp.has_section("equations"):
        e = cp["equations"]
        for key in ("baseline", "breaks", "ar1", "fisher", "ar2"):
            if key in e:
                kw[f"{key}_eq"] = e[key]
        kw["fisher_L"] = _int(e, "fisher_L", PipelineConfig.fisher_L)
    if cp.has_section("unit_root"):
        u = cp["unit_root"]
        if "series" in u:
            kw["unit_root_series"] = _words(u["series"])
        bw = u.get("bandwidth", "auto").strip().lower()
        kw["bandwidth"] = None if bw in ("", "auto") else _int(u, "bandwidth", None)
    if cp.has_section("var"):
        v = cp["var"]
        if "variables" in v:
            kw["var_variables"] = _words(v["variables"])
        if "ordering" in v:
            kw["ordering"] = _words(v["ordering"])
        kw["var_lags"] = _int(v, "lags", PipelineConfig.var_lags)
        kw["max_lag"] = _int(v, "max_lag", PipelineConfig.max_lag)
        kw["horizon"] = _int(v, "horizon", PipelineConfig.horizon)
        kw["target"] = v.get("target", PipelineConfig.target)
    if cp.has_section("montecarlo"):
        m = cp["montecarlo"]
        kw["seed"] = _int(m, "seed", None)
        kw["replications"] = _int(m, "replications", PipelineConfig.replications)
    if cp.has_section("output"):
        kw["output_format"] = cp["output"].get("format", "text")
    try:
        return PipelineConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def build_dataset(cfg: PipelineConfig) -> Dataset:
    """Load the data, add break dummies, then run the GENR lines in order."""
    try:
        with resources.as_file(cfg.dataset_path()) as p:
            data = load_dataset(p, cfg.numeric_locale)
    except FileNotFoundError as exc:
        raise ConfigError(f"dataset not found: {exc.filename or cfg.dataset}") from None
    try:
        for name, q in cfg.breaks:
            data = data.with_series(step_dummy(data.range, q, name))
        for line in cfg.generate:
            data = generate(data, line)
    except (SeriesError, SpecSyntaxError, UnresolvedName) as exc:
        raise ConfigError(f"generate section: {exc}") from None
    return data


def check_equations(cfg: PipelineConfig, data: Dataset) -> None:
    """Every name used by the configured equations must resolve."""
    for key in ("baseline_eq", "breaks_eq", "ar1_eq", "fisher_eq", "ar2_eq"):
        try:
            spec = parse_equation(getattr(cfg, key))
        except SpecSyntaxError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        for term in (spec.dependent, *spec.regressors):
            if isinstance(term, Constant):
                continue
            try:
                resolve(term, data)
            except UnresolvedName as exc:
                raise ConfigError(f"{key}: {exc.args[0]}") from None
