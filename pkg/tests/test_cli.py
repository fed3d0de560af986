import hashlib
import io
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from econo.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, run
from econo.config import ConfigError, PipelineConfig, build_dataset, load_config
from econo.series import PeriodSpan, QuarterPeriod

ROOT = Path(__file__).resolve().parents[1]
PAPER_INI = ROOT / "configs" / "paper.ini"
FIXTURE = ROOT / "tests" / "fixtures" / "replay_paper.sha256"


def _run(argv):
    buf = io.StringIO()
    rc = run(argv, stdout=buf)
    return rc, buf.getvalue()


@pytest.fixture
def toy_config(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(size=24)
    rows = ["obs;Y;X"] + [f"{2001 + i // 4}Q{i % 4 + 1};{2 + v:.4f};{v:.4f}".replace(".", ",")
                          for i, v in enumerate(x)]
    rows[3] = rows[3].split(";")[0] + ";5,0000;1,0000"
    (tmp_path / "toy.csv").write_text("\n".join(rows) + "\n")
    ini = tmp_path / "toy.ini"
    ini.write_text("[data]\npath = toy.csv\n\n[breaks]\n\n[generate]\nX2 = 2*X\n\n"
                   "[equations]\nbaseline = Y C X\nbreaks = Y C X\nar1 = Y C X AR(1)\n"
                   "fisher = Y C X\nar2 = Y C X AR(1)\n\n"
                   "[var]\nvariables = Y X\nordering = X Y\nlags = 1\nmax_lag = 2\ntarget = Y\n")
    return ini, [float(r.split(";")[1].replace(",", ".")) for r in rows[1:]]


# ---------------------------------------------------------------- subcommands

def test_pp_reports_reference_statistic():
    rc, out = _run(["pp", "--series", "PIB", "--config", str(PAPER_INI)])
    assert rc == EXIT_OK
    line = next(s for s in out.splitlines() if s.startswith("Phillips-Perron test statistic"))
    assert line.split()[-2:] == ["1.789142", "0.9997"]


def test_ols_mean_only(toy_config):
    ini, y = toy_config
    rc, out = _run(["ols", "--eq", "Y C", "--config", str(ini), "--format", "json"])
    assert rc == EXIT_OK
    rep = json.loads(out)
    coef = next(r for t in rep["tables"] for r in t["rows"] if r[0] == "C")
    assert coef[1] == pytest.approx(np.mean(y), rel=1e-12)


@pytest.mark.parametrize("cmd", ["ols", "coint", "ar", "fisher", "recursive", "var", "select-lag",
                                 "granger", "irf", "fevd", "stability"])
def test_every_subcommand_runs_on_toy_data(toy_config, cmd):
    ini, _ = toy_config
    argv = [cmd, "--config", str(ini)]
    if cmd == "irf":
        argv += ["--replications", "20"]
    rc, out = _run(argv)
    assert rc == EXIT_OK, out
    assert out.strip()


def test_rank_deficient_equation_exits_2(toy_config, capsys):
    ini, _ = toy_config
    rc, _ = _run(["ols", "--eq", "Y C X X2", "--config", str(ini)])
    assert rc == EXIT_NUMERICAL
    err = capsys.readouterr().err
    assert "numerical failure in econo.ols" in err and "X2" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["ols", "--eq", "PIB C FOO"],
    ["ols", "--eq", "PIB C (IED"],
    ["pp"],
    ["var", "--sample", "2009Q5 2010Q1"],
    ["irf", "--ordering", "PIB CF"],
    ["var", "--lags", "0"],
    ["ols", "--config", "/nonexistent/econo.ini"],
])
def test_usage_and_config_errors_exit_3(argv, capsys):
    rc, out = _run(argv)
    assert rc == EXIT_CONFIG
    assert out == ""
    assert capsys.readouterr().err.startswith("econo: ")


def test_out_file_and_formats(tmp_path):
    target = tmp_path / "var.csv"
    rc, out = _run(["var", "--format", "csv", "--out", str(target)])
    assert rc == EXIT_OK and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "table,row,column,value"
    rc, out = _run(["var", "--format", "json"])
    assert json.loads(out)["title"]


def test_env_var_selects_config(toy_config, monkeypatch):
    ini, _ = toy_config
    monkeypatch.setenv("ECONO_CONFIG", str(ini))
    rc, out = _run(["ols"])
    assert rc == EXIT_OK
    assert "Dependent Variable: Y" in out


def test_sample_flag_restricts_estimation():
    rc, out = _run(["ols", "--eq", "PIB C IED", "--sample", "2010Q1 2019Q4"])
    assert rc == EXIT_OK
    assert "Included observations: 40" in out


# ---------------------------------------------------------------- replay

def test_replay_matches_golden_digest_quickly():
    t0 = time.perf_counter()
    rc, out = _run(["replay-paper", "--config", str(PAPER_INI)])
    elapsed = time.perf_counter() - t0
    assert rc == EXIT_OK
    assert elapsed < 5.0
    assert hashlib.sha256(out.encode("utf-8")).hexdigest() == FIXTURE.read_text().strip()


def test_replay_is_deterministic_and_seed_sensitive():
    a = _run(["replay-paper"])[1]
    b = _run(["replay-paper"])[1]
    c = _run(["replay-paper", "--seed", "7"])[1]
    assert a == b
    assert a != c


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "econo.cli", "stability"], capture_output=True,
                          text=True, timeout=60)
    assert proc.returncode == 0
    assert "1.064" in proc.stdout


# ---------------------------------------------------------------- config

def test_reference_config_equals_defaults():
    cfg = load_config(PAPER_INI)
    assert cfg == PipelineConfig()


def test_config_overrides_and_validation():
    cfg = PipelineConfig().override(var_lags=3, horizon=None)
    assert cfg.var_lags == 3 and cfg.horizon == 10
    with pytest.raises(ConfigError):
        PipelineConfig(ordering=("CF", "PIB"))
    with pytest.raises(ConfigError):
        PipelineConfig(output_format="xml")
    with pytest.raises(ConfigError):
        PipelineConfig().override(replications=0)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[nonsense]\na = 1\n")
    with pytest.raises(ConfigError, match="unknown sections"):
        load_config(bad)
    bad.write_text("[var]\nlags = five\n")
    with pytest.raises(ConfigError, match="lags"):
        load_config(bad)
    bad.write_text("[breaks]\nD1 = 2012Q7\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    bad.write_text("[data]\npath = missing.csv\n")
    with pytest.raises(ConfigError, match="dataset not found"):
        build_dataset(load_config(bad))


def test_build_dataset_adds_breaks_and_generated_series():
    data = build_dataset(PipelineConfig())
    assert data.range == PeriodSpan(QuarterPeriod(2008, 1), QuarterPeriod(2023, 1))
    d1 = data["D1"].values
    assert d1[:16].sum() == 0 and d1[16:].min() == 1
    assert np.array_equal(data["CF"].values, data["CAPITALFIJO"].values)
    # seven lags are consumed by the Fisher construction
    assert data["ZCF"].start == QuarterPeriod(2009, 4)
    assert len(data["ZCF"].values) == 54 and np.isfinite(data["ZCF"].values).all()
