import csv
import json

import numpy as np
import pytest

from qspsim import cli
from qspsim import complexity as cx
from qspsim import experiments as ex
from qspsim.errors import ConfigError, ParseError, SynthesisError
from qspsim.qsp_engine import PhaseVector, block_value


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_parse_config_text():
    cfg = ex.parse_config_text("# header\nmodel.alpha = 1.5  # trailing\n\nmodel.beta=0.4\n")
    assert cfg == {"model.alpha": "1.5", "model.beta": "0.4"}
    with pytest.raises(ParseError) as exc:
        ex.parse_config_text("model.alpha = 1\nnot a pair\n")
    assert exc.value.line == 2


def test_build_config_layers_and_types():
    cfg = ex.build_config("heisenberg_ti", {"model.alpha": "2"}, ["poly.d_eece=20", "synthesis.strict=yes"], seed=7)
    assert cfg["model.alpha"] == 2.0 and isinstance(cfg["model.alpha"], float)
    assert cfg["poly.d_eece"] == 20
    assert cfg["synthesis.strict"] is True
    assert cfg["synthesis.seed"] == 7
    assert cfg["model.beta"] == 0.4
    with pytest.raises(ConfigError, match="unknown configuration key"):
        ex.build_config("heisenberg_ti", {"model.typo": "1"})
    with pytest.raises(ConfigError):
        ex.build_config("heisenberg_ti", {}, ["poly.d_cos=5"])
    with pytest.raises(ConfigError):
        ex.build_config("heisenberg_ti", {}, ["poly.d_sin=4"])
    with pytest.raises(ConfigError):
        ex.build_config("heisenberg_ti", {}, ["model.beta=1.5"])
    with pytest.raises(ConfigError):
        ex.build_config("heisenberg_ti", {}, ["model.alpha=abc"])
    with pytest.raises(ConfigError):
        ex.build_config("h2", {}, ["model.pauli_file=/no/such/file.pauli"])
    with pytest.raises(ConfigError):
        ex.build_config("heisenberg_ti", {"experiment": "h2"})


def test_config_header_is_sorted_and_round_trips():
    cfg = ex.build_config("heisenberg_td")
    lines = ex.config_header("heisenberg_td", cfg)
    assert lines[0] == "experiment = heisenberg_td"
    keys = [ln.split(" = ")[0] for ln in lines[1:]]
    assert keys == sorted(keys)
    again = ex.build_config("heisenberg_td", ex.parse_config_text("\n".join(lines)))
    assert again == cfg


def test_linear_fit_and_period_oracles():
    x = np.linspace(0, 12, 25)
    fit = ex.linear_fit(x, 0.01 * x + 0.002)
    assert fit["slope"] == pytest.approx(0.01) and fit["r2"] == pytest.approx(1.0)
    assert fit["end"] == pytest.approx(0.122)
    t = np.linspace(0, 0.3, 3001)
    y = 1 - np.cos(2 * np.pi * t / 0.12)
    assert ex.first_return_period(t, y) == pytest.approx(0.12, abs=1e-6)


def test_phase_cache_round_trip(tmp_path):
    from qspsim.algorithms import PhaseRequest

    req = PhaseRequest("cos", 1.0, 4, tolerance=1e-10)
    cache = ex.PhaseCache(tmp_path)
    pv, err, conv, key = cache.solve(req)
    assert conv and cache.misses == 1
    pv2, err2, conv2, key2 = cache.solve(req)
    assert cache.hits == 1 and key2 == key
    assert np.array_equal(pv.phases, pv2.phases) and err2 == err
    uncached, *_ = ex.PhaseCache(None).solve(req)
    assert np.array_equal(uncached.phases, pv.phases)
    # the warm-start chain is part of the key
    _, _, _, chained = cache.solve(req, chain=key)
    assert chained != key
    strict = ex.PhaseCache(None, strict=True)
    with pytest.raises(SynthesisError):
        strict.solve(PhaseRequest("eece", 20.0, 4, 0.3, 0.7, 1e-12, max_iter=50))


def run_cli(args):
    return cli.main(args)


def test_complexity_subcommand(tmp_path):
    out = tmp_path / "c.csv"
    assert run_cli(["complexity", "--out", str(out), "--no-cache"]) == cli.EXIT_OK
    text = out.read_text()
    assert "# model.alpha = 5.0" in text
    rows = read_csv(out)
    assert list(rows[0].keys()) == ["sweep", *cx.CSV_HEADER]
    point = [r for r in rows if r["sweep"] == "time" and r["algorithm"] == "os" and r["t"] == "5"]
    assert point[0]["queries"] == str(cx.n_os(0.02, 0.5, 5.0, 5.0))
    assert len(rows) == 4 * (19 + 13)
    out2 = tmp_path / "c2.csv"
    run_cli(["complexity", "--out", str(out2)])
    assert out2.read_bytes() == out.read_bytes()


def test_approx_subcommand(tmp_path):
    out = tmp_path / "a.json"
    assert run_cli(["approx", "--out", str(out), "--set", "cos.tau=0"]) == cli.EXIT_OK
    blob = json.loads(out.read_text())
    reports = {r["target"].split("(")[0]: r for r in blob["reports"]}
    assert reports["cos"]["epsilon_measured"] == 0
    assert reports["sign"]["epsilon_measured"] <= 0.01
    assert all(r["ok"] for r in blob["reports"])


def test_phases_subcommand(tmp_path):
    out = tmp_path / "p.txt"
    args = ["phases", "--out", str(out), "--no-cache", "--set", "phases.target=sin", "--set", "phases.degree=5", "--set", "phases.tau=2"]
    assert run_cli(args) == cli.EXIT_OK
    pv = PhaseVector.from_text(out.read_text())
    assert pv.degree == 5
    from qspsim.polyapprox import truncated_sin

    x = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(block_value(pv, x, "hadamard"), truncated_sin(2.0, 5)(x), atol=1e-9)


def test_exit_codes(tmp_path, capsys):
    assert run_cli(["heisenberg-ti", "--set", "model.nope=1", "--no-cache"]) == cli.EXIT_CONFIG
    assert run_cli(["heisenberg-ti", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG
    bad = tmp_path / "bad.cfg"
    bad.write_text("this line has no equals sign\n")
    assert run_cli(["heisenberg-ti", "--config", str(bad)]) == cli.EXIT_CONFIG
    args = ["phases", "--no-cache", "--set", "phases.target=eece", "--set", "phases.tau=30", "--set", "phases.degree=4"]
    args += ["--set", "phases.lo=0.3", "--set", "phases.hi=0.7", "--set", "synthesis.max_iter=50", "--out", str(tmp_path / "p")]
    assert run_cli(args) == cli.EXIT_SYNTHESIS
    assert run_cli(["approx", "--set", "sign.eps=2"]) == cli.EXIT_CONTRACT
    assert "contract" in capsys.readouterr().err


def test_ti_small_run_is_deterministic(tmp_path):
    cfg = tmp_path / "ti.cfg"
    cfg.write_text("time.points = 3\ntime.stop = 1.0\npoly.d_eece = 16\n")
    outs = []
    for i, extra in enumerate([[], ["--no-cache"], []]):
        out = tmp_path / f"ti{i}.csv"
        rc = run_cli(["heisenberg-ti", "--config", str(cfg), "--cache-dir", str(tmp_path / "cache"), "--out", str(out), *extra])
        assert rc == cli.EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    rows = read_csv(tmp_path / "ti0.csv")
    assert [r["t"] for r in rows] == ["0", "0.5", "1"]
    first = rows[0]
    assert float(first["sigma_z_exact"]) == 1 and float(first["err_roaa"]) < 1e-9
    for r in rows:
        for k in ("p_roaa", "p_os"):
            assert 0 <= float(r[k]) <= 1
        assert float(r["sigma_z_exact"]) == pytest.approx(1 - np.sin(np.sqrt(2) * float(r["t"])) ** 2, abs=1e-10)
    summary = json.loads((tmp_path / "ti0.csv.summary.json").read_text())
    assert summary["summary"]["queries_roaa"] == 33


def test_td_commuting_control(tmp_path):
    out = tmp_path / "td.csv"
    args = ["heisenberg-td", "--no-cache", "--out", str(out), "--set", "model.h_slope=0", "--set", "model.h0=0.5", "--set", "time.steps=4"]
    assert run_cli(args) == cli.EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 5
    assert all(float(r["err_trotter_ideal"]) <= 1e-8 for r in rows)
    assert float(rows[0]["p_os"]) == 1 and float(rows[0]["err_os"]) == 0
