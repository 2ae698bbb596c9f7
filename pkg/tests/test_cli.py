import json

import numpy as np
import pytest

import extremegaps.experiments as experiments
from extremegaps.cli import emit_plot_data, load_config_file, main
from extremegaps.errors import NumericalError, ValidationError
from extremegaps.experiments import ExperimentConfig, map_trials, run
from extremegaps.zeta import bundled_zeros_path


def read_report(out):
    return json.loads((out / "report.json").read_text())


def test_gap_prob_table_n1(tmp_path, capsys):
    out = tmp_path / "gp"
    assert main(["gap_prob_tables", "--n", "1", "--out", str(out)]) == 0
    rep = read_report(out)
    assert rep["config"]["params"]["n"] == 1
    assert "seconds" not in json.dumps(rep)
    assert json.loads((out / "runtime.json").read_text())["workers"] == 1
    assert "report written" in capsys.readouterr().out


def test_invalid_input_exit_code(tmp_path, capsys):
    assert main(["small_gaps_cue", "--n", "0", "--out", str(tmp_path)]) == 1
    assert main(["small_gaps_cue", "--n", "10,20", "--out", str(tmp_path)]) == 1
    assert main(["largest_gaps", "--n", "x", "--out", str(tmp_path)]) == 1
    assert main(["toda_scaling", "--workers", "0", "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_bad_config_files(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = [\n")
    assert main(["gap_prob_tables", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.toml"
    unknown.write_text("[params]\nnot_a_parameter = 3\n")
    assert main(["gap_prob_tables", "--config", str(unknown)]) == 1
    other = tmp_path / "other.toml"
    other.write_text('experiment = "zeta_report"\n')
    assert main(["gap_prob_tables", "--config", str(other)]) == 1
    assert main(["gap_prob_tables", "--config", str(tmp_path / "missing.toml")]) == 1


def test_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise NumericalError("drift")

    monkeypatch.setitem(experiments.RUNNERS, "toda_scaling", boom)
    assert main(["toda_scaling", "--out", str(tmp_path)]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 3\nout = "ignored"\n[params]\nn = 2\nextras = false\nnalpha = [0.5, 1.0]\n')
    options, params = load_config_file(cfg)
    assert options == {"seed": 3, "out": "ignored"} and params["n"] == 2
    out = tmp_path / "o"
    assert main(["gap_prob_tables", "--config", str(cfg), "--seed", "4", "--out", str(out)]) == 0
    rep = read_report(out)
    assert rep["config"]["seed"] == 4
    assert rep["config"]["params"]["nalpha"] == [0.5, 1.0]
    assert rep["config"]["params"]["extras"] is False


def test_results_identical_across_worker_counts(tmp_path):
    args = ["small_gaps_cue", "--n", "12", "--trials", "1000", "--seed", "7"]
    assert main(args + ["--workers", "1", "--out", str(tmp_path / "w1")]) == 0
    assert main(args + ["--workers", "2", "--out", str(tmp_path / "w2")]) == 0
    assert (tmp_path / "w1" / "report.json").read_bytes() == (tmp_path / "w2" / "report.json").read_bytes()
    assert (tmp_path / "w1" / "cdf_k1.csv").read_bytes() == (tmp_path / "w2" / "cdf_k1.csv").read_bytes()


def test_map_trials_order():
    assert map_trials(_square, 3, range(10), workers=2) == [3 * i * i for i in range(10)]


def _square(setup, i):
    return setup * i * i


def test_emit_plot_data(tmp_path):
    cfg = ExperimentConfig("gap_prob_tables", params={"n": 3, "extras": False})
    report = run(cfg)
    paths = emit_plot_data(report, tmp_path / "plots")
    header = open(paths[0]).readline().strip()
    assert header == "x,empirical,reference"
    data = np.loadtxt(paths[0], delimiter=",", skiprows=1)
    assert data.ndim == 2 and data.shape[1] == 3
    with pytest.raises(ValidationError):
        emit_plot_data(report, tmp_path, names=["nope"])
    with pytest.raises(ValidationError):
        emit_plot_data({"tables": {}}, tmp_path)


def test_small_sweeps_run(tmp_path):
    rep = run(ExperimentConfig("largest_gaps", params={"n_list": [16, 32], "trials": 10}))
    assert set(rep.checks) and all(isinstance(c["pass"], bool) for c in rep.checks.values())
    params = {"n_list": [6, 10], "trials": 4, "integrate_trials": 2, "n2_trials": 4}
    rep = run(ExperimentConfig("toda_scaling", seed=1, params=params))
    assert "drift" in " ".join(rep.checks)


@pytest.mark.skipif(not bundled_zeros_path().exists(), reason="bundled zero table missing")
def test_zeta_report_cli(tmp_path):
    out = tmp_path / "z"
    assert main(["zeta_report", "--out", str(out)]) == 0
    rep = read_report(out)
    assert rep["checks"]["mean_gap"]["pass"]
    assert (out / "zeta_small_gaps.csv").exists()


def test_zeta_report_custom_file(tmp_path):
    gen = np.random.default_rng(3)
    g = 1000 + np.cumsum(gen.exponential(1.0, 5000))
    path = tmp_path / "z.txt"
    path.write_text("\n".join(map(repr, g.tolist())))
    out = tmp_path / "o"
    cfg = tmp_path / "c.toml"
    cfg.write_text(f'zeros_path = "{path}"\nhist_count = 500\nbin_width = 0.5\n')
    assert main(["zeta_report", "--config", str(cfg), "--out", str(out)]) == 0
    assert read_report(out)["results"]["count"] == 5000
