import json
import os

import numpy as np
import pandas as pd
import pytest

from conftest import load_script
from samples import Samples, export
from testproblems import deconvolution_1d, export_bundle
from utilities.config_loader import ConfigLoader, load_config
from utilities.errors import ConfigError

run_uq = load_script("run-uq.py")
export_test_problem = load_script("export-test-problem.py")

GMRF_VARIABLES = [
    {"name": "x", "family": "GMRF", "mean": 0, "prec": 50},
    {"name": "y", "family": "Gaussian", "mean": "model(x)", "sqrtcov": 0.01},
]
HIERARCHICAL_VARIABLES = [
    {"name": "s", "family": "Gamma", "shape": 1, "rate": 1e-4},
    {"name": "x", "family": "GMRF", "mean": 0, "prec": 50},
    {"name": "y", "family": "Gaussian", "mean": "model(x)", "prec": "s"},
]


def write_config(directory, name="run", **overrides):
    document = {
        "spec_version": 1,
        "run_id": name,
        "problem": {"builtin": "deconvolution_1d", "options": {"n": 16}},
        "variables": GMRF_VARIABLES,
        "sampler": "auto",
        "N": 100,
        "Nb": 20,
        "chains": 2,
        "seed": 0,
    }
    document.update(overrides)
    path = os.path.join(str(directory), f"{name}.json")
    with open(path, "w") as file:
        json.dump(document, file, indent=2)
    return path


def read_summary(directory, run_id="run"):
    with open(os.path.join(str(directory), f"{run_id}.summary.json")) as file:
        return json.load(file)


# ---------------------------------------------------------------- run

def test_run_writes_summary_and_exports(tmp_path):
    out = tmp_path / "out"
    assert run_uq.main(["run", write_config(tmp_path), "--out", str(out)]) == 0
    summary = read_summary(out)
    assert summary["spec_version"] == 1
    assert summary["plan"] == {"strategy": "single", "samplers": {"x": "LinearRTO"}}
    assert summary["chains"] == 2
    x = summary["variables"]["x"]
    assert len(x["mean"]) == 16
    assert len(x["rhat"]) == 16
    assert all(value > 0 for value in x["ess"])
    assert [result["seed"] for result in summary["chain_results"]] == ["0/0", "0/1"]
    for statistic in ("raw", "mean", "std", "ci"):
        assert (out / f"run_c0.x.{statistic}.csv").exists()
        assert (out / f"run_c1.x.{statistic}.json").exists()
    assert pd.read_csv(out / "run_c1.x.raw.csv", header=None).shape == (100, 16)


def test_run_log_records_chain_progress(tmp_path):
    out = tmp_path / "out"
    assert run_uq.main(["run", write_config(tmp_path, chains=1), "--out", str(out)]) == 0
    logs = list((out / "logs").glob("app_*.log"))
    assert len(logs) == 1
    text = logs[0].read_text()
    assert "Chain 0 finished" in text
    assert "LinearRTO: sampling 100 states after 20 burn-in states" in text


def test_hierarchical_run_reports_both_variables(tmp_path):
    config = write_config(tmp_path, variables=HIERARCHICAL_VARIABLES, chains=1)
    assert run_uq.main(["run", config, "--out", str(tmp_path / "out")]) == 0
    summary = read_summary(tmp_path / "out")
    assert set(summary["variables"]) == {"s", "x"}
    assert summary["variables"]["s"]["ess"][0] > 0
    assert len(summary["variables"]["x"]["ess"]) == 16
    assert summary["variables"]["s"]["rhat"] is None
    assert summary["plan"]["samplers"] == {"s": "Conjugate", "x": "LinearRTO"}


def test_run_is_reproducible(tmp_path):
    config = write_config(tmp_path, variables=HIERARCHICAL_VARIABLES)
    assert run_uq.main(["run", config, "--out", str(tmp_path / "first")]) == 0
    assert run_uq.main(["run", config, "--out", str(tmp_path / "second")]) == 0
    first, second = read_summary(tmp_path / "first"), read_summary(tmp_path / "second")
    first.pop("timing")
    second.pop("timing")
    assert first == second


def test_seed_and_chain_overrides(tmp_path):
    config = write_config(tmp_path)
    assert run_uq.main(["run", config, "--out", str(tmp_path / "a"), "--seed", "5", "--chains", "3"]) == 0
    summary = read_summary(tmp_path / "a")
    assert summary["seed"] == 5
    assert summary["chains"] == 3
    assert run_uq.main(["run", config, "--out", str(tmp_path / "b"), "--chains", "0"]) == 2


def test_run_on_user_csv_files(tmp_path):
    export_bundle(deconvolution_1d(n=12, seed=1), str(tmp_path), "blur")
    config = write_config(tmp_path, problem={"model_csv": "blur.model.csv", "data_csv": "blur.data.csv"}, chains=1)
    assert run_uq.main(["run", config, "--out", str(tmp_path / "out")]) == 0
    assert len(read_summary(tmp_path / "out")["variables"]["x"]["mean"]) == 12


@pytest.mark.parametrize("overrides", [
    {"N": 0},
    {"thin": 0},
    {"spec_version": 2},
    {"variables": [{"name": "x", "family": "Beta", "a": 1}]},
    {"variables": [{"name": "x", "family": "GMRF", "mean": 0, "precision": 50}] + GMRF_VARIABLES[1:]},
    {"problem": {"builtin": "heat_1d"}},
    {"sampler": {"kind": "HMC"}},
    {"sampler": {"x": "LinearRTO", "s": "Conjugate"}},
    {"variables": [GMRF_VARIABLES[0]], "problem": {"builtin": "deconvolution_1d", "options": {"n": 16,
                                                                                               "noise_std": 0}}},
])
def test_invalid_configs_exit_with_2(tmp_path, overrides):
    assert run_uq.main(["run", write_config(tmp_path, **overrides), "--out", str(tmp_path / "out")]) == 2


def test_invalid_json_and_missing_file_exit_with_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"spec_version": 1,\n "N": }')
    assert run_uq.main(["run", str(path)]) == 2
    assert run_uq.main(["run", str(tmp_path / "missing.json")]) == 2


def test_capability_errors_exit_with_3(tmp_path):
    variables = [{"name": "x", "family": "LMRF", "location": 0, "scale": 0.01}] + GMRF_VARIABLES[1:]
    config = write_config(tmp_path, variables=variables, sampler={"kind": "pCN"}, chains=1)
    assert run_uq.main(["run", config, "--out", str(tmp_path / "out")]) == 3


# ---------------------------------------------------------------- summarize and diag

def test_summarize_single_chain_shows_missing_rhat(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_uq.main(["run", write_config(tmp_path, chains=1), "--out", str(out)]) == 0
    capsys.readouterr()
    assert run_uq.main(["summarize", str(out), "--level", "90"]) == 0
    printed = capsys.readouterr().out
    assert "n/a" in printed
    assert "x[0]" in printed and "x[15]" in printed
    with open(out / "summary.json") as file:
        summary = json.load(file)
    assert summary["ci_level"] == 90
    assert summary["variables"]["x"]["rhat"] is None


def test_summarize_pools_chains(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_uq.main(["run", write_config(tmp_path), "--out", str(out)]) == 0
    assert run_uq.main(["summarize", str(out)]) == 0
    with open(out / "summary.json") as file:
        summary = json.load(file)
    assert summary["variables"]["x"]["n_chains"] == 2
    assert summary["variables"]["x"]["n_samples"] == 200


def test_summarize_and_diag_need_exports(tmp_path):
    assert run_uq.main(["summarize", str(tmp_path / "missing")]) == 2
    assert run_uq.main(["summarize", str(tmp_path)]) == 2
    assert run_uq.main(["diag", str(tmp_path), "x"]) == 2


def test_diag_writes_acf_and_iact(tmp_path, rng):
    export(Samples(rng.standard_normal((500, 2)), name="x"), "raw", str(tmp_path), "run_c0", "x")
    assert run_uq.main(["diag", str(tmp_path), "x"]) == 0
    acf = pd.read_csv(tmp_path / "run_c0.x.acf.csv", header=None).to_numpy()
    assert acf.shape == (101, 3)
    np.testing.assert_allclose(acf[0, 1:], 1.0)
    with open(tmp_path / "run_c0.x.diag.json") as file:
        info = json.load(file)
    assert info["degenerate"] is False
    assert all(tau > 0 for tau in info["iact"])
    assert (tmp_path / "run_c0.x.trace.csv").exists()


def test_diag_of_a_constant_chain(tmp_path):
    export(Samples(np.full(50, 2.0), name="c"), "raw", str(tmp_path), "run_c0", "c")
    assert run_uq.main(["diag", str(tmp_path), "c"]) == 0
    acf = pd.read_csv(tmp_path / "run_c0.c.acf.csv", header=None).to_numpy()
    np.testing.assert_array_equal(acf, [[0.0, 1.0]])
    with open(tmp_path / "run_c0.c.diag.json") as file:
        assert json.load(file)["degenerate"] is True


def test_diag_of_an_unknown_variable(tmp_path, rng, caplog):
    export(Samples(rng.standard_normal(50), name="x"), "raw", str(tmp_path), "run_c0", "x")
    assert run_uq.main(["diag", str(tmp_path), "z"]) == 2
    assert "['x']" in caplog.text


@pytest.mark.slow
def test_eight_schools_summary_rows(tmp_path, capsys):
    config = write_config(tmp_path, problem={"builtin": "eight_schools"}, variables=[], N=200, Nb=200, chains=1)
    out = tmp_path / "out"
    assert run_uq.main(["run", config, "--out", str(out)]) == 0
    capsys.readouterr()
    assert run_uq.main(["summarize", str(out)]) == 0
    printed = capsys.readouterr().out
    for row in ["u", "t"] + [f"xp[{i}]" for i in range(8)]:
        assert row in printed


# ---------------------------------------------------------------- output directory and config loader

def test_output_directory_precedence(tmp_path, monkeypatch):
    config = load_config(write_config(tmp_path))
    monkeypatch.setenv(run_uq.OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    assert run_uq.output_directory(config, "explicit") == "explicit"
    assert run_uq.output_directory(config) == os.path.join(str(tmp_path / "root"), "run")
    config.output_dir = "configured"
    assert run_uq.output_directory(config) == "configured"


def test_config_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "lines.json"
    path.write_text('{\n  "spec_version": 1,\n  "problem": {"builtin": "gravity"},\n  "N": -3\n}\n')
    with pytest.raises(ConfigError) as error:
        ConfigLoader(str(path)).load()
    assert error.value.line == 4
    assert str(error.value).startswith("line 4:")

    path.write_text('{\n  "spec_version": 1,\n  "problem": {"builtin": "gravity"},\n  "outputs": {\n'
                    '    "ci_level": 120\n  }\n}\n')
    with pytest.raises(ConfigError) as error:
        ConfigLoader(str(path)).load()
    assert error.value.line == 5


def test_config_defaults(tmp_path):
    path = tmp_path / "minimal.json"
    path.write_text('{"spec_version": 1, "problem": {"builtin": "gravity"}}')
    config = load_config(str(path))
    assert config.run_id == "minimal"
    assert config.sampler == "auto"
    assert config.N == 1000
    assert config.burn_in == 200
    assert config.statistics == ("mean", "std", "ci")
    assert config.ci_level == 95.0


def test_sampler_sections(tmp_path):
    config = load_config(write_config(tmp_path, sampler={"kind": "NUTS", "target_accept": 0.9}))
    assert config.sampler["*"].target_accept == 0.9
    config = load_config(write_config(tmp_path, sampler={"x": "LinearRTO", "s": {"kind": "Conjugate"}}))
    assert config.sampler["x"].kind == "LinearRTO"
    assert config.sampler["s"].kind == "Conjugate"
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, sampler={"kind": "MH", "step": 2}))


def test_bundled_configs_load():
    config_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "configs")
    names = sorted(name for name in os.listdir(config_dir) if name.endswith(".json"))
    assert names
    for name in names:
        assert load_config(os.path.join(config_dir, name)).run_id == name[:-len(".json")]


# ---------------------------------------------------------------- export-test-problem

def test_export_test_problem(tmp_path):
    out = str(tmp_path / "problems")
    assert export_test_problem.main(["deconvolution_1d", "--out", out, "--options", '{"n": 8, "seed": 1}']) == 0
    assert sorted(os.listdir(out)) == ["deconvolution_1d.data.csv", "deconvolution_1d.info.json",
                                       "deconvolution_1d.model.csv"]
    assert export_test_problem.main(["gravity", "--out", out, "--name", "sphere"]) == 0
    assert os.path.exists(os.path.join(out, "sphere.info.json"))
    assert export_test_problem.main(["gravity", "--out", out, "--options", '{"depth": 3}']) == 2
