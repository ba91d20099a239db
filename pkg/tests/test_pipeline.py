"""Pipeline orchestration, file formats and CLI behavior."""

import json
from math import exp, pi, sqrt

import numpy as np
import pytest

from gkp_breeding import (
    GkpTarget,
    GridSpec,
    PipelineConfig,
    TruncationPolicy,
    ValidationError,
    cli,
    config_from_dict,
    config_to_dict,
    load_config,
    load_results,
    reproduce_table1,
    run_pipeline,
    wigner,
    write_config,
    write_results,
    write_wigner_csv,
)
from gkp_breeding import vacuum_state
from gkp_breeding.pipeline import result_to_dict


def _small_config(**overrides):
    base = dict(
        target=GkpTarget("codeword", k=0),
        n=4,
        bifurcations=2,
        truncation=TruncationPolicy(dim=40),
    )
    base.update(overrides)
    return PipelineConfig(**base)


def test_config_roundtrip_dict():
    cfg = _small_config(wigner_grid=GridSpec(n_x=31, n_p=21))
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_config_roundtrip_file(tmp_path):
    cfg = _small_config()
    path = tmp_path / "config.json"
    write_config(cfg, str(path))
    assert load_config(str(path)) == cfg


def test_config_minimal_defaults():
    cfg = config_from_dict({"target": {"kind": "codeword", "k": 0}, "n": 6, "N": 2})
    assert cfg.effective_delta2 == pytest.approx(exp(-1.0))
    assert cfg.w == pytest.approx(sqrt(pi))
    assert cfg.damping == "optimize"
    assert cfg.truncation == TruncationPolicy()
    qub = config_from_dict(
        {"target": {"kind": "qubit", "alpha": 0.8, "beta": 0.6}, "n": 6, "N": 2}
    )
    assert qub.effective_delta2 == pytest.approx(exp(-1.16))
    assert qub.effective_seed_n == 6


def test_config_unknown_field_rejected():
    with pytest.raises(ValidationError, match="bogus"):
        config_from_dict({"target": {"kind": "codeword"}, "n": 6, "N": 2, "bogus": 1})
    with pytest.raises(ValidationError, match="k_index"):
        config_from_dict({"target": {"kind": "codeword", "k_index": 1}, "n": 6, "N": 2})


def test_pipeline_smoke_and_product_law():
    res = run_pipeline(_small_config())
    probs = np.array([r.probability for r in res.per_step])
    assert res.total_probability == pytest.approx(float(np.prod(probs)), rel=1e-12)
    assert 0.0 < res.total_probability < 1.0
    assert 0.0 < res.fidelity <= 1.0
    assert 0.0 <= res.squeezing_db <= 14.0
    # replayability: the exact step parameters are part of the result
    d = result_to_dict(res)
    assert d["step_params"]["delta1"] == pytest.approx(sqrt(8.0) / sqrt(pi), rel=1e-12)


def test_pipeline_damping_off():
    res = run_pipeline(_small_config(damping="off"))
    assert res.damping_t == 0.0
    assert all(not r.label.startswith("envelope") for r in res.per_step)


def test_pipeline_qubit_path_runs():
    cfg = PipelineConfig(
        target=GkpTarget("qubit", alpha=0.8, beta=0.6, phi=0.5),
        n=4,
        bifurcations=2,
        truncation=TruncationPolicy(dim=48),
    )
    res = run_pipeline(cfg)
    labels = [r.label for r in res.per_step]
    assert any(l.startswith("seed:") for l in labels)
    assert 0.0 < res.seed_probability < 1.0
    assert 0.0 < res.total_probability < res.seed_probability


def test_pipeline_determinism():
    r1 = run_pipeline(_small_config())
    r2 = run_pipeline(_small_config())
    j1 = json.dumps(result_to_dict(r1), sort_keys=True)
    j2 = json.dumps(result_to_dict(r2), sort_keys=True)
    assert j1 == j2


def test_results_roundtrip(tmp_path):
    res = run_pipeline(_small_config())
    path = tmp_path / "result.json"
    write_results(res, str(path))
    data = load_results(str(path))
    assert data["total_probability"] == res.total_probability
    assert data["config"] == config_to_dict(res.config)


def test_wigner_csv_contract(tmp_path):
    pol = TruncationPolicy(dim=20)
    grid = GridSpec(x_min=-2, x_max=2, p_min=-1, p_max=1, n_x=11, n_p=7)
    with pytest.warns(UserWarning):
        wg = wigner(vacuum_state(pol), grid)
    path = tmp_path / "w.csv"
    write_wigner_csv(wg, str(path))
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 11 * 7 + 3
    assert lines[0] == "# x: -2.0,2.0,11"
    assert lines[1] == "# p: -1.0,1.0,7"
    assert lines[2] == "x,p,W"
    first = lines[3].split(",")
    assert float(first[0]) == -2.0 and float(first[1]) == -1.0
    # p-then-x: the second row advances x, not p
    second = lines[4].split(",")
    assert float(second[1]) == -1.0 and float(second[0]) > -2.0


def test_table1_selection_and_empty():
    assert reproduce_table1(rows=[]) == []
    with pytest.raises(ValidationError):
        reproduce_table1(rows=["no-such-row"])
    reports = reproduce_table1(rows=["codeword-n16-N3"], allow_long=False)
    assert reports[0].status == "skipped"


# ---------------------------------------------------------------------------
# CLI


def _write_cfg(tmp_path, payload):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_cli_simulate(tmp_path, capsys):
    cfg = _write_cfg(
        tmp_path,
        {"target": {"kind": "codeword", "k": 0}, "n": 4, "N": 2,
         "truncation": {"dim": 40},
         "wigner": {"x_min": -4, "x_max": 4, "p_min": -4, "p_max": 4, "n_x": 41, "n_p": 41}},
    )
    out = tmp_path / "out.json"
    wig = tmp_path / "w.csv"
    code = cli.main(["simulate", "--config", cfg, "--out", str(out), "--wigner", str(wig)])
    assert code == 0
    assert out.exists() and wig.exists()
    assert "total probability" in capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["schema"] == "gkp-breeding/result-v1"
    assert len(wig.read_text().strip().split("\n")) == 41 * 41 + 3


def test_cli_simulate_bad_config(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"target": {"kind": "codeword"}, "n": 4, "N": 2, "oops": True})
    code = cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / "o.json")])
    assert code == 1
    assert "oops" in capsys.readouterr().err


def test_cli_simulate_missing_file(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o.json")]) == 1


def test_cli_table1_empty_and_skip(capsys):
    assert cli.main(["table1", "--rows", ""]) == 0
    assert cli.main(["table1", "--rows", "codeword-n16-N3"]) == 0
    out = capsys.readouterr().out
    assert "skipped" in out


def test_cli_table1_bad_row(capsys):
    assert cli.main(["table1", "--rows", "42"]) == 1


def test_cli_target(tmp_path, capsys):
    wig = tmp_path / "t.csv"
    assert cli.main(["target", "--k", "0", "--delta-db", "6.4", "--wigner", str(wig)]) == 0
    assert wig.exists()
    assert "codeword k=0" in capsys.readouterr().out


def test_cli_usage_error_is_validation():
    assert cli.main(["simulate"]) == 1
    assert cli.main(["frobnicate"]) == 1
