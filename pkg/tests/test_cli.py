import json
import math

import numpy as np
import pytest

import gupcert as g
from gupcert.cli import main
from gupcert.suite import RunConfig, load_config, render_csv, render_json


@pytest.fixture(scope="module")
def small_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "config.json"
    cfg = {
        "beta_grid": [1.0],
        "sigma_grid": [0.8],
        "alpha_grid": [2.0],
        "states": [{"name": "truncated_gaussian_q", "shape_args": [0.25]}],
        "output_path": str(tmp_path_factory.mktemp("out") / "report.json"),
        "format": "json",
    }
    path.write_text(json.dumps(cfg))
    return path, cfg


class TestVerify:
    def test_exit_zero_and_deterministic(self, small_config, tmp_path):
        path, cfg = small_config
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert main(["verify", "--config", str(path), "--out", str(out1)]) == 0
        assert main(["verify", "--config", str(path), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_report_schema(self, small_config, tmp_path):
        path, _ = small_config
        out = tmp_path / "r.json"
        main(["verify", "--config", str(path), "--out", str(out)])
        payload = json.loads(out.read_text())
        records = payload["records"]
        assert records
        for rec in records:
            assert rec["verdict"] in ("pass", "fail", "not_applicable")
            assert "margin" in rec and "digest" in rec
        digests = [r["digest"] for r in records]
        assert digests == sorted(digests)

    def test_failure_injection_exit_one(self, small_config, tmp_path):
        path, cfg = small_config
        bad = dict(cfg)
        bad["margin_offset"] = 10.0
        bad["tolerances"] = {"default": 0.0}
        bad["output_path"] = str(tmp_path / "fail.json")
        cfg_path = tmp_path / "fail_cfg.json"
        cfg_path.write_text(json.dumps(bad))
        assert main(["verify", "--config", str(cfg_path)]) == 1
        payload = json.loads((tmp_path / "fail.json").read_text())
        assert any(r["verdict"] == "fail" for r in payload["records"])

    def test_missing_config_exit_two(self):
        assert main(["verify", "--config", "/nonexistent/conf.json"]) == 2

    def test_invalid_config_exit_two(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"beta_grid": []}))
        assert main(["verify", "--config", str(path)]) == 2

    def test_unknown_key_exit_two(self, tmp_path):
        path = tmp_path / "bad2.json"
        path.write_text(json.dumps({"frobnicate": 1}))
        assert main(["verify", "--config", str(path)]) == 2

    def test_threads_env_keeps_report_identical(self, small_config, tmp_path,
                                                 monkeypatch):
        path, _ = small_config
        out1 = tmp_path / "seq.json"
        out2 = tmp_path / "par.json"
        main(["verify", "--config", str(path), "--out", str(out1)])
        monkeypatch.setenv("THREADS", "2")
        main(["verify", "--config", str(path), "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_csv_schema(self, small_config, tmp_path):
        path, _ = small_config
        out = tmp_path / "r.csv"
        assert main(["verify", "--config", str(path), "--out", str(out),
                     "--format", "csv"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ("relation_id,state,beta,sigma,alpha,gamma,"
                            "delta_k,delta_x,lhs,rhs,margin,est_error,verdict")
        assert len(lines) > 5


class TestSweep:
    def test_sigma_sweep_sf_nonincreasing(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "beta_grid": [1.0],
            "sigma_grid": [0.3, 1.0, 3.0, 10.0],
            "alpha_grid": [2.0],
            "states": [{"name": "truncated_gaussian_q", "shape_args": [0.25]}],
        }))
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--param", "sigma", "--config", str(cfg),
                     "--out", str(out)]) == 0
        recs = json.loads(out.read_text())["records"]
        sf_rows = sorted((r for r in recs if r["relation_id"] == "sf_upper_unit"),
                         key=lambda r: r["sigma"])
        values = [r["rhs"] for r in sf_rows]  # rhs column carries S_f
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        assert any(r["relation_id"] == "sf_gaussian_bound" for r in recs)

    def test_beta_sweep_constant_correction(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "beta_grid": [0.5, 2.0],
            "sigma_grid": [1.0],
            "alpha_grid": [2.0],
            "states": [{"name": "uniform_q"}],
        }))
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--param", "beta", "--config", str(cfg),
                     "--out", str(out)]) == 0
        recs = json.loads(out.read_text())["records"]
        corr = [r["lhs"] for r in recs if r["relation_id"] == "correction_term"]
        assert len(corr) == 2
        for value in corr:
            assert value == pytest.approx(2 * math.log(2.0), abs=1e-6)

    def test_bad_param_exit_two(self, small_config):
        path, _ = small_config
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--param", "nonsense", "--config", str(path)])
        assert exc.value.code == 2


class TestShowState:
    def test_cauchy_column(self, tmp_path):
        out = tmp_path / "state.json"
        assert main(["show-state", "--name", "uniform_q", "--beta", "1.0",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        k, u = np.array(payload["tables"]["k"]).T
        assert np.max(np.abs(u - 1.0 / (math.pi * (1.0 + k * k)))) < 1e-10
        for key, total in payload["normalization"].items():
            assert total == pytest.approx(1.0, abs=1e-8)

    def test_beta_zero_u_equals_v(self, tmp_path):
        out = tmp_path / "state.json"
        assert main(["show-state", "--name", "truncated_gaussian_q",
                     "--beta", "0.0", "--shape-args", "1.0",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["tables"]["q"] == payload["tables"]["k"]

    def test_unknown_state_exit_two(self):
        assert main(["show-state", "--name", "bogus", "--beta", "1.0"]) == 2


class TestSerialization:
    def test_float_format_17g(self):
        rec = {"relation_id": "x", "state": "s", "beta": 0.1, "sigma": None,
               "alpha": None, "gamma": None, "delta_k": None, "delta_x": None,
               "lhs": 1.0 / 3.0, "rhs": 0.0, "margin": 1.0 / 3.0,
               "est_error": 0.0, "verdict": "pass", "tolerance": 1e-8,
               "digest": "d"}
        text = render_json([rec])
        assert "0.33333333333333331" in text
        assert '"sigma": null' in text
        csv_text = render_csv([rec])
        assert "0.33333333333333331" in csv_text

    def test_config_roundtrip(self, tmp_path):
        cfg = RunConfig()
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"beta_grid": [0.5], "format": "csv"}))
        loaded = load_config(str(path))
        assert loaded.beta_grid == [0.5]
        assert loaded.format == "csv"
        assert loaded.alpha_grid == cfg.alpha_grid
