import json
import subprocess
import sys

import pytest

from lindyn.cli import main

RUN_FLAGS = ["--d", "24", "--K", "2", "--gw", "1.5", "--gs2", "-0.7",
             "--mode", "gd", "--seed", "7", "--max-steps", "120"]


def run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestRun:
    def test_writes_outputs_and_summary(self, tmp_path, capsys):
        code, out, _ = run_main(["run", *RUN_FLAGS, "--out-dir", str(tmp_path),
                                 "--prefix", "t"], capsys)
        assert code == 0
        summary = json.loads(out)
        assert "argmin_test_err" in summary and "crossings" in summary
        assert (tmp_path / "t.csv").exists()
        manifest = json.loads((tmp_path / "t.manifest.json").read_text())
        assert manifest["d"] == 24 and manifest["mode"] == "gd"
        assert manifest["seed"] == 7 and manifest["c_lr"] == 50.0

    def test_determinism(self, tmp_path, capsys):
        run_main(["run", *RUN_FLAGS, "--out-dir", str(tmp_path), "--prefix", "a"],
                 capsys)
        run_main(["run", *RUN_FLAGS, "--out-dir", str(tmp_path), "--prefix", "b"],
                 capsys)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_zero_steps_config_error(self, tmp_path, capsys):
        code, _, err = run_main(["run", *RUN_FLAGS[:-2], "--max-steps", "0",
                                 "--out-dir", str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_missing_required(self, capsys):
        code, _, err = run_main(["run", "--d", "10"], capsys)
        assert code == 2

    def test_config_file(self, tmp_path, capsys):
        doc = {"task": {"d": 20, "K": 2, "seed": 1},
               "scaling": {"gamma_w": 1.5, "gamma_sigma2": -0.7},
               "run": {"mode": "lazy", "max_steps": 60},
               "output": {"directory": str(tmp_path), "prefix": "cfg"}}
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps(doc))
        code, out, _ = run_main(["run", "--config", str(cfg)], capsys)
        assert code == 0
        assert (tmp_path / "cfg.csv").exists()

    def test_config_file_unknown_key_rejected(self, tmp_path, capsys):
        doc = {"task": {"d": 20, "K": 2, "seed": 1, "nonsense": True},
               "scaling": {"gamma_w": 1.5, "gamma_sigma2": -0.7}}
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(doc))
        code, _, err = run_main(["run", "--config", str(cfg)], capsys)
        assert code == 2
        assert "nonsense" in err

    def test_flags_override_config(self, tmp_path, capsys):
        doc = {"task": {"d": 20, "K": 2, "seed": 1},
               "scaling": {"gamma_w": 1.5, "gamma_sigma2": -0.7},
               "run": {"mode": "gd", "max_steps": 40},
               "output": {"directory": str(tmp_path), "prefix": "x"}}
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps(doc))
        code, out, _ = run_main(["run", "--config", str(cfg), "--mode", "lazy"],
                                capsys)
        assert code == 0
        man = json.loads((tmp_path / "x.manifest.json").read_text())
        assert man["mode"] == "lazy"

    def test_explicit_a_list_task(self, tmp_path, capsys):
        doc = {"task": {"d": 20, "seed": 1, "a_list": [2.0, 1.0]},
               "scaling": {"gamma_w": 1.5, "gamma_sigma2": -0.7},
               "run": {"mode": "gd", "max_steps": 40},
               "output": {"directory": str(tmp_path), "prefix": "det"}}
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps(doc))
        code, out, _ = run_main(["run", "--config", str(cfg)], capsys)
        assert code == 0
        assert json.loads(out)["tstar_steps"] is not None


class TestSweep:
    def test_sweep_outputs(self, tmp_path, capsys):
        code, out, _ = run_main(
            ["sweep", "--d", "16", "--K", "2", "--seed", "3",
             "--gs2-min", "-1.0", "--gs2-max", "-0.6", "--gs2-count", "2",
             "--gw-min", "1.5", "--gw-max", "1.5", "--gw-count", "1",
             "--max-steps", "100", "--workers", "1",
             "--out-dir", str(tmp_path), "--prefix", "s"], capsys)
        assert code == 0
        summary = json.loads(out)
        assert summary["cells"] == 2
        lines = (tmp_path / "s.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_empty_grid_exit_2(self, tmp_path, capsys):
        code, _, err = run_main(
            ["sweep", "--d", "16", "--K", "2",
             "--gs2-min", "-1.0", "--gs2-max", "-0.6", "--gs2-count", "0",
             "--gw-min", "1.5", "--gw-max", "1.5", "--gw-count", "1",
             "--out-dir", str(tmp_path)], capsys)
        assert code == 2


class TestPredict:
    def test_explicit_a(self, capsys):
        code, out, _ = run_main(["predict", "--a", "2,1", "--gw", "1.2",
                                 "--gs2", "-0.7", "--eta", "1.0"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["delta"] == pytest.approx(0.5)
        assert payload["c_a"] == pytest.approx(1 / 3)
        assert payload["tstar_steps"] > 0

    def test_measured_task(self, capsys):
        code, out, _ = run_main(["predict", "--d", "40", "--K", "3", "--seed",
                                 "2", "--gw", "2.25", "--gs2", "-1.85"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert len(payload["a"]) == 3
        assert payload["region"]["active"]

    def test_lazy_region_reports_reason(self, capsys):
        code, out, _ = run_main(["predict", "--a", "2,1", "--gw", "2.0",
                                 "--gs2", "-0.5", "--eta", "1.0"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["tstar_steps"] is None
        assert "NotActiveRegion" in payload["reason"]


class TestVerify:
    def test_single_suite_pass(self, capsys):
        code, out, _ = run_main(["verify", "--suite", "lazy-oracle", "--d", "30"],
                                capsys)
        assert code == 0
        assert "PASS" in out

    def test_unknown_suite_exit_2(self, capsys):
        code, _, err = run_main(["verify", "--suite", "bogus"], capsys)
        assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lindyn.cli", "predict",
                           "--a", "2,1", "--gw", "1.2", "--gs2", "-0.7",
                           "--eta", "1.0"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["c_a"] == pytest.approx(1 / 3)
