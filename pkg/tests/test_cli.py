import json
import math

import numpy as np
import pytest

from spinmetro import cli


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    meta = [l for l in lines if l.startswith("#")]
    header = lines[len(meta)].split(",")
    rows = [line.split(",") for line in lines[len(meta) + 1:]]
    return meta, header, rows


def run(argv):
    return cli.main(argv)


class TestFigureCommands:
    def test_dimension_rows(self, tmp_path):
        out = tmp_path / "dim.csv"
        assert run(["fig-dimension", "--m-max", "6", "--out", str(out), "--seed", "1"]) == 0
        meta, header, rows = read_csv(out)
        assert "command=fig-dimension" in meta[0] and "seed=1" in meta[0]
        assert header == ["m", "p", "mqfi", "p_brute"]
        table = {int(r[0]): r for r in rows}
        assert abs(float(table[3][1]) - 2.0 / 3.0) < 1e-15
        assert float(table[3][2]) == 4.0
        assert float(table[2][1]) == 1.0 and float(table[2][2]) == 1.0
        for r in rows:
            assert abs(float(r[1]) - float(r[3])) < 1e-10

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run(["fig-surface", "--xi2-sq", "0.4", "--grid", "8",
                 "--out", str(out), "--seed", "7"])
        assert a.read_bytes() == b.read_bytes()

    def test_surface_matches_bruteforce(self, tmp_path):
        out = tmp_path / "surf.csv"
        run(["fig-surface", "--xi2-sq", "0.2", "--grid", "10", "--out", str(out)])
        meta, header, rows = read_csv(out)
        assert "xi2_sq=0.2" in meta[0]
        assert header == ["theta", "xi1_sq", "p", "p_brute"]
        for r in rows:
            assert abs(float(r[2]) - float(r[3])) < 1e-10

    def test_contour_includes_flat_line(self, tmp_path):
        out = tmp_path / "cont.csv"
        run(["fig-contour", "--grid", "9", "--out", str(out)])
        _, header, rows = read_csv(out)
        assert header == ["xi2_sq", "theta", "p_total"]
        flat = [float(r[2]) for r in rows if abs(float(r[0]) - 1.0 / 3.0) < 1e-15]
        assert flat, "xi2_sq = 1/3 line missing"
        assert all(abs(p - 2.0 / 3.0) < 1e-12 for p in flat)
        assert all(float(r[2]) <= 1.0 + 1e-12 for r in rows)

    def test_appendix_curves(self, tmp_path):
        out = tmp_path / "app.csv"
        run(["fig-appendix", "--grid", "21", "--out", str(out)])
        _, header, rows = read_csv(out)
        assert header[0] == "xi3"
        for r in rows:
            xi3 = float(r[0])
            assert abs(float(r[1]) - 2 * xi3**2 * (1 - xi3**2)) < 1e-12
            assert abs(float(r[1]) - float(r[2])) < 1e-10
            assert abs(float(r[3]) - (1 - xi3**2)) < 1e-12
            assert abs(float(r[3]) - float(r[4])) < 1e-10
        peak = max(float(r[1]) for r in rows)
        assert peak <= 0.5 + 1e-12
        assert abs(peak - 0.5) < 0.01  # grid point nearest 1/sqrt(2)


class TestProtocolCommand:
    def test_unit_success_qubit(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s = 0.5\ntheta = 0.8\nbeta = 0.4\nstate = maxprob\nxi1 = 0.6\n")
        assert run(["protocol", "--config", str(cfg)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["p_closed"] - 1.0) < 1e-10
        assert abs(payload["p_bruteforce"] - 1.0) < 1e-10

    def test_maximal_state_json(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s = 1\ntheta = 0.5\nbeta = 0.1\nstate = maximal\n")
        out = tmp_path / "rep.json"
        assert run(["protocol", "--config", str(cfg), "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert abs(payload["p_closed"] - 2.0 / 3.0) < 1e-12
        assert payload["branch"] == "both"

    def test_diag_state_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s = 1\ntheta = 1.1\nstate = xi\n"
                       "xi = 0.5, 0.7399324293474372, 0.45\n")
        assert run(["protocol", "--config", str(cfg)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["p_closed"] - payload["p_bruteforce"]) < 1e-10

    def test_explicit_chi_config(self, tmp_path, capsys):
        r = 1.0 / math.sqrt(2.0)
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"s = 0.5\ntheta = 0.3\nstate = chi\nchi = 0, {-r}; {r}, 0\n")
        assert run(["protocol", "--config", str(cfg)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["p_closed"] - 1.0) < 1e-10


class TestEstimateCommand:
    def test_summary_and_csv(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        out = tmp_path / "est.csv"
        cfg.write_text("s = 1\ntheta = 0.7\nbeta = 0.4\nstate = maximal\n"
                       "shots = 600\ntrials = 12\nseed = 4\n")
        assert run(["estimate", "--config", str(cfg), "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert abs(summary["kept_fraction"] - 2.0 / 3.0) < 0.05
        assert summary["fisher"] == 4.0
        _, header, rows = read_csv(out)
        assert header == ["trial", "beta_hat"]
        assert len(rows) == 12
        hats = np.array([float(r[1]) for r in rows])
        assert abs(summary["mean_beta_hat"] - hats.mean()) < 1e-12


class TestConfigErrors:
    def test_unknown_key_reports_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("s = 1\nbogus = 3\n")
        assert run(["protocol", "--config", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "line 2" in err and "bogus" in err

    def test_missing_field_named(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("s = 1\ntheta = 0.4\n")
        assert run(["protocol", "--config", str(cfg)]) == 2
        assert "state" in capsys.readouterr().err

    def test_bad_value_reports_field(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("s = one\ntheta = 0.4\nstate = maximal\n")
        assert run(["protocol", "--config", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "line 1" in err and "'s'" in err

    def test_state_field_requirements(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("s = 1\ntheta = 0.4\nstate = xi\n")
        assert run(["protocol", "--config", str(cfg)]) == 2
        assert "xi" in capsys.readouterr().err


class TestSeedHandling:
    def test_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.ENV_SEED, "99")
        out = tmp_path / "d.csv"
        run(["fig-dimension", "--m-max", "3", "--out", str(out)])
        meta, _, _ = read_csv(out)
        assert "seed=99" in meta[0]

    def test_flag_overrides_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.ENV_SEED, "99")
        out = tmp_path / "d.csv"
        run(["fig-dimension", "--m-max", "3", "--out", str(out), "--seed", "5"])
        meta, _, _ = read_csv(out)
        assert "seed=5" in meta[0]


class TestValidateCommand:
    def test_clean_build_exits_zero(self, capsys):
        assert run(["validate", "--seed", "3"]) == 0
        out = capsys.readouterr().out
        assert out.count("ok ") == 7 and "FAIL" not in out
