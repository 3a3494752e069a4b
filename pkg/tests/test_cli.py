import csv
import json

import pytest

from warpstab.cli import main


def run_cli(args):
    return main(args)


def read_report(path):
    with open(path) as fh:
        return json.load(fh)


class TestCurvatureCommand:
    def test_preset_run(self, tmp_path):
        out = tmp_path / "report.json"
        code = run_cli([
            "curvature", "--preset", "paper-sec4",
            "--out", str(out), "--csv-dir", str(tmp_path / "csv"),
            "--samples", "101",
        ])
        assert code == 0
        rep = read_report(out)
        assert rep["subcommand"] == "curvature"
        assert rep["results"]["minEig"] >= 0.0
        assert len(rep["results"]["t"]) == 101
        with open(tmp_path / "csv" / "curvature.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "t" and "ricf11" in rows[0]
        assert len(rows) == 102

    def test_negative_warp_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({
            "space": {"kappa": 0, "g": "-1", "f": "0", "t_min": -1, "t_max": 1}
        }))
        code = run_cli(["curvature", "--config", str(cfg), "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert "warp must be positive" in capsys.readouterr().err

    def test_parse_error_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({
            "space": {"kappa": 0, "g": "2*t^", "f": "0", "t_min": -1, "t_max": 1}
        }))
        code = run_cli(["curvature", "--config", str(cfg), "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert "offset" in capsys.readouterr().err


class TestDeterminism:
    def test_reports_identical_modulo_wall_ms(self, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert run_cli(["slice", "--preset", "paper-sec4", "--out", str(out)]) == 0
            rep = read_report(out)
            rep.pop("wall_ms")
            outs.append(json.dumps(rep, sort_keys=True))
        assert outs[0] == outs[1]

    def test_digest_depends_on_config(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli(["slice", "--preset", "paper-sec4", "--out", str(a)]) == 0
        assert run_cli(["slice", "--preset", "paper-remark", "--out", str(b)]) == 0
        assert read_report(a)["config_digest"] != read_report(b)["config_digest"]


class TestSubcommands:
    def test_slice_roots(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["slice", "--preset", "paper-sec4", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["totallyGeodesic"] is True
        assert len(res["roots"]) == 1 and abs(res["roots"][0]) <= 1e-9
        assert res["identically_minimal"] is False

    def test_slice_flat_degenerate(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["slice", "--preset", "flat", "--out", str(out)]) == 0
        assert read_report(out)["results"]["identically_minimal"] is True

    def test_variation(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["variation", "--preset", "paper-sec4", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["rel_err"] <= 1e-4
        assert res["Q"] == pytest.approx(8.014376471447673, rel=1e-9)

    def test_spectrum(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["spectrum", "--preset", "paper-sec4", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["negCount"] == 0 and res["mu1"] >= 0.0

    def test_flow(self, tmp_path):
        out = tmp_path / "r.json"
        code = run_cli([
            "flow", "--preset", "paper-sec4", "--out", str(out),
            "--csv-dir", str(tmp_path / "csv"),
        ])
        assert code == 0
        res = read_report(out)["results"]
        assert res["max_Htilde"] <= 1e-10
        assert res["area_monotone"] is True
        with open(tmp_path / "csv" / "flow.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert header == ["t", "Htilde_ode", "Htilde_closed", "residual", "areaWindow"]

    def test_cutoff(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["cutoff", "--preset", "flat", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["slope"] == pytest.approx(1.0, abs=1e-3)

    def test_compare(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["compare", "--preset", "flat", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert abs(res["margin"]) <= 1e-12
        assert res["hypothesis_ok"] is True

    def test_conformal(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(["conformal", "--preset", "flat", "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["min_ricf_t"] > 0.0
        assert res["annulus"] == [0.875, 1.0]

    def test_custom_config_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "space": {"kappa": 1, "g": "exp(t)", "f": "t^2",
                      "t_min": -5.0, "t_max": 5.0},
            "slice": {"t0": 0.5},
        }))
        out = tmp_path / "r.json"
        assert run_cli(["slice", "--config", str(cfg), "--out", str(out)]) == 0
        res = read_report(out)["results"]
        assert res["roots"] == [pytest.approx(0.5, abs=1e-9)]

    def test_missing_scenario(self, capsys):
        assert run_cli(["curvature"]) == 1
        assert "scenario" in capsys.readouterr().err

    def test_unknown_preset(self, capsys):
        assert run_cli(["curvature", "--preset", "nope"]) == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_missing_section(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "space": {"kappa": 0, "g": "1", "f": "0", "t_min": -1, "t_max": 1}
        }))
        assert run_cli(["spectrum", "--config", str(cfg)]) == 1
        assert "required" in capsys.readouterr().err
