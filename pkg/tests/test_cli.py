import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from gbsfatigue.cli import DEFAULT_SEED, RunConfig, main, run_pipeline
from gbsfatigue.errors import DomainError, InputError
from gbsfatigue.gbs import GbsParams, classical_bs_cdf, gbs_cdf
from gbsfatigue.io import GridSpec, dumps_report, emit_curve_csv, normalize, parse_damage_csv, write_damage_fixture
from gbsfatigue.simulation import DamageModel, damage_sample


def run(argv, capsys):
    status = main(argv)
    return status, json.loads(capsys.readouterr().out)


class TestParse:
    def test_header(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("damage\n1.0\n2.5\n")
        assert parse_damage_csv(f).values.tolist() == [1.0, 2.5]

    def test_no_header(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1.0\n\n2.5\n")
        assert parse_damage_csv(f).values.tolist() == [1.0, 2.5]

    def test_malformed_line(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1.0\nabc\n")
        with pytest.raises(InputError) as info:
            parse_damage_csv(f)
        assert info.value.line == 2 and "line 2" in str(info.value)

    def test_negative_line(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1.0\n-3\n")
        with pytest.raises(InputError) as info:
            parse_damage_csv(f)
        assert info.value.line == 2

    @pytest.mark.parametrize("text", ["", "damage\n", "\n\n"])
    def test_empty(self, tmp_path, text):
        f = tmp_path / "d.csv"
        f.write_text(text)
        with pytest.raises(InputError):
            parse_damage_csv(f)

    def test_two_columns(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1.0,2.0\n")
        with pytest.raises(InputError):
            parse_damage_csv(f)

    def test_fixture_roundtrip(self, tmp_path):
        x = damage_sample(DamageModel.shifted_pareto(1.5), 100, 0)
        write_damage_fixture(tmp_path / "f.csv", x)
        assert np.array_equal(parse_damage_csv(tmp_path / "f.csv").values, x)


class TestCurves:
    def test_median_row(self, tmp_path):
        p = GbsParams(1.5, 1.0, 2.0, 400.0)
        b = p.b_alpha
        emit_curve_csv(lambda t: gbs_cdf(p, t), np.array([b / 2, b, 2 * b]), tmp_path / "c.csv")
        lines = (tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "t,value"
        assert lines[2] == "200,0.5"

    def test_reduction_bytes(self, tmp_path):
        gbs = GbsParams(2.0, 1.3 / math.sqrt(2), 2.0, 500.0)
        bs = gbs.to_classical()
        grid = GridSpec(10.0, 2500.0, 200, log=True)
        emit_curve_csv(lambda t: gbs_cdf(gbs, t), grid, tmp_path / "g.csv")
        emit_curve_csv(lambda t: classical_bs_cdf(bs, t), grid, tmp_path / "c.csv")
        assert (tmp_path / "g.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()

    @pytest.mark.parametrize("args", [(2.0, 1.0, 2), (1.0, 2.0, 1), (0.0, 1.0, 5)])
    def test_grid_validation(self, args):
        with pytest.raises(DomainError):
            GridSpec(*args, log=args[0] == 0.0)

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            emit_curve_csv(lambda t: t, GridSpec(0.0, 1.0, 2), tmp_path / "missing" / "c.csv")


class TestReports:
    def test_normalize(self):
        out = normalize({"a": np.float64(1 / 3), "b": np.arange(2), "c": math.inf, "d": (np.bool_(True),)})
        assert out == {"a": 0.333333333333, "b": [0, 1], "c": None, "d": [True]}

    def test_roundtrip_bytes(self):
        text = dumps_report({"z": [math.pi, 1e-300, -2.5e17], "a": {"nan": math.nan, "k": 3}})
        assert dumps_report(json.loads(text)) == text


class TestPipeline:
    def test_dist_median(self, capsys):
        status, rep = run(["dist", "--family", "gbs", "--alpha", "2", "--sigma", "1", "--mu-x", "3",
                           "--s-star", "1500", "--op", "cdf", "--t", "500"], capsys)
        assert status == 0 and rep["value"] == 0.5

    def test_dist_stable_quantile(self, capsys):
        status, rep = run(["dist", "--family", "stable", "--alpha", "1.5", "--op", "quantile", "--p", "0.5"], capsys)
        assert status == 0 and rep["value"] == 0.0

    def test_dist_classical_from_shape(self, capsys):
        status, rep = run(["dist", "--family", "classical-bs", "--a", "0.5", "--b", "100", "--op", "cdf",
                           "--t", "50"], capsys)
        assert rep["value"] == pytest.approx(0.07865, abs=1e-5)

    def test_dist_sample_seeded(self, capsys):
        argv = ["dist", "--family", "stable", "--alpha", "1.5", "--op", "sample", "--n", "5"]
        _, a = run(argv, capsys)
        _, b = run(argv, capsys)
        assert a == b and a["seed"] == DEFAULT_SEED and len(a["values"]) == 5

    def test_dist_csv_curve(self, tmp_path, capsys):
        out = tmp_path / "c.csv"
        status, rep = run(["dist", "--family", "gbs", "--alpha", "1.5", "--sigma", "1", "--mu-x", "1",
                           "--s-star", "100", "--op", "pdf", "--grid-min", "10", "--grid-max", "1000",
                           "--grid-points", "5", "--log-grid", "--format", "csv", "--output", str(out)], capsys)
        assert status == 0 and rep["curve"] == str(out)
        assert len(out.read_text().splitlines()) == 6

    def test_grid_rejected(self, capsys):
        status, rep = run(["dist", "--family", "stable", "--alpha", "1.5", "--op", "cdf", "--grid-min", "3",
                           "--grid-max", "2", "--grid-points", "2"], capsys)
        assert status == 1 and rep["error"]["type"] == "DomainError"

    def test_error_key(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0\n-3\n")
        status, rep = run(["fit", "--input", str(bad)], capsys)
        assert status == 1
        assert rep["error"]["type"] == "InputError" and "line 2" in rep["error"]["message"]

    def test_domain_error_key(self, capsys):
        status, rep = run(["dist", "--family", "stable", "--alpha", "2.5", "--op", "pdf", "--t", "0"], capsys)
        assert status == 1 and "alpha" in rep["error"]["message"]

    def test_fit_fixture(self, tmp_path, capsys):
        fixture = tmp_path / "pareto.csv"
        assert main(["fixture", "--n", "100000", "--output", str(fixture)]) == 0
        capsys.readouterr()
        status, rep = run(["fit", "--input", str(fixture)], capsys)
        assert status == 0
        assert rep["diagnostics"]["n"] == 10**5
        assert 1.40 <= rep["alpha_hat"] <= 1.60, rep["alpha_hat"]

    def test_fit_override(self, tmp_path, capsys):
        fixture = tmp_path / "pareto.csv"
        main(["fixture", "--n", "20000", "--output", str(fixture), "--seed", "3"])
        capsys.readouterr()
        status, rep = run(["fit", "--input", str(fixture), "--alpha", "1.5", "--known-mean", "3"], capsys)
        assert status == 0 and rep["diagnostics"]["alpha_used"] == 1.5
        assert rep["diagnostics"]["mean_source"] == "known"

    def test_simulate_deterministic_bytes(self, tmp_path):
        argv = ["simulate", "--s-star", "300", "--reps", "500", "--alpha", "1.5"]
        assert main(argv + ["--output", str(tmp_path / "a.json")]) == 0
        assert main(argv + ["--workers", "2", "--output", str(tmp_path / "b.json")]) == 0
        a = (tmp_path / "a.json").read_bytes()
        assert a == (tmp_path / "b.json").read_bytes()
        rep = json.loads(a)
        assert rep["replications"] == 500 and rep["reference"]["b_alpha"] == 100.0
        assert dumps_report(rep).encode() == a

    def test_simulate_deterministic_damage(self, capsys):
        status, rep = run(["simulate", "--damage", "deterministic", "--damage-params", "3", "--s-star", "10",
                           "--reps", "20", "--include-samples"], capsys)
        assert status == 0 and set(rep["n_star_samples"]) == {4}

    def test_simulate_bad_params(self, capsys):
        status, rep = run(["simulate", "--damage", "exponential", "--damage-params", "1", "2", "--s-star", "5"], capsys)
        assert status == 1 and "error" in rep

    def test_distance(self, tmp_path, capsys):
        (tmp_path / "a.csv").write_text("0\n1\n")
        (tmp_path / "b.csv").write_text("0\n3\n")
        status, rep = run(["distance", "--input", str(tmp_path / "a.csv"), "--input", str(tmp_path / "b.csv")], capsys)
        assert status == 0 and rep["distance"] == 1.0
        status, rep = run(["distance", "--input", str(tmp_path / "a.csv"), "--alpha", "1.5", "--r", "2",
                           "--grid-points", "1000"], capsys)
        assert status == 0 and rep["truncation"] == 0.0005 and rep["tail_divergent"]

    def test_run_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig("plot")
        with pytest.raises(ValueError):
            RunConfig("fit", inputs=("",))

    def test_run_pipeline_direct(self):
        cfg = RunConfig("dist", {"family": "stable", "op": "cdf", "alpha": 1.5, "t": [0.0]})
        assert run_pipeline(cfg) == (0, {"command": "dist", "family": "stable", "op": "cdf",
                                         "params": {"alpha": 1.5, "mu": 0.0, "sigma": 1.0},
                                         "at": pytest.approx([0.0]), "values": pytest.approx([0.5]), "value": 0.5})

    def test_module_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "gbsfatigue", "dist", "--family", "classical-bs", "--a", "1",
                              "--b", "1", "--op", "cdf", "--t", "1"], capture_output=True, text=True, check=True)
        assert json.loads(out.stdout)["value"] == 0.5

    def test_verify_quick(self, tmp_path):
        start = time.perf_counter()
        status = main(["verify", "--quick", "--output", str(tmp_path / "v.json")])
        elapsed = time.perf_counter() - start
        rep = json.loads((tmp_path / "v.json").read_text())
        assert status == 0
        assert [c["criterion"] for c in rep["criteria"]] == list(range(1, 11))
        assert elapsed < 300
        failed = [c["criterion"] for c in rep["criteria"] if not c["passed"]]
        assert not failed, failed
