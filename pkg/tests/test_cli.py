import json
import subprocess
import sys

import numpy as np
import pytest

from attnet.cli import main


def run_cli(*argv):
    return main(list(argv))


def canonical_without_timestamps(path):
    payload = json.loads(path.read_text())
    payload["manifest"].pop("timestamps")
    return json.dumps(payload, sort_keys=True)


@pytest.fixture(scope="module")
def suite_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "suite.csv"
    code = run_cli("synth", "--elections", "4", "--candidates", "2",
                   "--individuals", "250", "--seed", "5", "--out", str(out))
    assert code == 0
    return out


class TestSynth:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli("synth", "--elections", "2", "--individuals", "40",
                       "--seed", "3", "--out", str(a)) == 0
        assert run_cli("synth", "--elections", "2", "--individuals", "40",
                       "--seed", "3", "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_candidate_block_count(self, suite_csv):
        text = suite_csv.read_text().splitlines()
        blocks = {tuple(line.split(",")[:2]) for line in text[1:]}
        assert len(blocks) == 8

    def test_manifest_written(self, suite_csv):
        manifest = json.loads((suite_csv.parent / "suite.csv.manifest.json").read_text())
        assert manifest["manifest"]["subcommand"] == "synth"
        assert manifest["manifest"]["seed"] == 5
        assert len(manifest["betas"]) == 8

    def test_spec_file(self, tmp_path):
        spec = {"elections": ["e1", "e2"], "candidates_per_election": 1,
                "individuals": 30, "beta_range": [0.8, 1.2]}
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        out = tmp_path / "out.csv"
        assert run_cli("synth", "--spec", str(spec_path), "--out", str(out)) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 30

    def test_invalid_spec_exits_2(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"node_count": 5}))
        assert run_cli("synth", "--spec", str(spec_path), "--out", str(tmp_path / "x.csv")) == 2


class TestSimulate:
    def test_smoke_run_writes_reports(self, tmp_path):
        code = run_cli("simulate", "--generator", "ba", "--weights", "uniform",
                       "--replicates", "2", "--variations", "5", "--individuals", "150",
                       "--nodes", "7", "--seed", "7", "--out", str(tmp_path), "--svg")
        assert code == 0
        report = json.loads((tmp_path / "simulation_report.json").read_text())
        assert len(report["combinations"]) == 1
        assert report["manifest"]["config"]["replicates"] == 2
        table = (tmp_path / "simulation_table.csv").read_text().splitlines()
        assert table[0] == "metric,weight_distribution,preferential_attachment"
        assert (tmp_path / "scatter_preferential_attachment_uniform_connectivity.svg").exists()
        assert (tmp_path / "scatter_preferential_attachment_uniform_centrality.svg").exists()

    def test_zero_replicates_usage_error(self, tmp_path):
        assert run_cli("simulate", "--replicates", "0", "--out", str(tmp_path)) == 3

    def test_unknown_flag_usage_error(self):
        assert run_cli("simulate", "--nope") == 3

    def test_deterministic_json_minus_timestamps(self, tmp_path):
        args = ("simulate", "--generator", "er", "--weights", "uniform", "--replicates", "2",
                "--variations", "4", "--individuals", "120", "--nodes", "10", "--seed", "11")
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        assert run_cli(*args, "--out", str(a_dir)) == 0
        assert run_cli(*args, "--out", str(b_dir)) == 0
        assert (canonical_without_timestamps(a_dir / "simulation_report.json")
                == canonical_without_timestamps(b_dir / "simulation_report.json"))
        assert ((a_dir / "simulation_table.csv").read_bytes()
                == (b_dir / "simulation_table.csv").read_bytes())

    def test_audit_includes_replicate_values(self, tmp_path):
        code = run_cli("simulate", "--generator", "ba", "--weights", "uniform",
                       "--replicates", "2", "--variations", "4", "--individuals", "100",
                       "--nodes", "7", "--seed", "4", "--out", str(tmp_path), "--audit")
        assert code == 0
        report = json.loads((tmp_path / "simulation_report.json").read_text())
        assert len(report["replicates"]) == 2
        assert len(report["replicates"][0]["betas"]) == 4

    def test_jobs_flag_reproduces_serial(self, tmp_path):
        args = ("simulate", "--generator", "ba", "--weights", "pareto", "--replicates", "2",
                "--variations", "4", "--individuals", "100", "--nodes", "7", "--seed", "2")
        assert run_cli(*args, "--out", str(tmp_path / "serial")) == 0
        assert run_cli(*args, "--jobs", "2", "--out", str(tmp_path / "parallel")) == 0
        assert (canonical_without_timestamps(tmp_path / "serial" / "simulation_report.json")
                == canonical_without_timestamps(tmp_path / "parallel" / "simulation_report.json"))


class TestAnalyze:
    def test_end_to_end_on_synthetic(self, suite_csv, tmp_path):
        code = run_cli("analyze", str(suite_csv), "--out", str(tmp_path), "--svg")
        assert code == 0
        report = json.loads((tmp_path / "analysis_report.json").read_text())
        assert len(report["analyses"]) == 8
        assert report["hypothesis_tests"]["connectivity"]["r"] < 0
        assert (tmp_path / "candidate_analyses.csv").exists()
        assert (tmp_path / "centrality_points.csv").exists()
        assert (tmp_path / "connectivity_impact.svg").exists()

    def test_missing_file_exits_2(self, tmp_path):
        assert run_cli("analyze", str(tmp_path / "absent.csv"), "--out", str(tmp_path)) == 2

    def test_independents_without_party_column_exits_2(self, suite_csv, tmp_path):
        code = run_cli("analyze", str(suite_csv), "--filter", "independents",
                       "--out", str(tmp_path))
        assert code == 2

    def test_degenerate_data_exits_1(self, tmp_path):
        header = "election,candidate,respondent," + ",".join(f"e{i:02d}" for i in range(1, 11)) + ",vote"
        rows = [header]
        rng = np.random.default_rng(0)
        for i in range(40):
            cells = ",".join(str(c) for c in rng.integers(1, 3, 10))
            rows.append(f"e1,A,r{i},{cells},1")  # constant vote
        path = tmp_path / "degen.csv"
        path.write_text("\n".join(rows) + "\n")
        assert run_cli("analyze", str(path), "--out", str(tmp_path)) == 1

    def test_element_subset(self, suite_csv, tmp_path):
        code = run_cli("analyze", str(suite_csv), "--elements", "e01,e02,e03,e04,e05,e06,e07",
                       "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "analysis_report.json").read_text())
        assert len(report["analyses"][0]["closeness"]) == 7

    def test_compare_nonvoters(self, tmp_path):
        out = tmp_path / "nv.csv"
        assert run_cli("synth", "--elections", "3", "--individuals", "300",
                       "--nonvoter-rate", "0.3", "--seed", "9", "--out", str(out)) == 0
        code = run_cli("analyze", str(out), "--compare-nonvoters", "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "analysis_report.json").read_text())
        comparison = report["nonvoter_connectivity_comparison"]
        assert comparison["groups"] == ["nonvoters", "voters"]
        assert "statistic" in comparison


class TestForecast:
    def test_single_target(self, suite_csv, tmp_path, capsys):
        code = run_cli("forecast", str(suite_csv), "--target", "1984", "--out", str(tmp_path))
        assert code == 0
        printed = capsys.readouterr().out
        assert "deviation median" in printed and "CLES" in printed
        report = json.loads((tmp_path / "forecast_report.json").read_text())
        assert report["target"] == "1984"
        assert len(report["rows"]) == 20
        rows_csv = (tmp_path / "forecast_rows.csv").read_text().splitlines()
        assert len(rows_csv) == 21

    def test_all_targets_pooled(self, suite_csv, tmp_path):
        code = run_cli("forecast", str(suite_csv), "--target", "all", "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "forecast_report.json").read_text())
        assert len(report["rows"]) == 80
        assert len(report["regressions"]) == 4

    def test_unknown_target_exits_3(self, suite_csv, tmp_path):
        assert run_cli("forecast", str(suite_csv), "--target", "1880",
                       "--out", str(tmp_path)) == 3

    def test_bad_element_map_exits_2(self, suite_csv, tmp_path):
        partial = tmp_path / "partial.json"
        partial.write_text(json.dumps({"e01": "honest"}))
        code = run_cli("forecast", str(suite_csv), "--target", "all",
                       "--element-map", str(partial), "--out", str(tmp_path))
        assert code == 2

    def test_determinism_minus_timestamps(self, suite_csv, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        for out in (a_dir, b_dir):
            assert run_cli("forecast", str(suite_csv), "--target", "all", "--out", str(out)) == 0
        assert (canonical_without_timestamps(a_dir / "forecast_report.json")
                == canonical_without_timestamps(b_dir / "forecast_report.json"))
        assert ((a_dir / "forecast_rows.csv").read_bytes()
                == (b_dir / "forecast_rows.csv").read_bytes())


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run([sys.executable, "-m", "attnet.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "simulate" in proc.stdout

    def test_usage_error_no_subcommand(self):
        assert main([]) == 3

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0
