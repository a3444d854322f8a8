import dataclasses
import json
import re

import pytest

from sdof.cli import (ExperimentConfig, main, parse_config, print_schema, run,
                      worker_count)
from sdof.errors import UsageError

FAST_ARGS = {
    "helper_fading_mi": ["--M=1", "--realizations=2"],
    "helper_fixed_mc": ["--M=1", "--trials=2000", "--grid=1e4,1e5,1e6,1e7",
                        "--seed=8"],
    "interference_fixed_verify": ["--K=3", "--m=1", "--mutate=true"],
    "interference_fading_verify": ["--K=3", "--n=1", "--realizations=2"],
    "interference_fading_mi": ["--K=3", "--n=1"],
    "mac_partial": ["--K=3", "--m_informed=2"],
    "entropy_bound": ["--P=1e4", "--samples=30"],
    "sdof_table": ["--K=3", "--M=2"],
    "region": ["--K=3"],
}


def fast_config(name, tmp_path, tag=""):
    args = [f"--experiment={name}", "--seed=1",
            f"--out_json={tmp_path}/{name}{tag}.json",
            f"--out_csv={tmp_path}/{name}{tag}.csv",
            f"--out_plot={tmp_path}/{name}{tag}_plot.csv"]
    return parse_config(None, args + FAST_ARGS[name])


class TestConfigParsing:
    def test_file_plus_overrides(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("# comment\nexperiment = region\nK = 4\nseed = 2\n")
        cfg = parse_config(str(path), ["--K=5"])
        assert cfg.experiment == "region"
        assert cfg.K == 5 and cfg.seed == 2

    def test_grid_parsing(self):
        cfg = parse_config(None, ["--grid=1e3,1e5 ,1e7"])
        assert cfg.grid == (1e3, 1e5, 1e7)

    def test_unknown_key_rejected(self):
        with pytest.raises(UsageError):
            parse_config(None, ["--nonsense=1"])

    def test_bad_boolean_rejected(self):
        with pytest.raises(UsageError):
            parse_config(None, ["--mutate=perhaps"])

    def test_missing_file(self):
        with pytest.raises(UsageError):
            parse_config("/nonexistent/path.cfg")


class TestRun:
    @pytest.mark.parametrize("name", sorted(FAST_ARGS))
    def test_experiment_passes_and_writes_artifacts(self, name, tmp_path):
        cfg = fast_config(name, tmp_path)
        assert run(cfg) == 0
        report = json.loads((tmp_path / f"{name}.json").read_text())
        assert report["ok"] is True
        assert report["schema_version"]
        assert (tmp_path / f"{name}.csv").exists()
        assert (tmp_path / f"{name}_plot.csv").exists()
        assert (tmp_path / f"{name}.json.meta.json").exists()

    @pytest.mark.parametrize("name", sorted(FAST_ARGS))
    def test_reports_are_byte_identical_across_reruns(self, name, tmp_path):
        first = fast_config(name, tmp_path, tag="_a")
        second = fast_config(name, tmp_path, tag="_b")
        run(first)
        run(second)
        a = (tmp_path / f"{name}_a.json").read_bytes()
        b = (tmp_path / f"{name}_b.json").read_bytes()
        # reports differ only in their configured output paths
        a = a.replace(b"_a.json", b".json").replace(b"_a.csv", b".csv").replace(b"_a_plot", b"_plot")
        b = b.replace(b"_b.json", b".json").replace(b"_b.csv", b".csv").replace(b"_b_plot", b"_plot")
        assert a == b

    def test_failing_assertion_still_writes_report(self, tmp_path):
        cfg = fast_config("helper_fading_mi", tmp_path)
        cfg.slope_tol = 1e-9
        assert run(cfg) == 1
        report = json.loads((tmp_path / "helper_fading_mi.json").read_text())
        assert report["ok"] is False

    def test_unknown_experiment_is_usage_error(self, tmp_path):
        code = main(["run", "/nonexistent.cfg"])
        assert code == 2
        cfg = ExperimentConfig(experiment="bogus", seed=1)
        with pytest.raises(UsageError):
            run(cfg)

    def test_seed_is_mandatory(self):
        with pytest.raises(UsageError):
            run(ExperimentConfig(experiment="region"))


class TestSchema:
    def test_lists_every_config_field(self, capsys):
        print_schema()
        text = capsys.readouterr().out
        for f in dataclasses.fields(ExperimentConfig):
            assert f.name in text
        assert "schema version" in text

    def test_example_round_trips(self, capsys, tmp_path):
        print_schema()
        text = capsys.readouterr().out
        example = re.search(r"--- BEGIN EXAMPLE ---\n(.*?)\n--- END EXAMPLE ---",
                            text, re.S).group(1)
        path = tmp_path / "example.cfg"
        path.write_text(example + "\n")
        cfg = parse_config(str(path))
        assert cfg.experiment == "interference_fading_verify"
        assert cfg.seed == 1


class TestMain:
    def test_schema_command(self, capsys):
        assert main(["schema"]) == 0
        assert "Keys:" in capsys.readouterr().out

    def test_formulas_command(self, capsys):
        assert main(["formulas", "--model=mac", "--K=3"]) == 0
        out = capsys.readouterr().out
        assert "2/3" in out and "6/7" in out

    def test_run_command(self, tmp_path, capsys):
        path = tmp_path / "exp.cfg"
        path.write_text("experiment = region\nseed = 3\n"
                        f"out_json = {tmp_path}/r.json\n"
                        f"out_csv = {tmp_path}/r.csv\n"
                        f"out_plot = {tmp_path}/r_plot.csv\n")
        assert main(["run", str(path), "--K=4"]) == 0
        report = json.loads((tmp_path / "r.json").read_text())
        assert report["config"]["K"] == 4

    def test_usage_error_exit_code(self, capsys):
        assert main(["run", "/definitely/not/here.cfg"]) == 2


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SDOF_THREADS", "2")
    assert worker_count() == 2
    monkeypatch.setenv("SDOF_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("SDOF_THREADS", "zebra")
    with pytest.raises(UsageError):
        worker_count()
