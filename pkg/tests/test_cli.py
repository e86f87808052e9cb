import csv
import json

import pytest

from analytics import REPORT_FILES
from cli import pipeline
from cli.main import main
from conftest import MINI_CORPUS, mini_model_path


def read_csv(path):
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


class TestSingleModelCommands:
    def test_validate_bundled_model(self, capsys):
        assert main(["validate", str(mini_model_path("GeluidProdWindturbine"))]) == 0
        assert capsys.readouterr().out.startswith("GeluidProdWindturbine:")

    def test_validate_unreadable_model(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "absent.dmn")]) == 2
        assert "cannot read model" in capsys.readouterr().err

    def test_unknown_subcommand_is_a_usage_error(self, capsys):
        assert main(["transmogrify"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_exec_writes_one_result_per_case(self, tmp_path):
        assignments = tmp_path / "cases.jsonl"
        assignments.write_text(
            json.dumps({"i_bewoners": True, "i_slaapfunctie": False, "i_nachtverblijf": False, "i_ontruiming": True})
            + "\n\n"
            + json.dumps({"i_bewoners": False, "i_slaapfunctie": False, "i_nachtverblijf": False, "i_ontruiming": False})
            + "\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        code = main(["exec", str(mini_model_path("AlarminstallatieHebben")), str(assignments), "--out", str(out)])
        assert code == 0
        lines = (out / "AlarminstallatieHebben.results.jsonl").read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["case"] for line in lines] == [0, 1]

    def test_exec_strict_names_the_missing_input(self, tmp_path, capsys):
        assignments = tmp_path / "cases.jsonl"
        assignments.write_text(json.dumps({"i_bewoners": True}) + "\n", encoding="utf-8")
        code = main([
            "exec", str(mini_model_path("AlarminstallatieHebben")), str(assignments),
            "--strict", "--out", str(tmp_path / "out"),
        ])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "i_slaapfunctie" in err

    def test_exec_rejects_non_json_lines(self, tmp_path, capsys):
        assignments = tmp_path / "cases.jsonl"
        assignments.write_text("{not json\n", encoding="utf-8")
        code = main(["exec", str(mini_model_path("AlarminstallatieHebben")), str(assignments), "--out", str(tmp_path)])
        assert code == 2
        assert "cases.jsonl:1" in capsys.readouterr().err

    def test_simplify_writes_model_and_report(self, tmp_path):
        assert main(["simplify", str(mini_model_path("AlarminstallatieHebben")), "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "AlarminstallatieHebben.simplify_report.json").read_text(encoding="utf-8"))
        assert report["nodes_after"] == report["nodes_before"] - len(report["removed_node_ids"])
        assert report["removed_node_ids"]
        simplified = pipeline.load_model(tmp_path / "AlarminstallatieHebben.simplified.json")
        assert len(simplified.nodes) == report["nodes_after"]

    def test_gen_cases_then_equivalence_with_itself(self, tmp_path, capsys):
        model = str(mini_model_path("AlarminstallatieHebben"))
        assert main(["gen-cases", model, "--out", str(tmp_path)]) == 0
        cases = tmp_path / "AlarminstallatieHebben.cases.jsonl"
        assert len(cases.read_text(encoding="utf-8").splitlines()) == 16

        assert main(["equivalence", model, model, str(cases), "--out", str(tmp_path)]) == 0
        assert "16/16 cases agree" in capsys.readouterr().out
        summary = read_csv(tmp_path / "equivalence_summary.csv")
        assert summary[1][:4] == ["AlarminstallatieHebben", "16", "16", "1.000000"]

    def test_gen_cases_refuses_untestable_model(self, tmp_path, capsys):
        assert main(["gen-cases", str(mini_model_path("BouwwerkBrandveiligheid")), "--out", str(tmp_path)]) == 2
        assert "i_gebruiksfunctie" in capsys.readouterr().err

    def test_stats_and_kernel(self, tmp_path):
        models = [str(mini_model_path(model_id)) for model_id in ("GeluidProdWindturbine", "KoelwaterLozen", "AlarminstallatieHebben")]
        assert main(["stats", *models, "--out", str(tmp_path)]) == 0
        stats = read_csv(tmp_path / "stats.csv")
        assert stats[0] == ["model_id", "metric", "value"]
        assert {row[0] for row in stats[1:]} == {"GeluidProdWindturbine", "KoelwaterLozen", "AlarminstallatieHebben"}

        assert main(["kernel", *models, "--kind", "sp", "--out", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "kernel_sp.csv")
        assert rows[0] == ["model_id", "other_id", "metric", "value"]
        assert len(rows) == 1 + 3
        assert all(0.0 <= float(row[3]) <= 1.0 for row in rows[1:])

    def test_bad_config_is_a_data_error(self, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text("runs: 0\n", encoding="utf-8")
        code = main(["gen-cases", str(mini_model_path("AlarminstallatieHebben")), "--config", str(config)])
        assert code == 2
        assert "runs" in capsys.readouterr().err


class TestReproduce:
    def run(self, out):
        argv = ["reproduce", "--stub", "--corpus", str(MINI_CORPUS), "--out", str(out), "--runs", "1", "--seed", "7"]
        assert main(argv) == 0

    def test_emits_every_report_file(self, tmp_path):
        self.run(tmp_path)
        report_dir = tmp_path / pipeline.REPORT_DIR
        for file_name, header in REPORT_FILES.values():
            assert read_csv(report_dir / file_name)[0] == header
        assert (report_dir / "gaps.csv").exists()
        assert json.loads((report_dir / "report_meta.json").read_text(encoding="utf-8"))["seed"] == 7
        assert (tmp_path / "manifest.json").exists()
        assert sorted(path.stem for path in (tmp_path / pipeline.CASES_DIR).glob("*.jsonl")) == [
            "AlarminstallatieHebben", "GeluidProdWindturbine", "KoelwaterLozen", "MijnbouwwerkMelden",
        ]

    @pytest.mark.parametrize("max_workers", ["1", "3"])
    def test_rerun_is_byte_identical(self, tmp_path, max_workers):
        first, second = tmp_path / "first", tmp_path / "second"
        self.run(first)
        argv = ["reproduce", "--stub", "--corpus", str(MINI_CORPUS), "--out", str(second), "--runs", "1",
                "--seed", "7", "--max-workers", max_workers]
        assert main(argv) == 0

        records = f"{pipeline.RUNS_DIR}/records.jsonl"
        assert (first / records).read_bytes() == (second / records).read_bytes()
        for file_name, _ in REPORT_FILES.values():
            path = f"{pipeline.REPORT_DIR}/{file_name}"
            assert (first / path).read_bytes() == (second / path).read_bytes(), file_name

    def test_resume_keeps_existing_records(self, tmp_path):
        self.run(tmp_path)
        records = tmp_path / pipeline.RUNS_DIR / "records.jsonl"
        before = records.read_bytes()
        self.run(tmp_path)
        assert records.read_bytes() == before
