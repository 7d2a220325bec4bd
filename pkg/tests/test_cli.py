import json

import pytest
from click.testing import CliRunner

from aida.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, kb, args, **kwargs):
    return runner.invoke(main, args + ["--kb", str(kb)], catch_exceptions=False, **kwargs)


class TestKbCommands:
    def test_stats_exact_line(self, runner, kb_copy):
        result = invoke(runner, kb_copy, ["kb", "stats"])
        assert result.exit_code == 0
        assert result.output == "classes: 73, object properties: 32, data properties: 47\n"

    def test_validate_clean_kb_exits_zero(self, runner, kb_copy):
        result = invoke(runner, kb_copy, ["kb", "validate"])
        assert result.exit_code == 0, result.output
        assert "result: ok" in result.output

    def test_validate_exits_one_when_label_removed(self, runner, kb_copy):
        schema_file = kb_copy / "schema" / "aidentifyage-core.ttl"
        text = schema_file.read_text(encoding="utf-8")
        mutated = text.replace('rdfs:label "tooth stage" ;\n', "", 1)
        assert mutated != text
        schema_file.write_text(mutated, encoding="utf-8")
        result = invoke(runner, kb_copy, ["kb", "validate"])
        assert result.exit_code == 1
        assert "missing label" in result.output

    def test_query_csv_golden(self, runner, kb_copy):
        result = invoke(
            runner, kb_copy, ["kb", "query", "-f", str(kb_copy / "queries" / "paper-query.rq"), "--csv"]
        )
        assert result.exit_code == 0
        assert result.output == (
            "meanAge,stdDev,minAge,maxAge,modelName,taskType\n"
            "17.2,1.3,14.6,19.8,demo-cnn,classification\n"
        )

    def test_query_json(self, runner, kb_copy):
        result = invoke(
            runner, kb_copy, ["kb", "query", "-f", str(kb_copy / "queries" / "paper-query.rq"), "--json"]
        )
        payload = json.loads(result.output)
        assert payload["rows"][0]["taskType"]["value"] == "classification"

    def test_query_missing_file_exits_three(self, runner, kb_copy):
        result = invoke(runner, kb_copy, ["kb", "query", "-f", "nope.rq"])
        assert result.exit_code == 3

    def test_bad_query_exits_one(self, runner, kb_copy, tmp_path):
        bad = tmp_path / "bad.rq"
        bad.write_text("SELECT WHERE {", encoding="utf-8")
        result = invoke(runner, kb_copy, ["kb", "query", "-f", str(bad)])
        assert result.exit_code == 1

    def test_cq_run_eleven_passes(self, runner, kb_copy):
        result = invoke(runner, kb_copy, ["kb", "cq", "run"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert sum(1 for line in lines if line.startswith("pass ")) == 11
        assert lines[-1] == "11/11 passed"

    def test_deterministic_output(self, runner, kb_copy):
        a = invoke(runner, kb_copy, ["kb", "stats"]).output
        b = invoke(runner, kb_copy, ["kb", "stats"]).output
        assert a == b


class TestConvert:
    def test_fdi_to_uns(self, runner):
        result = runner.invoke(main, ["convert", "--from", "fdi", "--to", "uns", "11"])
        assert result.exit_code == 0
        assert result.output == "8\n"

    def test_invalid_code_exits_one(self, runner):
        result = runner.invoke(main, ["convert", "--from", "fdi", "--to", "uns", "99"])
        assert result.exit_code == 1

    def test_unknown_system_is_usage_error(self, runner):
        result = runner.invoke(main, ["convert", "--from", "fdi", "--to", "roman", "11"])
        assert result.exit_code == 2


class TestCaseWorkflow:
    def test_full_flow(self, runner, kb_copy, tmp_path):
        payload = {
            "case_id": "cli-1",
            "requesting_entity": "Court",
            "examination_date": "2025-11-21",
            "expert": {"name": "A. Silva"},
            "individual": {"biological_sex": "female"},
            "opg": {"image_id": "img-cli", "acquisition_date": "2025-11-19"},
            "teeth": [{"fdi": str(f)} for f in (31, 32, 33, 34, 35, 36, 37)],
        }
        case_file = tmp_path / "case.json"
        case_file.write_text(json.dumps(payload), encoding="utf-8")

        created = invoke(runner, kb_copy, ["case", "new", "-f", str(case_file)])
        assert created.exit_code == 0
        assert created.output.strip().endswith("case/cli-1")

        for fdi in (31, 32, 33, 34, 35, 36, 37):
            staged = invoke(
                runner,
                kb_copy,
                [
                    "case", "stage", "cli-1",
                    "--tooth", str(fdi), "--stage", "E", "--method", "demirjian-1973",
                ],
            )
            assert staged.exit_code == 0, staged.output

        assessed = invoke(
            runner,
            kb_copy,
            [
                "case", "assess", "cli-1",
                "--method", "demirjian-1973", "--study", "demo-study", "--threshold", "18",
            ],
        )
        assert assessed.exit_code == 0
        assert "mean 17.2" in assessed.output
        assert "interval [14.6, 19.8]" in assessed.output
        assert "verdict below" in assessed.output

        report = invoke(runner, kb_copy, ["case", "report", "cli-1"])
        assert report.exit_code == 0
        assert "[14.6, 19.8]" in report.output

        report_json = invoke(runner, kb_copy, ["case", "report", "cli-1", "--json"])
        body = json.loads(report_json.output)
        assert body["mean_age"] == 17.2

    def test_duplicate_case_exits_one(self, runner, kb_copy, tmp_path):
        payload = {
            "case_id": "demo-0001",
            "requesting_entity": "Court",
            "examination_date": "2025-11-21",
            "expert": {"name": "A"},
            "opg": {"image_id": "img-x", "acquisition_date": "2025-11-19"},
        }
        case_file = tmp_path / "case.json"
        case_file.write_text(json.dumps(payload), encoding="utf-8")
        result = invoke(runner, kb_copy, ["case", "new", "-f", str(case_file)])
        assert result.exit_code == 1

    def test_stage_impermissible_exits_one(self, runner, kb_copy):
        result = invoke(
            runner,
            kb_copy,
            ["case", "stage", "demo-0001", "--tooth", "31", "--stage", "Z", "--method", "demirjian-1973"],
        )
        assert result.exit_code == 1
        assert "not permissible" in result.output

    def test_unknown_case_exits_one(self, runner, kb_copy):
        result = invoke(runner, kb_copy, ["case", "report", "ghost"])
        assert result.exit_code == 1


class TestAiIngest:
    def test_ingest_file_with_model_and_run(self, runner, kb_copy, tmp_path):
        document = {
            "model": {
                "model_id": "reg-2",
                "qualities": [
                    {"title": "name", "value": "reg-2"},
                    {"title": "task", "value": "regression"},
                ],
            },
            "run": {
                "run_id": "run-cli",
                "model_id": "reg-2",
                "collection": {"collection_id": "col-cli", "members": ["opg-0001"]},
                "outputs": [{"opg_ref": "opg-0001", "estimated_age": 17.8}],
                "timestamp": "2025-11-20T10:00:00Z",
                "measures": [{"title": "mae", "value": "1.1"}],
            },
        }
        path = tmp_path / "ingest.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        result = invoke(
            runner, kb_copy, ["ai", "ingest", "-f", str(path), "--case", "demo-0001"]
        )
        assert result.exit_code == 0, result.output
        assert "run run-cli recorded" in result.output
        assert "AI assessment ai-run-cli attached" in result.output

        report = invoke(runner, kb_copy, ["case", "report", "demo-0001"])
        assert "estimated age 17.8" in report.output

    def test_ingest_run_for_unknown_model_fails(self, runner, kb_copy, tmp_path):
        document = {
            "run": {
                "run_id": "run-x",
                "model_id": "ghost",
                "collection": {"collection_id": "c", "members": ["opg-0001"]},
                "outputs": [{"opg_ref": "opg-0001", "estimated_age": 17.0}],
            }
        }
        path = tmp_path / "ingest.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        result = invoke(runner, kb_copy, ["ai", "ingest", "-f", str(path)])
        assert result.exit_code == 1


class TestUsage:
    def test_missing_subcommand_exits_two(self, runner):
        result = runner.invoke(main, ["kb", "query"])  # missing -f
        assert result.exit_code == 2

    def test_missing_kb_exits_three(self, runner, tmp_path):
        result = runner.invoke(main, ["kb", "stats", "--kb", str(tmp_path / "missing")])
        assert result.exit_code == 3

    def test_env_var_sets_kb_root(self, runner, kb_copy, monkeypatch):
        monkeypatch.setenv("AIDA_KB_ROOT", str(kb_copy))
        result = runner.invoke(main, ["kb", "stats"], catch_exceptions=False)
        assert result.exit_code == 0
        assert "classes: 73" in result.output
