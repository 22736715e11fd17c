import json

import pytest
from click.testing import CliRunner

from prefsearch import catalog as cat, cli


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    """A catalog generated through the CLI, reused across this module."""
    path = tmp_path_factory.mktemp("gen") / "catalog.json"
    result = CliRunner().invoke(cli.main, ["generate", "--seed", "3",
                                           "--out", str(path)])
    assert result.exit_code == 0, result.output
    return path


def test_generate_reports_hash(runner, tmp_path):
    out = tmp_path / "c.json"
    result = runner.invoke(cli.main, ["generate", "--seed", "1", "--out", str(out)])
    assert result.exit_code == 0
    assert "wrote 150 products" in result.output
    doc = json.loads(out.read_text())
    assert len(doc["products"]) == 150


def test_generate_matches_bundled_catalog(runner, tmp_path):
    out = tmp_path / "c.json"
    runner.invoke(cli.main, ["generate", "--seed", "1", "--out", str(out)])
    assert out.read_bytes() == cat.bundled_catalog_path().read_bytes()


def test_validate_ok(runner, generated):
    result = runner.invoke(cli.main, ["validate", "--catalog", str(generated)])
    assert result.exit_code == 0
    assert "150 products" in result.output and "18 categories" in result.output


def test_validate_rejects_corrupt_catalog(runner, tmp_path):
    bad = tmp_path / "bad.json"
    doc = json.loads(cat.bundled_catalog_path().read_text())
    doc["products"][0]["stars"] = 9
    bad.write_text(json.dumps(doc))
    result = runner.invoke(cli.main, ["validate", "--catalog", str(bad)])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_judge_histogram(runner, generated):
    result = runner.invoke(cli.main, ["judge", "--catalog", str(generated),
                                      "--format", "json"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["relevant"] == 15
    assert data["histogram"]["8"] == 5


def test_search_empty_query_lists_everything(runner, generated, tmp_path):
    query = tmp_path / "q.json"
    query.write_text(json.dumps({"criteria": []}))
    result = runner.invoke(cli.main, ["search", "--catalog", str(generated),
                                      "--query", str(query), "--format", "json"])
    assert result.exit_code == 0
    page = json.loads(result.output)
    assert page["total_count"] == 150
    assert len(page["items"]) == 15


def test_search_rejects_bad_weight(runner, generated, tmp_path):
    query = tmp_path / "q.json"
    query.write_text(json.dumps({"criteria": [
        {"criterion_id": "c1", "kind": "nominal", "weight": 2.0,
         "facet_id": "meal", "value": "breakfast"},
    ]}))
    result = runner.invoke(cli.main, ["search", "--catalog", str(generated),
                                      "--query", str(query)])
    assert result.exit_code == 2


def test_suggest_command(runner, generated):
    result = runner.invoke(cli.main, ["suggest", "--catalog", str(generated),
                                      "--prefix", "brea", "--format", "json"])
    assert result.exit_code == 0
    assert json.loads(result.output)[0]["text"] == "breakfast"


def test_script_run_replay_eval_round_trip(runner, tmp_path):
    catalog_path = cat.bundled_catalog_path()
    log_dir = tmp_path / "logs"
    log_dir.mkdir()
    for name in ("paul_session_weighted.json", "paul_session_faceted.json"):
        script_path = tmp_path / name
        script_path.write_text(
            cat.resources.files("prefsearch.data").joinpath(name).read_text())
        result = runner.invoke(cli.main, [
            "script-run", "--script", str(script_path),
            "--catalog", str(catalog_path),
            "--out", str(log_dir / f"{name}.ndjson"),
        ])
        assert result.exit_code == 0, result.output
        result = runner.invoke(cli.main, [
            "replay", "--log", str(log_dir / f"{name}.ndjson"),
            "--catalog", str(catalog_path),
        ])
        assert result.exit_code == 0
        assert "replay identically" in result.output

    groupings = tmp_path / "groups.csv"
    groupings.write_text("session_id,label\npaul-weighted,high-support\n"
                         "paul-faceted,low-support\n")
    out_dir = tmp_path / "report"
    result = runner.invoke(cli.main, [
        "eval", "--catalog", str(catalog_path), "--logs", str(log_dir),
        "--out", str(out_dir), "--groupings", str(groupings),
    ])
    assert result.exit_code == 0, result.output
    for name in ("recall.csv", "ndcg_series.csv", "loess_curves.csv",
                 "completion_times.csv"):
        assert (out_dir / name).exists()
    recall = (out_dir / "recall.csv").read_text()
    assert "paul-weighted,5,5,1.0" in recall
    assert "paul-faceted,3,5,0.6" in recall


def test_replay_detects_tampering(runner, tmp_path):
    catalog_path = cat.bundled_catalog_path()
    script = tmp_path / "s.json"
    script.write_text(cat.resources.files("prefsearch.data")
                      .joinpath("paul_session_weighted.json").read_text())
    log_path = tmp_path / "log.ndjson"
    runner.invoke(cli.main, ["script-run", "--script", str(script),
                             "--catalog", str(catalog_path), "--out", str(log_path)])
    lines = log_path.read_text().splitlines()
    event = json.loads(lines[2])
    event["ranked_ids"][0], event["ranked_ids"][1] = (
        event["ranked_ids"][1], event["ranked_ids"][0])
    event["visible_ids"] = event["ranked_ids"][: len(event["visible_ids"])]
    lines[2] = json.dumps(event)
    log_path.write_text("\n".join(lines) + "\n")
    result = runner.invoke(cli.main, ["replay", "--log", str(log_path),
                                      "--catalog", str(catalog_path)])
    assert result.exit_code == 1
    assert "diverges" in result.output


def test_script_with_bad_format_exits_2(runner, generated, tmp_path):
    script = tmp_path / "s.json"
    script.write_text(json.dumps({"format": "something/9", "engine": "weighted",
                                  "session_id": "x", "actions": []}))
    result = runner.invoke(cli.main, ["script-run", "--script", str(script),
                                      "--catalog", str(generated),
                                      "--out", str(tmp_path / "o.ndjson")])
    assert result.exit_code == 2


def test_unknown_subcommand(runner):
    result = runner.invoke(cli.main, ["frobnicate"])
    assert result.exit_code == 2


def test_missing_file_is_usage_error(runner):
    result = runner.invoke(cli.main, ["validate", "--catalog", "/no/such/file.json"])
    assert result.exit_code == 2
