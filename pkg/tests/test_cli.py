"""End-to-end command-line workflows on a small manifest."""

import json
import random

import pytest

from rulelab.catalog import DEMO_RULES, write_rules_manifest
from rulelab.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main
from rulelab.exemplars import load_list, read_split_manifest


@pytest.fixture()
def workspace(tmp_path):
    rules = [r for r in DEMO_RULES if r.rule_id in (
        "blue", "not-circle", "circle-or-blue", "small-and-blue",
        "exists-triangle", "same-color-as-another",
    )]
    write_rules_manifest(rules, tmp_path / "rules.json")
    config = {
        "rules": "rules.json",
        "lists_dir": "out/lists",
        "output_dir": "out",
        "seed": 11,
        "learner": {"max_size": 3, "alpha": 0.95, "beta": 0.5, "seed": 1},
        "subsamples": 200,
    }
    (tmp_path / "config.json").write_text(json.dumps(config))
    return tmp_path


def run(workspace, *argv) -> int:
    return main([argv[0], "--config", str(workspace / "config.json"), *argv[1:]])


def test_missing_config_is_config_error(tmp_path):
    assert main(["gen", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG


def test_config_with_unknown_keys_rejected(tmp_path):
    (tmp_path / "config.json").write_text(json.dumps({"rules": "r", "surprise": 1}))
    assert main(["gen", "--config", str(tmp_path / "config.json")]) == EXIT_CONFIG


def test_gen_writes_one_list_per_rule(workspace):
    assert run(workspace, "gen") == EXIT_OK
    lists_dir = workspace / "out" / "lists"
    names = sorted(p.name for p in lists_dir.glob("*.json"))
    assert "blue.json" in names and "manifest.json" in names
    assert len(names) == 7  # 6 rules + manifest
    loaded = load_list(lists_dir / "blue.json")
    assert loaded.rule_id == "blue" and len(loaded.sets) == 25


def test_gen_rerun_is_byte_identical(workspace):
    assert run(workspace, "gen") == EXIT_OK
    first = {p.name: p.read_bytes() for p in (workspace / "out" / "lists").glob("*.json")}
    assert run(workspace, "gen") == EXIT_OK
    second = {p.name: p.read_bytes() for p in (workspace / "out" / "lists").glob("*.json")}
    assert first == second


def test_gen_empty_manifest_warns(tmp_path, capsys):
    (tmp_path / "rules.json").write_text(json.dumps({"rules": []}))
    (tmp_path / "config.json").write_text(
        json.dumps({"rules": "rules.json", "lists_dir": "lists", "output_dir": "out", "seed": 1})
    )
    assert main(["gen", "--config", str(tmp_path / "config.json")]) == EXIT_OK
    assert "empty" in capsys.readouterr().err
    assert not (tmp_path / "lists").exists()


def test_gen_reports_parse_failures(tmp_path, capsys):
    (tmp_path / "rules.json").write_text(
        json.dumps({"rules": [
            {"id": "ok", "kind": "propositional", "source": "(is-color blue)"},
            {"id": "broken", "kind": "propositional", "source": "(is-color mauve)"},
        ]})
    )
    (tmp_path / "config.json").write_text(
        json.dumps({"rules": "rules.json", "lists_dir": "lists", "output_dir": "out", "seed": 1})
    )
    assert main(["gen", "--config", str(tmp_path / "config.json")]) == EXIT_DATA
    assert "broken" in capsys.readouterr().err
    assert (tmp_path / "lists" / "ok.json").exists()


def test_run_plot_emits_series_elicited_posterior(workspace):
    run(workspace, "gen")
    assert run(workspace, "run", "--engine", "plot") == EXIT_OK
    run_dir = workspace / "out" / "runs" / "plot"
    for rule_id in ("blue", "exists-triangle"):
        assert (run_dir / f"{rule_id}.series.json").exists()
        posterior = (run_dir / f"{rule_id}.posterior.csv").read_text().splitlines()
        assert posterior[0] == "set_index,concept,log_prior,log_likelihood,log_posterior"
        assert posterior[1].startswith("0,")
        elicited = json.loads((run_dir / f"{rule_id}.elicited.json").read_text())
        assert len(elicited["per_set"]) == 25
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert "blue.series.json" in manifest["files"]


def test_run_mh_engine(workspace):
    run(workspace, "gen")
    config = json.loads((workspace / "config.json").read_text())
    config["learner"]["engine"] = "mh"
    config["learner"]["mh_iterations"] = 1500
    (workspace / "config.json").write_text(json.dumps(config))
    assert run(workspace, "run", "--engine", "plot") == EXIT_OK
    elicited = json.loads(
        (workspace / "out" / "runs" / "plot" / "blue.elicited.json").read_text()
    )
    assert len(elicited["per_set"]) == 25


def test_transport_failure_exit_code(workspace, monkeypatch):
    import rulelab.cli as cli_module
    from rulelab.harness import TransportError

    run(workspace, "gen")
    (workspace / "endpoint.json").write_text(json.dumps({
        "base_url": "https://example.test/v1", "model": "m",
        "credential_env": "RULELAB_PRESENT_KEY",
    }))
    config = json.loads((workspace / "config.json").read_text())
    config["endpoint"] = "endpoint.json"
    (workspace / "config.json").write_text(json.dumps(config))
    monkeypatch.setenv("RULELAB_PRESENT_KEY", "k")

    def explode(*args, **kwargs):
        raise TransportError("endpoint unreachable")

    monkeypatch.setattr(cli_module, "run_session", explode)
    from rulelab.cli import EXIT_TRANSPORT

    assert run(workspace, "run", "--engine", "llm") == EXIT_TRANSPORT


def test_run_llm_without_endpoint_is_config_error(workspace):
    run(workspace, "gen")
    assert run(workspace, "run", "--engine", "llm") == EXIT_CONFIG


def test_run_llm_without_credential_is_config_error(workspace, monkeypatch):
    run(workspace, "gen")
    (workspace / "endpoint.json").write_text(json.dumps({
        "base_url": "https://example.test/v1",
        "model": "m",
        "credential_env": "RULELAB_MISSING_KEY",
    }))
    config = json.loads((workspace / "config.json").read_text())
    config["endpoint"] = "endpoint.json"
    (workspace / "config.json").write_text(json.dumps(config))
    monkeypatch.delenv("RULELAB_MISSING_KEY", raising=False)
    assert run(workspace, "run", "--engine", "llm") == EXIT_CONFIG


def test_grade_gold_elicited_matches_everything(workspace):
    run(workspace, "gen")
    rules = json.loads((workspace / "rules.json").read_text())["rules"]
    elicited = {row["id"]: [row["source"]] * 25 for row in rules}
    (workspace / "elicited.json").write_text(json.dumps(elicited))
    assert run(workspace, "grade", "--elicited", str(workspace / "elicited.json")) == EXIT_OK
    doc = json.loads((workspace / "out" / "reports" / "grading.json").read_text())
    assert doc["match_rate"] == 1.0 and doc["equivalence_rate"] == 1.0


def test_grade_lists_unparseable_entries_as_no_match(workspace):
    run(workspace, "gen")
    rules = json.loads((workspace / "rules.json").read_text())["rules"]
    elicited = {row["id"]: [row["source"]] * 25 for row in rules}
    elicited["blue"] = ["(is-color ultraviolet)"] * 25
    (workspace / "elicited.json").write_text(json.dumps(elicited))
    assert run(workspace, "grade", "--elicited", str(workspace / "elicited.json")) == EXIT_OK
    doc = json.loads((workspace / "out" / "reports" / "grading.json").read_text())
    assert doc["match_rate"] == pytest.approx(5 / 6)
    assert len(doc["unparseable"]) == 25
    summary = (workspace / "out" / "reports" / "grading_summary.csv").read_text()
    blue_row = [line for line in summary.splitlines() if line.startswith("blue,")][0]
    assert blue_row.endswith("False,False")


def test_grade_empty_elicited_file(workspace, capsys):
    run(workspace, "gen")
    (workspace / "elicited.json").write_text("{}")
    assert run(workspace, "grade", "--elicited", str(workspace / "elicited.json")) == EXIT_DATA
    doc = json.loads((workspace / "out" / "reports" / "grading.json").read_text())
    assert doc["match_rate"] is None


def _write_human_csv(workspace, rule_ids, n_subjects=6, seed=0):
    rng = random.Random(seed)
    rows = ["subject_id,rule_id,set_index,object_index,response"]
    for rule_id in rule_ids:
        gold = load_list(workspace / "out" / "lists" / f"{rule_id}.json")
        for s in range(n_subjects):
            accuracy = 0.9 if s else 0.6
            for set_index, object_index, _ctx, label in gold.iter_items():
                response = label if rng.random() < accuracy else not label
                rows.append(f"s{s},{rule_id},{set_index},{object_index},{response}")
    (workspace / "humans.csv").write_text("\n".join(rows) + "\n")
    config = json.loads((workspace / "config.json").read_text())
    config["human_data"] = "humans.csv"
    (workspace / "config.json").write_text(json.dumps(config))


def test_report_model_only(workspace):
    run(workspace, "gen")
    run(workspace, "run", "--engine", "plot")
    assert run(workspace, "report", "--series", f"plot={workspace}/out/runs/plot") == EXIT_OK
    summary = (workspace / "out" / "reports" / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("# inputs:")
    header = summary[1].split(",")
    assert header[:3] == ["cohort", "all_overall", "all_overall_sd"]
    plot_row = [line for line in summary if line.startswith("plot,")]
    assert len(plot_row) == 1
    assert (workspace / "out" / "reports" / "trajectories.csv").exists()
    assert not list((workspace / "out" / "reports").glob("deltas_*.csv"))


def test_report_with_humans_adds_rows_and_deltas(workspace):
    run(workspace, "gen")
    run(workspace, "run", "--engine", "plot")
    rule_ids = [r["id"] for r in json.loads((workspace / "rules.json").read_text())["rules"]]
    _write_human_csv(workspace, rule_ids)
    assert run(workspace, "report", "--series", f"plot={workspace}/out/runs/plot") == EXIT_OK
    summary = (workspace / "out" / "reports" / "summary.csv").read_text().splitlines()
    human_rows = [line for line in summary if line.startswith("human,")]
    assert len(human_rows) == 1
    cells = human_rows[0].split(",")
    assert cells[1] and cells[2]  # mean and propagated SD both present
    deltas = (workspace / "out" / "reports" / "deltas_plot.csv").read_text().splitlines()
    assert deltas[1].split(",")[0] == "rule_id"
    assert len(deltas) == 2 + len(rule_ids)
    trajectories = (workspace / "out" / "reports" / "trajectories.csv").read_text()
    assert ",human," in trajectories and ",plot," in trajectories


def test_split_partitions_manifest(workspace):
    assert run(workspace, "split", "--held-out", "2") == EXIT_OK
    manifest = workspace / "out" / "splits" / "split_seed11_held2.json"
    train, held = read_split_manifest(manifest)
    assert len(train) == 4 and len(held) == 2


def test_split_held_out_too_large(workspace):
    assert run(workspace, "split", "--held-out", "6") == EXIT_DATA


def test_fit_noise_requires_human_data(workspace):
    run(workspace, "gen")
    assert run(workspace, "fit-noise") == EXIT_CONFIG


def test_fit_noise_end_to_end(workspace):
    run(workspace, "gen")
    rule_ids = ["blue", "not-circle"]
    _write_human_csv(workspace, rule_ids, n_subjects=8)
    config = json.loads((workspace / "config.json").read_text())
    config["fit_grid_step"] = 0.25
    config["learner"]["max_size"] = 2
    (workspace / "config.json").write_text(json.dumps(config))
    assert run(workspace, "fit-noise") == EXIT_OK
    doc = json.loads((workspace / "out" / "reports" / "noise_fit.json").read_text())
    assert 0.0 <= doc["alpha"] <= 1.0 and 0.0 <= doc["beta"] <= 1.0
    assert doc["rules"] == ["blue", "not-circle"]
