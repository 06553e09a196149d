"""Experiment runners, config parsing, records, CLI exit codes."""

import json

import pytest

from prodset_lab.errors import ConfigError
from prodset_lab.cli import main
from prodset_lab.lab import (
    ExperimentConfig,
    parse_config,
    run_cover_greedy,
    run_counterexample,
    run_experiment,
    run_jin_verify,
    run_thm2_bound,
    run_walk_density,
)


def test_parse_config():
    text = """
    # comment
    experiment = jin-verify
    seed = 99
    trials = 10
    min-density = 0.2
    """
    config = parse_config(text)
    assert config.experiment == "jin-verify"
    assert config.seed == 99
    assert config.get_int("trials", 0) == 10
    assert config.get_float("min-density", 0) == 0.2
    with pytest.raises(ConfigError):
        parse_config("no equals sign here")
    with pytest.raises(ConfigError):
        parse_config("seed = 3")  # no experiment named anywhere


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig("nope"))


def test_jin_verify_small():
    record = run_jin_verify(ExperimentConfig("jin-verify", seed=7, params={"trials": 30}))
    assert record.passed and record.failed == 0
    for trial in record.trials:
        assert trial["min_cover"] <= trial["bound"]
        assert trial["verified_by"] == "periodic_product+syndeticity_index"


def test_thm2_small():
    record = run_thm2_bound(
        ExperimentConfig("thm2-bound", seed=3, params={"trials": 24, "orders": "16,32"})
    )
    assert record.passed
    assert all(t["F_size"] <= t["bound"] for t in record.trials)


def test_counterexample_radius_zero_and_full_circle():
    record = run_counterexample(
        ExperimentConfig("counterexample", seed=1, params={"radii": "0"})
    )
    assert record.passed
    cert = record.trials[0]["certificate"]
    assert cert["F"] == ["e"] and cert["delta"] == 1e-9

    full = run_counterexample(
        ExperimentConfig(
            "counterexample", seed=1, params={"radii": "0", "arcs": "0,1"}
        )
    )
    assert not full.passed
    assert full.trials[0]["outcome"] == "undetermined"
    assert full.exit_code() == 2


def test_walk_density_fixtures():
    record = run_walk_density(
        ExperimentConfig(
            "walk-density",
            seed=5,
            params={"free-n": 12, "free-exact-n": 6, "mc-walks": 20000, "markov-n": 4000},
        )
    )
    assert record.passed, record.trials
    fixtures = {t["fixture"] for t in record.trials}
    assert fixtures == {"z-parity", "z3-rotation", "f2-first-letter"}


def test_cover_greedy_small():
    record = run_cover_greedy(
        ExperimentConfig("cover-greedy", seed=11, params={"trials": 20, "order": 24})
    )
    # hard instances may exhaust the search budget (undetermined), never fail
    assert record.failed == 0
    done = [t for t in record.trials if t["outcome"] == "pass"]
    assert len(done) >= 15
    assert all(t["gap"] >= 0 for t in done)
    assert sum(record.aggregate["gap_histogram"].values()) == len(done)


def test_record_round_trip_and_csv(tmp_path):
    record = run_jin_verify(ExperimentConfig("jin-verify", seed=2, params={"trials": 5}))
    payload = json.loads(record.to_json())
    assert payload["experiment"] == "jin-verify"
    assert "timestamp" in payload
    canon = json.loads(record.canonical_bytes())
    assert "timestamp" not in canon

    json_path, csv_path = record.write(tmp_path)
    assert json_path.exists() and csv_path.exists()
    header = csv_path.read_text().splitlines()[0]
    assert "outcome" in header and "bound" in header


def test_reproducible_across_jobs_and_runs():
    base = {"trials": 12}
    a = run_jin_verify(ExperimentConfig("jin-verify", seed=42, jobs=1, params=dict(base)))
    b = run_jin_verify(ExperimentConfig("jin-verify", seed=42, jobs=3, params=dict(base)))
    c = run_jin_verify(ExperimentConfig("jin-verify", seed=42, jobs=1, params=dict(base)))
    assert a.canonical_bytes() == b.canonical_bytes() == c.canonical_bytes()
    d = run_jin_verify(ExperimentConfig("jin-verify", seed=43, jobs=1, params=dict(base)))
    assert d.canonical_bytes() != a.canonical_bytes()


def test_cli_exit_codes(tmp_path, capsys):
    config = tmp_path / "jin.cfg"
    config.write_text("experiment = jin-verify\ntrials = 5\n")
    assert main(["jin-verify", "--config", str(config), "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "jin-verify" in out

    # undetermined-only run: full-circle fixture cannot be refuted
    cfg2 = tmp_path / "cx.cfg"
    cfg2.write_text("experiment = counterexample\nradii = 0\narcs = 0,1\n")
    assert main(["counterexample", "--config", str(cfg2)]) == 2

    # bad usage and bad config
    assert main(["not-a-command"]) == 3
    cfg3 = tmp_path / "bad.cfg"
    cfg3.write_text("experiment = thm2-bound\n")
    assert main(["jin-verify", "--config", str(cfg3)]) == 3
    assert main(["jin-verify", "--config", str(tmp_path / "missing.cfg")]) == 3


def test_cli_writes_output(tmp_path):
    config = tmp_path / "cover.cfg"
    config.write_text("experiment = cover-greedy\ntrials = 6\norder = 16\n")
    code = main(
        ["cover-greedy", "--config", str(config), "--out", str(tmp_path / "res")]
    )
    assert code == 0
    written = list((tmp_path / "res").glob("*.json"))
    assert len(written) == 1
    payload = json.loads(written[0].read_text())
    assert payload["aggregate"]["trials"] == 6
