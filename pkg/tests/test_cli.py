"""Tests for the oga-mcts command line."""

from __future__ import annotations

import pytest

from oga_mcts.cli import build_parser, main

EXPERIMENT = """\
[experiment]
episodes = 2
seed = 5

[grid]
variants = ["pruned"]
alpha = [0.0, 0.5]
pg = [false]
policy = ["uct", "random"]
budget = [10, 20]

[[environments]]
name = "figure1"
horizon = 1
"""

BENCH = """\
[[environments]]
name = "navigation"
horizon = 6
params = { fixture = "navigation_3x3" }
"""


@pytest.fixture
def experiment(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(EXPERIMENT, encoding="utf-8")
    return path


@pytest.fixture
def results(tmp_path, experiment):
    out = tmp_path / "results.csv"
    assert main(["--out", str(out), "run", str(experiment)]) == 0
    return out


def test_run_writes_csv(results) -> None:
    lines = results.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("cell_id,env,variant")
    # 2 alphas x 2 policies x 2 budgets x 2 episodes.
    assert len(lines) == 1 + 16


def test_run_to_stdout_matches_file(experiment, results, capsys) -> None:
    assert main(["run", str(experiment)]) == 0
    assert capsys.readouterr().out == results.read_text(encoding="utf-8")


def test_seed_override_changes_seeds(experiment, results, capsys) -> None:
    assert main(["--seed", "6", "run", str(experiment)]) == 0
    assert capsys.readouterr().out != results.read_text(encoding="utf-8")


def test_scores(results, capsys) -> None:
    assert main(["scores", str(results)]) == 0
    out = capsys.readouterr().out
    assert "== all budgets" in out
    assert "pairings" in out
    # A single environment per budget leaves one task, too few to score.
    assert "skipped:" in out


def test_stats(results, capsys) -> None:
    args = ["stats", str(results), "--group-by", "alpha,pg", "--variant", "pruned"]
    assert main(args) == 0
    assert "figure1" in capsys.readouterr().out


def test_figure1(capsys) -> None:
    assert main(["figure1", "--budgets", "50,200", "--seeds", "3"]) == 0
    out = capsys.readouterr().out
    assert "median_fraction" in out
    assert "median share of the optimal action" in out


def test_bench(tmp_path, capsys) -> None:
    path = tmp_path / "bench.toml"
    path.write_text(BENCH, encoding="utf-8")
    assert main(["bench", str(path), "--budgets", "5,10", "--states", "2"]) == 0
    out = capsys.readouterr().out
    assert "== decision ms" in out
    assert "== median overhead uct/random" in out


def test_configuration_errors_exit_nonzero(tmp_path, capsys) -> None:
    assert main(["run", str(tmp_path / "missing.toml")]) == 1
    assert "oga-mcts:" in capsys.readouterr().err


def test_bad_budget_list_is_a_usage_error() -> None:
    with pytest.raises(SystemExit):
        build_parser().parse_args(["figure1", "--budgets", "ten"])


def test_stats_without_epsilon_rows_fails(results, capsys) -> None:
    assert main(["stats", str(results)]) == 1
    assert "no epsilon rows" in capsys.readouterr().err
