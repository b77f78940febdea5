import numpy as np
import pytest

import komwu
from komwu import cli
from komwu.harness import (CSV_HEADER, RunConfig, cce_gap, cumulative_regret,
                           run_cols, vertex_mean_profile)


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    return lines[0], [line.split(",") for line in lines[1:]]


def test_single_iteration_plays_vertex_mean(kuhn2_sfg):
    record = run_cols(kuhn2_sfg, RunConfig(algos=["komwu"], iters=1, eta=1.0,
                                           keep_history=True))
    expected = vertex_mean_profile(kuhn2_sfg)
    for got, ref in zip(record.iterate_history[0], expected):
        np.testing.assert_allclose(got, ref, atol=1e-12)


def test_csv_schema_and_reproducibility(tmp_path, kuhn2_sfg):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        run_cols(kuhn2_sfg, RunConfig(algos=["komwu"], iters=57, eta=0.5,
                                      stride=10, seed=3, out=str(path)))
    header, rows_a = _read_csv(paths[0])
    _, rows_b = _read_csv(paths[1])
    assert header == CSV_HEADER
    # one row per player plus an aggregate row, per record stride (6 strides)
    assert len(rows_a) == 6 * 3
    assert {r[1] for r in rows_a} == {"0", "1", "all"}
    # identical up to the wall-clock column
    strip = lambda rows: [r[:-1] for r in rows]
    assert strip(rows_a) == strip(rows_b)


def test_config_validation(kuhn2_sfg):
    with pytest.raises(ValueError):
        run_cols(kuhn2_sfg, RunConfig(algos=["komwu"], iters=0, eta=1.0))
    with pytest.raises(ValueError):
        run_cols(kuhn2_sfg, RunConfig(algos=["nope"], iters=5))
    with pytest.raises(ValueError):
        run_cols(kuhn2_sfg, RunConfig(algos=["komwu"], iters=5))  # no eta
    with pytest.raises(ValueError):
        run_cols(kuhn2_sfg, RunConfig(algos=["komwu"] * 3, iters=5, eta=1.0))


def test_seed_env_override(monkeypatch):
    config = RunConfig(algos=["komwu"], iters=5, eta=1.0, seed=7)
    assert config.resolved_seed() == 7
    monkeypatch.setenv("KOMWU_SEED", "123")
    assert config.resolved_seed() == 123


def test_cumulative_regret_hand_example():
    # single decision point, three actions, three rounds (zero predictions)
    t = komwu.TreeFormDecisionProblem([komwu.DecisionPoint("d", ("a", "b", "c"))])
    dom = komwu.SequenceFormDomain(t)
    eta = 1.0
    losses = [np.array([0.0, 1.0, 0.0, 0.5]), np.array([0.0, 0.0, 1.0, 0.5]),
              np.array([0.0, 0.5, 0.5, 0.0])]
    learner = komwu.KomwuLearner(dom, eta, optimistic=False)
    iterates = []
    for loss in losses:
        iterates.append(learner.step())
        learner.observe_loss(loss)
    # hand-rolled: multiplicative weights from the definition
    lam = np.ones(3) / 3
    played = 0.0
    for loss, x in zip(losses, iterates):
        np.testing.assert_allclose(x[1:], lam, atol=1e-12)
        played += loss[1:] @ lam + loss[0]
        lam = lam * np.exp(-eta * loss[1:])
        lam /= lam.sum()
    total = sum(losses)
    best = total[1:].min() + total[0]
    assert cumulative_regret(t, losses, iterates) == pytest.approx(
        played - best, abs=1e-12)


def test_regret_zero_when_no_alternative():
    t = komwu.TreeFormDecisionProblem([komwu.DecisionPoint("d", ("only",))])
    losses = [np.array([0.0, 2.0])] * 4
    iterates = [np.array([1.0, 1.0])] * 4
    assert cumulative_regret(t, losses, iterates) == 0.0


def test_regret_may_be_negative():
    # an adaptive learner can beat every fixed comparator on this stream
    t = komwu.TreeFormDecisionProblem([komwu.DecisionPoint("d", ("a", "b"))])
    losses = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0])]
    iterates = [np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 1.0])]
    assert cumulative_regret(t, losses, iterates) == -1.0


def test_folk_bound_on_kuhn(kuhn2_sfg):
    record = run_cols(kuhn2_sfg, RunConfig(algos=["komwu"], iters=2000,
                                           eta=0.25, stride=50))
    bound = record.regrets.sum(axis=1) / record.ts
    assert np.all(record.expl_avg <= bound + 1e-9)


def test_mixed_algorithms_run(kuhn2_sfg):
    record = run_cols(kuhn2_sfg, RunConfig(algos=["komwu", "cfr-rm+"],
                                           iters=200, eta=0.5, stride=50))
    assert record.regrets.shape[1] == 2
    assert np.all(np.isfinite(record.max_regret))


def test_inv_sqrt_schedule_runs(kuhn2_sfg):
    record = run_cols(kuhn2_sfg, RunConfig(algos=["kmwu"], iters=50, eta=1.0,
                                           schedule="inv-sqrt", stride=25))
    assert np.all(np.isfinite(record.max_regret))


def test_cce_gap_single_player_equals_regret_rate():
    values = np.array([0.3, 0.9, 0.1])
    game = komwu.nfg_game([values])
    sfg = komwu.SequenceFormGame(game)
    record = run_cols(sfg, RunConfig(algos=["komwu"], iters=300, eta=0.2,
                                     stride=300, keep_history=True))
    gap = cce_gap(sfg, record.iterate_history)
    assert gap == pytest.approx(record.max_regret[-1] / 300, abs=1e-9)


def test_cce_gap_zero_at_equilibrium():
    sfg = komwu.SequenceFormGame(komwu.matching_pennies())
    nash = [np.array([1.0, 0.5, 0.5])] * 2
    assert cce_gap(sfg, [nash] * 50) == pytest.approx(0.0, abs=1e-9)


def test_cce_gap_bounded_by_regret_rate():
    sfg = komwu.SequenceFormGame(komwu.matching_pennies())
    record = run_cols(sfg, RunConfig(algos=["komwu"], iters=1000, eta=0.3,
                                     stride=1000, keep_history=True))
    assert cce_gap(sfg, record.iterate_history) <= \
        record.max_regret[-1] / 1000 + 1e-9


# --- CLI ---------------------------------------------------------------------

def test_cli_gen_and_run(tmp_path):
    game_path = tmp_path / "kuhn.json"
    assert cli.main(["gen", "--game", "kuhn:p=2,r=3",
                     "--out", str(game_path)]) == 0
    loaded = komwu.load_game(game_path)
    assert loaded.players == 2

    csv_path = tmp_path / "run.csv"
    rc = cli.main(["run", "--game", str(game_path), "--algo", "komwu",
                   "--eta", "1.0", "--iters", "50", "--stride", "10",
                   "--out", str(csv_path)])
    assert rc == 0
    header, rows = _read_csv(csv_path)
    assert header == CSV_HEADER
    assert rows


def test_cli_check_passes_on_small_domains():
    assert cli.main(["check", "--domain", "nset:d=6,n=3",
                     "--iters", "50"]) == 0
    assert cli.main(["check", "--domain", "kuhn:p=2,r=3,player=0",
                     "--iters", "30"]) == 0
    assert cli.main(["check", "--domain", "nset:d=4,n=2+cube:d=3",
                     "--iters", "30"]) == 0


def test_cli_bench_runs(capsys):
    assert cli.main(["bench", "--ranks", "3,6", "--iters", "50",
                     "--backend", "both"]) == 0
    out = capsys.readouterr().out
    assert "pure us/iter" in out


def test_cli_seed_env_override(monkeypatch, capsys):
    monkeypatch.setenv("KOMWU_SEED", "99")
    assert cli.main(["check", "--domain", "nset:d=4,n=2",
                     "--iters", "20"]) == 0
    assert "max_deviation" in capsys.readouterr().out


def test_cli_error_paths(tmp_path):
    assert cli.main(["run", "--game", "mystery", "--algo", "komwu",
                     "--eta", "1", "--iters", "5"]) == 1
    assert cli.main(["run", "--game", "kuhn:p=2,r=3", "--algo", "bogus",
                     "--iters", "5"]) == 1
    with pytest.raises(SystemExit):
        cli.main(["run", "--nonsense"])
