import json

import numpy as np
import pytest

import komwu
from komwu.games import (Chance, Decision, Terminal, best_response_value,
                         best_response_vertex, random_strategy)


def tree_expected_payoffs(game, tfsdps, xs):
    """Independent recursive expected-value walk (oracle for the table path)."""

    def rec(node, prob, last):
        if isinstance(node, Terminal):
            w = prob
            for i in range(game.players):
                s = 0 if last[i] is None else tfsdps[i].seq_index(*last[i])
                w *= xs[i][s]
            return w * np.asarray(node.payoffs)
        if isinstance(node, Chance):
            return sum((rec(c, prob * p, last) for p, c in node.outcomes),
                       np.zeros(game.players))
        total = np.zeros(game.players)
        for label, child in node.actions:
            nxt = list(last)
            nxt[node.player] = (node.infoset, label)
            total = total + rec(child, prob, nxt)
        return total

    return rec(game.root, 1.0, [None] * game.players)


# --- generators --------------------------------------------------------------

def test_kuhn_p1_structure(kuhn_p1):
    assert kuhn_p1.n_decision_points == 6
    assert all(len(a) == 2 for a in kuhn_p1.actions)
    assert kuhn_p1.n_seqs == 13  # 12 nonempty sequences


def test_kuhn_3p_structure():
    game = komwu.gen_kuhn(3, 12)
    t = komwu.derive_tfsdp(game, 0)
    assert t.n_decision_points == 24
    assert t.n_seqs == 1 + 2 * 24


def test_matrix_game_single_decision_point():
    game = komwu.nfg_game([np.eye(2), -np.eye(2)])
    t = komwu.derive_tfsdp(game, 0)
    assert t.n_decision_points == 1
    assert t.parent_seq[0] == 0


def test_generated_games_zero_sum_and_normalized():
    for game in (komwu.gen_kuhn(2, 3), komwu.gen_kuhn(3, 4),
                 komwu.gen_leduc(2), komwu.gen_leduc(3, suits=2)):
        assert game.is_zero_sum()
        stack = [game.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Chance):
                assert sum(p for p, _ in node.outcomes) == pytest.approx(1.0)
                stack.extend(c for _, c in node.outcomes)
            elif isinstance(node, Decision):
                stack.extend(c for _, c in node.actions)


def test_kuhn_payoff_ranges():
    assert komwu.gen_kuhn(3, 4).payoff_range() == pytest.approx(6.0)
    assert komwu.gen_kuhn(4, 5).payoff_range() == pytest.approx(8.0)


def test_kuhn_rank_preconditions():
    with pytest.raises(ValueError):
        komwu.gen_kuhn(3, 2)


def test_leduc_3p_payoff_range():
    game = komwu.gen_leduc(3, ranks=3, suits=3)
    assert game.payoff_range() == pytest.approx(21.0)
    assert game.is_zero_sum()


def test_leduc_4p_payoff_range():
    # the range is set by the betting caps, not the suit count
    game = komwu.gen_leduc(4, ranks=3, suits=2)
    assert game.payoff_range() == pytest.approx(28.0)
    assert game.is_zero_sum()


def test_leduc_ties_split_pot():
    game = komwu.gen_leduc(2)
    zero_terminals = 0
    stack = [game.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Terminal):
            if all(u == 0 for u in node.payoffs):
                zero_terminals += 1
        elif isinstance(node, Chance):
            stack.extend(c for _, c in node.outcomes)
        elif isinstance(node, Decision):
            stack.extend(c for _, c in node.actions)
    assert zero_terminals > 0  # equal-rank showdowns refund both players


def test_leduc_two_bet_cap_smoke():
    game = komwu.gen_leduc(2, ranks=2, suits=2, max_bets=2)
    assert game.is_zero_sum()
    # re-raises increase the worst-case pot beyond the one-bet range
    assert game.payoff_range() > komwu.gen_leduc(2, ranks=2, suits=2).payoff_range()


def test_unsupported_leduc_player_count():
    with pytest.raises(ValueError):
        komwu.gen_leduc(5)
    with pytest.raises(ValueError):
        komwu.gen_leduc(2, max_bets=0)


# --- validation ---------------------------------------------------------------

def test_perfect_recall_violation_detected():
    leaf = lambda: Terminal((0.0,))
    # same infoset on both sides of the player's own first action
    inner1 = Decision(0, "again", (("x", leaf()), ("y", leaf())))
    inner2 = Decision(0, "again", (("x", leaf()), ("y", leaf())))
    root = Decision(0, "first", (("l", inner1), ("r", inner2)))
    with pytest.raises(ValueError, match="again"):
        komwu.GameTree(1, root)


def test_inconsistent_actions_detected():
    leaf = lambda: Terminal((0.0, 0.0))
    a = Decision(1, "i", (("x", leaf()), ("y", leaf())))
    b = Decision(1, "i", (("x", leaf()),))
    root = Decision(0, "r", (("l", a), ("r", b)))
    with pytest.raises(ValueError):
        komwu.GameTree(2, root)


def test_chance_normalization_checked():
    bad = Chance(((0.5, Terminal((0.0,))), (0.4, Terminal((0.0,)))))
    with pytest.raises(ValueError):
        komwu.GameTree(1, bad)


def test_shared_subtrees_rejected():
    leaf = Terminal((0.0,))
    root = Decision(0, "r", (("l", leaf), ("r", leaf)))
    with pytest.raises(ValueError):
        komwu.GameTree(1, root)


# --- gradients and best responses ---------------------------------------------

def test_zero_payoffs_zero_gradient():
    game = komwu.nfg_game([np.zeros((2, 2)), np.zeros((2, 2))])
    sfg = komwu.SequenceFormGame(game)
    xs = [komwu.uniform_strategy(t) for t in sfg.tfsdps]
    for i in range(2):
        assert np.all(sfg.loss_gradient(i, xs) == 0.0)


def test_matching_pennies_gradient_is_matrix_product():
    game = komwu.matching_pennies()
    sfg = komwu.SequenceFormGame(game)
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    x2 = np.array([1.0, 0.3, 0.7])
    grad = sfg.loss_gradient(0, [np.array([1.0, 0.5, 0.5]), x2])
    np.testing.assert_allclose(grad[1:], -(a @ x2[1:]))
    assert grad[0] == 0.0


def test_gradient_consistent_with_expected_utility(kuhn2, kuhn2_sfg):
    rng = np.random.default_rng(0)
    sfg = kuhn2_sfg
    for _ in range(5):
        xs = [random_strategy(t, rng) for t in sfg.tfsdps]
        ref = tree_expected_payoffs(kuhn2, sfg.tfsdps, xs)
        got = sfg.expected_utilities(xs)
        np.testing.assert_allclose(got, ref, atol=1e-12)
        for i in range(2):
            loss = sfg.loss_gradient(i, xs)
            assert loss @ xs[i] == pytest.approx(-ref[i], abs=1e-12)


def test_utilities_sum_to_zero_at_random_profiles():
    rng = np.random.default_rng(1)
    for game in (komwu.gen_kuhn(2, 3), komwu.gen_kuhn(3, 3),
                 komwu.gen_leduc(2, suits=2)):
        sfg = komwu.SequenceFormGame(game)
        for _ in range(3):
            xs = [random_strategy(t, rng) for t in sfg.tfsdps]
            assert sfg.expected_utilities(xs).sum() == pytest.approx(0.0, abs=1e-9)


def test_best_response_value_basics(kuhn_p1):
    t = komwu.TreeFormDecisionProblem([komwu.DecisionPoint("d", ("a", "b", "c"))])
    assert best_response_value(t, np.zeros(4)) == 0.0
    assert best_response_value(t, np.array([0.0, 1.0, 2.0, 3.0])) == 1.0
    rng = np.random.default_rng(2)
    verts = komwu.enumerate_vertices(
        komwu.SequenceFormDomain(kuhn_p1)).matrix.astype(float)
    for _ in range(10):
        loss = rng.normal(size=kuhn_p1.n_seqs)
        assert best_response_value(kuhn_p1, loss) == pytest.approx(
            (verts @ loss).min(), abs=1e-12)


def test_best_response_below_any_feasible_point(kuhn_p2):
    rng = np.random.default_rng(3)
    for _ in range(10):
        loss = rng.normal(size=kuhn_p2.n_seqs)
        br = best_response_value(kuhn_p2, loss)
        x = random_strategy(kuhn_p2, rng)
        assert br <= loss @ x + 1e-12
        vertex = best_response_vertex(kuhn_p2, loss)
        kuhn_p2.validate_strategy(vertex)
        assert loss @ vertex == pytest.approx(br, abs=1e-12)


def test_exploitability_matching_pennies():
    sfg = komwu.SequenceFormGame(komwu.matching_pennies())
    uniform = [np.array([1.0, 0.5, 0.5])] * 2
    assert sfg.exploitability(uniform) == pytest.approx(0.0, abs=1e-9)
    pure = [np.array([1.0, 1.0, 0.0]), np.array([1.0, 1.0, 0.0])]
    assert sfg.exploitability(pure) == pytest.approx(2.0)
    rng = np.random.default_rng(4)
    for _ in range(5):
        xs = [random_strategy(t, rng) for t in sfg.tfsdps]
        assert sfg.exploitability(xs) >= -1e-12


def test_exploitability_requires_two_player_zero_sum():
    general = komwu.SequenceFormGame(
        komwu.nfg_game([np.eye(2), np.eye(2)]))
    with pytest.raises(ValueError):
        general.exploitability([np.array([1.0, 0.5, 0.5])] * 2)
    three = komwu.SequenceFormGame(komwu.gen_kuhn(3, 3))
    with pytest.raises(ValueError):
        three.exploitability([komwu.uniform_strategy(t) for t in three.tfsdps])


def test_normalize_payoffs_unit_range(kuhn2):
    normalized = komwu.normalize_payoffs(kuhn2)
    assert normalized.payoff_range() == pytest.approx(1.0)
    stack = [normalized.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Terminal):
            assert min(node.payoffs) >= 0.0 and max(node.payoffs) <= 1.0
        elif isinstance(node, Chance):
            stack.extend(c for _, c in node.outcomes)
        else:
            stack.extend(c for _, c in node.actions)


# --- JSON round trip -----------------------------------------------------------

def test_game_json_roundtrip(tmp_path, kuhn2):
    path = tmp_path / "kuhn.json"
    komwu.dump_game(kuhn2, path)
    loaded = komwu.load_game(path)
    assert loaded.players == 2
    a = sorted(komwu.GameTree.walk_terminals(kuhn2))
    b = sorted(komwu.GameTree.walk_terminals(loaded))
    assert a == b
    for i in range(2):
        orig = komwu.derive_tfsdp(kuhn2, i)
        back = komwu.derive_tfsdp(loaded, i)
        assert orig.ids == back.ids
        assert orig.actions == back.actions


def test_load_rejects_bad_documents(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"players": 1,
                                "root": {"kind": "mystery"}}))
    with pytest.raises(ValueError):
        komwu.load_game(path)
