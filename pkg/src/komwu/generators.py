"""Benchmark game generators: multiplayer Kuhn and Leduc poker, plus
matrix-game embeddings used for tiny normal-form experiments.

Both poker families share one limit-betting-round engine: players act in seat
order; a wager obliges every other active player (wrapping around the table)
to fold, call, or - below the raise cap - raise. Payoffs are net chips, so
every terminal is zero-sum by construction.
"""

import itertools

import numpy as np

from .games import Chance, Decision, GameTree, Terminal


def _settle(n_players, contribs, winners):
    pot = sum(contribs.values())
    share = pot / len(winners)
    return Terminal(tuple((share if p in winners else 0.0) - contribs[p]
                          for p in range(n_players)))


def _betting_round(seats, bet_size, max_bets, open_labels, facing_labels,
                   raise_label, key_fn, on_done):
    """Build the subtree of one betting round.

    ``seats`` are the active players in seat order. ``key_fn(p, own, facing,
    pub)`` names player p's infoset given their own action string, whether a
    wager is outstanding, and the public action string. ``on_done(active,
    round_contribs, pub)`` continues the game once the round closes.
    """

    def act(pending, active, rc, bets, pub, own):
        if not pending:
            return on_done(active, rc, pub)
        p = pending[0]
        rest = pending[1:]
        own_p = own.get(p, "")
        if bets == 0:
            branches = [(open_labels[0],
                         act(rest, active, rc, 0, pub + "k",
                             {**own, p: own_p + "k"}))]
            wrapped = ([q for q in active if q > p]
                       + [q for q in active if q < p])
            rc_bet = {**rc, p: bet_size}
            branches.append((open_labels[1],
                             act(wrapped, active, rc_bet, 1, pub + "r",
                                 {**own, p: own_p + "r"})))
            return Decision(p, key_fn(p, own_p, False, pub), tuple(branches))
        level = bets * bet_size
        folded = [q for q in active if q != p]
        branches = [
            (facing_labels[0], act(rest, folded, rc, bets, pub + "f",
                                   {**own, p: own_p + "f"})),
            (facing_labels[1], act(rest, active, {**rc, p: level}, bets,
                                   pub + "c", {**own, p: own_p + "c"})),
        ]
        if raise_label is not None and bets < max_bets:
            wrapped = ([q for q in active if q > p]
                       + [q for q in active if q < p])
            rc_raise = {**rc, p: level + bet_size}
            branches.append((raise_label,
                             act(wrapped, active, rc_raise, bets + 1,
                                 pub + "r", {**own, p: own_p + "r"})))
        return Decision(p, key_fn(p, own_p, True, pub), tuple(branches))

    return act(list(seats), list(seats), {p: 0 for p in seats}, 0, "", {})


def gen_kuhn(players=2, ranks=3):
    """Multiplayer Kuhn poker: one ante, one betting round, one-bet cap.

    Each player antes a chip and receives one card from a deck of ``ranks``
    distinctly ranked cards (uniform over ordered deals). The highest card
    among the players who have not folded wins the pot. A player's
    information is their own card, their own actions, and whether a bet is
    outstanding.
    """
    if players < 2:
        raise ValueError("Kuhn poker needs at least 2 players")
    if ranks < players:
        raise ValueError(f"need at least {players} ranks to deal "
                         f"{players} players")
    deals = list(itertools.permutations(range(ranks), players))
    prob = 1.0 / len(deals)

    def deal_subtree(deal):
        def key_fn(p, own, facing, pub):
            return f"p{p}:c{deal[p]}:{own}:{'F' if facing else 'O'}"

        def on_done(active, rc, pub):
            contribs = {p: 1 + rc.get(p, 0) for p in range(players)}
            winner = max(active, key=lambda p: deal[p])
            return _settle(players, contribs, {winner})

        return _betting_round(range(players), 1, 1, ("check", "bet"),
                              ("fold", "call"), None, key_fn, on_done)

    root = Chance(tuple((prob, deal_subtree(deal)) for deal in deals))
    return GameTree(players, root)


def gen_leduc(players=2, ranks=3, suits=3, max_bets=1):
    """Multiplayer Leduc poker: two betting rounds and one board card.

    Deck of ``ranks`` ranks with ``suits`` copies each; everyone antes one
    chip and gets a private card. Raise sizes are 2 in the first round and 4
    in the second, capped at ``max_bets`` wagers per round. After the first
    round a public board card is revealed; at showdown, pairing the board
    beats high card, and ties split the pot. Betting history is public.
    """
    if players not in (2, 3, 4):
        raise ValueError("Leduc poker supports 2, 3, or 4 players")
    if max_bets < 1:
        raise ValueError("max_bets must be at least 1")
    deck_ranks = [r for r in range(ranks) for _ in range(suits)]
    n_cards = len(deck_ranks)
    if n_cards < players + 1:
        raise ValueError("deck too small for the player count plus a board")
    deals = list(itertools.permutations(range(n_cards), players))
    prob = 1.0 / len(deals)

    def deal_subtree(deal):
        rank = {p: deck_ranks[deal[p]] for p in range(players)}

        def key1(p, own, facing, pub):
            return f"p{p}:r{rank[p]}:b-:{pub}"

        def after_round1(active, rc1, pub1):
            contribs1 = {p: 1 + rc1.get(p, 0) for p in range(players)}
            if len(active) == 1:
                return _settle(players, contribs1, set(active))
            remaining = [c for c in range(n_cards) if c not in deal]
            bprob = 1.0 / len(remaining)

            def board_subtree(board_card):
                board = deck_ranks[board_card]

                def key2(p, own, facing, pub):
                    return f"p{p}:r{rank[p]}:b{board}:{pub1}/{pub}"

                def after_round2(active2, rc2, pub2):
                    contribs = {p: contribs1[p] + rc2.get(p, 0)
                                for p in range(players)}
                    if len(active2) == 1:
                        return _settle(players, contribs, set(active2))
                    strength = {p: (rank[p] == board, rank[p])
                                for p in active2}
                    best = max(strength.values())
                    winners = {p for p in active2 if strength[p] == best}
                    return _settle(players, contribs, winners)

                return _betting_round(active, 4, max_bets,
                                      ("check", "raise"), ("fold", "call"),
                                      "raise", key2, after_round2)

            return Chance(tuple((bprob, board_subtree(c)) for c in remaining))

        return _betting_round(range(players), 2, max_bets,
                              ("check", "raise"), ("fold", "call"),
                              "raise", key1, after_round1)

    root = Chance(tuple((prob, deal_subtree(deal)) for deal in deals))
    return GameTree(players, root)


def nfg_game(payoff_tensors):
    """Embed a normal-form game as a simultaneous-move tree.

    ``payoff_tensors`` holds one payoff array per player, all of shape
    (actions of player 1, ..., actions of player m). Players act in turn but
    each in a single information set, so nobody observes earlier moves.
    """
    tensors = [np.asarray(t, dtype=float) for t in payoff_tensors]
    m = len(tensors)
    if m < 1:
        raise ValueError("need at least one player")
    shape = tensors[0].shape
    if len(shape) != m or any(t.shape != shape for t in tensors):
        raise ValueError("payoff tensors must all have one axis per player")

    def build(prefix):
        i = len(prefix)
        if i == m:
            return Terminal(tuple(float(t[prefix]) for t in tensors))
        return Decision(i, f"p{i}",
                        tuple((f"a{k}", build(prefix + (k,)))
                              for k in range(shape[i])))

    return GameTree(m, build(()))


def matching_pennies(win_match_a=1.0, win_match_b=1.0):
    """Zero-sum 2x2 pennies game; asymmetric match payoffs skew the unique
    mixed equilibrium away from uniform while keeping it interior."""
    a = np.array([[float(win_match_a), -1.0], [-1.0, float(win_match_b)]])
    return nfg_game([a, -a])
