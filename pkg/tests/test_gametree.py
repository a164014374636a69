import random
from fractions import Fraction

import pytest

from credalgames.exactmath import Vector
from credalgames.gametree import (
    BehavioralStrategy,
    GameTree,
    MalformedGameError,
    MixedStrategy,
    UnboundParameterError,
    behavioral_to_mixed,
    builtin_game,
    decision,
    game_from_json,
    game_to_json,
    mixed_to_behavioral,
    outcome_distribution,
    outcome_equivalent,
    terminal,
    validate_perfect_recall,
)
from randtrees import random_behavioral, random_mixed, random_perfect_recall_game

F = Fraction


@pytest.fixture(scope="module")
def fig1():
    return builtin_game("fig1")


@pytest.fixture(scope="module")
def fig4():
    return builtin_game("fig4")


def beh(player, *rows):
    return BehavioralStrategy(player, tuple(Vector(r) for r in rows))


def test_fig1_structure(fig1):
    assert fig1.players == ("1", "2")
    assert fig1.terminal_labels() == ("LM", "LN", "RM", "RN", "O")
    sets2 = fig1.information_sets_for("2")
    assert len(sets2) == 1 and sets2[0].paths == (("L",), ("R",))
    assert fig1.pure_strategies("2") == [(0,), (1,)]
    assert fig1.parameters == {"x": F(0)}


def test_fig4_structure(fig4):
    assert fig4.players == ("1", "2", "3")
    assert fig4.terminal_labels() == ("LM", "LN", "RM", "RNS", "RNT", "OS", "OT")
    sets3 = fig4.information_sets_for("3")
    assert len(sets3) == 1 and sets3[0].paths == (("R", "N"), ("O",))
    assert set(fig4.parameters) == {"x", "y", "uRNS", "uRNT", "uOS", "uOT"}


def test_builtin_games_have_perfect_recall(fig1, fig4):
    assert validate_perfect_recall(fig1).ok
    assert validate_perfect_recall(fig4).ok


def forgetful_game():
    # one player moves twice; both second-stage nodes share a set, so the
    # player no longer remembers his first action
    inner = lambda: decision(
        "1", [("c", terminal([0])), ("d", terminal([1]))]
    )
    root = decision("1", [("a", inner()), ("b", inner())])
    return GameTree(["1"], root, [[["a"], ["b"]]])


def test_recall_violation_detected():
    check = validate_perfect_recall(forgetful_game())
    assert not check.ok
    assert check.player == "1"
    assert check.witness == (("a",), ("b",))


def test_information_set_must_not_mix_players(fig1):
    with pytest.raises(MalformedGameError):
        GameTree(["1", "2"], fig1.root, [[["L"], []]], {"x": 0})
    with pytest.raises(MalformedGameError):
        GameTree(["1", "2"], fig1.root, [[[], ["L"]]], {"x": 0})


def test_undeclared_parameter_rejected():
    with pytest.raises(UnboundParameterError):
        GameTree(["1"], terminal(["mystery"]))


def test_outcome_distribution_pure_outside(fig1):
    dist = outcome_distribution(
        fig1,
        {"1": beh("1", [0, 0, 1]), "2": beh("2", [1, 0])},
    )
    assert dict(zip(dist.terminals, dist.probabilities)) == {
        "LM": 0, "LN": 0, "RM": 0, "RN": 0, "O": 1
    }


def test_outcome_distribution_product(fig1):
    dist = outcome_distribution(
        fig1,
        {"1": beh("1", [0, 1, 0]), "2": beh("2", ["1/2", "1/2"])},
    )
    by_label = dict(zip(dist.terminals, dist.probabilities))
    assert by_label["RM"] == F(1, 2) and by_label["RN"] == F(1, 2)
    assert by_label["LM"] == 0 and by_label["O"] == 0


def test_outcome_distribution_three_player(fig4):
    dist = outcome_distribution(
        fig4,
        {
            "1": beh("1", ["1/2", "1/2", 0]),
            "2": beh("2", ["1/2", "1/2"]),
            "3": beh("3", [1, 0]),
        },
    )
    by_label = dict(zip(dist.terminals, dist.probabilities))
    assert by_label == {
        "LM": F(1, 4), "LN": F(1, 4), "RM": F(1, 4), "RNS": F(1, 4),
        "RNT": 0, "OS": 0, "OT": 0,
    }
    assert dist.probabilities.total() == 1


def test_missing_profile_entry(fig1):
    with pytest.raises(KeyError):
        outcome_distribution(fig1, {"1": beh("1", [0, 0, 1])})


def test_single_set_mixed_equals_behavioral(fig1):
    m = F(21, 64)
    mixed = MixedStrategy("2", Vector([m, 1 - m]))
    image = mixed_to_behavioral(fig1, mixed)
    assert image.choices == (Vector([m, 1 - m]),)
    back = behavioral_to_mixed(fig1, image)
    assert back.weights == mixed.weights


def test_pure_strategy_maps_to_point_mass(fig4):
    mixed = MixedStrategy("3", Vector([0, 1]))
    image = mixed_to_behavioral(fig4, mixed)
    assert image.choices == (Vector([0, 1]),)


def two_set_game():
    # one player, two information sets: a second choice only follows action a
    stage2 = decision("1", [("c", terminal([0])), ("d", terminal([1]))])
    root = decision("1", [("a", stage2), ("b", terminal([2]))])
    return GameTree(["1"], root)


def test_uniform_mixed_to_behavioral_two_sets():
    game = two_set_game()
    assert len(game.information_sets_for("1")) == 2
    mixed = MixedStrategy("1", Vector([F(1, 4)] * 4))
    image = mixed_to_behavioral(game, mixed)
    assert [tuple(c) for c in image.choices] == [
        (F(1, 2), F(1, 2)),
        (F(1, 2), F(1, 2)),
    ]


def test_behavioral_to_mixed_products():
    game = two_set_game()
    behavioral = BehavioralStrategy(
        "1", (Vector(["1/2", "1/2"]), Vector(["1/3", "2/3"]))
    )
    mixed = behavioral_to_mixed(game, behavioral)
    assert tuple(mixed.weights) == (F(1, 6), F(1, 3), F(1, 6), F(1, 3))


def test_behavioral_point_masses_to_pure():
    game = two_set_game()
    behavioral = BehavioralStrategy("1", (Vector([1, 0]), Vector([0, 1])))
    mixed = behavioral_to_mixed(game, behavioral)
    assert tuple(mixed.weights) == (0, 1, 0, 0)  # pure (a, d)


def test_outcome_equivalence_reflexive(fig1):
    mixed = MixedStrategy("2", Vector(["1/3", "2/3"]))
    assert outcome_equivalent(fig1, "2", mixed, mixed)


def test_kuhn_image_outcome_equivalent(fig1):
    mixed = MixedStrategy("2", Vector(["21/64", "43/64"]))
    assert outcome_equivalent(fig1, "2", mixed, mixed_to_behavioral(fig1, mixed))


def test_distinct_commitments_not_equivalent(fig1):
    m1 = MixedStrategy("2", Vector([1, 0]))
    m2 = MixedStrategy("2", Vector([F(1, 102), F(101, 102)]))
    assert not outcome_equivalent(fig1, "2", m1, m2)


def test_json_round_trip(fig4):
    data = game_to_json(fig4)
    clone = game_from_json(data)
    assert game_to_json(clone) == data
    assert clone.terminal_labels() == fig4.terminal_labels()
    assert validate_perfect_recall(clone).ok


def test_parameter_binding(fig4):
    values = fig4.resolve_parameters({"y": "7/2", "uOS": -1})
    assert values["y"] == F(7, 2) and values["uOS"] == -1 and values["x"] == 0
    with pytest.raises(UnboundParameterError):
        fig4.resolve_parameters({"nope": 1})


def test_multilinearity_probe(fig1):
    # the terminal distribution is linear in one player's local choice when
    # the other players are held fixed
    rng = random.Random(3)
    for _ in range(5):
        a = random_behavioral(rng, fig1, "2")
        b = random_behavioral(rng, fig1, "2")
        lam = F(rng.randint(0, 4), 4)
        mix = BehavioralStrategy(
            "2",
            tuple(
                Vector(lam * x + (1 - lam) * y for x, y in zip(ca, cb))
                for ca, cb in zip(a.choices, b.choices)
            ),
        )
        other = random_behavioral(rng, fig1, "1")
        da = outcome_distribution(fig1, {"1": other, "2": a}).probabilities
        db = outcome_distribution(fig1, {"1": other, "2": b}).probabilities
        dm = outcome_distribution(fig1, {"1": other, "2": mix}).probabilities
        assert dm == Vector(
            lam * x + (1 - lam) * y for x, y in zip(da, db)
        )


def test_random_trees_probabilities_sum_to_one():
    rng = random.Random(99)
    for _ in range(20):
        game = random_perfect_recall_game(rng)
        assert validate_perfect_recall(game).ok
        profile = {p: random_behavioral(rng, game, p) for p in game.players}
        dist = outcome_distribution(game, profile)
        assert dist.probabilities.total() == 1


def test_random_round_trip_small():
    rng = random.Random(5)
    for _ in range(10):
        game = random_perfect_recall_game(rng)
        for player in game.players:
            mixed = random_mixed(rng, game, player)
            image = mixed_to_behavioral(game, mixed)
            assert outcome_equivalent(game, player, mixed, image)
            behavioral = random_behavioral(rng, game, player)
            back = behavioral_to_mixed(game, behavioral)
            assert outcome_equivalent(game, player, behavioral, back)
