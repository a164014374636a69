import random
from fractions import Fraction
from itertools import combinations

import pytest

from credalgames.beliefs import CredalSet, StateSpace, eps_contamination
from credalgames.exactmath import Polytope, Vector, polytope_equal
from credalgames.maxmin import (
    DecisionProblem,
    constrained_maxmin,
    maxmin_solve,
    maxmin_value_of,
)

F = Fraction

LRO = StateSpace.of("L", "R", "O")
LR = StateSpace.of("L", "R")

EXANTE_ROWS = [[0, 101, -1], [101, 100, -1]]  # pure M and pure N
CONDITIONAL_ROWS = [[0, 101], [101, 100]]


def exante_problem(eps):
    beliefs = eps_contamination(Vector([0, 1, 0]), eps, LRO)
    return DecisionProblem.build(EXANTE_ROWS, LRO, beliefs)


def conditional_problem(delta_lo):
    # conditional beliefs: chance of R between delta_lo and 1
    beliefs = CredalSet.from_vertices(LR, [[1 - delta_lo, delta_lo], [0, 1]])
    return DecisionProblem.build(CONDITIONAL_ROWS, LR, beliefs)


def test_exante_commitment_optimum():
    for eps in (F(1, 50), F(1, 4)):
        sol = maxmin_solve(exante_problem(eps))
        assert sol.strategy == Vector([1, 0])
        assert sol.optimal_face.vertices == (Vector([1, 0]),)
        assert sol.binding_vertices == (Vector([0, 1 - eps, eps]),)
    assert maxmin_solve(exante_problem(F(1, 50))).value == F(2474, 25)


def test_conditional_hedging_optimum():
    sol = maxmin_solve(conditional_problem(F(3, 4)))
    assert sol.value == 100 + F(1, 102)
    assert sol.strategy == Vector([F(1, 102), F(101, 102)])
    assert sol.optimal_face.vertices == (Vector([F(1, 102), F(101, 102)]),)
    # both extreme conditionals bind at the hedge
    assert set(sol.binding_vertices) == {
        Vector([F(1, 4), F(3, 4)]), Vector([0, 1])
    }


def test_singleton_beliefs_reduce_to_expected_utility():
    beliefs = CredalSet.singleton(LR, [1, 0])
    problem = DecisionProblem.build([[1, 0], [0, 1]], LR, beliefs)
    sol = maxmin_solve(problem)
    assert sol.value == 1 and sol.strategy == Vector([1, 0])


def test_value_of_commitment_exante():
    assert maxmin_value_of(Vector([1, 0]), exante_problem(F(1, 50))) == F(2474, 25)


def test_value_of_pure_wait_conditional():
    assert maxmin_value_of(Vector([0, 1]), conditional_problem(F(3, 4))) == 100


def test_value_of_against_singleton_is_expectation():
    beliefs = CredalSet.singleton(LR, [F(1, 3), F(2, 3)])
    problem = DecisionProblem.build([[3, 0], [0, 3]], LR, beliefs)
    s = Vector([F(1, 4), F(3, 4)])
    assert maxmin_value_of(s, problem) == F(1, 4) * 1 + F(3, 4) * 2


def test_constrained_full_simplex_matches_unconstrained():
    problem = conditional_problem(F(3, 4))
    free = maxmin_solve(problem)
    boxed = constrained_maxmin(
        problem, Polytope.from_vertices([Vector([1, 0]), Vector([0, 1])])
    )
    assert boxed.value == free.value
    assert polytope_equal(boxed.optimal_face, free.optimal_face)


def test_constrained_to_commitment_point():
    problem = conditional_problem(F(3, 4))
    sol = constrained_maxmin(problem, Polytope.from_vertices([Vector([1, 0])]))
    assert sol.value == F(303, 4)  # = 101 - 101/4
    assert sol.strategy == Vector([1, 0])


def test_constrained_to_optimal_vertex_retains_value():
    problem = conditional_problem(F(3, 4))
    free = maxmin_solve(problem)
    pinned = constrained_maxmin(
        problem, Polytope.from_vertices([free.optimal_face.vertices[0]])
    )
    assert pinned.value == free.value


def random_problem(rng, actions, states):
    space = StateSpace(tuple(f"s{i}" for i in range(states)))
    verts = []
    for _ in range(rng.randint(1, 4)):
        raw = [F(rng.randint(0, 5)) for _ in range(states)]
        if sum(raw) == 0:
            raw[0] = F(1)
        total = sum(raw)
        verts.append([x / total for x in raw])
    beliefs = CredalSet.from_vertices(space, verts)
    rows = [
        [F(rng.randint(-6, 9), rng.choice([1, 2])) for _ in range(states)]
        for _ in range(actions)
    ]
    return DecisionProblem.build(rows, space, beliefs)


def exact_two_action_oracle(problem):
    """Max over m of min over belief vertices, via candidate enumeration.

    The inner value is a minimum of lines in m, so the maximum sits at an
    endpoint or at a crossing of two lines.
    """
    lines = []
    for v in problem.beliefs.vertices:
        g = problem.action_values(v)
        lines.append((g[1], g[0] - g[1]))  # value at m: c + slope*m
    candidates = {F(0), F(1)}
    for (c1, s1), (c2, s2) in combinations(lines, 2):
        if s1 != s2:
            m = (c2 - c1) / (s1 - s2)
            if 0 <= m <= 1:
                candidates.add(m)
    return max(min(c + s * m for c, s in lines) for m in sorted(candidates))


def test_random_two_action_problems_match_exact_oracle():
    rng = random.Random(1213)
    for _ in range(40):
        problem = random_problem(rng, 2, rng.choice([2, 3]))
        sol = maxmin_solve(problem)
        assert sol.value == exact_two_action_oracle(problem)
        assert maxmin_value_of(sol.strategy, problem) == sol.value
        for vertex in sol.optimal_face.vertices:
            assert maxmin_value_of(vertex, problem) == sol.value


def test_random_three_action_problems_beat_grid():
    rng = random.Random(77)
    steps = 6
    for _ in range(15):
        problem = random_problem(rng, 3, rng.choice([2, 3]))
        sol = maxmin_solve(problem)
        assert maxmin_value_of(sol.strategy, problem) == sol.value
        best_grid = max(
            maxmin_value_of(Vector([F(i, steps), F(j, steps), F(steps - i - j, steps)]), problem)
            for i in range(steps + 1)
            for j in range(steps + 1 - i)
        )
        assert sol.value >= best_grid


def test_concavity_along_segments():
    rng = random.Random(4242)
    for _ in range(20):
        problem = random_problem(rng, rng.choice([2, 3]), rng.choice([2, 3]))
        k = problem.strategy_dimension

        def rand_point():
            raw = [F(rng.randint(0, 4)) for _ in range(k)]
            if sum(raw) == 0:
                raw[0] = F(1)
            t = sum(raw)
            return Vector(x / t for x in raw)

        a, b = rand_point(), rand_point()
        mid = Vector((x + y) / 2 for x, y in zip(a, b))
        va, vb = maxmin_value_of(a, problem), maxmin_value_of(b, problem)
        assert maxmin_value_of(mid, problem) >= (va + vb) / 2


def test_redundant_belief_vertex_changes_nothing():
    problem = conditional_problem(F(3, 4))
    base = maxmin_solve(problem)
    verts = list(problem.beliefs.vertices)
    midpoint = Vector((a + b) / 2 for a, b in zip(verts[0], verts[1]))
    padded_beliefs = CredalSet(
        LR, Polytope.from_vertices(verts + [midpoint])
    )
    padded = DecisionProblem.build(CONDITIONAL_ROWS, LR, padded_beliefs)
    sol = maxmin_solve(padded)
    assert sol.value == base.value
    assert polytope_equal(sol.optimal_face, base.optimal_face)


def test_problem_json_round_trip():
    problem = exante_problem(F(1, 4))
    clone = DecisionProblem.from_json(problem.to_json())
    assert clone.payoff == problem.payoff
    assert clone.beliefs.equals(problem.beliefs)
    sol = maxmin_solve(problem)
    data = sol.to_json()
    assert data["value"] == str(sol.value)


def test_validation_errors():
    with pytest.raises(ValueError):
        DecisionProblem.build([[1, 2, 3]], LR, CredalSet.singleton(LR, [1, 0]))
    problem = conditional_problem(F(3, 4))
    with pytest.raises(ValueError):
        maxmin_value_of(Vector([F(1, 2), F(1, 4)]), problem)
    with pytest.raises(ValueError):
        constrained_maxmin(problem, Polytope.from_vertices([Vector([1, 0, 0])]))
