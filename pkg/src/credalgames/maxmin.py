"""Maxmin expected-utility optimization over credal sets.

A decision problem pairs a payoff matrix (pure action x state) with a credal
set of priors.  Expected payoff is linear in the prior, so the inner minimum
over the whole set equals the minimum over its extreme points; the outer
maximization then becomes a small exact LP, and the full argmax face is
recovered by enumerating the tight-constraint systems at the optimal value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .beliefs import CredalSet, StateSpace
from .exactmath import (
    EQUAL,
    GREATER_EQUAL,
    LinearProgram,
    Polytope,
    Vector,
    lp_solve,
    polytope_minimize,
    rat,
    solve_square_system,
)


@dataclass(frozen=True)
class DecisionProblem:
    """Maximize, over the strategy simplex, the worst expected payoff."""

    strategy_dimension: int
    space: StateSpace
    payoff: tuple[tuple[Fraction, ...], ...]
    beliefs: CredalSet

    def __post_init__(self):
        if len(self.payoff) != self.strategy_dimension:
            raise ValueError("one payoff row per pure action is required")
        for row in self.payoff:
            if len(row) != len(self.space):
                raise ValueError("one payoff column per state is required")
        if self.beliefs.space != self.space:
            raise ValueError("beliefs must live on the problem's state space")

    @classmethod
    def build(cls, payoff_rows, space: StateSpace, beliefs: CredalSet) -> "DecisionProblem":
        rows = tuple(tuple(rat(x) for x in row) for row in payoff_rows)
        return cls(len(rows), space, rows, beliefs)

    def action_values(self, prior: Vector) -> Vector:
        """Expected payoff of each pure action under one prior."""
        return Vector(
            sum((a * p for a, p in zip(row, prior)), Fraction(0))
            for row in self.payoff
        )

    def to_json(self) -> dict:
        return {
            "strategy_dimension": self.strategy_dimension,
            "payoff": [[str(x) for x in row] for row in self.payoff],
            "beliefs": self.beliefs.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecisionProblem":
        beliefs = CredalSet.from_json(data["beliefs"])
        return cls.build(data["payoff"], beliefs.space, beliefs)


@dataclass(frozen=True)
class MaxminSolution:
    value: Fraction
    strategy: Vector
    optimal_face: Polytope
    binding_vertices: tuple[Vector, ...]

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "strategy": self.strategy.to_json(),
            "optimal_face": self.optimal_face.to_json(),
            "binding_vertices": [v.to_json() for v in self.binding_vertices],
        }


def _simplex_check(strategy: Vector, dimension: int) -> None:
    if strategy.dimension != dimension:
        raise ValueError(
            f"strategy has {strategy.dimension} coordinates, problem wants {dimension}"
        )
    if not strategy.is_probability():
        raise ValueError(f"strategy {strategy} is not in the simplex")


def maxmin_value_of(strategy: Vector, p: DecisionProblem) -> Fraction:
    """Worst expected payoff of one strategy over the belief vertices."""
    _simplex_check(strategy, p.strategy_dimension)
    return min(strategy.dot(p.action_values(v)) for v in p.beliefs.vertices)


def _solve_value(gains: list[Vector], k: int) -> Fraction:
    """LP for max over the k-simplex of (min over the gain vectors)."""
    constraints = []
    for g in gains:
        constraints.append((list(g.entries) + [Fraction(-1)], GREATER_EQUAL, 0))
    constraints.append(([Fraction(1)] * k + [Fraction(0)], EQUAL, 1))
    bounds = [(Fraction(0), None)] * k + [(None, None)]
    lp = LinearProgram.build(
        [Fraction(0)] * k + [Fraction(1)], constraints, bounds
    )
    sol = lp_solve(lp)
    assert sol.is_optimal, "simplex-constrained maxmin is always solvable"
    return sol.value


def _face_vertices(gains: list[Vector], value: Fraction, k: int) -> tuple[Vector, ...]:
    """Vertices of {s in simplex : g.s >= value for every gain vector g}.

    Every vertex solves a square system made of the simplex equality plus
    k-1 tight inequalities, so scanning those systems finds them all.
    """
    rows_pool: list[tuple[list[Fraction], Fraction]] = []
    for i in range(k):
        unit = [Fraction(1) if j == i else Fraction(0) for j in range(k)]
        rows_pool.append((unit, Fraction(0)))
    for g in gains:
        rows_pool.append((list(g.entries), value))

    found: set[tuple[Fraction, ...]] = set()
    ones = [Fraction(1)] * k
    for combo in itertools.combinations(range(len(rows_pool)), k - 1):
        rows = [ones] + [rows_pool[i][0] for i in combo]
        rhs = [Fraction(1)] + [rows_pool[i][1] for i in combo]
        point = solve_square_system(rows, rhs)
        if point is None:
            continue
        if any(x < 0 for x in point):
            continue
        if any(
            sum((c * x for c, x in zip(g.entries, point)), Fraction(0)) < value
            for g in gains
        ):
            continue
        found.add(tuple(point))
    assert found, "the optimal face of a solved problem is nonempty"
    return tuple(Vector(p) for p in sorted(found))


def _binding(p: DecisionProblem, strategy: Vector, value: Fraction) -> tuple[Vector, ...]:
    return tuple(
        v for v in p.beliefs.vertices if strategy.dot(p.action_values(v)) == value
    )


def maxmin_solve(p: DecisionProblem) -> MaxminSolution:
    """Exact maxmin value, its full argmax face, and the binding priors.

    The reported strategy is the lexicographically smallest vertex of the
    face, making results reproducible.
    """
    gains = [p.action_values(v) for v in p.beliefs.vertices]
    value = _solve_value(gains, p.strategy_dimension)
    face = _face_vertices(gains, value, p.strategy_dimension)
    strategy = face[0]
    return MaxminSolution(
        value,
        strategy,
        Polytope(p.strategy_dimension, face),
        _binding(p, strategy, value),
    )


def constrained_maxmin(p: DecisionProblem, restriction: Polytope) -> MaxminSolution:
    """maxmin_solve with strategies confined to a sub-polytope of the simplex.

    Strategies are reparametrized as convex weights over the restriction's
    vertices; the optimal weight face maps back onto the strategy face.
    """
    if restriction.ambient_dimension != p.strategy_dimension:
        raise ValueError("restriction must live in the strategy simplex")
    for r in restriction.vertices:
        _simplex_check(r, p.strategy_dimension)
    gains = [p.action_values(v) for v in p.beliefs.vertices]
    m = len(restriction.vertices)
    lifted = [Vector(r.dot(g) for r in restriction.vertices) for g in gains]
    value = _solve_value(lifted, m)
    weight_face = _face_vertices(lifted, value, m)
    points = []
    for w in weight_face:
        s = Vector(
            sum(
                (wi * r[j] for wi, r in zip(w, restriction.vertices)),
                Fraction(0),
            )
            for j in range(p.strategy_dimension)
        )
        points.append(s)
    face = polytope_minimize(Polytope(p.strategy_dimension, tuple(points)))
    strategy = face.vertices[0]
    return MaxminSolution(value, strategy, face, _binding(p, strategy, value))
