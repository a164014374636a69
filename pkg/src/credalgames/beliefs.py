"""Credal sets over finite state spaces, filtrations, and rectangularity.

A credal set is a convex polytope of probability vectors, stored by its
extreme points.  Conditioning, one-step-ahead marginals, and rectangular
hulls all work vertex-wise: the maps involved carry extreme points onto a
superset of the image's extreme points, so minimizing the mapped vertices is
exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import (
    Polytope,
    Vector,
    polytope_contains,
    polytope_equal,
    polytope_minimize,
    rat,
)

Cell = tuple[str, ...]
Partition = tuple[Cell, ...]


class ZeroProbabilityReachError(ValueError):
    """Conditioning on an event that some prior in the set rules out."""

    def __init__(self, event, vertex: Vector):
        self.event = tuple(event)
        self.vertex = vertex
        super().__init__(
            f"event {self.event} has probability 0 under vertex {vertex}"
        )


@dataclass(frozen=True)
class StateSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels or len(set(self.labels)) != len(self.labels):
            raise ValueError("state labels must be unique and nonempty")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @classmethod
    def of(cls, *labels: str) -> "StateSpace":
        return cls(tuple(labels))


def cell_label(cell: Cell) -> str:
    return cell[0] if len(cell) == 1 else "{" + ",".join(cell) + "}"


@dataclass(frozen=True)
class CredalSet:
    """A minimized polytope of probability vectors over a state space."""

    space: StateSpace
    set: Polytope

    def __post_init__(self):
        if self.set.ambient_dimension != len(self.space):
            raise ValueError("polytope dimension must match the state count")
        for v in self.set.vertices:
            if not v.is_probability():
                raise ValueError(f"vertex {v} is not a probability vector")

    @classmethod
    def from_vertices(cls, space: StateSpace, vertices) -> "CredalSet":
        verts = [v if isinstance(v, Vector) else Vector(v) for v in vertices]
        poly = polytope_minimize(Polytope(len(space), tuple(verts)))
        return cls(space, poly)

    @classmethod
    def singleton(cls, space: StateSpace, point) -> "CredalSet":
        return cls.from_vertices(space, [point])

    @property
    def vertices(self) -> tuple[Vector, ...]:
        return self.set.vertices

    def contains(self, point: Vector) -> bool:
        return polytope_contains(self.set, point)

    def equals(self, other: "CredalSet") -> bool:
        return self.space == other.space and polytope_equal(self.set, other.set)

    def event_mass(self, vertex: Vector, event: Cell) -> Fraction:
        return sum((vertex[self.space.index(s)] for s in event), Fraction(0))

    def to_json(self) -> dict:
        return {
            "states": list(self.space.labels),
            "vertices": [v.to_json() for v in self.vertices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CredalSet":
        space = StateSpace(tuple(data["states"]))
        return cls.from_vertices(space, [Vector.from_json(v) for v in data["vertices"]])


@dataclass(frozen=True)
class Filtration:
    """Intermediate stages of information, each strictly refining the last.

    The trivial coarsest stage and the final singleton stage are implicit;
    ``stages`` lists only what lies between them (the games here need one).
    """

    space: StateSpace
    stages: tuple[Partition, ...]

    def __post_init__(self):
        previous: Partition = (tuple(self.space.labels),)
        for stage in self.stages:
            seen: list[str] = []
            for cell in stage:
                if not cell:
                    raise ValueError("empty cell in filtration stage")
                if not any(set(cell) <= set(prev) for prev in previous):
                    raise ValueError(f"cell {cell} does not refine the previous stage")
                seen.extend(cell)
            if sorted(seen) != sorted(self.space.labels):
                raise ValueError("stage cells must partition the state space")
            previous = stage

    @classmethod
    def build(cls, space: StateSpace, stages) -> "Filtration":
        def order(cell):
            return tuple(sorted(cell, key=space.index))

        norm = tuple(
            tuple(sorted((order(c) for c in stage), key=lambda c: space.index(c[0])))
            for stage in stages
        )
        return cls(space, norm)

    def to_json(self) -> dict:
        return {"stages": [[list(c) for c in stage] for stage in self.stages]}

    @classmethod
    def from_json(cls, space: StateSpace, data: dict) -> "Filtration":
        return cls.build(space, [[tuple(c) for c in stage] for stage in data["stages"]])


# -- operations -----------------------------------------------------------


def eps_contamination(
    center: Vector, eps: Fraction | int | str, space: StateSpace | None = None
) -> CredalSet:
    """Mix a reference prior with every point mass at weight eps.

    The hull of the mixed unit vectors equals the full eps-blend of the
    simplex around the center.  Without explicit labels the states are
    named s0, s1, ...
    """
    e = rat(eps)
    if not 0 <= e <= 1:
        raise ValueError(f"contamination weight {e} outside [0, 1]")
    if not center.is_probability():
        raise ValueError("center must be a probability vector")
    if space is None:
        space = StateSpace(tuple(f"s{i}" for i in range(center.dimension)))
    verts = []
    for s in range(center.dimension):
        unit = Vector(
            Fraction(1) if i == s else Fraction(0) for i in range(center.dimension)
        )
        verts.append(center.scale(1 - e) + unit.scale(e))
    return CredalSet.from_vertices(space, verts)


def full_bayes_update(c: CredalSet, event) -> CredalSet:
    """Condition every prior in the set on the event and collect posteriors.

    Raises ZeroProbabilityReachError when some extreme prior gives the event
    probability zero; silently taking closures would decide unstated theory.
    """
    cell = tuple(sorted(event, key=c.space.index))
    unknown = [s for s in cell if s not in c.space.labels]
    if unknown or not cell:
        raise ValueError(f"event {tuple(event)} is not a subset of the states")
    for v in c.vertices:
        if c.event_mass(v, cell) == 0:
            raise ZeroProbabilityReachError(cell, v)
    sub = StateSpace(cell)
    indices = [c.space.index(s) for s in cell]
    posts = []
    for v in c.vertices:
        mass = c.event_mass(v, cell)
        posts.append(Vector(v[i] / mass for i in indices))
    return CredalSet.from_vertices(sub, posts)


def one_step_ahead(c: CredalSet, stage: Partition) -> CredalSet:
    """Marginal of every prior on the cells of one filtration stage."""
    cells = tuple(tuple(sorted(cell, key=c.space.index)) for cell in stage)
    space = StateSpace(tuple(cell_label(cell) for cell in cells))
    margs = [
        Vector(c.event_mass(v, cell) for cell in cells) for v in c.vertices
    ]
    return CredalSet.from_vertices(space, margs)


def compose(
    space: StateSpace,
    stage: Partition,
    marginal: CredalSet,
    conditionals: dict[Cell, CredalSet],
) -> CredalSet:
    """All products of an extreme marginal with extreme per-cell conditionals.

    Cells missing from ``conditionals`` must carry zero marginal mass at
    every extreme point; their states get probability zero.
    """
    cells = tuple(tuple(sorted(cell, key=space.index)) for cell in stage)
    active = [cell for cell in cells if cell in conditionals]
    for cell in cells:
        if cell in conditionals:
            continue
        i = cells.index(cell)
        for m in marginal.vertices:
            if m[i] != 0:
                raise ValueError(
                    f"cell {cell} has marginal mass but no conditional"
                )
    points = []
    for m in marginal.vertices:
        pools = [conditionals[cell].vertices for cell in active]
        for combo in itertools.product(*pools):
            entries = [Fraction(0)] * len(space)
            for cell, cond in zip(active, combo):
                mass = m[cells.index(cell)]
                for j, s in enumerate(cell):
                    entries[space.index(s)] = mass * cond[j]
            points.append(Vector(entries))
    return CredalSet.from_vertices(space, points)


def _hull_over_stages(c: CredalSet, stages: tuple[Partition, ...]) -> CredalSet:
    if not stages:
        return c
    stage = tuple(tuple(sorted(cell, key=c.space.index)) for cell in stages[0])
    marginal = one_step_ahead(c, stage)
    conditionals: dict[Cell, CredalSet] = {}
    for cell in stage:
        masses = [c.event_mass(v, cell) for v in c.vertices]
        if all(m == 0 for m in masses):
            continue  # dead cell: no conditional needed, contributes zero
        if len(cell) == 1:
            # a one-state cell forces the point mass; no conditioning needed
            conditionals[cell] = CredalSet.singleton(StateSpace(cell), [1])
            continue
        cond = full_bayes_update(c, cell)  # raises on mixed zero/positive
        rest = []
        for later in stages[1:]:
            restricted = tuple(
                tuple(s for s in other if s in cell)
                for other in later
                if any(s in cell for s in other)
            )
            rest.append(restricted)
        conditionals[cell] = _hull_over_stages(cond, tuple(rest))
    return compose(c.space, stage, marginal, conditionals)


def rectangular_hull(c: CredalSet, f: Filtration) -> CredalSet:
    """Smallest rectangular credal set containing c for the filtration.

    Built by recombining every extreme one-step-ahead marginal with every
    choice of extreme per-cell conditionals, recursing backward through the
    stages when there is more than one.
    """
    if f.space != c.space:
        raise ValueError("filtration and credal set use different state spaces")
    return _hull_over_stages(c, f.stages)


@dataclass(frozen=True)
class RectangularityCheck:
    rectangular: bool
    witness: Vector | None = None

    def __bool__(self) -> bool:
        return self.rectangular


def is_rectangular(c: CredalSet, f: Filtration) -> RectangularityCheck:
    """True when recombining marginals and conditionals never leaves the set.

    On failure the witness is a hull vertex outside c (the first in the
    hull's canonical vertex order).
    """
    hull = rectangular_hull(c, f)
    for v in hull.vertices:
        if not c.contains(v):
            return RectangularityCheck(False, v)
    return RectangularityCheck(True)
