"""Vertex-represented convex polytopes with exact membership and minimization.

Everything is V-representation: a polytope is the convex hull of its listed
vertices, membership and redundancy are decided by exact LP feasibility, and
minimization yields the unique set of extreme points (sorted, so minimized
polytopes have a canonical form).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linprog import EQUAL, lp_feasible
from .vector import DimensionMismatchError, Vector, matrix_apply


@dataclass(frozen=True)
class Polytope:
    ambient_dimension: int
    vertices: tuple[Vector, ...]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("polytope needs at least one vertex")
        for v in self.vertices:
            if v.dimension != self.ambient_dimension:
                raise DimensionMismatchError(
                    f"vertex of dimension {v.dimension} in {self.ambient_dimension}-d polytope"
                )

    @classmethod
    def from_vertices(cls, vertices) -> "Polytope":
        verts = tuple(v if isinstance(v, Vector) else Vector(v) for v in vertices)
        return cls(verts[0].dimension, verts)

    def to_json(self) -> dict:
        return {
            "dimension": self.ambient_dimension,
            "vertices": [v.to_json() for v in self.vertices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        p = cls.from_vertices([Vector.from_json(v) for v in data["vertices"]])
        if p.ambient_dimension != data["dimension"]:
            raise DimensionMismatchError("vertex length disagrees with dimension")
        return p


def polytope_contains(p: Polytope, x: Vector) -> bool:
    """Exact test that x is a convex combination of p's vertices."""
    if x.dimension != p.ambient_dimension:
        raise DimensionMismatchError(
            f"point of dimension {x.dimension} vs polytope of {p.ambient_dimension}"
        )
    verts = p.vertices
    if x in verts:
        return True
    if len(verts) == 1:
        return False
    n = len(verts)
    constraints = []
    for coord in range(p.ambient_dimension):
        row = [v[coord] for v in verts]
        constraints.append((row, EQUAL, x[coord]))
    constraints.append(([Fraction(1)] * n, EQUAL, Fraction(1)))
    bounds = [(Fraction(0), None)] * n
    return lp_feasible(constraints, n, bounds) is not None


def polytope_minimize(p: Polytope) -> Polytope:
    """Drop every vertex inside the hull of the others; sort the survivors.

    The extreme-point set of a polytope is unique, so the output is a
    canonical form: two polytopes are equal iff their minimized vertex
    tuples are equal.
    """
    verts: list[Vector] = []
    for v in p.vertices:
        if v not in verts:
            verts.append(v)
    i = 0
    while i < len(verts) and len(verts) > 1:
        others = verts[:i] + verts[i + 1 :]
        if polytope_contains(Polytope(p.ambient_dimension, tuple(others)), verts[i]):
            verts.pop(i)
        else:
            i += 1
    return Polytope(p.ambient_dimension, tuple(sorted(verts)))


def polytope_equal(p: Polytope, q: Polytope) -> bool:
    """Hull equality: every vertex of each polytope lies in the other."""
    if p.ambient_dimension != q.ambient_dimension:
        raise DimensionMismatchError("polytopes live in different dimensions")
    if set(p.vertices) == set(q.vertices):
        return True
    return all(polytope_contains(q, v) for v in p.vertices) and all(
        polytope_contains(p, v) for v in q.vertices
    )


def affine_image(p: Polytope, matrix, offset: Vector | None = None) -> Polytope:
    """Image of the hull under x -> matrix.x + offset, minimized.

    Affine maps carry vertex sets onto supersets of the image's vertex set,
    so mapping vertices and minimizing is exact.
    """
    rows = [list(r) for r in matrix]
    for row in rows:
        if len(row) != p.ambient_dimension:
            raise DimensionMismatchError(
                f"matrix has {len(row)} columns, polytope dimension is {p.ambient_dimension}"
            )
    images = []
    for v in p.vertices:
        w = matrix_apply(rows, v)
        images.append(w + offset if offset is not None else w)
    return polytope_minimize(Polytope.from_vertices(images))
