"""Exact-rational linear programming.

A two-phase tableau simplex over ``Fraction`` with Bland's pivoting rule:
every number is exact, and the fixed rule makes the returned optimum
deterministic for a given program.  Problem sizes in this library are tiny
(a handful of variables and rows), so clarity wins over sparse tricks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import rat
from .vector import DimensionMismatchError, Vector

LESS_EQUAL = "<="
EQUAL = "=="
GREATER_EQUAL = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coefficients: Vector
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in (LESS_EQUAL, EQUAL, GREATER_EQUAL):
            raise ValueError(f"unknown relation {self.relation!r}")


Bound = tuple[Fraction | None, Fraction | None]


@dataclass(frozen=True)
class LinearProgram:
    """Maximize ``objective . x`` subject to linear constraints.

    ``bounds`` gives one optional (lower, upper) pair per variable; a
    variable with no bounds is free.  Convenience constructors below cover
    the common cases.
    """

    objective: Vector
    constraints: tuple[Constraint, ...]
    bounds: tuple[Bound, ...]

    def __post_init__(self):
        n = self.objective.dimension
        for c in self.constraints:
            if c.coefficients.dimension != n:
                raise DimensionMismatchError(
                    f"constraint has {c.coefficients.dimension} coefficients, expected {n}"
                )
        if len(self.bounds) != n:
            raise DimensionMismatchError("one bound pair needed per variable")

    @classmethod
    def build(cls, objective, constraints, bounds=None) -> "LinearProgram":
        obj = objective if isinstance(objective, Vector) else Vector(objective)
        rows = []
        for coeffs, rel, rhs in constraints:
            vec = coeffs if isinstance(coeffs, Vector) else Vector(coeffs)
            rows.append(Constraint(vec, rel, rat(rhs)))
        if bounds is None:
            bounds = [(None, None)] * obj.dimension
        norm = tuple(
            (None if lo is None else rat(lo), None if up is None else rat(up))
            for lo, up in bounds
        )
        return cls(obj, tuple(rows), norm)


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Fraction | None = None
    point: Vector | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Dense simplex tableau over Fractions with Bland's rule."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = len(rows[0]) if rows else 0

    def pivot(self, r: int, col: int) -> None:
        piv = self.rows[r][col]
        inv = 1 / piv
        self.rows[r] = [a * inv for a in self.rows[r]]
        self.rhs[r] *= inv
        for i in range(len(self.rows)):
            if i == r:
                continue
            factor = self.rows[i][col]
            if factor == 0:
                continue
            prow = self.rows[r]
            self.rows[i] = [a - factor * b for a, b in zip(self.rows[i], prow)]
            self.rhs[i] -= factor * self.rhs[r]
        self.basis[r] = col

    def run(self, cost: list[Fraction], allowed: list[bool]) -> str:
        """Maximize cost.x from the current basic feasible point.

        Returns OPTIMAL or UNBOUNDED.  ``allowed`` masks columns that may
        enter (used to lock artificial columns out of phase 2).
        """
        # reduced costs relative to the current basis
        z = list(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                z = [a - cb * v for a, v in zip(z, self.rows[r])]
        while True:
            enter = next(
                (j for j in range(self.ncols) if allowed[j] and z[j] > 0), None
            )
            if enter is None:
                return OPTIMAL
            leave, best = None, None
            for r in range(len(self.rows)):
                a = self.rows[r][enter]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leave])
                    ):
                        best, leave = ratio, r
            if leave is None:
                return UNBOUNDED
            self.pivot(leave, enter)
            # refresh reduced costs for the changed basis
            factor = z[enter]
            if factor != 0:
                z = [a - factor * b for a, b in zip(z, self.rows[leave])]


def lp_solve(lp: LinearProgram) -> LpSolution:
    """Solve exactly; deterministic for a fixed program (Bland's rule)."""
    n = lp.objective.dimension

    # shift/split variables so every tableau variable is >= 0
    transforms: list[tuple[Fraction, list[tuple[int, Fraction]]]] = []
    extra_rows: list[tuple[list[tuple[int, Fraction]], Fraction]] = []
    ny = 0
    one = Fraction(1)
    for lo, up in lp.bounds:
        if lo is not None and up is not None and up < lo:
            return LpSolution(INFEASIBLE)
        if lo is not None:
            transforms.append((lo, [(ny, one)]))
            if up is not None:
                extra_rows.append(([(ny, one)], up - lo))
            ny += 1
        elif up is not None:
            transforms.append((up, [(ny, -one)]))
            ny += 1
        else:
            transforms.append((Fraction(0), [(ny, one), (ny + 1, -one)]))
            ny += 2

    def to_y(coeffs) -> tuple[list[Fraction], Fraction]:
        """Rewrite a row over x as a row over y plus the constant shift."""
        row = [Fraction(0)] * ny
        shift = Fraction(0)
        for j, c in enumerate(coeffs):
            if c == 0:
                continue
            const, terms = transforms[j]
            shift += c * const
            for k, f in terms:
                row[k] += c * f
        return row, shift

    rows_y: list[list[Fraction]] = []
    rels: list[str] = []
    rhs_y: list[Fraction] = []
    for con in lp.constraints:
        row, shift = to_y(con.coefficients)
        rows_y.append(row)
        rels.append(con.relation if con.relation != GREATER_EQUAL else GREATER_EQUAL)
        rhs_y.append(con.rhs - shift)
    for terms, ub in extra_rows:
        row = [Fraction(0)] * ny
        for k, f in terms:
            row[k] += f
        rows_y.append(row)
        rels.append(LESS_EQUAL)
        rhs_y.append(ub)

    # equality standard form: one slack per inequality, rhs made nonnegative
    nslack = sum(1 for r in rels if r != EQUAL)
    ncols = ny + nslack
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    slack_sign: list[Fraction | None] = []
    s = 0
    for row, rel, b in zip(rows_y, rels, rhs_y):
        full = row + [Fraction(0)] * nslack
        sign = None
        if rel != EQUAL:
            sign = one if rel == LESS_EQUAL else -one
            full[ny + s] = sign
            s += 1
        if b < 0:
            full = [-a for a in full]
            b = -b
            sign = None if sign is None else -sign
        rows.append(full)
        rhs.append(b)
        slack_sign.append(sign)

    # initial basis: slacks where they enter with +1, artificials elsewhere
    basis = [-1] * len(rows)
    art_cols: list[int] = []
    for i, sign in enumerate(slack_sign):
        if sign == one:
            col = next(j for j in range(ny, ncols) if rows[i][j] == one)
            basis[i] = col
    for i in range(len(rows)):
        if basis[i] == -1:
            for r in rows:
                r.append(Fraction(0))
            rows[i][-1] = one
            basis[i] = ncols
            art_cols.append(ncols)
            ncols += 1

    tab = _Tableau(rows, rhs, basis)
    tab.ncols = ncols

    if art_cols:
        cost1 = [Fraction(0)] * ncols
        for j in art_cols:
            cost1[j] = Fraction(-1)
        tab.run(cost1, [True] * ncols)
        infeas = sum(
            (tab.rhs[r] for r, b in enumerate(tab.basis) if b in set(art_cols)),
            Fraction(0),
        )
        if infeas != 0:
            return LpSolution(INFEASIBLE)
        # pivot leftover artificials out of the basis; drop redundant rows
        art_set = set(art_cols)
        for r in range(len(tab.rows) - 1, -1, -1):
            if tab.basis[r] in art_set:
                col = next(
                    (j for j in range(ny + nslack) if tab.rows[r][j] != 0), None
                )
                if col is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                else:
                    tab.pivot(r, col)

    obj_row, obj_shift = to_y(lp.objective)
    cost2 = obj_row + [Fraction(0)] * (ncols - ny)
    allowed = [j < ny + nslack for j in range(ncols)]
    status = tab.run(cost2, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    y = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        y[b] = tab.rhs[r]
    point = Vector(
        const + sum((f * y[k] for k, f in terms), Fraction(0))
        for const, terms in transforms
    )
    value = lp.objective.dot(point)
    return LpSolution(OPTIMAL, value, point)


def lp_feasible(constraints, n: int, bounds=None) -> Vector | None:
    """A feasible point of the system, or None (phase-1 only: zero objective)."""
    lp = LinearProgram.build([Fraction(0)] * n, constraints, bounds)
    sol = lp_solve(lp)
    return sol.point if sol.is_optimal else None
