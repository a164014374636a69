"""From games to dynamic decision problems, and dynamic-consistency checks.

A player's decision problem treats opponent behavior as an uncertain state:
states are the opponent action paths up to the player's first move (or a
terminal), the filtration's intermediate stage groups states by which of the
player's information sets is reached, and beliefs are a credal set over the
states.  Consistency compares the strategic-form optimum with the optimum
recomputed at each reached information set after full Bayesian updating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .beliefs import (
    CredalSet,
    Filtration,
    StateSpace,
    cell_label,
    full_bayes_update,
)
from .exactmath import Polytope, Vector, affine_image, rat
from .gametree import (
    GameTree,
    Node,
    PayoffEntry,
    TerminalNode,
    validate_perfect_recall,
)
from .maxmin import DecisionProblem, MaxminSolution, constrained_maxmin, maxmin_solve

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
UNREACHABLE = "unreachable"


class StateSpaceError(ValueError):
    """Opponent-path states cannot be wired to the given beliefs/payoffs."""


@dataclass(frozen=True)
class ConditionalSlot:
    """One stage-1 cell where the player acts.

    ``payoff`` is the cell restriction of the strategic-form matrix, with
    one row per joint action at the information sets reachable inside the
    cell; ``projection`` marginalizes full mixed strategies onto those rows.
    """

    cell: tuple[str, ...]
    payoff: tuple[tuple[Fraction, ...], ...]
    projection: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class PlayerProblem:
    player: str
    exante: DecisionProblem
    filtration: Filtration
    conditionals: tuple[ConditionalSlot, ...]

    @property
    def space(self) -> StateSpace:
        return self.exante.space

    def slot_for(self, cell) -> ConditionalSlot:
        want = tuple(cell)
        for slot in self.conditionals:
            if slot.cell == want:
                return slot
        raise KeyError(f"no conditional problem for cell {want}")


# -- deriving the state structure from a game -------------------------------


@dataclass(frozen=True)
class _State:
    label: str
    path: tuple[str, ...]
    terminal: bool
    infoset: int | None  # the player's information set reached, if any


def _derive_structure(game: GameTree, player: str):
    if player not in game.players:
        raise StateSpaceError(f"unknown player {player!r}")
    recall = validate_perfect_recall(game)
    if not recall.ok:
        raise StateSpaceError(
            f"player {recall.player!r} lacks perfect recall: {recall.witness}"
        )
    pidx = game.players.index(player)

    states: list[_State] = []

    def scan(path, node: Node, labels: tuple[str, ...]) -> None:
        if isinstance(node, TerminalNode):
            states.append(_State("".join(labels) or "start", path, True, None))
            return
        if node.player == player:
            _, iset = game.infoset_at(path)
            states.append(_State("".join(labels) or "start", path, False, iset))
            return
        for label, child in zip(node.actions, node.children):
            scan(path + (label,), child, labels + (label,))

    scan((), game.root, ())
    labels = [s.label for s in states]
    if len(set(labels)) != len(labels):
        raise StateSpaceError(f"ambiguous opponent-path labels: {labels}")

    # group states by the information set reached (None = the player never acts)
    cells: list[tuple[int | None, list[int]]] = []
    for i, s in enumerate(states):
        for key, members in cells:
            if key == s.infoset:
                members.append(i)
                break
        else:
            cells.append((s.infoset, [i]))

    def own_sets_below(path) -> set[int]:
        found: set[int] = set()

        def walk(p, node: Node) -> None:
            if isinstance(node, TerminalNode):
                return
            if node.player == player:
                found.add(game.infoset_at(p)[1])
            for label, child in zip(node.actions, node.children):
                walk(p + (label,), child)

        walk(path, game.node_at(path))
        return found

    relevant: dict[int, tuple[int, ...]] = {}
    for ci, (key, members) in enumerate(cells):
        if key is None:
            continue
        sets: set[int] = set()
        for i in members:
            sets |= own_sets_below(states[i].path)
        relevant[ci] = tuple(sorted(sets))

    def follow(path, assignment: dict[int, int]) -> PayoffEntry:
        """The player's payoff below ``path`` given his own choices.

        Opponent nodes below are explored on all branches; their choices
        must not matter, else the states do not determine payoffs.
        """
        node = game.node_at(path)
        if isinstance(node, TerminalNode):
            return node.payoffs[pidx]
        if node.player == player:
            action = assignment[game.infoset_at(path)[1]]
            return follow(path + (node.actions[action],), assignment)
        seen: list[PayoffEntry] = []
        for label in node.actions:
            seen.append(follow(path + (label,), assignment))
        first = seen[0]
        if any(entry != first for entry in seen[1:]):
            raise StateSpaceError(
                f"payoff below {path} depends on an opponent move the state "
                "space does not resolve"
            )
        return first

    full_pures = game.pure_strategies(player)
    sym_rows: list[list[PayoffEntry]] = []
    for pure in full_pures:
        assignment = dict(enumerate(pure))
        sym_rows.append([follow(s.path, assignment) for s in states])

    return states, cells, relevant, sym_rows, full_pures


def _merge_groups(states, cells, sym_rows):
    """Indices of states to merge: identical symbolic columns, same cell."""
    groups: list[list[int]] = []
    for _, members in cells:
        seen: list[tuple[tuple[PayoffEntry, ...], list[int]]] = []
        for i in members:
            column = tuple(row[i] for row in sym_rows)
            for key, group in seen:
                if key == column:
                    group.append(i)
                    break
            else:
                seen.append((column, [i]))
        groups.extend(group for _, group in seen)
    return sorted(groups, key=lambda g: g[0])


def _assemble(
    player: str,
    labels: list[str],
    cells_by_label: list[list[str]],
    acting: dict[int, tuple[int, ...]],
    sym_rows,
    full_pures,
    game: GameTree,
    values: dict[str, Fraction],
    beliefs: CredalSet,
    columns_of: dict[str, int],
) -> PlayerProblem:
    space = StateSpace(tuple(labels))
    if beliefs.space != space:
        raise StateSpaceError(
            f"beliefs over {beliefs.space.labels} do not match states {space.labels}"
        )

    def resolve(entry: PayoffEntry) -> Fraction:
        return game.payoff_value(entry, values)

    exante_rows = [
        [resolve(row[columns_of[lab]]) for lab in labels] for row in sym_rows
    ]
    exante = DecisionProblem.build(exante_rows, space, beliefs)

    stage = tuple(tuple(cell) for cell in cells_by_label)
    filtration = Filtration.build(space, [stage])

    slots = []
    for ci, sets in acting.items():
        cell = tuple(cells_by_label[ci])
        arities = [len(game.information_sets_for(player)[i].actions) for i in sets]
        cell_pures = list(itertools.product(*[range(a) for a in arities]))
        proj = []
        for cp in cell_pures:
            row = []
            for pure in full_pures:
                match = all(pure[s] == cp[j] for j, s in enumerate(sets))
                row.append(Fraction(1) if match else Fraction(0))
            proj.append(tuple(row))
        # cell payoff rows: reuse the strategic rows of any matching pure
        payoff = []
        for cp, prow in zip(cell_pures, proj):
            full_index = prow.index(Fraction(1))
            payoff.append(
                tuple(
                    resolve(sym_rows[full_index][columns_of[lab]]) for lab in cell
                )
            )
        slots.append(ConditionalSlot(cell, tuple(payoff), tuple(proj)))
    return PlayerProblem(player, exante, filtration, tuple(slots))


def opponent_states(game: GameTree, player: str) -> tuple[str, ...]:
    """Labels and order of the player's opponent-path states.

    Beliefs handed to build_player_problem must use these labels (or the
    labels of their payoff-identical aggregation).
    """
    states, _, _, _, _ = _derive_structure(game, player)
    return tuple(s.label for s in states)


def build_player_problem(
    game: GameTree,
    player: str,
    opponent_beliefs: CredalSet,
    bindings: dict | None = None,
) -> PlayerProblem:
    """Wire a player's strategic and conditional problems from the game.

    The beliefs may be stated either over the raw opponent-path states or
    over their payoff-identical aggregation (in which case the merged states
    adopt the beliefs' labels, as with a combined state named Z).
    """
    states, cells, relevant, sym_rows, full_pures = _derive_structure(game, player)
    values = game.resolve_parameters(bindings)
    want = opponent_beliefs.space.labels

    # merging keeps the cell list intact, so the acting map carries over
    acting = relevant
    raw_labels = [s.label for s in states]
    if tuple(raw_labels) == want:
        labels = raw_labels
        columns_of = {lab: i for i, lab in enumerate(raw_labels)}
        cells_by_label = [[states[i].label for i in members] for _, members in cells]
    else:
        groups = _merge_groups(states, cells, sym_rows)
        if len(groups) != len(want):
            raise StateSpaceError(
                f"{len(groups)} aggregated states cannot match beliefs over {want}"
            )
        labels = []
        columns_of = {}
        group_of_state: dict[int, str] = {}
        for pos, group in enumerate(groups):
            auto = cell_label(tuple(states[i].label for i in group))
            label = want[pos] if len(group) > 1 else states[group[0]].label
            if len(group) == 1 and label != want[pos]:
                raise StateSpaceError(
                    f"state {label!r} does not match belief state {want[pos]!r} "
                    f"(aggregated form would be {auto!r})"
                )
            labels.append(label)
            columns_of[label] = group[0]
            for i in group:
                group_of_state[i] = label
        cells_by_label = []
        for _, members in cells:
            cell: list[str] = []
            for i in members:
                lab = group_of_state[i]
                if lab not in cell:
                    cell.append(lab)
            cells_by_label.append(cell)

    return _assemble(
        player,
        labels,
        cells_by_label,
        acting,
        sym_rows,
        full_pures,
        game,
        values,
        opponent_beliefs,
        columns_of,
    )


def player_problem_from_matrix(
    player: str,
    payoff_rows,
    space: StateSpace,
    beliefs: CredalSet,
    stage,
    acting_cells,
) -> PlayerProblem:
    """Directly assemble a one-information-set player problem.

    The strategy coordinates double as the cell coordinates, so every
    conditional slot carries an identity projection.
    """
    rows = tuple(tuple(rat(x) for x in row) for row in payoff_rows)
    exante = DecisionProblem.build(rows, space, beliefs)
    stage_cells = tuple(
        tuple(sorted(cell, key=space.index)) for cell in stage
    )
    filtration = Filtration.build(space, [stage_cells])
    k = len(rows)
    identity = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(k))
        for i in range(k)
    )
    slots = []
    for cell in acting_cells:
        cell = tuple(sorted(cell, key=space.index))
        if cell not in stage_cells:
            raise StateSpaceError(f"acting cell {cell} is not a stage-1 cell")
        idx = [space.index(s) for s in cell]
        payoff = tuple(tuple(row[i] for i in idx) for row in rows)
        slots.append(ConditionalSlot(cell, payoff, identity))
    return PlayerProblem(player, exante, filtration, tuple(slots))


def aggregate_identical_payoff_states(
    pp: PlayerProblem, merged_labels: dict[frozenset, str] | None = None
) -> PlayerProblem:
    """Merge states with identical payoff columns inside one stage-1 cell.

    Beliefs are pushed forward by the coordinate-summing map; states in
    different cells never merge (that would coarsen the filtration).
    Merged states are labelled {A,B,...} unless ``merged_labels`` names them.
    """
    space = pp.space
    stage = pp.filtration.stages[0]
    rows = pp.exante.payoff
    renames = {frozenset(k): v for k, v in (merged_labels or {}).items()}

    groups: list[list[int]] = []
    for cell in stage:
        seen: list[tuple[tuple[Fraction, ...], list[int]]] = []
        for s in cell:
            i = space.index(s)
            column = tuple(row[i] for row in rows)
            for key, group in seen:
                if key == column:
                    group.append(i)
                    break
            else:
                seen.append((column, [i]))
        groups.extend(group for _, group in seen)
    groups.sort(key=lambda g: g[0])

    new_labels = []
    label_of_old: dict[int, str] = {}
    for group in groups:
        olds = tuple(space.labels[i] for i in group)
        if len(group) == 1:
            label = olds[0]
        else:
            label = renames.get(frozenset(olds), cell_label(olds))
        new_labels.append(label)
        for i in group:
            label_of_old[i] = label
    new_space = StateSpace(tuple(new_labels))

    summing = [
        [Fraction(1) if old in group else Fraction(0) for old in range(len(space))]
        for group in groups
    ]
    new_set = affine_image(pp.exante.beliefs.set, summing)
    new_beliefs = CredalSet(new_space, new_set)

    new_rows = [[row[group[0]] for group in groups] for row in rows]
    new_stage = []
    for cell in stage:
        cell_labels: list[str] = []
        for s in cell:
            lab = label_of_old[space.index(s)]
            if lab not in cell_labels:
                cell_labels.append(lab)
        new_stage.append(tuple(cell_labels))

    exante = DecisionProblem.build(new_rows, new_space, new_beliefs)
    filtration = Filtration.build(new_space, [tuple(new_stage)])
    slots = []
    for slot in pp.conditionals:
        cell_labels: list[str] = []
        keep_cols: list[int] = []
        for col, s in enumerate(slot.cell):
            lab = label_of_old[space.index(s)]
            if lab not in cell_labels:
                cell_labels.append(lab)
                keep_cols.append(col)
        payoff = tuple(tuple(row[i] for i in keep_cols) for row in slot.payoff)
        slots.append(ConditionalSlot(tuple(cell_labels), payoff, slot.projection))
    return PlayerProblem(pp.player, exante, filtration, tuple(slots))


def induce_downstream(p1_beliefs: CredalSet, n_interval) -> CredalSet:
    """Push first-mover beliefs through an independent second move.

    A prior (l, r, o) combined with a second-mover chance n of continuing
    yields (z, rn, o) = (l + r(1-n), rn, o).  The map is affine in n for a
    fixed prior and affine in the prior for fixed n, so the hull of the
    endpoint images contains every intermediate image.
    """
    if len(p1_beliefs.space) != 3:
        raise StateSpaceError("downstream induction expects a three-state prior")
    a, b = (rat(x) for x in n_interval)
    if not (0 <= a <= b <= 1):
        raise ValueError(f"malformed interval [{a}, {b}]")
    out_space = StateSpace.of("Z", "RN", "O")
    images = []
    for v in p1_beliefs.vertices:
        l, r, o = v.entries
        for n in {a, b}:
            images.append(Vector([l + r * (1 - n), r * n, o]))
    return CredalSet.from_vertices(out_space, images)


# -- dynamic consistency ----------------------------------------------------


@dataclass(frozen=True)
class CellVerdict:
    cell: tuple[str, ...]
    status: str
    conditional_value: Fraction | None = None  # optimum after updating
    restricted_value: Fraction | None = None  # best ex-ante optimizer does
    value_gap: Fraction | None = None
    exante_face: Polytope | None = None  # projected to the cell's coordinates
    conditional_face: Polytope | None = None
    common_face: Polytope | None = None  # ex-ante optimizers that stay optimal

    def to_json(self) -> dict:
        out: dict = {"cell": list(self.cell), "status": self.status}
        if self.conditional_value is not None:
            out["conditional_value"] = str(self.conditional_value)
        if self.restricted_value is not None:
            out["restricted_value"] = str(self.restricted_value)
        if self.value_gap is not None:
            out["value_gap"] = str(self.value_gap)
        for name in ("exante_face", "conditional_face", "common_face"):
            face = getattr(self, name)
            if face is not None:
                out[name] = face.to_json()
        return out


@dataclass(frozen=True)
class ConsistencyReport:
    player: str
    exante_solution: MaxminSolution
    cells: tuple[CellVerdict, ...]

    @property
    def overall(self) -> bool:
        return all(c.status != INCONSISTENT for c in self.cells)

    def to_json(self) -> dict:
        return {
            "player": self.player,
            "overall": self.overall,
            "exante": self.exante_solution.to_json(),
            "cells": [c.to_json() for c in self.cells],
        }


def check_dynamic_consistency(pp: PlayerProblem) -> ConsistencyReport:
    """Compare the strategic-form optimum with each reached-cell optimum.

    A cell is consistent when some ex-ante optimizer attains the updated
    problem's full optimum there; cells some prior deems unreachable are
    reported, not judged.
    """
    exante = maxmin_solve(pp.exante)
    beliefs = pp.exante.beliefs
    verdicts = []
    for slot in pp.conditionals:
        masses = [beliefs.event_mass(v, slot.cell) for v in beliefs.vertices]
        if any(m == 0 for m in masses):
            verdicts.append(CellVerdict(slot.cell, UNREACHABLE))
            continue
        conditional_beliefs = full_bayes_update(beliefs, slot.cell)
        order = [slot.cell.index(lab) for lab in conditional_beliefs.space.labels]
        payoff = [[row[i] for i in order] for row in slot.payoff]
        problem = DecisionProblem.build(
            payoff, conditional_beliefs.space, conditional_beliefs
        )
        conditional = maxmin_solve(problem)
        projected = affine_image(exante.optimal_face, slot.projection)
        restricted = constrained_maxmin(problem, projected)
        if restricted.value == conditional.value:
            verdicts.append(
                CellVerdict(
                    slot.cell,
                    CONSISTENT,
                    conditional_value=conditional.value,
                    restricted_value=restricted.value,
                    exante_face=projected,
                    conditional_face=conditional.optimal_face,
                    common_face=restricted.optimal_face,
                )
            )
        else:
            verdicts.append(
                CellVerdict(
                    slot.cell,
                    INCONSISTENT,
                    conditional_value=conditional.value,
                    restricted_value=restricted.value,
                    value_gap=conditional.value - restricted.value,
                    exante_face=projected,
                    conditional_face=conditional.optimal_face,
                )
            )
    return ConsistencyReport(pp.player, exante, tuple(verdicts))


@dataclass(frozen=True)
class PayoffSearchResult:
    payoffs: dict[str, Fraction]
    report: ConsistencyReport


def find_dc_violation_payoffs(
    game: GameTree,
    player: str,
    beliefs: CredalSet,
    payoff_grid,
    slots,
    bindings: dict | None = None,
) -> PayoffSearchResult | None:
    """Scan grid assignments of the free payoff slots, lexicographically.

    Returns the first assignment whose consistency report shows a violation,
    or None when the grid is exhausted.
    """
    grid = [rat(g) for g in payoff_grid]
    slots = list(slots)
    base = dict(bindings or {})
    for assignment in itertools.product(grid, repeat=len(slots)):
        full = dict(base)
        full.update(zip(slots, assignment))
        pp = build_player_problem(game, player, beliefs, full)
        report = check_dynamic_consistency(pp)
        if not report.overall:
            return PayoffSearchResult(dict(zip(slots, assignment)), report)
    return None
