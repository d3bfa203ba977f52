"""Sokoban: board generation, move rules, solvers and the six question types."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..core import SO, SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, QuestionTemplate, build_options, fill_template
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import DIR_ORDER, DIRS, Cell, GenerationError, bfs_path, connected, fmt_cell, fmt_cells, step

GAME_ID = "sokoban"
SIZES = {Level.EASY: 5, Level.MEDIUM: 8, Level.HARD: 12}
CELL_PX = {5: 64, 8: 56, 12: 44}

INTRO = (
    "This is a Sokoban puzzle where the black circle is the player, green X is target, "
    "brown box with X is box to push, brick-patterned brown tiles are walls, and light brown "
    "areas are movable spaces. The coordinates (x, y) in this puzzle represent the matrix format."
)


@dataclass(frozen=True)
class SokobanState:
    rows: int
    cols: int
    walls: frozenset[Cell]
    player: Cell
    boxes: frozenset[Cell]
    targets: frozenset[Cell]

    @property
    def floors(self) -> frozenset[Cell]:
        return frozenset(
            (r, c) for r in range(self.rows) for c in range(self.cols) if (r, c) not in self.walls
        )

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.rows and 0 <= cell[1] < self.cols

    def is_wall(self, cell: Cell) -> bool:
        return cell in self.walls or not self.in_bounds(cell)

    @property
    def solved(self) -> bool:
        return self.boxes <= self.targets and len(self.boxes) == len(self.targets)

    def check(self) -> list[str]:
        problems = []
        floors = self.floors
        if self.player not in floors:
            problems.append("player not on floor")
        if not self.boxes <= floors or not self.targets <= floors:
            problems.append("box or target not on floor")
        if self.player in self.boxes:
            problems.append("player on a box")
        for r in range(self.rows):
            for c in range(self.cols):
                border = r in (0, self.rows - 1) or c in (0, self.cols - 1)
                if border and (r, c) not in self.walls:
                    problems.append(f"border cell {(r, c)} is not a wall")
        return problems


@dataclass(frozen=True)
class MoveOutcome:
    direction: str
    start: Cell
    end: Cell
    moved: bool
    reason: str = ""
    box_from: Cell | None = None
    box_to: Cell | None = None


@dataclass
class Trace:
    start: Cell
    steps: list[MoveOutcome] = field(default_factory=list)
    final_state: SokobanState | None = None

    @property
    def final(self) -> Cell:
        return self.steps[-1].end if self.steps else self.start


def player_move(s: SokobanState, d: str) -> tuple[SokobanState, bool]:
    s2, out = _player_move(s, d)
    return s2, out.moved


def _player_move(s: SokobanState, d: str) -> tuple[SokobanState, MoveOutcome]:
    if d not in DIRS:
        raise ValueError(f"unknown direction {d!r}")
    new = step(s.player, d)
    if s.is_wall(new):
        return s, MoveOutcome(d, s.player, s.player, False, "Wall in the way")
    if new in s.boxes:
        beyond = step(new, d)
        if s.is_wall(beyond) or beyond in s.boxes:
            return s, MoveOutcome(d, s.player, s.player, False, "Box cannot be pushed")
        boxes = (s.boxes - {new}) | {beyond}
        return replace(s, player=new, boxes=frozenset(boxes)), MoveOutcome(d, s.player, new, True, "", new, beyond)
    return replace(s, player=new), MoveOutcome(d, s.player, new, True)


def apply_sequence(s: SokobanState, moves: list[str]) -> Trace:
    tr = Trace(s.player)
    cur = s
    for d in moves:
        cur, out = _player_move(cur, d)
        tr.steps.append(out)
    tr.final_state = cur
    return tr


def box_self_move(s: SokobanState, box: Cell, moves: list[str]) -> Trace:
    """Move one box by itself; the player is treated as floor, walls and other boxes block."""
    if box not in s.boxes:
        raise KeyError(f"no box at {box}")
    others = s.boxes - {box}
    tr = Trace(box)
    pos = box
    for d in moves:
        new = step(pos, d.capitalize())
        if s.is_wall(new) or new in others:
            tr.steps.append(MoveOutcome(d, pos, pos, False, "Wall in the way" if s.is_wall(new) else "Box in the way"))
        else:
            tr.steps.append(MoveOutcome(d, pos, new, True))
            pos = new
    return tr


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def min_solution(s: SokobanState) -> list[str] | None:
    """Fewest player moves (pushes included) that put every box on a target."""

    def succ(node):
        player, boxes = node
        st = replace(s, player=player, boxes=boxes)
        for d in DIR_ORDER:
            s2, out = _player_move(st, d)
            if out.moved:
                yield d, (s2.player, s2.boxes)

    res = bfs_path((s.player, s.boxes), lambda n: n[1] == s.targets, succ)
    return None if res is None else list(res[0])  # type: ignore[arg-type]


class NoPath(ValueError):
    pass


def shortest_player_path(s: SokobanState, start: Cell, goal: Cell) -> list[str]:
    """Shortest walk with boxes treated as walls; ties broken Up, Down, Left, Right."""
    blocked = s.walls | s.boxes
    if start in blocked or goal in blocked:
        raise NoPath("endpoints must be free floor cells")

    def succ(cell):
        for d in DIR_ORDER:
            n = step(cell, d)
            if s.in_bounds(n) and n not in blocked:
                yield d, n

    res = bfs_path(start, lambda c: c == goal, succ)
    if res is None:
        raise NoPath(f"no path from {start} to {goal}")
    return list(res[0])  # type: ignore[arg-type]


def walk_with_boxes_as_walls(s: SokobanState, start: Cell, moves: list[str]) -> Cell | None:
    """End cell of a walk, or None if any move hits a wall or box."""
    pos = start
    for d in moves:
        n = step(pos, d)
        if s.is_wall(n) or n in s.boxes:
            return None
        pos = n
    return pos


# --------------------------------------------------------------------------- generation


def gen_sokoban(plot: Level, rng: RngStream, n_boxes: int = 1, budget: int = 400) -> SokobanState:
    n = SIZES[plot]
    interior = [(r, c) for r in range(1, n - 1) for c in range(1, n - 1)]
    border = {(r, c) for r in range(n) for c in range(n)} - set(interior)
    wall_frac = {5: 0.0, 8: 0.08, 12: 0.12}[n]
    for _ in range(budget):
        k = int(round(wall_frac * len(interior)))
        inner_walls = set(rng.sample(interior, k)) if k else set()
        floors = [c for c in interior if c not in inner_walls]
        if not connected(set(floors)) or len(floors) < n_boxes * 2 + 1:
            continue
        picks = rng.sample(floors, 2 * n_boxes + 1)
        player, boxes, targets = picks[0], picks[1 : 1 + n_boxes], picks[1 + n_boxes :]
        s = SokobanState(n, n, frozenset(border | inner_walls), player, frozenset(boxes), frozenset(targets))
        plan = min_solution(s)
        if plan is None or len(plan) < 2:
            continue
        return s
    raise GenerationError("sokoban: retry budget exhausted")


# --------------------------------------------------------------------------- rendering


def scene(s: SokobanState) -> TileGrid:
    cells = {}
    for r in range(s.rows):
        for c in range(s.cols):
            cell = (r, c)
            if cell in s.walls:
                cells[cell] = CellPaint(fill="wall brown", glyph="brick")
            elif cell in s.boxes:
                cells[cell] = CellPaint(fill="light brown", glyph="box",
                                        glyph_color="target green" if cell in s.targets else None)
            elif cell == s.player:
                cells[cell] = CellPaint(fill="light brown", glyph="player")
            elif cell in s.targets:
                cells[cell] = CellPaint(fill="light brown", glyph="target")
            else:
                cells[cell] = CellPaint(fill="light brown")
    return TileGrid(s.rows, s.cols, cells, cell_px=CELL_PX.get(s.rows, 48))


# --------------------------------------------------------------------------- QA


def _header(s: SokobanState) -> str:
    return (
        f"The board has {s.rows} rows and {s.cols} columns, counted from 0 at the top-left corner.\n"
        f"- Player position: {fmt_cell(s.player)}\n"
        f"- Boxes positions: {fmt_cells(sorted(s.boxes))}\n"
        f"- Target positions: {fmt_cells(sorted(s.targets))}"
    )


def _all_cells(s: SokobanState) -> list[Cell]:
    return [(r, c) for r in range(s.rows) for c in range(s.cols)]


def _task_player_position(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    opts = build_options(s.player, DistractorPolicy("CoordinatePerturb", {"cells": _all_cells(s)}),
                         task.num_options, rng)
    q = "What is the current position of the player (row, column)?"
    a = _header(s) + f"\nThe player is currently at position {fmt_cell(s.player)}."
    return Derivation(q, a, fmt_cell(s.player), scene(s), opts, state=s)


def _task_manhattan(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    box, target = sorted(s.boxes)[0], sorted(s.targets)[0]
    dist = manhattan(box, target)
    opts = build_options(dist, DistractorPolicy("NumericNeighborhood", {"lo": 0, "hi": None}),
                         task.num_options, rng)
    q = "What is the Manhattan distance between the box and the target?"
    a = (
        _header(s)
        + f"\nBox position: {fmt_cell(box)}\nTarget position: {fmt_cell(target)}\n"
        f"Manhattan distance = |{box[0]} - {target[0]}| + |{box[1]} - {target[1]}| = {dist}."
    )
    return Derivation(q, a, str(dist), scene(s), opts, state=s)


def _move_line(i: int, out: MoveOutcome, who: str = "Player") -> str:
    if not out.moved:
        return f"Move {i} - {out.direction}: Failed - {out.reason} ({who} stays at {fmt_cell(out.start)})"
    line = f"Move {i} - {out.direction}: {who} moves from {fmt_cell(out.start)} to {fmt_cell(out.end)}"
    if out.box_from is not None:
        line += f", pushing the box from {fmt_cell(out.box_from)} to {fmt_cell(out.box_to)}"
    return line


PREDICTION_Q = QuestionTemplate("", "If the player makes these moves: <move_seq>, where will player end up?")


def _task_player_sequence(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    length = rng.randint(5, 8)
    moves = [rng.choice(DIR_ORDER) for _ in range(length)]
    tr = apply_sequence(s, moves)
    opts = build_options(tr.final, DistractorPolicy("CoordinatePerturb", {"cells": _all_cells(s)}),
                         task.num_options, rng)
    q = fill_template(PREDICTION_Q, {"move_seq": " → ".join(moves)})
    lines = [_header(s), "Move sequence analysis:", f"Initial position: {fmt_cell(s.player)}"]
    lines += [_move_line(i, out) for i, out in enumerate(tr.steps, 1)]
    lines.append(f"Final position: {fmt_cell(tr.final)}.")
    return Derivation(q, "\n".join(lines), fmt_cell(tr.final), scene(s), opts, state=s)


def _task_box_sequence(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    box = sorted(s.boxes)[0]
    length = rng.randint(5, 8)
    moves = [rng.choice(DIR_ORDER).lower() for _ in range(length)]
    tr = box_self_move(s, box, moves)
    opts = build_options(tr.final, DistractorPolicy("CoordinatePerturb", {"cells": _all_cells(s)}),
                         task.num_options, rng)
    q = (
        "Treat boxes as objects that can move by themselves, and treat people as floor (movable areas). "
        f"After the moves {', '.join(moves)}, where will the box that started at position {fmt_cell(box)} end up?"
    )
    lines = [_header(s), "Move sequence:"]
    for out in tr.steps:
        if out.moved:
            lines.append(f"Move {out.direction}: Box moved from {fmt_cell(out.start)} to {fmt_cell(out.end)}")
        else:
            lines.append(f"Move {out.direction}: Failed - {out.reason} (Box stays at {fmt_cell(out.start)})")
    lines.append(f"Box moves from {fmt_cell(box)} to {fmt_cell(tr.final)}.")
    return Derivation(q, "\n".join(lines), fmt_cell(tr.final), scene(s), opts, state=s)


def _task_shortest_path(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    free = sorted(s.floors - s.boxes)
    max_len = {5: 4, 8: 6, 12: 8}.get(s.rows, 6)
    candidates = []
    for cell in free:
        if cell == s.player:
            continue
        try:
            p = shortest_player_path(s, s.player, cell)
        except NoPath:
            continue
        if 1 <= len(p) <= max_len:
            candidates.append((cell, p))
    if not candidates:
        raise GenerationError("sokoban: no reachable goal for path question")
    goal, path = rng.choice(candidates)
    sep = " → "
    optimal = len(path)

    def accept(text: str) -> bool:
        seq = text.split(sep)
        # another shortest route to the goal would be a second correct answer
        return not (len(seq) == optimal and walk_with_boxes_as_walls(s, s.player, seq) == goal)

    policy = DistractorPolicy("SequenceVariant", {"alphabet": DIR_ORDER, "length": optimal, "sep": sep, "accept": accept})
    opts = build_options(sep.join(path), policy, task.num_options, rng)
    q = (
        "Treat the boxes as walls. What is the shortest sequence of moves for human to move himself "
        f"from position {fmt_cell(s.player)} to position {fmt_cell(goal)}?"
    )
    lines = [_header(s), f"Start position: {fmt_cell(s.player)}", f"End position: {fmt_cell(goal)}",
             f"Optimal move sequence: {sep.join(path)}"]
    pos = s.player
    for i, d in enumerate(path, 1):
        nxt = step(pos, d)
        lines.append(f"Move {i} - {d}: Player moves from {fmt_cell(pos)} to {fmt_cell(nxt)}")
        pos = nxt
    lines.append(f"Final position: {fmt_cell(pos)}.")
    return Derivation(q, "\n".join(lines), sep.join(path), scene(s), opts, state=s)


def _task_min_moves(task: TaskSpec, s: SokobanState, rng: RngStream) -> Derivation:
    plan = min_solution(s)
    if plan is None:
        raise GenerationError("sokoban: unsolvable instance")
    opts = build_options(len(plan), DistractorPolicy("NumericNeighborhood", {"lo": 1, "hi": None}),
                         task.num_options, rng)
    tr = apply_sequence(s, plan)
    lines = [_header(s), "Solution analysis: Step-by-step solution:"]
    for out in tr.steps:
        line = f"Player moves from {fmt_cell(out.start)} to {fmt_cell(out.end)}"
        if out.box_from is not None:
            line += f" (box moves from {fmt_cell(out.box_from)} to {fmt_cell(out.box_to)})"
        lines.append(line)
    lines.append(f"Total player moves: {len(plan)}.")
    q = "What is the minimum number of moves needed to solve this puzzle?"
    return Derivation(q, "\n".join(lines), str(len(plan)), scene(s), opts, state=s)


_TASKS = {
    "q1": _task_player_position,
    "q2": _task_manhattan,
    "q3": _task_player_sequence,
    "q4": _task_box_sequence,
    "q5": _task_shortest_path,
    "q6": _task_min_moves,
}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Identify the current position of the player on the board"),
    TaskSpec(GAME_ID, "q2", TP, Level.EASY, 8, "Calculate the Manhattan distance between a box and its target"),
    TaskSpec(GAME_ID, "q3", SP, Level.MEDIUM, 8, "Given a sequence of player moves, predict the final position of the player"),
    TaskSpec(GAME_ID, "q4", SP, Level.MEDIUM, 8, "Given a sequence of moves, predict the final position of the box"),
    TaskSpec(GAME_ID, "q5", SO, Level.HARD, 8, "Find the optimal sequence of moves to reach a specific position"),
    TaskSpec(GAME_ID, "q6", SO, Level.HARD, 8, "Determine the minimum number of moves needed to solve the puzzle"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream) -> Derivation:
    s = gen_sokoban(plot, rng.fork("state"))
    return _TASKS[task.task_id](task, s, rng.fork("qa"))


GAME = GameDescriptor(GAME_ID, "Sokoban", TASKS, build, INTRO)
