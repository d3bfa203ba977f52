"""Grid maze: recursive-backtracker carving, BFS routes, turn counting."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SO, SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, build_options, canonical_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import DIR_ORDER, Cell, GenerationError, bfs_path, fmt_cell, step

GAME_ID = "maze"
SIZES = {Level.EASY: 9, Level.MEDIUM: 11, Level.HARD: 13}
CELL_PX = {9: 48, 11: 42, 13: 38}

INTRO = (
    "1. This is a maze mini-game. The player needs to navigate around obstacles to reach the destination "
    "and achieve victory.\n"
    "2. The red circle represents the player, the green block is the goal and the blue blocks are obstacles.\n"
    "3. The player can only move within the white blocks.\n"
    "4. The coordinates are given in the format (row, col), where row represents the vertical position "
    "and col represents the horizontal position."
)


@dataclass(frozen=True)
class MazeState:
    n: int
    open: frozenset[Cell]
    player: Cell
    goal: Cell


def carve(n: int, rng: RngStream) -> set[Cell]:
    """Perfect maze on the odd lattice of an n x n grid (n odd)."""
    if n % 2 == 0 or n < 3:
        raise ValueError("maze size must be odd and >= 3")
    start = (2 * rng.randbelow((n - 1) // 2) + 1, 2 * rng.randbelow((n - 1) // 2) + 1)
    opened = {start}
    stack = [start]
    while stack:
        r, c = stack[-1]
        nbrs = [
            (r + dr, c + dc)
            for dr, dc in ((-2, 0), (2, 0), (0, -2), (0, 2))
            if 0 < r + dr < n - 1 and 0 < c + dc < n - 1 and (r + dr, c + dc) not in opened
        ]
        if not nbrs:
            stack.pop()
            continue
        nr, nc = rng.choice(nbrs)
        opened.add(((r + nr) // 2, (c + nc) // 2))
        opened.add((nr, nc))
        stack.append((nr, nc))
    return opened


def _succ(open_cells: frozenset[Cell]):
    def succ(cell):
        for d in DIR_ORDER:
            nxt = step(cell, d)
            if nxt in open_cells:
                yield d.lower(), nxt

    return succ


def gen_maze(plot: Level, rng: RngStream, budget: int = 50) -> MazeState:
    n = SIZES[plot]
    for _ in range(budget):
        cells = frozenset(carve(n, rng))
        ordered = sorted(cells)
        player = rng.choice(ordered)
        dist = _distances(cells, player)
        far = [c for c in ordered if n / 2 <= dist.get(c, 0) <= 3 * n]
        if far:
            return MazeState(n, cells, player, rng.choice(far))
    raise GenerationError("maze: no goal far enough from the player")


def _distances(cells: frozenset[Cell], src: Cell) -> dict[Cell, int]:
    from collections import deque

    dist = {src: 0}
    q = deque([src])
    while q:
        cur = q.popleft()
        for _, nxt in _succ(cells)(cur):
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                q.append(nxt)
    return dist


def path_and_turns(m: MazeState) -> tuple[list[Cell], list[str], int]:
    res = bfs_path(m.player, lambda c: c == m.goal, _succ(m.open))
    if res is None:
        raise GenerationError("maze: goal unreachable")
    moves, path = res
    moves = list(moves)  # type: ignore[arg-type]
    turns = sum(1 for i in range(1, len(moves)) if moves[i] != moves[i - 1])
    return list(path), moves, turns  # type: ignore[return-value]


def available_dirs(m: MazeState, cell: Cell | None = None) -> list[str]:
    cur = m.player if cell is None else cell
    return [d.lower() for d in DIR_ORDER if step(cur, d) in m.open]


def scene(m: MazeState) -> TileGrid:
    cells = {}
    for r in range(m.n):
        for c in range(m.n):
            cell = (r, c)
            if cell == m.player:
                cells[cell] = CellPaint(fill="white", glyph="circle", glyph_color="red")
            elif cell == m.goal:
                cells[cell] = CellPaint(fill="goal green")
            elif cell in m.open:
                cells[cell] = CellPaint(fill="white")
            else:
                cells[cell] = CellPaint(fill="obstacle blue")
    return TileGrid(m.n, m.n, cells, cell_px=CELL_PX.get(m.n, 40))


# All non-empty direction sets, in the presentation order the options use.
_DIR_WORDS = ("up", "down", "left", "right")
DIR_SETS = sorted(
    (", ".join(w for i, w in enumerate(_DIR_WORDS) if mask >> i & 1) for mask in range(1, 16)),
    key=lambda s: (s.count(",") + 1, [_DIR_WORDS.index(w) for w in s.split(", ")]),
)


def _coord_policy(m: MazeState) -> DistractorPolicy:
    return DistractorPolicy(
        "CoordinatePerturb",
        {"cells": [(r, c) for r in range(m.n) for c in range(m.n)], "neighbors_first": True},
    )


def _describe(m: MazeState) -> str:
    return (
        f"The maze is a {m.n} x {m.n} grid with rows and columns counted from 0 at the top-left corner. "
        "White blocks are open, blue blocks are obstacles."
    )


def _task_player(task, m, rng):
    opts = build_options(m.player, _coord_policy(m), task.num_options, rng)
    a = (
        _describe(m) + "\nTake a look at the game screen, the red circle represents the player. "
        f"The coordinates of player are {fmt_cell(m.player)}."
    )
    return Derivation("Which of the following are the coordinates of the player?", a, fmt_cell(m.player), scene(m), opts, state=m)


def _task_goal(task, m, rng):
    opts = build_options(m.goal, _coord_policy(m), task.num_options, rng)
    a = (
        _describe(m) + "\nTake a look at the game screen, the green block represents the goal. "
        f"The coordinates of goal are {fmt_cell(m.goal)}."
    )
    return Derivation("Which of the following are the coordinates of the goal?", a, fmt_cell(m.goal), scene(m), opts, state=m)


def _task_dirs(task, m, rng):
    dirs = available_dirs(m)
    correct = ", ".join(dirs)
    opts = canonical_options(correct, DIR_SETS, task.num_options, rng, DIR_SETS)
    free = [fmt_cell(step(m.player, d.capitalize())) for d in dirs]
    a = (
        _describe(m) + f"\nThe player is on {fmt_cell(m.player)}, and {' '.join(free)} "
        f"{'is' if len(free) == 1 else 'are'} empty. The player can move {correct}."
    )
    return Derivation("Which directions are available to move now?", a, correct, scene(m), opts, state=m)


def _task_after_move(task, m, rng):
    d = rng.choice(available_dirs(m))
    dest = step(m.player, d.capitalize())
    opts = build_options(dest, _coord_policy(m), task.num_options, rng)
    a = (
        _describe(m) + f"\nObserve the screen, the position of player is {fmt_cell(m.player)}. "
        f"After moving {d}, the player is in {fmt_cell(dest)}."
    )
    return Derivation(f"What are the coordinates of player after moving {d}?", a, fmt_cell(dest), scene(m), opts, state=m)


def _path_lines(path: list[Cell], moves: list[str]) -> list[str]:
    lines = []
    for i, d in enumerate(moves, 1):
        line = f"Step {i}. Go {d}, from {fmt_cell(path[i - 1])} to {fmt_cell(path[i])}."
        if i == len(moves):
            line += " Achieved the goal!"
        lines.append(line)
    return lines


def _reaches_goal(m: MazeState, seq: list[str]) -> bool:
    pos = m.player
    for d in seq:
        nxt = step(pos, d.capitalize())
        if nxt not in m.open:
            return False
        pos = nxt
        if pos == m.goal:
            return True
    return False


def _task_route(task, m, rng):
    path, moves, _ = path_and_turns(m)
    sep = ", "
    policy = DistractorPolicy(
        "SequenceVariant",
        {"alphabet": _DIR_WORDS, "length": len(moves), "sep": sep,
         "accept": lambda t: not _reaches_goal(m, t.split(sep))},
    )
    opts = build_options(sep.join(moves), policy, task.num_options, rng)
    lines = [_describe(m), "Let's figure out the path to the goal step by step:"] + _path_lines(path, moves)
    lines.append(f"Therefore, the right sequence of movements are: {sep.join(moves)}.")
    q = "Which sequence of movements will allow the player to reach the destination?"
    return Derivation(q, "\n".join(lines), sep.join(moves), scene(m), opts, state=m)


def _task_turns(task, m, rng):
    path, moves, turns = path_and_turns(m)
    lines = [_describe(m), "First, let's figure out the path to the goal step by step:"] + _path_lines(path, moves)
    lines.append("Therefore, the path is: " + ", ".join(fmt_cell(c) for c in path) + ".")
    lines.append("")
    lines.append("Then, let's count the number of turns step by step:")
    for i in range(1, len(moves)):
        if moves[i] != moves[i - 1]:
            lines.append(f"Step {i + 1}. Turn detected: from {moves[i - 1]} to {moves[i]}.")
        else:
            lines.append(f"Step {i + 1}. No turn detected.")
    lines.append(f"In summary, the total number of turns is {turns}.")
    q = "Find the path to the finish and count the number of turns it takes to get there. Provide one number."
    return Derivation(q, "\n".join(lines), str(turns), scene(m), None, state=m)


_TASKS = {"q1": _task_player, "q2": _task_goal, "q3": _task_dirs, "q4": _task_after_move, "q5": _task_route, "q6": _task_turns}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 5, "Ask the position of player", "letter"),
    TaskSpec(GAME_ID, "q2", TP, Level.EASY, 5, "Ask the position of goal within the maze", "letter"),
    TaskSpec(GAME_ID, "q3", TP, Level.EASY, 8, "Ask the available directions to move are currently", "letter"),
    TaskSpec(GAME_ID, "q4", SP, Level.MEDIUM, 5, "The position after moving", "letter"),
    TaskSpec(GAME_ID, "q5", SO, Level.HARD, 5, "Find the path to the goal", "letter"),
    TaskSpec(GAME_ID, "q6", SO, Level.HARD, 0, "Count how many turns it takes to reach the finish"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream) -> Derivation:
    m = gen_maze(plot, rng.fork("state"))
    return _TASKS[task.task_id](task, m, rng.fork("qa"))


GAME = GameDescriptor(GAME_ID, "Maze", TASKS, build, INTRO)
