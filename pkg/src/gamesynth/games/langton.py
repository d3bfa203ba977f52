"""Langton's Ant on a wrapping grid."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, build_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import Cell, fmt_cell

GAME_ID = "langton"
SIZES = {Level.EASY: 5, Level.MEDIUM: 9, Level.HARD: 13}
CELL_PX = {5: 80, 9: 50, 13: 36}
FACINGS = ("up", "right", "down", "left")  # clockwise
DELTA = {"up": (-1, 0), "right": (0, 1), "down": (1, 0), "left": (0, -1)}
WHITE, BLACK = "white", "black"

INTRO = (
    "In Langton's Ant, we have a grid where each cell is either white or black. A red arrow represents an ant, "
    "showing its current position and direction. The ant follows these simple rules:\n\n"
    "1. If the ant is on a white cell, it turns right 90 degrees, changes the cell to black, and moves forward one step\n\n"
    "2. If the ant is on a black cell, it turns left 90 degrees, changes the cell to white, and moves forward one step\n\n"
    "3. If the ant would move off the grid, it wraps around to the opposite side (using modulo with grid size)"
)


@dataclass(frozen=True)
class AntState:
    n: int
    grid: tuple[tuple[str, ...], ...]
    ant: Cell
    facing: str

    def __post_init__(self) -> None:
        if not (0 <= self.ant[0] < self.n and 0 <= self.ant[1] < self.n):
            raise ValueError(f"ant {self.ant} outside the {self.n}x{self.n} grid")
        if self.facing not in FACINGS:
            raise ValueError(f"unknown facing {self.facing!r}")

    def color(self, cell: Cell) -> str:
        return self.grid[cell[0]][cell[1]]


@dataclass(frozen=True)
class StepRecord:
    index: int
    at: Cell
    facing_before: str
    color_before: str
    turned: str  # "right" | "left"
    moved_to: Cell
    facing_after: str


def white_board(n: int, ant: Cell = (0, 0), facing: str = "right") -> AntState:
    return AntState(n, tuple(tuple(WHITE for _ in range(n)) for _ in range(n)), ant, facing)


def ant_step(s: AntState, index: int = 1) -> tuple[AntState, StepRecord]:
    r, c = s.ant
    col = s.color(s.ant)
    i = FACINGS.index(s.facing)
    if col == WHITE:
        new_facing, turned, paint = FACINGS[(i + 1) % 4], "right", BLACK
    else:
        new_facing, turned, paint = FACINGS[(i - 1) % 4], "left", WHITE
    rows = [list(row) for row in s.grid]
    rows[r][c] = paint
    dr, dc = DELTA[new_facing]
    dest = ((r + dr) % s.n, (c + dc) % s.n)
    nxt = AntState(s.n, tuple(map(tuple, rows)), dest, new_facing)
    return nxt, StepRecord(index, s.ant, s.facing, col, turned, dest, new_facing)


@dataclass(frozen=True)
class Simulation:
    final: AntState
    trace: tuple[StepRecord, ...]
    flips: int


def ant_simulate(s: AntState, steps: int, watch: Cell | None = None) -> Simulation:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    trace = []
    flips = 0
    cur = s
    for i in range(1, steps + 1):
        cur, rec = ant_step(cur, i)
        if watch is not None and rec.at == watch:
            flips += 1
        trace.append(rec)
    return Simulation(cur, tuple(trace), flips)


def gen_ant(plot: Level, rng: RngStream) -> AntState:
    n = SIZES[plot]
    ant = (rng.randbelow(n), rng.randbelow(n))
    facing = rng.choice(FACINGS)
    if plot == Level.EASY:
        return white_board(n, ant, facing)
    frac = rng.uniform(0.10, 0.30)
    grid = tuple(tuple(BLACK if rng.random() < frac else WHITE for _ in range(n)) for _ in range(n))
    return AntState(n, grid, ant, facing)


def scene(s: AntState) -> TileGrid:
    cells = {}
    for r in range(s.n):
        for c in range(s.n):
            fill = s.grid[r][c]
            if (r, c) == s.ant:
                cells[(r, c)] = CellPaint(fill=fill, glyph=f"arrow_{s.facing}", glyph_color="red")
            else:
                cells[(r, c)] = CellPaint(fill=fill)
    return TileGrid(s.n, s.n, cells, cell_px=CELL_PX.get(s.n, 40), grid_color="gray")


def state_text(cell: Cell, facing: str) -> str:
    return f"Position {fmt_cell(cell)}, facing {facing}"


def _state_policy(n: int) -> DistractorPolicy:
    pool = [state_text((r, c), f) for r in range(n) for c in range(n) for f in FACINGS]
    return DistractorPolicy("CategoricalPool", {"pool": pool})


def step_line(rec: StepRecord) -> str:
    return (
        f"- Step {rec.index}: Ant is on a {rec.color_before} cell at {fmt_cell(rec.at)}, facing {rec.facing_before}. "
        f"It turns {rec.turned}, changes the cell to {BLACK if rec.color_before == WHITE else WHITE}, moves forward "
        f"to {fmt_cell(rec.moved_to)}, now facing {rec.facing_after}."
    )


def _grid_line(s: AntState) -> str:
    blacks = [(r, c) for r in range(s.n) for c in range(s.n) if s.grid[r][c] == BLACK]
    head = f"The grid is {s.n}x{s.n} with rows and columns counted from 0 at the top-left corner. "
    if not blacks:
        return head + "All cells are white at the start."
    return head + "The black cells at the start are: " + ", ".join(fmt_cell(c) for c in blacks) + "; all others are white."


def _task_locate(task, s, rng):
    ans = state_text(s.ant, s.facing)
    opts = build_options(ans, _state_policy(s.n), task.num_options, rng)
    a = (
        f"{_grid_line(s)}\nStep-by-step analysis:\n\n"
        "1. Look at the red arrow in the image which represents the ant.\n"
        f"2. The arrow's position indicates the ant is at coordinates {fmt_cell(s.ant)}.\n"
        f"3. The arrow's direction shows the ant is facing {s.facing}.\n\n"
        f"Therefore, the ant's current position is {fmt_cell(s.ant)} and it's facing {s.facing}."
    )
    q = "What is the current position and direction of the ant in the image?"
    return Derivation(q, a, ans, scene(s), opts, state=s)


def _task_predict(task, s, rng):
    steps = rng.randint(3, 8)
    sim = ant_simulate(s, steps)
    ans = state_text(sim.final.ant, sim.final.facing)
    opts = build_options(ans, _state_policy(s.n), task.num_options, rng)
    lines = [_grid_line(s), f"Initial state: The ant is at {fmt_cell(s.ant)} facing {s.facing}.", "",
             "Let's follow the ant's movement step by step:", ""]
    lines += [step_line(r) for r in sim.trace]
    lines += ["", f"Final state: The ant is at {fmt_cell(sim.final.ant)} facing {sim.final.facing}."]
    q = f"After {steps} steps, what will be the ant's position and direction?"
    return Derivation(q, "\n".join(lines), ans, scene(s), opts, state=s)


def _task_flips(task, s, rng):
    steps = rng.randint(6, 12)
    visited = [r.at for r in ant_simulate(s, steps).trace]
    if rng.chance(0.8):
        watch = rng.choice(sorted(set(visited)))
    else:
        watch = (rng.randbelow(s.n), rng.randbelow(s.n))
    sim = ant_simulate(s, steps, watch)
    color = s.color(watch)
    lines = [_grid_line(s), f"Initial state: The ant is at {fmt_cell(s.ant)} facing {s.facing}. "
             f"Target cell {fmt_cell(watch)} starts as {color}.", "",
             "Let's follow the ant's movement step by step:", ""]
    count = 0
    for rec in sim.trace:
        line = step_line(rec)
        if rec.at == watch:
            new = BLACK if color == WHITE else WHITE
            count += 1
            line += f" Target cell {fmt_cell(watch)} changes from {color} to {new} (change #{count})."
            color = new
        lines.append(line)
    lines += ["", f"Final state: The ant is at {fmt_cell(sim.final.ant)} facing {sim.final.facing}. "
              f"Target cell {fmt_cell(watch)} changed color {sim.flips} times."]
    q = f"After {steps} steps, how many times did the cell at position {fmt_cell(watch)} change its color? Answer with a number."
    return Derivation(q, "\n".join(lines), str(sim.flips), scene(s), None, state=s)


_TASKS = {"q1": _task_locate, "q2": _task_predict, "q3": _task_flips}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Identify the current position and direction of the ant", "letter"),
    TaskSpec(GAME_ID, "q2", SP, Level.MEDIUM, 8, "Predict the ant's position and direction after several steps", "letter"),
    TaskSpec(GAME_ID, "q3", SP, Level.HARD, 0, "Count how many times a specific cell changes its color"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream) -> Derivation:
    s = gen_ant(plot, rng.fork("state"))
    return _TASKS[task.task_id](task, s, rng.fork("qa"))


GAME = GameDescriptor(GAME_ID, "Langton's Ant", TASKS, build, INTRO)
