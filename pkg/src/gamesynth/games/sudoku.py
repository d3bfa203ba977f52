"""Colour Sudoku on 4x4 and 9x9 boards; positions are 1-based (row,col)."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, fixed_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import Cell, GenerationError

GAME_ID = "sudoku"
PALETTE_4 = ("red", "green", "blue", "magenta")
PALETTE_9 = PALETTE_4 + ("yellow", "aqua", "gray", "purple", "forest green")

# Fraction of cells left filled, per plot level.
FILL = {Level.EASY: (0.50, 0.75), Level.MEDIUM: (0.70, 0.80), Level.HARD: (0.45, 0.65)}

INTRO = (
    "This is a colour Sudoku puzzle. Instead of digits, every cell holds one colour. Each row, each column "
    "and each box must contain every colour of the palette exactly once. White cells are empty. "
    "Positions are written as (row,col), counted from 1 starting at the top-left corner."
)


class CellFilledError(ValueError):
    pass


class ChainUnavailable(GenerationError):
    pass


@dataclass(frozen=True)
class SudokuBoard:
    n: int
    box_rows: int
    box_cols: int
    cells: tuple[tuple[str | None, ...], ...]  # 0-based storage
    palette: tuple[str, ...]
    solution: tuple[tuple[str, ...], ...]

    def __getitem__(self, pos: Cell) -> str | None:
        """1-based (row, col) access."""
        return self.cells[pos[0] - 1][pos[1] - 1]

    def positions(self) -> list[Cell]:
        return [(r, c) for r in range(1, self.n + 1) for c in range(1, self.n + 1)]

    def empties(self) -> list[Cell]:
        return [p for p in self.positions() if self[p] is None]

    def with_color(self, pos: Cell, col: str | None) -> "SudokuBoard":
        rows = [list(r) for r in self.cells]
        rows[pos[0] - 1][pos[1] - 1] = col
        return SudokuBoard(self.n, self.box_rows, self.box_cols, tuple(map(tuple, rows)), self.palette, self.solution)

    def box_index(self, pos: Cell) -> int:
        """1-based box number, row-major."""
        per_row = self.n // self.box_cols
        return ((pos[0] - 1) // self.box_rows) * per_row + (pos[1] - 1) // self.box_cols + 1

    def unit(self, kind: str, k: int) -> list[Cell]:
        """Cells of the k-th (1-based) row, col or box in reading order."""
        if kind == "row":
            return [(k, c) for c in range(1, self.n + 1)]
        if kind == "col":
            return [(r, k) for r in range(1, self.n + 1)]
        if kind == "box":
            per_row = self.n // self.box_cols
            r0 = ((k - 1) // per_row) * self.box_rows + 1
            c0 = ((k - 1) % per_row) * self.box_cols + 1
            return [(r, c) for r in range(r0, r0 + self.box_rows) for c in range(c0, c0 + self.box_cols)]
        raise ValueError(f"unknown unit kind {kind!r}")

    def row_colors(self, pos: Cell) -> list[str]:
        return [v for v in (self[p] for p in self.unit("row", pos[0])) if v is not None]

    def col_colors(self, pos: Cell) -> list[str]:
        return [v for v in (self[p] for p in self.unit("col", pos[1])) if v is not None]

    def box_colors(self, pos: Cell) -> list[str]:
        return [v for v in (self[p] for p in self.unit("box", self.box_index(pos))) if v is not None]

    def check(self) -> list[str]:
        problems = []
        for p in self.positions():
            v = self[p]
            if v is not None and v != self.solution[p[0] - 1][p[1] - 1]:
                problems.append(f"cell {p} disagrees with solution")
        full = set(self.palette)
        for kind in ("row", "col", "box"):
            for k in range(1, self.n + 1):
                sol = [self.solution[r - 1][c - 1] for r, c in self.unit(kind, k)]
                if set(sol) != full or len(sol) != self.n:
                    problems.append(f"solution {kind} {k} is not a permutation of the palette")
        return problems


def empty_board(n: int) -> SudokuBoard:
    pal = PALETTE_4 if n == 4 else PALETTE_9
    br = 2 if n == 4 else 3
    blank = tuple(tuple(None for _ in range(n)) for _ in range(n))
    return SudokuBoard(n, br, br, blank, pal, tuple(tuple("" for _ in range(n)) for _ in range(n)))


def candidates(b: SudokuBoard, pos: Cell) -> list[str]:
    """Palette colours absent from the row, column and box of an empty cell (palette order)."""
    if b[pos] is not None:
        raise CellFilledError(f"position {pos} is already filled")
    used = set(b.row_colors(pos)) | set(b.col_colors(pos)) | set(b.box_colors(pos))
    return [c for c in b.palette if c not in used]


def _solve_full(n: int, br: int, palette: tuple[str, ...], rng: RngStream) -> list[list[str]]:
    grid: list[list[str | None]] = [[None] * n for _ in range(n)]

    def ok(r: int, c: int, v: str) -> bool:
        if v in grid[r] or any(grid[i][c] == v for i in range(n)):
            return False
        r0, c0 = r - r % br, c - c % br
        return all(grid[i][j] != v for i in range(r0, r0 + br) for j in range(c0, c0 + br))

    def fill(i: int) -> bool:
        if i == n * n:
            return True
        r, c = divmod(i, n)
        for v in rng.shuffled(palette):
            if ok(r, c, v):
                grid[r][c] = v
                if fill(i + 1):
                    return True
                grid[r][c] = None
        return False

    if not fill(0):  # pragma: no cover - a latin square always exists
        raise GenerationError("sudoku: backtracking failed")
    return grid  # type: ignore[return-value]


def gen_sudoku(plot: Level, rng: RngStream) -> SudokuBoard:
    n = 4 if plot == Level.EASY else 9
    br = 2 if n == 4 else 3
    palette = PALETTE_4 if n == 4 else PALETTE_9
    sol = _solve_full(n, br, palette, rng)
    lo, hi = FILL[plot]
    total = n * n
    keep = rng.randint(int(round(lo * total + 0.4999)), int(hi * total))
    order = rng.shuffled([(r, c) for r in range(n) for c in range(n)])
    kept = set(order[:keep])
    cells = tuple(tuple(sol[r][c] if (r, c) in kept else None for c in range(n)) for r in range(n))
    return SudokuBoard(n, br, br, cells, palette, tuple(map(tuple, sol)))


def unit_emptiness(b: SudokuBoard, kind: str, k: int) -> tuple[int, list[tuple[int, list[int]]]]:
    """Count of units with more than k empty cells, plus (unit, empty offsets) listing."""
    listing = []
    for u in range(1, b.n + 1):
        cells = b.unit(kind, u)
        offs = [i + 1 for i, p in enumerate(cells) if b[p] is None]
        listing.append((u, offs))
    return sum(1 for _, offs in listing if len(offs) > k), listing


def deduction_chain(b: SudokuBoard, rng: RngStream, limit: int = 200) -> list[tuple[Cell, str]]:
    """Three cells, each a naked single once the previous ones are filled.

    Chains whose last cell is not already a single on the initial board are
    preferred, so the question really needs the first two deductions.
    """
    empties = b.empties()
    if len(empties) < 3:
        raise ChainUnavailable("need at least 3 empty cells")
    initial_single = {p for p in empties if len(candidates(b, p)) == 1}
    fallback = None
    tried = 0
    for c1 in rng.shuffled(sorted(initial_single)):
        b1 = b.with_color(c1, candidates(b, c1)[0])
        for c2 in rng.shuffled([p for p in b1.empties() if len(candidates(b1, p)) == 1]):
            b2 = b1.with_color(c2, candidates(b1, c2)[0])
            for c3 in rng.shuffled([p for p in b2.empties() if len(candidates(b2, p)) == 1]):
                tried += 1
                chain = [(c1, b1[c1]), (c2, b2[c2]), (c3, candidates(b2, c3)[0])]
                if c3 not in initial_single:
                    return chain  # type: ignore[return-value]
                fallback = fallback or chain
                if tried >= limit:
                    break
            if tried >= limit:
                break
        if tried >= limit:
            break
    if fallback is None:
        raise ChainUnavailable("no three-step deduction chain")
    return fallback  # type: ignore[return-value]


def pos_text(p: Cell) -> str:
    return f"({p[0]},{p[1]})"


def scene(b: SudokuBoard) -> TileGrid:
    cells = {}
    for r, c in b.positions():
        v = b[(r, c)]
        cells[(r - 1, c - 1)] = CellPaint(fill=v if v is not None else "white")
    px = 96 if b.n == 4 else 52
    return TileGrid(b.n, b.n, cells, cell_px=px, label_base=1, grid_color="black")


def _board_line(b: SudokuBoard) -> str:
    box = f"{b.box_rows}x{b.box_cols}"
    return (
        f"The board is a {b.n}x{b.n} grid split into {box} boxes and uses {b.n} colours: "
        f"{', '.join(b.palette)}."
    )


def _task_color(task, b, rng):
    pos = rng.choice([p for p in b.positions() if b[p] is not None])
    col = b[pos]
    q = (
        f"What color is at position {pos_text(pos)} (note that on the board the position {pos_text(pos)} has "
        "already been filled with a certain color)?"
    )
    a = (
        _board_line(b) + f" Position {pos_text(pos)} is the cell in row {pos[0]} and column {pos[1]}, counted "
        f"from the top-left corner. From the image, we can see the color at Position {pos_text(pos)} is {col}."
    )
    return Derivation(q, a, col, scene(b), fixed_options(b.palette, col), state=b)  # type: ignore[arg-type]


def _task_count(task, b, rng):
    col = rng.choice(b.palette)
    where = [p for p in b.positions() if b[p] == col]
    q = f"How many times does {col} appear on the board?"
    head = _board_line(b) + " Scanning the board row by row: "
    if where:
        a = head + f"Color {col} appears at: {', '.join(pos_text(p) for p in where)}, total {len(where)} times."
    else:
        a = head + f"Color {col} does not appear in any filled cell, total 0 times."
    return Derivation(q, a, str(len(where)), scene(b), None, state=b)


_KIND_WORD = {"row": ("row", "rows"), "col": ("col", "columns"), "box": ("box", "boxes")}


def _task_sparse(task, b, rng):
    kind = rng.choice(("row", "col", "box"))
    k = rng.randint(0, 2 if b.n == 4 else 3)
    total, listing = unit_emptiness(b, kind, k)
    short, plural = _KIND_WORD[kind]
    noun = "empty cell" if k == 1 else "empty cells"
    q = f"How many {plural} have more than {k} {noun}?"
    lines = [f"{short.capitalize()} analysis:", ""]
    for u, offs in listing:
        if offs:
            lines.append(f"{short} {u} has {len(offs)} empty cells in positions {', '.join(map(str, offs))};")
        else:
            lines.append(f"{short} {u} has 0 empty cells;")
    lines += ["", f"In total, {total} {short}(s) have more than {k} {noun}."]
    return Derivation(q, _board_line(b) + "\n" + "\n".join(lines), str(total), scene(b), None, state=b)


def _existing(b: SudokuBoard, pos: Cell) -> list[str]:
    return [
        f"Existing colors in row: {', '.join(b.row_colors(pos)) or 'none'}",
        f"Existing colors in column: {', '.join(b.col_colors(pos)) or 'none'}",
        f"Existing colors in box: {', '.join(b.box_colors(pos)) or 'none'}",
    ]


def _task_candidates(task, b, rng):
    pos = rng.choice(b.empties())
    cands = candidates(b, pos)
    q = (
        f"How many colors can be filled in position {pos_text(pos)}? Infer based on the current situation "
        "focusing only on the colour of the position."
    )
    lines = [_board_line(b), f"Constraint analysis for position {pos_text(pos)}:", ""]
    lines += _existing(b, pos)
    lines += ["", f"Therefore, possible colors are: {', '.join(cands)}. There are {len(cands)} of them."]
    return Derivation(q, "\n".join(lines), str(len(cands)), scene(b), None, state=b)


def _task_chain(task, b, rng):
    chain = deduction_chain(b, rng)
    (p1, _), (p2, _), (p3, col) = chain
    q = f"After determining colors at positions {pos_text(p1)}, {pos_text(p2)}, what color should be at position {pos_text(p3)}?"
    lines = [_board_line(b), "Deductive reasoning process:", ""]
    cur = b
    for i, (p, v) in enumerate(chain[:2], 1):
        ex = _existing(cur, p)
        lines.append(f"Step {i}: Position {pos_text(p)}: " + ". ".join(ex) + ".")
        lines.append(f"Therefore, the only possible color for this position is {v}.")
        lines.append("")
        cur = cur.with_color(p, v)
    before = candidates(b, p3)
    lines.append(f"Final analysis for position {pos_text(p3)}: " + ". ".join(_existing(cur, p3)) + ".")
    if len(before) > 1:
        lines.append(f"Before the deductions the candidates were: {', '.join(before)}.")
    lines.append(f"After previous deductions, possible color reduced to: {col}")
    return Derivation(q, "\n".join(lines), col, scene(b), fixed_options(b.palette, col), state=b)


_TASKS = {"q1": _task_color, "q2": _task_count, "q3": _task_sparse, "q4": _task_candidates, "q5": _task_chain}
_PALETTE_SIZES = {Level.EASY: 4, Level.MEDIUM: 9, Level.HARD: 9}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 9, "Position color identification", "letter", options_by_plot=_PALETTE_SIZES),
    TaskSpec(GAME_ID, "q2", TP, Level.EASY, 0, "Color occurrence count"),
    TaskSpec(GAME_ID, "q3", TP, Level.MEDIUM, 0, "Sparse unit count"),
    TaskSpec(GAME_ID, "q4", SP, Level.MEDIUM, 0, "Valid color candidate inference"),
    TaskSpec(GAME_ID, "q5", SP, Level.HARD, 9, "Guided-position color deduction", "letter", options_by_plot=_PALETTE_SIZES),
)


def build(task: TaskSpec, plot: Level, rng: RngStream, budget: int = 30) -> Derivation:
    for attempt in range(budget):
        b = gen_sudoku(plot, rng.fork("state", attempt))
        if task.task_id == "q4" and not b.empties():
            continue
        try:
            return _TASKS[task.task_id](task, b, rng.fork("qa", attempt))
        except ChainUnavailable:
            continue
    raise GenerationError(f"sudoku {task.task_id}: no suitable board in {budget} attempts")


GAME = GameDescriptor(GAME_ID, "Sudoku", TASKS, build, INTRO)
