"""Star Battle (one star per row, column and region, no touching stars)."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, build_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import Cell, GenerationError, connected, fmt_cell, neighbors4

GAME_ID = "starbattle"
SIZES = {Level.EASY: 5, Level.MEDIUM: 6, Level.HARD: 8}
CELL_PX = {5: 80, 6: 72, 8: 58}
REGION_COLORS = ("light pink", "powder blue", "light green", "peach", "red", "yellow", "cyan", "orange")


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class StarBattleBoard:
    n: int
    regions: tuple[tuple[int, ...], ...]
    stars: frozenset[Cell]
    full_solution: frozenset[Cell]

    def region(self, cell: Cell) -> int:
        return self.regions[cell[0]][cell[1]]

    def region_cells(self, rid: int) -> list[Cell]:
        return [(r, c) for r in range(self.n) for c in range(self.n) if self.regions[r][c] == rid]

    def cells(self) -> list[Cell]:
        return [(r, c) for r in range(self.n) for c in range(self.n)]

    def with_stars(self, stars) -> "StarBattleBoard":
        return StarBattleBoard(self.n, self.regions, frozenset(stars), self.full_solution)

    def check(self) -> list[str]:
        problems = []
        sol = self.full_solution
        n = self.n
        if len(sol) != n:
            problems.append("solution must have n stars")
        if len({r for r, _ in sol}) != n or len({c for _, c in sol}) != n:
            problems.append("solution needs one star per row and column")
        if len({self.region(s) for s in sol}) != n:
            problems.append("solution needs one star per region")
        for a in sol:
            for b in sol:
                if a < b and max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= 1:
                    problems.append(f"stars {a} and {b} touch")
        for rid in range(n):
            if not connected(set(self.region_cells(rid))):
                problems.append(f"region {rid} not connected")
        if not self.stars <= sol:
            problems.append("placed stars not part of the solution")
        return problems


def board_from_rows(rows: list[str], stars, solution=()) -> StarBattleBoard:
    regions = tuple(tuple(int(ch) for ch in row) for row in rows)
    return StarBattleBoard(len(rows), regions, frozenset(stars), frozenset(solution))


def _star_placement(n: int, rng: RngStream) -> list[Cell]:
    cols: list[int] = []
    used: set[int] = set()

    def place(r: int) -> bool:
        if r == n:
            return True
        for c in rng.shuffled(range(n)):
            if c in used or (cols and abs(cols[-1] - c) <= 1):
                continue
            cols.append(c)
            used.add(c)
            if place(r + 1):
                return True
            cols.pop()
            used.discard(c)
        return False

    if not place(0):
        raise GenerationError("starbattle: no star placement")
    return [(r, c) for r, c in enumerate(cols)]


def _grow_regions(n: int, seeds: list[Cell], rng: RngStream) -> list[list[int]] | None:
    grid = [[-1] * n for _ in range(n)]
    sizes = [1] * n
    for i, (r, c) in enumerate(seeds):
        grid[r][c] = i
    remaining = n * n - n
    while remaining:
        frontier: dict[int, list[Cell]] = {}
        for r in range(n):
            for c in range(n):
                rid = grid[r][c]
                if rid < 0:
                    continue
                for nr, nc in neighbors4((r, c)):
                    if 0 <= nr < n and 0 <= nc < n and grid[nr][nc] < 0:
                        frontier.setdefault(rid, []).append((nr, nc))
        smallest = min(sizes[rid] for rid in frontier)
        rid = rng.choice(sorted(k for k in frontier if sizes[k] <= smallest + 1))
        r, c = rng.choice(sorted(set(frontier[rid])))
        grid[r][c] = rid
        sizes[rid] += 1
        remaining -= 1
    if max(sizes) > 3 * min(sizes):
        return None
    return grid


def gen_starbattle(plot: Level, rng: RngStream, placed: int | None = None, budget: int = 50) -> StarBattleBoard:
    n = SIZES[plot]
    for _ in range(budget):
        sol = _star_placement(n, rng)
        # region ids are assigned in a random order so region 0 is not always row 0
        order = rng.shuffled(sol)
        grid = _grow_regions(n, order, rng)
        if grid is None:
            continue
        k = rng.randint(0, n - 1) if placed is None else placed
        stars = rng.sample(sol, k)
        b = StarBattleBoard(n, tuple(map(tuple, grid)), frozenset(stars), frozenset(sol))
        return b
    raise GenerationError("starbattle: region growth kept producing unbalanced regions")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    adjacent: bool
    region_has_star: bool
    row_has_star: bool
    col_has_star: bool


def placeable(b: StarBattleBoard, cell: Cell) -> Verdict:
    if cell in b.stars:
        raise PreconditionError(f"cell {cell} already holds a star")
    adj = any(max(abs(s[0] - cell[0]), abs(s[1] - cell[1])) <= 1 for s in b.stars)
    reg = any(b.region(s) == b.region(cell) for s in b.stars)
    row = any(s[0] == cell[0] for s in b.stars)
    col = any(s[1] == cell[1] for s in b.stars)
    return Verdict(not (adj or reg or row or col), adj, reg, row, col)


def _touching(b: StarBattleBoard, cell: Cell) -> Cell:
    return next(s for s in sorted(b.stars) if max(abs(s[0] - cell[0]), abs(s[1] - cell[1])) <= 1)


def reason_text(b: StarBattleBoard, cell: Cell) -> str:
    """Verdict narration; checks are reported in the order adjacency, region, row, column."""
    v = placeable(b, cell)
    rid = b.region(cell)
    head = f"Cell {fmt_cell(cell)} {'can' if v.ok else 'cannot'} hold a star because: "
    if v.adjacent:
        out = f"It is adjacent to the star at {fmt_cell(_touching(b, cell))}, so it cannot hold a star."
        if v.region_has_star:
            out += f" Besides, this cell is in region {rid}, which already contains one star."
        return head + out
    out = "It is not adjacent to any star."
    if v.region_has_star:
        owner = next(s for s in sorted(b.stars) if b.region(s) == rid)
        return head + out + f" However, this cell is in region {rid}, which already contains the star at {fmt_cell(owner)}."
    out += f" This cell is in region {rid}, which contains no stars."
    if v.row_has_star:
        return head + out + f" However, Row {cell[0]} has already been placed a star. Therefore, it cannot hold a star."
    if v.col_has_star:
        return head + out + f" However, Column {cell[1]} has already been placed a star. Therefore, it cannot hold a star."
    return head + out + f" Both row {cell[0]} and column {cell[1]} now have no stars."


def final_star(b: StarBattleBoard) -> Cell:
    n = b.n
    if len(b.stars) != n - 1:
        raise PreconditionError(f"need exactly {n - 1} placed stars, found {len(b.stars)}")
    rows = set(range(n)) - {r for r, _ in b.stars}
    cols = set(range(n)) - {c for _, c in b.stars}
    regs = set(range(n)) - {b.region(s) for s in b.stars}
    if len(rows) != 1 or len(cols) != 1 or len(regs) != 1:
        raise PreconditionError("placed stars must occupy distinct rows, columns and regions")
    cell = (rows.pop(), cols.pop())
    if b.region(cell) != regs.pop():
        raise PreconditionError(f"cell {cell} is not in the star-free region")
    if any(max(abs(s[0] - cell[0]), abs(s[1] - cell[1])) <= 1 for s in b.stars):
        raise PreconditionError(f"cell {cell} touches a placed star")
    return cell


def scene(b: StarBattleBoard) -> TileGrid:
    cells = {}
    for cell in b.cells():
        fill = REGION_COLORS[b.region(cell) % len(REGION_COLORS)]
        cells[cell] = CellPaint(fill=fill, glyph="star" if cell in b.stars else None, glyph_color="black")
    return TileGrid(b.n, b.n, cells, cell_px=CELL_PX.get(b.n, 60), grid_color="black")


def intro(b: StarBattleBoard) -> str:
    colors = ", ".join(f"Region{i} ({REGION_COLORS[i]})" for i in range(b.n))
    return (
        f"We have a {b.n}*{b.n} grid. The grid is divided into {b.n} regions. Cells with the same color belong "
        f"to the same region.\n\nColors: {colors}.\n\n"
        "In the image, a star is represented by a black dot. If a cell has been placed a star, a black dot will "
        "be shown on this cell. We should place the star in this Star Battle Puzzle according to the following "
        "rules:\n\nEach row must contain exactly 1 star(s).\nEach column must contain 1 star(s).\n"
        "Each region must contain exactly 1 star(s).\nStars cannot be adjacent to each other, including "
        "diagonally.\n\nThe cells in the grid are labeled with row and column numbers starting from 0. The "
        "top-left corner of the grid is (0, 0). (x,y) means a cell at row x and column y. Now we have placed "
        "some stars in the grid."
    )


def _task_region_cell(task, b, rng):
    rid = rng.randbelow(b.n)
    own = b.region_cells(rid)
    cell = rng.choice(own)
    others = [c for c in b.cells() if b.region(c) != rid]
    opts = build_options(cell, DistractorPolicy("CoordinatePerturb", {"cells": others}), task.num_options, rng)
    col = REGION_COLORS[rid]
    q = (
        f"The region with index {rid} is represented by the color {col} in the grid. Given the current state, "
        f"which cell in the following options belong to region {rid}?"
    )
    a = (
        f"The region with index {rid} is represented by the color {col} in the grid. In this puzzle, we need to "
        f"identify which cell in the following options belongs to this region. The region {rid} contains the "
        f"following cells: {', '.join(fmt_cell(c) for c in own)}. So {fmt_cell(cell)} belongs to region {rid}."
    )
    return Derivation(q, a, fmt_cell(cell), scene(b), opts, state=b, intro=intro(b))


def _task_region_star(task, b, rng):
    rids = sorted({b.region(s) for s in b.stars})
    rid = rng.choice(rids)
    own = b.region_cells(rid)
    star = next(s for s in sorted(b.stars) if b.region(s) == rid)
    others = [c for c in b.cells() if c != star]
    opts = build_options(star, DistractorPolicy("CoordinatePerturb", {"cells": others}), task.num_options, rng)
    col = REGION_COLORS[rid]
    q = (
        f"In the current puzzle state, region {rid} is associated with color {col}. Please identify which of the "
        "following cells in this region that contains a star?"
    )
    a = (
        f"In this task, we need to find all the stars in the region with index {rid}. The region with index {rid} "
        f"corresponds to the color {col}. This region contains the following cells: "
        f"{', '.join(fmt_cell(c) for c in own)}. Note that a star is represented by a black dot. Now scan the "
        f"cells of the region {rid} on the image. The cell with a black dot is: {fmt_cell(star)}."
    )
    return Derivation(q, a, fmt_cell(star), scene(b), opts, state=b, intro=intro(b))


def _primary_reason(v: Verdict) -> str:
    if v.adjacent:
        return "adjacent"
    if v.region_has_star:
        return "region"
    return "row" if v.row_has_star else "col"


def _mixed_reasons(b: StarBattleBoard, bad: list[Cell], k: int, rng: RngStream) -> list[Cell]:
    """k blocked cells drawn round-robin over failure reasons, so the options exercise every rule."""
    groups: dict[str, list[Cell]] = {}
    for c in bad:
        groups.setdefault(_primary_reason(placeable(b, c)), []).append(c)
    queues = [rng.shuffled(groups[g]) for g in sorted(groups)]
    rng.shuffle(queues)
    out: list[Cell] = []
    while len(out) < k:
        for q in queues:
            if q and len(out) < k:
                out.append(q.pop())
    return out


def _task_placeable(task, b, rng):
    empty = [c for c in b.cells() if c not in b.stars]
    good = [c for c in empty if placeable(b, c).ok]
    bad = [c for c in empty if not placeable(b, c).ok]
    if not good or len(bad) < task.num_options - 1:
        raise GenerationError("starbattle: board unsuitable for a placement question")
    cell = rng.choice(good)
    opts = build_options(cell, DistractorPolicy("CoordinatePerturb", {"cells": _mixed_reasons(b, bad, task.num_options - 1, rng)}), task.num_options, rng)
    q = "Now we have placed some stars in the grid. Based on the current puzzle state, which of the following cells can a star be placed in?"
    parts = []
    for text in opts.options:
        r, c = (int(x) for x in text.strip("()").split(","))
        parts.append(reason_text(b, (r, c)))
    placed = ", ".join(fmt_cell(s) for s in sorted(b.stars))
    a = f"The stars already placed are at: {placed}. Check every option in turn.\n" + "\n".join(parts)
    return Derivation(q, a, fmt_cell(cell), scene(b), opts, state=b, intro=intro(b))


def _task_final(task, b, rng):
    cell = final_star(b)
    stars = sorted(b.stars)
    rows_with = sorted({r for r, _ in stars})
    cols_with = sorted({c for _, c in stars})
    r0, c0 = cell
    regs = sorted({b.region(s) for s in stars})
    q = "Now the puzzle has only one star left to be placed. The left star should be placed in which cell?"
    lines = [
        "**Step-by-step reasoning to solve the puzzle:**",
        "",
        "1. **Preplaced stars and their positions:**",
        "   - The following stars are already placed: " + ", ".join(f"Row {r}, Column {c}" for r, c in stars) + ".",
        "   - These positions fulfill the requirement of placing one star per row, column, and region.",
        "",
        "2. **Identify rows and columns with and without stars:**",
        "   - **Rows with stars:** " + ", ".join(f"Row {r}" for r in rows_with) + ".",
        f"   - **Rows without stars:** Row {r0}.",
        "   - **Columns with stars:** " + ", ".join(f"Column {c}" for c in cols_with) + ".",
        f"   - **Columns without stars:** Column {c0}.",
        "",
        "3. **Determine remaining valid cell:**",
        "   - The final star must be placed in a row and column that are both missing stars.",
        f"   - Based on the information above, the row without a star is Row {r0} and the column without a star is Column {c0}.",
        f"   - The only available intersection is cell {fmt_cell(cell)}, which satisfies the row and column constraints.",
        "",
        "4. **Region check:**",
        "   - The preplaced stars occupy the following regions: " + ", ".join(map(str, regs)) + ".",
        f"   - The remaining region that requires a star is: Region {b.region(cell)}.",
        "",
        "5. **Final validation:**",
        f"   - The cell {fmt_cell(cell)} belongs to the remaining region without a star.",
        "   - Placing the star here satisfies all row, column, region, and adjacency constraints.",
        "",
        f"Thus, the final star must be placed at **Row {r0}, Column {c0}**.",
    ]
    return Derivation(q, "\n".join(lines), fmt_cell(cell), scene(b), None, state=b, intro=intro(b))


_TASKS = {"q1": _task_region_cell, "q2": _task_region_star, "q3": _task_placeable, "q4": _task_final}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Identify the cell belonging to the given region", "dot"),
    TaskSpec(GAME_ID, "q2", TP, Level.EASY, 8, "Identify the starred cell of the given region", "dot"),
    TaskSpec(GAME_ID, "q3", SP, Level.MEDIUM, 8, "Identify the cell where a star can be placed", "dot"),
    TaskSpec(GAME_ID, "q4", SP, Level.HARD, 0, "Find the position of the final star"),
)


def _stars_for(task_id: str, n: int, rng: RngStream) -> int:
    if task_id == "q2":
        return rng.randint(1, n - 1)
    if task_id == "q3":
        return rng.randint(1, max(1, n - 3))
    if task_id == "q4":
        return n - 1
    return rng.randint(0, n - 1)


def build(task: TaskSpec, plot: Level, rng: RngStream, budget: int = 30) -> Derivation:
    n = SIZES[plot]
    for attempt in range(budget):
        srng = rng.fork("state", attempt)
        b = gen_starbattle(plot, srng, placed=_stars_for(task.task_id, n, srng.fork("count")))
        try:
            return _TASKS[task.task_id](task, b, rng.fork("qa", attempt))
        except GenerationError:
            continue
    raise GenerationError(f"starbattle {task.task_id}: no suitable board")


GAME = GameDescriptor(GAME_ID, "Star Battle", TASKS, build, "")
