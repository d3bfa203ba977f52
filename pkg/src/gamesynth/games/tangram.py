"""Grid-polyomino "Tangram": numbered pieces, removed pieces and refitting."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, build_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .colorhue import hsv_name, hsv_to_rgb
from .common import Cell, GenerationError, connected, neighbors4

GAME_ID = "tangram"
SIZES = {Level.EASY: 5, Level.MEDIUM: 8, Level.HARD: 9}
PIECE_COUNTS = {5: (3, 4), 8: (4, 5), 9: (5, 6)}
CELL_PX = {5: 64, 8: 46, 9: 42}
ROTATIONS = (0, 90, 180, 270)
FLIP_PROBABILITY = 0.2

FLIPPED = "flipped"
FIT_TEXT = {
    frozenset({0}): "rotate 0 degrees",
    frozenset({90}): "rotate 90 degrees clockwise",
    frozenset({180}): "rotate 180 degrees",
    frozenset({270}): "rotate 90 degrees counterclockwise",
    frozenset({0, 180}): "both rotate 0 and 180 degrees",
    frozenset({90, 270}): "rotate 90 degrees by both direction",
    frozenset(ROTATIONS): "no matter what degrees rotated, it always can fit",
    FLIPPED: "can't put inside (flipped)",
}

INTRO = (
    "Rules:\n\n"
    "1. Each numbered region represents a piece on the board.\n\n"
    "2. Pieces are considered adjacent if they share at least one edge.\n\n"
    "3. Pieces that only touch at corners are not considered adjacent.\n\n"
    "4. Some pieces have been removed and are shown below the main board."
)

Shape = frozenset[Cell]


class UnknownPiece(KeyError):
    pass


def normalize(cells) -> Shape:
    cells = list(cells)
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return frozenset((r - r0, c - c0) for r, c in cells)


def dims(cells) -> tuple[int, int]:
    rs = [r for r, _ in cells]
    cs = [c for _, c in cells]
    return max(rs) - min(rs) + 1, max(cs) - min(cs) + 1


def rotate_cw(shape: Shape, degrees: int) -> Shape:
    out = normalize(shape)
    for _ in range((degrees // 90) % 4):
        h, _ = dims(out)
        out = normalize((c, h - 1 - r) for r, c in out)
    return out


def mirror(shape: Shape) -> Shape:
    _, w = dims(shape)
    return normalize((r, w - 1 - c) for r, c in shape)


@dataclass
class TangramBoard:
    n: int
    pieces: dict[int, frozenset[Cell]]  # id -> board cells (original positions)
    removed: dict[int, Shape] = field(default_factory=dict)  # id -> displayed shape
    colors: dict[int, tuple[float, float, float]] = field(default_factory=dict)

    def on_board(self) -> list[int]:
        return sorted(i for i in self.pieces if i not in self.removed)

    def owner(self, cell: Cell) -> int | None:
        for i in self.on_board():
            if cell in self.pieces[i]:
                return i
        return None

    def empty_cells(self) -> frozenset[Cell]:
        return frozenset(c for i in self.removed for c in self.pieces[i])

    def color_name(self, pid: int) -> str:
        return hsv_name(self.colors[pid]) if pid in self.colors else "gray"

    def check(self) -> list[str]:
        problems = []
        seen: set[Cell] = set()
        for i, cells in self.pieces.items():
            if seen & cells:
                problems.append(f"piece {i} overlaps another piece")
            seen |= cells
            if not connected(set(cells)):
                problems.append(f"piece {i} is not connected")
        if seen != {(r, c) for r in range(self.n) for c in range(self.n)}:
            problems.append("pieces do not partition the board")
        return problems


def _partition(n: int, k: int, rng: RngStream) -> list[set[Cell]] | None:
    all_cells = [(r, c) for r in range(n) for c in range(n)]
    seeds = rng.sample(all_cells, k)
    owner = {s: i for i, s in enumerate(seeds)}
    regions = [{s} for s in seeds]
    while len(owner) < n * n:
        grow = [i for i in range(k) if any(
            0 <= nb[0] < n and 0 <= nb[1] < n and nb not in owner for c in regions[i] for nb in neighbors4(c)
        )]
        smallest = min(len(regions[i]) for i in grow)
        i = rng.choice([j for j in grow if len(regions[j]) <= smallest + 2])
        frontier = sorted({nb for c in regions[i] for nb in neighbors4(c)
                           if 0 <= nb[0] < n and 0 <= nb[1] < n and nb not in owner})
        cell = rng.choice(frontier)
        owner[cell] = i
        regions[i].add(cell)
    if min(len(r) for r in regions) < 2:
        return None
    return regions


def _pick_color(rng: RngStream, used: set[str]) -> tuple[float, float, float]:
    for _ in range(200):
        c = (rng.random(), rng.uniform(0.45, 1.0), rng.uniform(0.55, 1.0))
        if hsv_name(c) not in used:
            return c
    raise GenerationError("tangram: ran out of distinct piece colours")


def gen_tangram(plot: Level, rng: RngStream, removed: int | None = None, budget: int = 50) -> TangramBoard:
    n = SIZES[plot]
    lo, hi = PIECE_COUNTS[n]
    for _ in range(budget):
        k = rng.randint(lo, hi)
        regions = _partition(n, k, rng)
        if regions is None:
            continue
        # ids follow reading order of each piece's first cell
        regions.sort(key=min)
        pieces = {i + 1: frozenset(r) for i, r in enumerate(regions)}
        used: set[str] = set()
        colors = {}
        for pid in pieces:
            colors[pid] = _pick_color(rng, used)
            used.add(hsv_name(colors[pid]))
        count = rng.randint(1, 2) if removed is None else removed
        gone = rng.sample(sorted(pieces), count)
        shown = {}
        for pid in gone:
            shape = rotate_cw(normalize(pieces[pid]), rng.choice(ROTATIONS))
            if rng.chance(FLIP_PROBABILITY):
                shape = mirror(shape)
            shown[pid] = shape
        return TangramBoard(n, pieces, shown, colors)
    raise GenerationError("tangram: partition kept producing single-cell pieces")


# --------------------------------------------------------------------------- analysis helpers


def _require(b: TangramBoard, pid: int) -> frozenset[Cell]:
    if pid not in b.pieces:
        raise UnknownPiece(f"no piece {pid}")
    return b.pieces[pid]


def piece_area(b: TangramBoard, pid: int) -> tuple[int, list[tuple[int, list[int]]]]:
    cells = _require(b, pid)
    rows = sorted({r for r, _ in cells})
    breakdown = [(r, sorted(c for rr, c in cells if rr == r)) for r in rows]
    return len(cells), breakdown


def piece_adjacency(b: TangramBoard, pid: int) -> dict[int, int]:
    """Neighbouring on-board pieces and the number of shared edges with each."""
    cells = _require(b, pid)
    out: dict[int, int] = {}
    for cell in cells:
        for nb in neighbors4(cell):
            other = b.owner(nb)
            if other is not None and other != pid:
                out[other] = out.get(other, 0) + 1
    return dict(sorted(out.items()))


def hole_of(b: TangramBoard, pid: int) -> Shape:
    return normalize(b.pieces[pid])


def rotation_fit(b: TangramBoard, pid: int) -> frozenset[int] | str:
    if pid not in b.removed:
        raise UnknownPiece(f"piece {pid} has not been removed")
    hole = hole_of(b, pid)
    shown = b.removed[pid]
    fits = frozenset(r for r in ROTATIONS if rotate_cw(shown, r) == hole)
    if fits:
        return fits
    if any(rotate_cw(mirror(shown), r) == hole for r in ROTATIONS):
        return FLIPPED
    raise GenerationError("removed piece matches its hole under no rotation or mirror")


def fit_text(verdict: frozenset[int] | str) -> str:
    return FIT_TEXT[verdict]


def first_mismatch(shape: Shape, hole: Shape) -> tuple[Cell, str] | None:
    h, w = dims(hole)
    for r in range(h):
        for c in range(w):
            a, b = (r, c) in hole, (r, c) in shape
            if a != b:
                return (r, c), ("the hole was empty but the piece was absent" if a else
                                "the piece has a cell but the board there is not part of the hole")
    return None


def _fmt(cell: Cell) -> str:
    return f"({cell[0]},{cell[1]})"


def _rect(top: int, left: int, h: int, w: int) -> str:
    return f"({top},{left}) to ({top + h - 1},{left + w - 1})"


@dataclass(frozen=True)
class Placement:
    a_rect: str
    b_rect: str
    lines: tuple[str, ...]
    successes: int = 1


_CORNERS = ("upper-left", "upper-right", "bottom-left", "bottom-right")


def two_piece_placement(b: TangramBoard, id_a: int, id_b: int) -> Placement:
    if set(b.removed) != {id_a, id_b}:
        raise UnknownPiece("both pieces, and only them, must be removed")
    hole = b.empty_cells()
    top = min(r for r, _ in hole)
    left = min(c for _, c in hole)
    hh, hw = dims(hole)
    sa, sb = b.removed[id_a], b.removed[id_b]
    ah, aw = dims(sa)
    anchors = {
        "upper-left": (top, left),
        "upper-right": (top, left + hw - aw),
        "bottom-left": (top + hh - ah, left),
        "bottom-right": (top + hh - ah, left + hw - aw),
    }
    lines = []
    found = []
    for name in _CORNERS:
        if name == "bottom-left" and ah == hh:
            lines.append(f"- bottom-left: Since Piece {id_a} has the same height as the hole, bottom-left corner is same as upper-left corner. Skipped.")
            continue
        if name == "bottom-right" and ah == hh:
            lines.append(f"- bottom-right: Since Piece {id_a} has the same height as the hole, bottom-right corner is same as upper-right corner. Skipped.")
            continue
        if name == "upper-right" and aw == hw:
            lines.append(f"- upper-right: Since Piece {id_a} has the same width as the hole, upper-right corner is same as upper-left corner. Skipped.")
            continue
        if name == "bottom-right" and aw == hw:
            lines.append(f"- bottom-right: Since Piece {id_a} has the same width as the hole, bottom-right corner is same as bottom-left corner. Skipped.")
            continue
        r0, c0 = anchors[name]
        lines.append(f"- {name}: Attempting to place Piece {id_a} at {_rect(r0, c0, ah, aw)}")
        if r0 < 0 or c0 < 0:
            lines.append("  Failed: the piece does not fit inside the hole at this corner")
            continue
        bad = next(((r, c) for r, c in sorted(sa) if (r + r0, c + c0) not in hole), None)
        if bad is not None:
            lines.append(
                f"  Failed: Cell {_fmt(bad)} on Removed Pieces plot maps to board position "
                f"{_fmt((bad[0] + r0, bad[1] + c0))} which isn't empty"
            )
            continue
        rest = hole - {(r + r0, c + c0) for r, c in sa}
        rh, rw = dims(rest)
        rt, rl = min(r for r, _ in rest), min(c for _, c in rest)
        if normalize(rest) != sb:
            lines.append(f"  Piece {id_a} fits, but the remaining {rh}x{rw} hole does not match Piece {id_b}")
            continue
        lines.append(f"  Success! Remaining hole dimensions: {rh}x{rw}")
        lines.append(f"  Then placing Piece {id_b} at {_rect(rt, rl, rh, rw)}")
        lines.append("  Both pieces fit perfectly!")
        found.append((_rect(r0, c0, ah, aw), _rect(rt, rl, rh, rw)))
    if not found:
        raise GenerationError("no corner placement tiles the hole")
    return Placement(found[0][0], found[0][1], tuple(lines), len(found))


# --------------------------------------------------------------------------- rendering


def _piece_grid(b: TangramBoard, pid: int, shape: Shape) -> TileGrid:
    h, w = dims(shape)
    rgb = hsv_to_rgb(b.colors[pid])
    cells = {cell: CellPaint(fill=rgb, label=str(pid)) for cell in shape}
    return TileGrid(h, w, cells, cell_px=34, grid_color="gray")


def scene(b: TangramBoard) -> TileGrid:
    cells = {}
    for pid in b.on_board():
        rgb = hsv_to_rgb(b.colors[pid])
        for cell in b.pieces[pid]:
            cells[cell] = CellPaint(fill=rgb, label=str(pid))
    footer = [(f"Piece {pid}", _piece_grid(b, pid, shape)) for pid, shape in sorted(b.removed.items())]
    return TileGrid(b.n, b.n, cells, cell_px=CELL_PX.get(b.n, 44), footer=footer, footer_caption="Removed Pieces")


# --------------------------------------------------------------------------- tasks


def _count_pool(lo: int = 0, hi: int = 7) -> DistractorPolicy:
    return DistractorPolicy("CategoricalPool", {"pool": [str(i) for i in range(lo, hi + 1)]})


def _centre(cells) -> Cell:
    rs = sorted(r for r, _ in cells)
    cs = sorted(c for _, c in cells)
    return rs[len(rs) // 2], cs[len(cs) // 2]


def _task_count(task, b, rng):
    on = b.on_board()
    ans = str(len(on))
    opts = build_options(ans, _count_pool(), task.num_options, rng)
    lines = ["Let's analyze the puzzle state:", "", "Pieces currently on the board:"]
    for pid in on:
        lines.append(f"Piece {pid} ({b.color_name(pid)}) around position {_fmt(_centre(b.pieces[pid])).replace(',', ', ')}")
    lines += ["", "Removed pieces:", "; ".join(f"Piece {pid}" for pid in sorted(b.removed)), ""]
    lines.append(
        f"By counting the unique non-zero numbers on the main board, we can see there are {len(on)} pieces remaining."
    )
    return Derivation("How many pieces are currently on the main board?", "\n".join(lines), ans, scene(b), opts, state=b)


def _task_rotation(task, b, rng):
    (pid,) = b.removed
    verdict = rotation_fit(b, pid)
    ans = fit_text(verdict)
    pool = [t for t in FIT_TEXT.values() if t != ans]
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": pool}), task.num_options, rng)
    hole = hole_of(b, pid)
    shown = b.removed[pid]
    hh, hw = dims(hole)
    ph, pw = dims(shown)
    maybe = [r for r in ROTATIONS if dims(rotate_cw(shown, r)) == (hh, hw)]
    top = min(r for r, _ in b.pieces[pid])
    left = min(c for _, c in b.pieces[pid])
    lines = [
        f"Let's analyze how piece {pid} can be rotated to fit the hole:", "",
        "1. Dimension Analysis:",
        f"   - Hole dimensions: {hh}x{hw}",
        f"   - Piece dimensions: {ph}x{pw}",
        f"   - Based on dimensions, these rotations (clockwise) might work: {', '.join(map(str, maybe))}", "",
        "2. Testing Each Rotation:",
    ]
    for r in ROTATIONS:
        lines.append(f"   {r}° rotation:")
        if r not in maybe:
            lines.append("   - Skipped: rotated dimensions do not match the hole")
            continue
        rot = rotate_cw(shown, r)
        miss = first_mismatch(rot, hole)
        if miss is None:
            lines.append("   - Success! Piece fits perfectly")
        else:
            (mr, mc), why = miss
            lines.append(
                f"   - Failed: First mismatch at row {mr}, column {mc} (mapped to {_fmt((mr, mc))} of removed piece "
                f"and {_fmt((mr + top, mc + left))} of board)"
            )
            lines.append(f"   - At this position, {why}")
    lines += ["", "3. Summary:"]
    if verdict == FLIPPED:
        lines.append("   - Valid rotations found: none")
        lines.append("   - No rotation works, but the mirrored piece would fit, so the piece is flipped")
    else:
        lines.append(f"   - Valid rotations found: {', '.join(map(str, sorted(verdict)))}")
        lines.append("   - Some rotations work")
    q = "Can the removed piece fit back into the main board by only rotation? If yes, what rotation(s) would work?"
    return Derivation(q, "\n".join(lines), ans, scene(b), opts, state=b)


def _task_area(task, b, rng):
    pid = rng.choice(b.on_board())
    area, rows = piece_area(b, pid)
    ans = str(area)
    opts = build_options(area, DistractorPolicy("NumericNeighborhood", {"lo": 1, "hi": b.n * b.n}), task.num_options, rng)
    r_lo, r_hi = rows[0][0], rows[-1][0]
    lines = [f"Let's analyze Piece {pid} ({b.color_name(pid)}) row by row:", "",
             f"The piece spans from row {r_lo} to {r_hi} (height of {r_hi - r_lo + 1}):", ""]
    for r, cols in rows:
        if cols == list(range(cols[0], cols[-1] + 1)):
            where = f"from column {cols[0]} to {cols[-1]}" if len(cols) > 1 else f"at column {cols[0]}"
        else:
            where = "at columns " + ", ".join(map(str, cols))
        lines.append(f"Row {r}: {len(cols)} cells {where};")
    lines += ["", f"Adding up all the cells: {' + '.join(str(len(c)) for _, c in rows)} = {area} cells."]
    q = f"What is the area (number of cells) of Piece {pid}?"
    return Derivation(q, "\n".join(lines), ans, scene(b), opts, state=b)


def _task_adjacent(task, b, rng):
    pid = rng.choice(b.on_board())
    adj = piece_adjacency(b, pid)
    ans = str(len(adj))
    opts = build_options(ans, _count_pool(), task.num_options, rng)
    cells = b.pieces[pid]
    rs = [r for r, _ in cells]
    cs = [c for _, c in cells]
    lines = [f"Let's analyze Piece {pid} ({b.color_name(pid)}):", "", "Piece Boundaries:",
             f"- Spans rows {min(rs)} to {max(rs)} (height: {max(rs) - min(rs) + 1})",
             f"- Spans columns {min(cs)} to {max(cs)} (width: {max(cs) - min(cs) + 1})", "",
             "1. Cell-by-cell examination:"]
    names = ("up", "down", "left", "right")
    for cell in sorted(cells):
        hits = []
        for word, nb in zip(names, neighbors4(cell)):
            other = b.owner(nb)
            if other is not None and other != pid:
                hits.append(f"   - {word}: Piece {other} ({b.color_name(other)}) at {_fmt(nb)}")
        if hits:
            lines.append(f"Cell {_fmt(cell)}:")
            lines += hits
        else:
            lines.append(f"Cell {_fmt(cell)}: No adjacent pieces;")
    lines += ["", "2. Adjacent Pieces Summary:"]
    if adj:
        lines += [f"- Piece {o} ({b.color_name(o)}): {k} contact sides" for o, k in adj.items()]
    else:
        lines.append("- No piece shares an edge with this piece")
    lines += ["", f"Total number of unique adjacent pieces: {len(adj)}."]
    q = f"How many different pieces are adjacent to Piece {pid}?"
    return Derivation(q, "\n".join(lines), ans, scene(b), opts, state=b)


def _task_place(task, b, rng):
    id_a, id_b = sorted(b.removed)
    if rng.chance(0.5):
        id_a, id_b = id_b, id_a
    res = two_piece_placement(b, id_a, id_b)
    # the true position must be the only corner placement, otherwise two options would be right
    truth = b.pieces[id_a]
    ah, aw = dims(b.removed[id_a])
    tr, tc = min(r for r, _ in truth), min(c for _, c in truth)
    if res.successes != 1 or normalize(truth) != b.removed[id_a] or res.a_rect != _rect(tr, tc, ah, aw):
        raise GenerationError("placement is not unique")
    rects = [_rect(r, c, ah, aw) for r in range(b.n - ah + 1) for c in range(b.n - aw + 1)]
    near = [x for x in rects if x != res.a_rect]
    if len(near) < task.num_options - 1:
        raise GenerationError("too few alternative positions for distractors")
    near.sort(key=lambda x: _rect_distance(x, res.a_rect))
    opts = build_options(res.a_rect, DistractorPolicy("CategoricalPool", {"pool": near[:8]}), task.num_options, rng)
    hole = b.empty_cells()
    hh, hw = dims(hole)
    bh, bw = dims(b.removed[id_b])
    lines = [f"Let's analyze the placement of Piece {id_a} and Piece {id_b}:", "",
             f"1. Hole dimensions: {hh}x{hw}", f"2. Piece {id_a} dimensions: {ah}x{aw}",
             f"3. Piece {id_b} dimensions: {bh}x{bw}", "",
             f"We know that if Piece {id_a} fits, then it must be placed at one of the four corners.", "",
             "Testing each corner:", *res.lines, "",
             f"Therefore, Piece {id_a} should be placed at position {res.a_rect}."]
    q = (
        f"At which position should Piece {id_a} be placed? Each option shows (top_row,left_col) to "
        "(bottom_row,right_col)."
    )
    return Derivation(q, "\n".join(lines), res.a_rect, scene(b), opts, state=b)


def _rect_distance(a: str, b: str) -> tuple[int, str]:
    def corner(x: str) -> Cell:
        r, c = x.split(" to ")[0].strip("()").split(",")
        return int(r), int(c)

    (r1, c1), (r2, c2) = corner(a), corner(b)
    return abs(r1 - r2) + abs(c1 - c2), a


_TASKS = {"q1": _task_count, "q2": _task_rotation, "q3": _task_area, "q4": _task_adjacent, "q5": _task_place}
_REMOVED = {"q2": 1, "q5": 2}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Main board piece count", "colon"),
    TaskSpec(GAME_ID, "q2", SP, Level.MEDIUM, 8, "Removed piece rotation feasibility", "colon"),
    TaskSpec(GAME_ID, "q3", TP, Level.MEDIUM, 8, "Target piece area calculation", "colon"),
    TaskSpec(GAME_ID, "q4", TP, Level.MEDIUM, 8, "Adjacent piece count", "colon"),
    TaskSpec(GAME_ID, "q5", SP, Level.HARD, 4, "Piece placement", "colon"),
)


def _prepare_q5(b: TangramBoard, rng: RngStream) -> TangramBoard | None:
    """Retarget a board so two edge-adjacent pieces are removed and shown unrotated."""
    pairs = sorted({tuple(sorted((i, j))) for i in b.pieces for j in piece_adjacency(TangramBoard(b.n, b.pieces), i)})
    if not pairs:
        return None
    i, j = rng.choice(pairs)
    shown = {i: normalize(b.pieces[i]), j: normalize(b.pieces[j])}
    return TangramBoard(b.n, b.pieces, shown, b.colors)


def build(task: TaskSpec, plot: Level, rng: RngStream, budget: int = 60) -> Derivation:
    for attempt in range(budget):
        srng = rng.fork("state", attempt)
        b = gen_tangram(plot, srng, removed=_REMOVED.get(task.task_id))
        if task.task_id == "q5":
            b = _prepare_q5(b, srng.fork("pair"))
            if b is None:
                continue
        if task.task_id in ("q3", "q4") and not b.on_board():
            continue
        try:
            return _TASKS[task.task_id](task, b, rng.fork("qa", attempt))
        except GenerationError:
            continue
    raise GenerationError(f"tangram {task.task_id}: no suitable board")


GAME = GameDescriptor(GAME_ID, "Tangram", TASKS, build, INTRO)
