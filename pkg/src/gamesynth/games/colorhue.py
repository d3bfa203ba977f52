"""Color Hue: HSV gradient lines with crosshatched blanks to fill in."""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, OptionSet, build_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import Cell, GenerationError

GAME_ID = "colorhue"
SIZES = {Level.EASY: 5, Level.MEDIUM: 6, Level.HARD: 8}
CELL_PX = {5: 84, 6: 74, 8: 58}

HSV = tuple[float, float, float]

# Versioned naming table.  Twelve 30-degree hue sectors centred on 0, 30, ..., 330.
NAMING_VERSION = 1
HUE_SECTORS = (
    "red", "orange", "yellow", "green", "green", "green",
    "cyan", "blue", "blue", "indigo", "purple", "magenta",
)
BLACK_MAX_V = 0.10
GRAY_MAX_S = 0.10
WHITE_MIN_V = 0.85
PALE_MAX_S, VIVID_MIN_S = 0.35, 0.90
DARK_MAX_V, BRIGHT_MIN_V = 0.35, 0.85

INTRO = (
    "This is a color gradient puzzle on a square grid. Certain rows or columns display smooth color "
    "transitions from one end to the other, while the remaining cells are plain white background. Cells "
    "that are left blank are marked with a gray crosshatch pattern, and some of them carry a letter. Rows "
    "and columns are numbered from 1, starting at the top-left corner, and (row, column) gives a position. "
    "Color names are derived from hue, saturation and value."
)


def hsv_name(c: HSV) -> str:
    h, s, v = c
    if not all(0.0 <= x <= 1.0 for x in c):
        raise ValueError(f"HSV components must lie in [0, 1], got {c}")
    if v <= BLACK_MAX_V:
        return "black"
    if s <= GRAY_MAX_S:
        return "white" if v >= WHITE_MIN_V else "gray"
    word = HUE_SECTORS[int(((h * 360.0) + 15.0) // 30.0) % 12]
    mods = []
    if s <= PALE_MAX_S:
        mods.append("pale")
    elif s >= VIVID_MIN_S:
        mods.append("vivid")
    if v <= DARK_MAX_V:
        mods.append("dark")
    elif v >= BRIGHT_MIN_V:
        mods.append("bright")
    return " ".join(mods + [word])


def hsv_to_rgb(c: HSV) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb(*c)
    return (round(r * 255), round(g * 255), round(b * 255))


def lerp_hsv(a: HSV, b: HSV, t: float) -> HSV:
    """Componentwise interpolation; hue goes along the shorter arc."""
    dh = b[0] - a[0]
    if dh > 0.5:
        dh -= 1.0
    elif dh < -0.5:
        dh += 1.0
    h = (a[0] + dh * t) % 1.0
    return (h, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t)


@dataclass(frozen=True)
class Gradient:
    axis: str  # "row" or "col"
    index: int  # 1-based
    start: HSV
    end: HSV

    def cells(self, n: int) -> list[Cell]:
        if self.axis == "row":
            return [(self.index, c) for c in range(1, n + 1)]
        return [(r, self.index) for r in range(1, n + 1)]

    def color_at(self, n: int, k: int) -> HSV:
        """Colour of the k-th (0-based) cell along the line."""
        return lerp_hsv(self.start, self.end, k / (n - 1))


@dataclass
class HueGrid:
    n: int
    cells: dict[Cell, HSV | None]  # 1-based; None = blank; absent = white background
    gradients: list[Gradient]
    labeled_blanks: dict[str, Cell] = field(default_factory=dict)

    def gradient_of(self, cell: Cell) -> tuple[Gradient, int]:
        for g in self.gradients:
            line = g.cells(self.n)
            if cell in line:
                return g, line.index(cell)
        raise KeyError(f"cell {cell} is not on a gradient")

    def residual(self) -> float:
        worst = 0.0
        for g in self.gradients:
            for k, cell in enumerate(g.cells(self.n)):
                got = self.cells.get(cell)
                if got is None:
                    continue
                want = g.color_at(self.n, k)
                dh = abs(got[0] - want[0])
                dh = min(dh, 1.0 - dh)
                worst = max(worst, dh, abs(got[1] - want[1]), abs(got[2] - want[2]))
        return worst


def _random_hsv(rng: RngStream) -> HSV:
    return (rng.random(), rng.uniform(0.2, 1.0), rng.uniform(0.3, 1.0))


def gen_hue(plot: Level, rng: RngStream, budget: int = 100) -> HueGrid:
    n = SIZES[plot]
    axis = rng.choice(("row", "col"))
    count = rng.randint(2, min(4, n - 1))
    indices = sorted(rng.sample(range(1, n + 1), count))
    gradients = []
    for idx in indices:
        for _ in range(budget):
            a, b = _random_hsv(rng), _random_hsv(rng)
            if hsv_name(a) != hsv_name(b):
                break
        else:
            raise GenerationError("colorhue: endpoints keep sharing a name")
        gradients.append(Gradient(axis, idx, a, b))
    cells: dict[Cell, HSV | None] = {}
    for g in gradients:
        for k, cell in enumerate(g.cells(n)):
            cells[cell] = g.color_at(n, k)
    # blanks are interior cells of gradient lines, so both endpoints stay visible
    interior = [cell for g in gradients for cell in g.cells(n)[1:-1]]
    blanks = rng.sample(interior, rng.randint(1, min(3, len(interior))))
    labeled = {}
    for letter, cell in zip("ABC", sorted(blanks)):
        cells[cell] = None
        labeled[letter] = cell
    return HueGrid(n, cells, gradients, labeled)


def hue_fill_answer(g: HueGrid, label: str) -> tuple[HSV, str]:
    cell = g.labeled_blanks[label]
    grad, k = g.gradient_of(cell)
    c = grad.color_at(g.n, k)
    return c, hsv_name(c)


def scene(g: HueGrid, swatches: list[HSV] | None = None) -> TileGrid:
    paint = {}
    names = {cell: letter for letter, cell in g.labeled_blanks.items()}
    for r in range(1, g.n + 1):
        for c in range(1, g.n + 1):
            cell = (r, c)
            if cell not in g.cells:
                continue
            v = g.cells[cell]
            if v is None:
                paint[(r - 1, c - 1)] = CellPaint(fill="white", glyph="crosshatch", label=names.get(cell))
            else:
                paint[(r - 1, c - 1)] = CellPaint(fill=hsv_to_rgb(v))
    footer = []
    if swatches:
        for i, sw in enumerate(swatches, 1):
            footer.append((str(i), TileGrid(1, 1, {(0, 0): CellPaint(fill=hsv_to_rgb(sw))}, axis_labels=False, cell_px=48)))
    return TileGrid(g.n, g.n, paint, cell_px=CELL_PX.get(g.n, 60), label_base=1, footer=footer,
                    footer_caption="Color options" if swatches else None)


def _distinct_names(rng: RngStream, exclude: set[str], k: int) -> list[HSV]:
    out: list[HSV] = []
    seen = set(exclude)
    for _ in range(400):
        c = _random_hsv(rng) if rng.chance(0.9) else (rng.random(), rng.uniform(0.0, 0.1), rng.uniform(0.0, 1.0))
        name = hsv_name(c)
        if name not in seen:
            seen.add(name)
            out.append(c)
            if len(out) == k:
                return out
    raise GenerationError("colorhue: not enough distinct colour names")


def _layout_line(g: HueGrid) -> str:
    kind = "rows" if g.gradients[0].axis == "row" else "columns"
    idx = ", ".join(str(gr.index) for gr in g.gradients)
    return f"The grid has {g.n} rows and {g.n} columns. The gradient {kind} are {kind[:-1]} {idx}; all other cells are white."


def _task_describe(task, g, rng):
    cells = sorted(c for c, v in g.cells.items() if v is not None)
    cell = rng.choice(cells)
    grad, _ = g.gradient_of(cell)
    name = hsv_name(g.cells[cell])  # type: ignore[arg-type]
    pool = [hsv_name(c) for c in _distinct_names(rng, {name}, 12)]
    opts = build_options(name, DistractorPolicy("CategoricalPool", {"pool": pool}), task.num_options, rng)
    line = f"{'row' if grad.axis == 'row' else 'column'} {grad.index}"
    a = (
        f"{_layout_line(g)} The cell at row {cell[0]}, column {cell[1]} lies on the gradient of {line}, which runs "
        f"from {hsv_name(grad.start)} to {hsv_name(grad.end)}. Reading its hue, saturation and brightness from the "
        f"image, the cell at position ({cell[0]}, {cell[1]}) is {name}."
    )
    q = f"What color is the cell at row {cell[0]}, column {cell[1]}?"
    return Derivation(q, a, name, scene(g), opts, state=g)


def _pattern(a: str, b: str) -> str:
    return f"transitioning from {a} to {b}"


def _task_pattern(task, g, rng):
    grad = rng.choice(g.gradients)
    a, b = hsv_name(grad.start), hsv_name(grad.end)
    correct = _pattern(a, b)
    pool = [_pattern(b, a)]
    names = [hsv_name(c) for c in _distinct_names(rng, set(), 14)]
    for i in range(0, len(names) - 1, 2):
        pool.append(_pattern(names[i], names[i + 1]))
    for other in g.gradients:
        if other is not grad:
            pool.append(_pattern(hsv_name(other.start), hsv_name(other.end)))
    opts = build_options(correct, DistractorPolicy("CategoricalPool", {"pool": pool}), task.num_options, rng)
    word = "row" if grad.axis == "row" else "column"
    first, last = ("left", "right") if grad.axis == "row" else ("top", "bottom")
    q = f"What is the gradient pattern in {word} {grad.index}?"
    an = (
        f"{_layout_line(g)} In {word} {grad.index}, the {first}most cell is {a} and the {last}most cell is {b}, and "
        f"the cells in between change smoothly from one to the other. The {word} {grad.index} shows a pattern that "
        f"is {correct}."
    )
    return Derivation(q, an, correct, scene(g), opts, state=g)


def _task_fill(task, g, rng):
    label = rng.choice(sorted(g.labeled_blanks))
    cell = g.labeled_blanks[label]
    value, name = hue_fill_answer(g, label)
    grad, _ = g.gradient_of(cell)
    a0, b0 = hsv_name(grad.start), hsv_name(grad.end)
    # endpoint names are the most tempting wrong picks
    candidates = [c for c in (grad.start, grad.end) if hsv_name(c) != name]
    extra = _distinct_names(rng, {name} | {hsv_name(c) for c in candidates}, task.num_options - 1 - len(candidates))
    wrong = candidates + extra
    k = task.num_options
    pos = rng.randbelow(k)
    swatches = wrong[:pos] + [value] + wrong[pos:]
    options = [hsv_name(c) for c in swatches]
    opts = OptionSet(tuple(options), pos + 1)
    direction = "horizontally" if grad.axis == "row" else "vertically"
    listing = "; ".join(f"Option {i} is {n}" for i, n in enumerate(options, 1))
    an = (
        f"We need to find the correct color for cell {label} at position ({cell[0]}, {cell[1]}). Let's analyze the "
        f"color patterns around this cell:\n\nLooking {direction}, we see a pattern transitioning from {a0} to {b0}. "
        f"Let's look at our color options:\n\n{listing}. Based on the pattern, we should use {name} (Option {pos + 1})."
    )
    q = f"Which color should be put in cell {label}? Colors are numbered from 1 to {k} in the palette below."
    return Derivation(q, an, name, scene(g, swatches), opts, state=g)


_TASKS = {"q1": _task_describe, "q2": _task_pattern, "q3": _task_fill}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Color description of a cell", "colon"),
    TaskSpec(GAME_ID, "q2", TP, Level.MEDIUM, 8, "Gradient pattern of a row or column", "colon"),
    TaskSpec(GAME_ID, "q3", SP, Level.HARD, 6, "Color matching for a blank cell", "colon"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream) -> Derivation:
    g = gen_hue(plot, rng.fork("state"))
    return _TASKS[task.task_id](task, g, rng.fork("qa"))


GAME = GameDescriptor(GAME_ID, "Color Hue", TASKS, build, INTRO)
