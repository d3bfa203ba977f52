"""3D Reconstruction: voxels in a 3x3x3 cube and their two side projections."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..core import SO, SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, OptionSet, build_options, fixed_options
from ..render import CellPaint, IsoScene, TileGrid, captioned, iso_image, stack_horizontal, stack_vertical, tile_image
from ..rng import RngStream
from .common import GenerationError

GAME_ID = "voxel"
SIDE = 3
COUNTS = {Level.EASY: (3, 5), Level.MEDIUM: (6, 10), Level.HARD: (11, 15)}
YZ, XZ = "YZ", "XZ"
PLANE_TEXT = {
    YZ: ("Y-Z", "Looking along the negative X-axis direction (Front View, using (y,z) coordinates)"),
    XZ: ("X-Z", "Looking along the positive Y-axis direction (Side View, using (x,z) coordinates)"),
}
ROW_NAMES = ("top", "middle", "bottom")

Voxel = tuple[int, int, int]
Matrix = tuple[tuple[int, int, int], ...]

MATCH_OPTIONS = (
    "Neither Y-Z projection nor X-Z projection matches the target",
    "Only Y-Z projection matches the target",
    "Only X-Z projection matches the target",
    "Both Y-Z and X-Z projections match the target",
)

ALL_CELLS: tuple[Voxel, ...] = tuple(
    (x, y, z) for x in range(1, SIDE + 1) for y in range(1, SIDE + 1) for z in range(1, SIDE + 1)
)


def intro(limit: int) -> str:
    return (
        "The current structure has some initial voxels, and your goal is to complete it. Game Rules:\n"
        "1. Goal: Reconstruct a 3D structure by adding voxels to match given projections.\n\n"
        "2. Grid Space: The game is played on a 3x3x3 cube grid.\n\n"
        "3. Coordinates: Position (x,y,z) ranges from 1 to 3, with (1,1,1) at front-left-bottom.\n\n"
        "4. Position Rule: Each position can contain at most one voxel.\n\n"
        "5. Connectivity: All voxels must be connected face-to-face.\n\n"
        f"6. Voxel Limit: You have a maximum of {limit} additional voxels available.\n\n"
        "7. Placement Rule: New voxels can only be placed adjacent to existing ones.\n\n"
        "8. Front View (Y-Z): Shows structure when viewed along the negative X-axis direction (front to back), "
        "with Y as horizontal axis and Z as vertical axis. Projection coordinates are in (y,z) format.\n\n"
        "9. Side View (X-Z): Shows structure when viewed along the positive Y-axis direction (left to right), "
        "with X as horizontal axis and Z as vertical axis. Projection coordinates are in (x,z) format."
    )


# --------------------------------------------------------------------------- geometry


def neighbors6(v: Voxel) -> list[Voxel]:
    x, y, z = v
    out = [(x + 1, y, z), (x - 1, y, z), (x, y + 1, z), (x, y - 1, z), (x, y, z + 1), (x, y, z - 1)]
    return [p for p in out if all(1 <= k <= SIDE for k in p)]


def face_connected(cells) -> bool:
    cells = set(cells)
    if len(cells) <= 1:
        return True
    start = min(cells)
    seen = {start}
    stack = [start]
    while stack:
        for nb in neighbors6(stack.pop()):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def project(cells, plane: str) -> Matrix:
    """3x3 occupancy seen along an axis; rows run z=3..1, columns the other coordinate 1..3."""
    if plane not in (YZ, XZ):
        raise ValueError(f"unknown plane {plane!r}")
    hit = {(v[1] if plane == YZ else v[0], v[2]) for v in cells}
    return tuple(tuple(1 if (a, z) in hit else 0 for a in range(1, SIDE + 1)) for z in range(SIDE, 0, -1))


def projection_cells(cells, plane: str) -> list[tuple[int, int]]:
    return sorted({(v[1] if plane == YZ else v[0], v[2]) for v in cells})


def count_voxels(cells) -> int:
    return len(set(cells))


def matrix_text(m: Matrix) -> str:
    return str([list(row) for row in m])


def _fmt(v) -> str:
    return "(" + ",".join(map(str, v)) + ")"


def _listing(cells) -> str:
    return "[" + ", ".join("(" + ", ".join(map(str, v)) + ")" for v in cells) + "]"


@dataclass(frozen=True)
class VoxelPuzzle:
    occupied: frozenset[Voxel]
    limit: int
    target_yz: Matrix
    target_xz: Matrix
    hidden: frozenset[Voxel] = frozenset()  # the structure the targets were taken from

    def matches(self, cells=None) -> tuple[bool, bool]:
        cells = self.occupied if cells is None else cells
        return project(cells, YZ) == self.target_yz, project(cells, XZ) == self.target_xz


@dataclass(frozen=True)
class SequenceVerdict:
    valid: bool
    connected: bool
    within_limit: bool
    matches: bool
    count: int
    reasons: tuple[str, ...]

    @property
    def solves(self) -> bool:
        return self.valid and self.matches


def check_sequence(p: VoxelPuzzle, additions) -> SequenceVerdict:
    cur = set(p.occupied)
    reasons = []
    connected = True
    for i, v in enumerate(additions, 1):
        if v in cur:
            reasons.append(f"step {i}: position {_fmt(v)} already holds a voxel")
            connected = False
            continue
        if cur and not any(nb in cur for nb in neighbors6(v)):
            reasons.append(f"step {i}: position {_fmt(v)} is not adjacent to the structure")
            connected = False
        cur.add(v)
    within = len(additions) <= p.limit
    if not within:
        reasons.append(f"uses {len(additions)} voxels, more than the limit of {p.limit}")
    yz, xz = p.matches(cur)
    return SequenceVerdict(connected and within, connected, within, yz and xz, len(additions), tuple(reasons))


def placement_order(base, additions) -> list[Voxel]:
    """Order ``additions`` so each one touches the structure built so far (input order if impossible)."""
    cur = set(base)
    rest = sorted(additions)
    out = []
    while rest:
        nxt = next((v for v in rest if not cur or any(nb in cur for nb in neighbors6(v))), None)
        if nxt is None:
            return out + rest
        out.append(nxt)
        cur.add(nxt)
        rest.remove(nxt)
    return out


def completion_candidates(p: VoxelPuzzle) -> list[Voxel]:
    """Empty cells whose two projections are both wanted; anything else would break a target."""
    return [
        v for v in ALL_CELLS
        if v not in p.occupied
        and p.target_yz[SIDE - v[2]][v[1] - 1] == 1
        and p.target_xz[SIDE - v[2]][v[0] - 1] == 1
    ]


class Infeasible(Exception):
    pass


def _completes(p: VoxelPuzzle, extra) -> bool:
    cells = p.occupied | set(extra)
    return all(p.matches(cells)) and face_connected(cells)


def min_completion(p: VoxelPuzzle) -> tuple[int, tuple[Voxel, ...]]:
    cands = completion_candidates(p)
    for k in range(0, p.limit + 1):
        for combo in combinations(cands, k):
            if _completes(p, combo):
                return k, tuple(combo)
    raise Infeasible(f"no completion with at most {p.limit} voxels")


def min_completion_oracle(p: VoxelPuzzle) -> int | None:
    """Exhaustive search over every subset of empty cells; slow but independent of the pruning."""
    empty = [v for v in ALL_CELLS if v not in p.occupied]
    for k in range(0, p.limit + 1):
        if any(_completes(p, combo) for combo in combinations(empty, k)):
            return k
    return None


# --------------------------------------------------------------------------- generation


def _grow(rng: RngStream, size: int, start: set[Voxel] | None = None) -> set[Voxel]:
    cells = set(start) if start else {rng.choice(ALL_CELLS)}
    while len(cells) < size:
        frontier = sorted({nb for v in cells for nb in neighbors6(v)} - cells)
        cells.add(rng.choice(frontier))
    return cells


def _peel(rng: RngStream, cells: set[Voxel], k: int) -> set[Voxel] | None:
    """Remove ``k`` voxels while keeping the remainder connected and nonempty."""
    cur = set(cells)
    for _ in range(k):
        removable = sorted(v for v in cur if len(cur) > 1 and face_connected(cur - {v}))
        if not removable:
            return None
        cur.discard(rng.choice(removable))
    return cur


def gen_voxel_puzzle(plot: Level, rng: RngStream, removed: int | None = None) -> VoxelPuzzle:
    lo, hi = COUNTS[plot]
    for _ in range(50):
        target = _grow(rng, rng.randint(lo, hi))
        k = removed if removed is not None else rng.randint(1, min(4, len(target) - 1))
        cur = _peel(rng, target, k)
        if cur is None:
            continue
        limit = k + rng.randint(0, 1)
        return VoxelPuzzle(frozenset(cur), limit, project(target, YZ), project(target, XZ), frozenset(target))
    raise GenerationError("voxel: could not peel a connected current structure")


# --------------------------------------------------------------------------- rendering


def _panel(m: Matrix) -> TileGrid:
    cells = {(r, c): CellPaint(fill="gray" if m[r][c] else "white") for r in range(SIDE) for c in range(SIDE)}
    return TileGrid(SIDE, SIDE, cells, axis_labels=False, cell_px=36, grid_color="dark gray")


def scene(p: VoxelPuzzle, cells=None):
    cells = p.occupied if cells is None else cells

    def compose():
        # screen frame: x=1 (front) nearest the viewer on the +y side, y grows to the right
        vox = {(v[1] - 1, SIDE - v[0], v[2] - 1): "powder blue" for v in cells}
        iso = iso_image(IsoScene(vox, unit=56, pad=24, floor_grid=True))
        panels = stack_horizontal(
            [captioned(tile_image(_panel(p.target_yz)), "Target Y-Z (Front View)"),
             captioned(tile_image(_panel(p.target_xz)), "Target X-Z (Side View)")],
            gap=24,
        )
        return stack_vertical([iso, panels], gap=12)

    return compose


# --------------------------------------------------------------------------- tasks


def _count(task, p, rng):
    cells = sorted(p.occupied)
    n = len(cells)
    layers = []
    for z in range(1, SIDE + 1):
        k = sum(1 for v in cells if v[2] == z)
        layers.append(f"{k} voxel{'s' if k != 1 else ''} at height z={z}")
    a = (
        f"The structure contains voxels at the following positions: {', '.join(_fmt(v) for v in cells)}. "
        f"Layer by layer there are {', '.join(layers)}. "
        f"By counting these positions, we can see there are {n} voxels in total."
    )
    return Derivation("How many voxels are there in the given structure?", a, str(n), scene(p), None, state=p)


def _which(task, p, rng):
    ans = _fmt(rng.choice(sorted(p.occupied)))
    empty = [_fmt(v) for v in ALL_CELLS if v not in p.occupied]
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": empty}), task.num_options, rng)
    lines = ["Let's analyze each option:", ""]
    for i, text in enumerate(opts.options, 1):
        if i == opts.correct_index:
            lines.append(f"Option {i} - Position {text}: This position contains a voxel. This is the correct answer.")
        else:
            lines.append(f"Option {i} - Position {text}: This position is empty.")
        lines.append("")
    q = "Which of the following positions contains a voxel? Choose the correct position from the options below."
    return Derivation(q, "\n".join(lines).rstrip(), ans, scene(p), opts, state=p)


def _plane_block(i: int, p: VoxelPuzzle, plane: str) -> list[str]:
    label, look = PLANE_TEXT[plane]
    cells = sorted(p.occupied)
    got = project(cells, plane)
    want = p.target_yz if plane == YZ else p.target_xz
    lines = [f"{i}. {look}:",
             f"   - We can see voxels at positions {_listing(cells)}, forming a {label} projection of "
             f"{_listing(projection_cells(cells, plane))}"]
    if got == want:
        lines.append(f"   - This matches the target {label} projection exactly.")
    else:
        tgt = {(a + 1, SIDE - r) for r in range(SIDE) for a in range(SIDE) if want[r][a]}
        have = set(projection_cells(cells, plane))
        lines.append(f"   - The target {label} projection is {_listing(sorted(tgt))}.")
        if tgt - have:
            lines.append(f"   - Missing from the structure's projection: {_listing(sorted(tgt - have))}")
        if have - tgt:
            lines.append(f"   - Not present in the target projection: {_listing(sorted(have - tgt))}")
        lines.append(f"   - This does not match the target {label} projection.")
    return lines


def _match(task, p, rng):
    yz, xz = p.matches()
    idx = (2 if xz else 0) + (1 if yz else 0)
    ans = MATCH_OPTIONS[idx]
    opts = fixed_options(list(MATCH_OPTIONS), ans)
    summary = ("both projections match the target" if idx == 3 else
               "neither projection matches the target" if idx == 0 else
               f"only the {'Y-Z' if yz else 'X-Z'} projection matches the target")
    lines = ["Let's analyze the projections:", "", *_plane_block(1, p, YZ), "", *_plane_block(2, p, XZ), "",
             f"Based on the above analysis, {summary}."]
    q = ("How does the voxel structure's projections match with the target projections?\n\n"
         "Choose the correct description from the options below.")
    return Derivation(q, "\n".join(lines), ans, scene(p), opts, state=p)


def _random_additions(p: VoxelPuzzle, rng: RngStream, k: int) -> list[Voxel]:
    cur = set(p.occupied)
    out = []
    for _ in range(k):
        frontier = sorted({nb for v in cur for nb in neighbors6(v)} - cur)
        if not frontier:
            break
        v = rng.choice(frontier)
        out.append(v)
        cur.add(v)
    return out


def _predict(task, p, rng):
    adds = _random_additions(p, rng, rng.randint(1, 3))
    plane = rng.choice((YZ, XZ))
    label, look = PLANE_TEXT[plane]
    new = sorted(p.occupied | set(adds))
    ans = matrix_text(project(new, plane))
    q = (
        f"Action: Add {len(adds)} voxels at positions: {_listing(adds)}\n\n"
        f"Question: After adding these voxels, what will be the {label} projection of the new structure?\n\n"
        "Answer Format:\n\n"
        "1. Write the answer as a list of three lists: [[row1], [row2], [row3]]\n"
        "2. Each row should contain three numbers (0 or 1)\n"
        "3. Rows are ordered from top to bottom of the projection\n"
        "4. Numbers in each row are ordered from left to right\n"
        "5. Use 1 to indicate presence of a voxel in the projection, 0 for empty space\n"
        "6. Example format: [[0, 1, 0], [1, 1, 0], [0, 1, 1]]"
    )
    a = (
        "Let's analyze the projection:\n\n"
        f"{look}:\n\n"
        f"- We can see voxels at positions {_listing(new)}, which in {label} projection appear at positions "
        f"{_listing(projection_cells(new, plane))}.\n"
        f"Therefore, the answer is:\n{ans}"
    )
    return Derivation(q, a, ans, scene(p), None, state=p)


def _seq_text(adds) -> str:
    return f"Add voxels at positions: {_listing(adds)}"


def _sequence_distractors(p: VoxelPuzzle, correct: list[Voxel], rng: RngStream, need: int) -> list[list[Voxel]]:
    empty = [v for v in ALL_CELLS if v not in p.occupied]
    seen = {_seq_text(correct)}
    out = []
    for attempt in range(400):
        kind = attempt % 4
        cand = list(correct)
        if kind == 0 and cand:
            cand[rng.randbelow(len(cand))] = rng.choice([v for v in empty if v not in cand])
        elif kind == 1 and len(cand) > 1:
            cand.pop(rng.randbelow(len(cand)))
        elif kind == 2:
            cand.append(rng.choice([v for v in empty if v not in cand]))
        else:
            cand = rng.sample(empty, rng.randint(1, max(1, min(len(empty), p.limit))))
        if len(set(cand)) != len(cand):
            continue
        order = placement_order(p.occupied, cand)
        if check_sequence(p, order).solves:
            continue
        text = _seq_text(order)
        if text in seen:
            continue
        seen.add(text)
        out.append(order)
        if len(out) == need:
            return out
    raise GenerationError("voxel: not enough distinct failing sequences")


def _sequence(task, p, rng):
    correct = placement_order(p.occupied, sorted(p.hidden - p.occupied))
    if not check_sequence(p, correct).solves:
        raise GenerationError("hidden completion does not replay")
    wrong = _sequence_distractors(p, correct, rng, task.num_options - 1)
    by_text = {_seq_text(s): s for s in [correct, *wrong]}
    ans = _seq_text(correct)
    texts = rng.shuffled(list(by_text))
    opts = OptionSet(tuple(texts), texts.index(ans) + 1)
    lines = ["Let's analyze each option:", "", f"Current structure: {_listing(sorted(p.occupied))}", ""]
    for i, text in enumerate(texts, 1):
        v = check_sequence(p, by_text[text])
        lines.append(f"Option {i}, adding {_listing(by_text[text])}:")
        if v.connected:
            lines.append("- The added voxels maintain connectivity")
        else:
            lines.append(f"- The added voxels are not all connected to the existing structure ({v.reasons[0]})")
        if v.matches:
            lines.append("- Matches both target projections")
        else:
            yz, xz = p.matches(set(p.occupied) | set(by_text[text]))
            bad = " and ".join(name for name, ok in (("Y-Z", yz), ("X-Z", xz)) if not ok)
            lines.append(f"- Does not match both target projections (the {bad} view differs)")
        within = "which is within the limit" if v.within_limit else "which exceeds the limit"
        lines.append(f"- Uses {v.count} voxels, {within} of {p.limit}")
        lines.append("")
    q = ("Which sequence of voxel additions will make the structure match the both target projections?\n\n"
         "Choose the correct sequence from the options below.")
    return Derivation(q, "\n".join(lines).rstrip(), ans, scene(p), opts, state=p)


def _matrix_rows(m: Matrix, indent: str) -> list[str]:
    return [f"{indent}{list(row)} ({name})" for row, name in zip(m, ROW_NAMES)]


def _candidate_text(m_cur: Matrix, m_tgt: Matrix, plane: str) -> str:
    out = []
    for r in range(SIDE):
        for a in range(SIDE):
            if m_tgt[r][a] and not m_cur[r][a]:
                z = SIDE - r
                out.append(f"(?, {a + 1}, {z})" if plane == YZ else f"({a + 1}, ?, {z})")
    return ", ".join(out) if out else "none"


def _minimum(task, p, rng):
    k, witness = min_completion(p)
    cur = sorted(p.occupied)
    yz_now, xz_now = project(cur, YZ), project(cur, XZ)
    lines = [
        "Let's solve this optimization problem through systematic reasoning:", "",
        "1. Basic Information:",
        f"   - Current structure: {len(cur)} voxels at positions {_listing(cur)}",
        f"   - Remaining available voxels: {p.limit}", "",
        "2. Analysis of Y-Z Projection (Front View):", "",
        "   a) Current Y-Z projection:", *_matrix_rows(yz_now, "      "), "",
        "   b) Target Y-Z projection:", *_matrix_rows(p.target_yz, "      "), "",
        "   c) Candidate positions from Y-Z view:",
        f"      {_candidate_text(yz_now, p.target_yz, YZ)}",
        "      where ? can be any value from 1 to 3 for x-coordinate", "",
        "3. Analysis of X-Z Projection (Side View):", "",
        "   a) Current X-Z projection:", *_matrix_rows(xz_now, "      "), "",
        "   b) Target X-Z projection:", *_matrix_rows(p.target_xz, "      "), "",
        "   c) Candidate positions from X-Z view:",
        f"      {_candidate_text(xz_now, p.target_xz, XZ)}",
        "      where ? can be any value from 1 to 3 for y-coordinate", "",
        "4. Finding Required Positions:", "",
        "   - Any added voxel must lie where both target projections show 1, otherwise a target would be broken.",
    ]
    cands = completion_candidates(p)
    lines.append(f"   - Positions allowed by both projections: {_listing(cands) if cands else 'none'}")
    lines += ["", "5. Connectivity Analysis and Completion:", ""]
    if k == 0:
        lines.append("   - The current structure already matches both target projections, so nothing is needed.")
    else:
        order = placement_order(p.occupied, witness)
        lines.append(f"   - Adding {_listing(order)} in this order keeps every new voxel attached to the structure")
        lines.append("   - After these additions both projections equal their targets")
    lines += ["", "6. Verifying Optimality:", ""]
    if k == 0:
        lines.append("   - Zero additions cannot be improved upon.")
    else:
        lines.append(
            f"   - Every set of {k - 1} allowed position(s) was checked; none produces both target projections "
            "with a connected structure."
        )
    lines += ["", f"Therefore, the minimum number of voxels needed to complete the reconstruction is {k}."]
    q = "What is the minimum number of voxels needed to add to the current structure to make it match both target projections?"
    return Derivation(q, "\n".join(lines), str(k), scene(p), None, state=p)


_TASKS = {"q1": _count, "q2": _which, "q3": _match, "q4": _predict, "q5": _sequence, "q6": _minimum}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 0, "Count voxels in the 3D structure"),
    TaskSpec(GAME_ID, "q2", TP, Level.EASY, 6, "Select the position containing a voxel", "colon"),
    TaskSpec(GAME_ID, "q3", TP, Level.MEDIUM, 4, "Describe how the projections match the targets", "colon"),
    TaskSpec(GAME_ID, "q4", SP, Level.MEDIUM, 0, "Predict a projection after adding voxels"),
    TaskSpec(GAME_ID, "q5", SP, Level.HARD, 8, "Choose the addition sequence that matches the targets", "colon"),
    TaskSpec(GAME_ID, "q6", SO, Level.HARD, 0, "Minimum additional voxels to match both targets"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream, budget: int = 60) -> Derivation:
    qrng = rng.fork("qa")
    want = qrng.randbelow(4) if task.task_id == "q3" else None
    for attempt in range(budget):
        srng = rng.fork("state", attempt)
        removed = None
        if task.task_id == "q3" and want == 3 and attempt % 2 == 0:
            removed = 0
        p = gen_voxel_puzzle(plot, srng, removed)
        if task.task_id == "q3" and attempt < budget - 1:
            yz, xz = p.matches()
            if (2 if xz else 0) + (1 if yz else 0) != want:
                continue
        try:
            d = _TASKS[task.task_id](task, p, qrng.fork(attempt))
        except GenerationError:
            continue
        d.intro = intro(p.limit)
        return d
    raise GenerationError(f"voxel {task.task_id}: no suitable puzzle")


GAME = GameDescriptor(GAME_ID, "3D Reconstruction", TASKS, build, "")
