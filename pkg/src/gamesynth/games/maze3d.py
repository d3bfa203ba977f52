"""3D Maze: walk on cube tops, climb ladders, read numbered green checkpoints."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations

from ..core import SP, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, DistractorPolicy, build_options
from ..render import IsoScene, Ladder
from ..rng import RngStream
from .common import GenerationError

GAME_ID = "maze3d"
PLOTS = (Level.EASY, Level.MEDIUM)
SEGMENTS = {Level.EASY: (4, 6), Level.MEDIUM: (5, 7)}
LAYOUT_TRIES = 50
MAX_Z = 8

Cube = tuple[int, int, int]

# step vocabulary in the render frame (camera on the +x, +y, +z side)
RF, LF, UP, DOWN = "right-forward", "left-forward", "up", "down"
HORIZONTAL = {(1, 0): RF, (0, -1): LF, (-1, 0): "left-backward", (0, 1): "right-backward"}

START_COLOR, GOAL_COLOR, POINT_COLOR, CUBE_COLOR = "blue", "red", "green", "cube gray"


class IllegalStep(ValueError):
    pass


def intro(points) -> str:
    ids = [str(i) for i in sorted(points)]
    listed = ids[0] if len(ids) == 1 else ", ".join(ids[:-1]) + ", and " + ids[-1]
    return (
        "Rules:\n"
        "1. Player can only walk on top of cubes\n\n"
        "2. Player can climb ladders if they can reach the cube under the ladder\n\n"
        "3. From a ladder, player can reach the top of the last cube with the ladder\n\n"
        "4. Blue cube is start position, red cube is goal position\n\n"
        f"5. Green cubes are numbered points ({listed})"
    )


@dataclass
class Maze3D:
    cubes: set[Cube]
    ladders: list[Ladder]
    start: Cube
    goal: Cube
    main: list[Cube]  # standing cubes from start to goal
    junctions: list[Cube] = field(default_factory=list)  # branch points in encounter order
    branch_cells: set[Cube] = field(default_factory=set)
    points: dict[int, Cube] = field(default_factory=dict)


# --------------------------------------------------------------------------- walk graph


def standable(cubes, c: Cube) -> bool:
    return c in cubes and (c[0], c[1], c[2] + 1) not in cubes


def _ladder_ends(lad: Ladder) -> tuple[Cube, Cube, int]:
    """(foot, top, height): the foot is the standing cube in front of the ladder's base."""
    fx, fy = (lad.x + 1, lad.y) if lad.face == "+x" else (lad.x, lad.y + 1)
    return (fx, fy, lad.z_lo - 1), (lad.x, lad.y, lad.z_hi), lad.z_hi - lad.z_lo + 1


def walk_graph(cubes, ladders) -> dict[Cube, dict[Cube, str]]:
    """Adjacency with a move label per directed edge."""
    stands = {c for c in cubes if standable(cubes, c)}
    g: dict[Cube, dict[Cube, str]] = {c: {} for c in stands}
    for x, y, z in stands:
        for (dx, dy), name in HORIZONTAL.items():
            nb = (x + dx, y + dy, z)
            if nb in stands:
                g[(x, y, z)][nb] = name
    for lad in ladders:
        foot, top, h = _ladder_ends(lad)
        column = [(lad.x, lad.y, z) for z in range(lad.z_lo - 1, lad.z_hi + 1)]
        if foot in stands and top in stands and all(c in cubes for c in column):
            g[foot][top] = f"{UP} {h}"
            g[top][foot] = f"{DOWN} {h}"
    return g


def find_path(g, a: Cube, b: Cube) -> list[Cube] | None:
    prev = {a: None}
    q = deque([a])
    while q:
        cur = q.popleft()
        if cur == b:
            out = [cur]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])
            return out[::-1]
        for nb in sorted(g[cur]):
            if nb not in prev:
                prev[nb] = cur
                q.append(nb)
    return None


def is_tree(g) -> bool:
    edges = sum(len(v) for v in g.values()) // 2
    if edges != len(g) - 1:
        return False
    some = next(iter(g))
    seen = {some}
    stack = [some]
    while stack:
        for nb in g[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(g)


def move_name(label: str) -> str:
    return label.split()[0]


def narrate(g, path: list[Cube], ladder_style: str = "move") -> list[str]:
    """One line per move; ladders read "Move up" or "Go up N blocks"."""
    out = []
    for a, b in zip(path, path[1:]):
        if b not in g.get(a, {}):
            raise IllegalStep(f"no legal move from {a} to {b}")
        label = g[a][b]
        kind = move_name(label)
        if kind in (UP, DOWN) and ladder_style == "blocks":
            out.append(f"Go {kind} {label.split()[1]} blocks")
        else:
            out.append(f"Move {kind}")
    return out


# --------------------------------------------------------------------------- generation


@dataclass
class _Builder:
    cubes: set[Cube] = field(default_factory=set)
    ladders: list[Ladder] = field(default_factory=list)

    def segment(self, at: Cube, kind: str, h: int = 2) -> list[Cube] | None:
        """Append one atomic segment from standing cube ``at``; returns the new standing cubes."""
        x, y, z = at
        if kind == RF:
            cells = [(x + 1, y, z), (x + 2, y, z)]
            self.cubes.update(cells)
            return cells
        if kind == LF:
            cells = [(x, y - 1, z), (x, y - 2, z)]
            self.cubes.update(cells)
            return cells
        if kind == UP:
            if z + h > MAX_Z:
                return None
            self.cubes.update((x, y - 1, k) for k in range(z, z + h + 1))
            self.ladders.append(Ladder(x, y - 1, z + 1, z + h, "+y"))
            return [(x, y - 1, z + h)]
        if kind == DOWN:
            if z - h < 0:
                return None
            self.cubes.update((x, y, k) for k in range(z - h, z))
            self.ladders.append(Ladder(x, y, z - h + 1, z, "+x"))
            self.cubes.add((x + 1, y, z - h))
            return [(x + 1, y, z - h)]
        raise ValueError(kind)


def _kinds(rng: RngStream) -> str:
    return rng.choice((RF, RF, LF, LF, UP, DOWN))


def _occlusion(cubes) -> int:
    """Pairs of cubes from different columns whose screen hexagons overlap substantially."""
    pts = [((x - y) * 0.866, (x + y) * 0.5 - z, (x, y)) for x, y, z in cubes]
    score = 0
    for i in range(len(pts)):
        ui, vi, ci = pts[i]
        for j in range(i + 1, len(pts)):
            uj, vj, cj = pts[j]
            if ci != cj and abs(ui - uj) < 0.8 and abs(vi - vj) < 0.9:
                score += 1
    return score


def _layout(plot: Level, rng: RngStream, branches: int) -> Maze3D | None:
    b = _Builder()
    start = (0, 0, rng.randint(1, 3))
    b.cubes.add(start)
    main = [start]
    kinds = []
    lo, hi = SEGMENTS[plot]
    for _ in range(rng.randint(lo, hi)):
        kind = _kinds(rng)
        if kinds and {kinds[-1], kind} == {UP, DOWN}:
            kind = RF
        cells = b.segment(main[-1], kind, rng.randint(2, 3))
        if cells is None:
            cells = b.segment(main[-1], RF)
            kind = RF
        kinds.append(kind)
        main.extend(cells)
    main_set = set(main)
    junctions, branch_cells = [], set()
    # only cubes where the main path continues horizontally can host a side road
    spots = [i for i in range(1, len(main) - 1) if main[i + 1][2] == main[i][2]]
    if len(spots) < branches:
        return None
    for i in sorted(rng.sample(spots, branches)):
        here, nxt = main[i], main[i + 1]
        taken = HORIZONTAL[(nxt[0] - here[0], nxt[1] - here[1])]
        choices = [k for k in (RF, LF, UP, DOWN) if k != taken and not (k == UP and taken == LF)]
        if taken == RF and DOWN in choices:
            choices.remove(DOWN)
        kind = rng.choice(choices)
        cells = b.segment(here, kind, rng.randint(2, 3))
        if cells is None:
            return None
        if rng.chance(0.5):
            more = b.segment(cells[-1], rng.choice((RF, LF)))
            cells = cells + (more or [])
        junctions.append(here)
        branch_cells.update(cells)
    if branch_cells & main_set:
        return None
    lo_c = min(c[0] for c in b.cubes), min(c[1] for c in b.cubes)
    shift = lambda c: (c[0] - lo_c[0], c[1] - lo_c[1], c[2])  # noqa: E731
    cubes = {shift(c) for c in b.cubes}
    ladders = [Ladder(lad.x - lo_c[0], lad.y - lo_c[1], lad.z_lo, lad.z_hi, lad.face) for lad in b.ladders]
    main = [shift(c) for c in main]
    m = Maze3D(cubes, ladders, main[0], main[-1], main, [shift(c) for c in junctions],
               {shift(c) for c in branch_cells})
    g = walk_graph(m.cubes, m.ladders)
    if not set(main) <= set(g) or not is_tree(g) or find_path(g, m.start, m.goal) != main:
        return None
    if any((c[0], c[1], c[2] + 1) in cubes for c in m.branch_cells):
        return None
    return m


def gen_maze3d(plot: Level, rng: RngStream, branches: int | None = None) -> Maze3D:
    plot = Level.MEDIUM if plot == Level.HARD else plot
    if branches is None:
        branches = 0 if plot == Level.EASY else rng.randint(1, 3)
    best, best_score = None, None
    for i in range(LAYOUT_TRIES):
        m = _layout(plot, rng.fork("layout", i), branches)
        if m is None:
            continue
        score = _occlusion(m.cubes)
        if best is None or score < best_score:
            best, best_score = m, score
        if best_score == 0:
            break
    if best is None:
        raise GenerationError("maze3d: no valid layout")
    return best


# --------------------------------------------------------------------------- analyses


def height_order(m: Maze3D, ids) -> str:
    ids = sorted(ids)
    levels = sorted({m.points[i][2] for i in ids})
    groups = [" = ".join(str(i) for i in ids if m.points[i][2] == z) for z in levels]
    return " < ".join(groups)


def all_orders(ids) -> list[str]:
    """Every weak ordering of ``ids`` in canonical text form."""
    ids = sorted(ids)
    out = set()

    def rec(rest, groups):
        if not rest:
            out.add(" < ".join(" = ".join(map(str, sorted(gp))) for gp in groups))
            return
        for mask in range(1, 1 << len(rest)):
            gp = [rest[k] for k in range(len(rest)) if mask >> k & 1]
            rec([r for r in rest if r not in gp], groups + [gp])

    rec(ids, [])
    return sorted(out)


def traverse(m: Maze3D, route: list[Cube]) -> tuple[list[int], list[str]]:
    """Checkpoints in first-visit order and per-step narration lines for ``route``."""
    g = walk_graph(m.cubes, m.ladders)
    at = {c: i for i, c in m.points.items()}
    lines, seen = [], []
    moves = narrate(g, route)
    n = 0
    for cube, move in zip(route[1:], moves):
        n += 1
        lines.append(f"- Step {n}: {move}")
        if cube in at and at[cube] not in seen:
            seen.append(at[cube])
            n += 1
            lines.append(f"- Step {n}: At checkpoint {at[cube]}")
    return seen, lines


def branch_analysis(m: Maze3D) -> list[tuple[Cube, str, list[str]]]:
    """For each junction: the move toward the goal and the moves into dead ends."""
    g = walk_graph(m.cubes, m.ladders)
    out = []
    for j in m.junctions:
        k = m.main.index(j)
        back = m.main[k - 1]
        good, dead = None, []
        for nb, label in sorted(g[j].items()):
            if nb == back:
                continue
            # exhaustive walk away from the junction
            seen = {j, nb}
            stack = [nb]
            hit = False
            while stack:
                cur = stack.pop()
                if cur == m.goal:
                    hit = True
                for nxt in g[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            if hit:
                good = move_name(label)
            else:
                dead.append(move_name(label))
        if good is None:
            raise GenerationError("junction without a route to the goal")
        out.append((j, good, dead))
    return out


# --------------------------------------------------------------------------- rendering


def scene(m: Maze3D) -> IsoScene:
    vox = {c: CUBE_COLOR for c in m.cubes}
    vox[m.start] = START_COLOR
    vox[m.goal] = GOAL_COLOR
    labels = {}
    for i, c in m.points.items():
        vox[c] = POINT_COLOR
        labels[c] = str(i)
    bx = max(c[0] for c in m.cubes) + 1
    by = max(c[1] for c in m.cubes) + 1
    z0 = min(c[2] for c in m.cubes)
    bz = max(c[2] for c in m.cubes) + 1 - z0
    span = bx + by + bz
    unit = max(20, min(40, 560 // max(span, 1)))
    return IsoScene(vox, list(m.ladders), labels, bounds=(bx, by, bz), origin=(0, 0, z0), unit=unit, pad=16)


# --------------------------------------------------------------------------- tasks


def _number(m: Maze3D, cells: list[Cube], rng: RngStream) -> None:
    ids = rng.shuffled(list(range(1, len(cells) + 1)))
    m.points = dict(zip(ids, cells))


def _task_height(task, m, rng):
    pool = [c for c in m.main[1:-1] if c not in m.junctions]
    if len(pool) < 3:
        raise GenerationError("not enough path cubes for three points")
    picks = sorted(rng.sample(pool, 3), key=m.main.index)
    _number(m, picks, rng)
    ans = height_order(m, [1, 2, 3])
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": all_orders([1, 2, 3])}), task.num_options, rng)
    g = walk_graph(m.cubes, m.ladders)
    lines = ["Analyzing the heights of each point:", ""]
    for a, b in ((1, 2), (1, 3), (2, 3)):
        pa, pb = m.points[a], m.points[b]
        lo, hi = (a, b) if m.main.index(pa) < m.main.index(pb) else (b, a)
        path = find_path(g, m.points[lo], m.points[hi])
        lines.append(f"Comparing points {a} and {b}:")
        lines.append(f" Found a path from {lo} to {hi}:")
        lines.append("")
        lines += [f"  * {s}" for s in narrate(g, path, "blocks")]
        lines.append("")
        za, zb = pa[2], pb[2]
        rel = "same height as" if za == zb else ("higher than" if zb > za else "lower than")
        lines.append(f"- Point {b} is {rel} point {a}")
        lines.append("")
    lines.append(f"Therefore, the correct height relationship is {ans}.")
    q = ("What is the correct height relationship between the three numbered points? "
         "Use '<' for 'lower than' and '=' for 'same height as'.")
    return Derivation(q, "\n".join(lines), ans, scene(m), opts, state=m)


def _seq_text(order) -> str:
    return " -> ".join(["Start", *map(str, order), "Goal"])


def _task_sequence(task, m, rng):
    pool = m.main[1:-1]
    if len(pool) < 4:
        raise GenerationError("path too short for four checkpoints")
    picks = sorted(rng.sample(pool, 4), key=m.main.index)
    _number(m, picks, rng)
    seen, lines = traverse(m, m.main)
    ans = _seq_text(seen)
    every = [_seq_text(p) for p in permutations(range(1, 5))]
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": every}), task.num_options, rng)
    a = "Following the path from start to goal:\n\n" + "\n".join(lines) + f"\n\nTherefore, the correct sequence is {ans}."
    q = "What is the correct sequence of numbered checkpoints when following the path from start to goal?"
    return Derivation(q, a, ans, scene(m), opts, state=m)


SUBSETS = ("None", "1", "2", "3", "1, 2", "1, 3", "2, 3", "1, 2, 3")


def _task_main(task, m, rng):
    on = [c for c in m.main[1:-1]]
    off = sorted(m.branch_cells)
    if not off:
        raise GenerationError("no side road")
    k_on = rng.randint(0, 3)
    k_on = min(k_on, len(on))
    k_off = 3 - k_on
    if k_off > len(off):
        raise GenerationError("side roads too short")
    picks = rng.sample(on, k_on) + rng.sample(off, k_off)
    _number(m, picks, rng)
    seen, lines = traverse(m, m.main)
    passed = sorted(seen)
    ans = ", ".join(map(str, passed)) if passed else "None"
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": list(SUBSETS)}), task.num_options, rng)
    missing = sorted(set(m.points) - set(passed))
    tail = f"Blocks not on main path: {', '.join(map(str, missing))}. " if missing else "Every numbered block lies on the main path. "
    body = (
        "Following the main path from start to goal:\n\n" + "\n".join(lines).replace("At checkpoint", "At block") + "\n\n"
        + tail + f"Therefore, the blocks passed through on the main path are: {ans}."
    )
    q = "Which numbered blocks are passed through when following the most direct path from start to goal?"
    return Derivation(q, body, ans, scene(m), opts, state=m)


def _combo_text(moves) -> str:
    return ", ".join(f"{i}-{mv}" for i, mv in enumerate(moves, 1))


def _task_branches(task, m, rng):
    if len(m.junctions) != 3:
        raise GenerationError("need exactly three junctions")
    m.points = {i: j for i, j in enumerate(m.junctions, 1)}
    info = branch_analysis(m)
    if any(len(dead) != 1 for _, _, dead in info):
        raise GenerationError("every junction must offer exactly two ways forward")
    good = [g for _, g, _ in info]
    pairs = [(g, d[0]) for _, g, d in info]
    ans = _combo_text(good)
    pool = []
    for mask in range(8):
        pool.append(_combo_text([pairs[k][(mask >> k) & 1] for k in range(3)]))
    opts = build_options(ans, DistractorPolicy("CategoricalPool", {"pool": [p for p in pool if p != ans]}),
                         task.num_options, rng)
    lines = ["From the start point, you first meet branch 1, then branch 2, then branch 3, before finally reaching the goal.",
             "", "Analyzing each branch point:", ""]
    for k, (_, g, dead) in enumerate(info, 1):
        where = f"leads to branch {k + 1}" if k < 3 else "leads toward the goal"
        lines.append(f"- At branch {k}, going {g} {where}, while going {dead[0]} leads to a dead end")
        lines.append("")
    lines.append(f"Therefore, the correct sequence is {ans}.")
    q = "Which combination of path choices leads to the goal?"
    return Derivation(q, "\n".join(lines), ans, scene(m), opts, state=m)


_TASKS = {"q1": _task_height, "q2": _task_sequence, "q3": _task_main, "q4": _task_branches}
_BRANCHES = {"q3": None, "q4": 3}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 8, "Height Comparison", "colon", plot_levels=PLOTS),
    TaskSpec(GAME_ID, "q2", SP, Level.MEDIUM, 6, "Sequence Finding", "colon", plot_levels=PLOTS),
    TaskSpec(GAME_ID, "q3", SP, Level.MEDIUM, 8, "Main Path", "colon", plot_levels=(Level.MEDIUM,)),
    TaskSpec(GAME_ID, "q4", SP, Level.HARD, 8, "Path Finding", "colon", plot_levels=(Level.MEDIUM,)),
)


def build(task: TaskSpec, plot: Level, rng: RngStream, budget: int = 30) -> Derivation:
    for attempt in range(budget):
        srng = rng.fork("state", attempt)
        branches = _BRANCHES.get(task.task_id, 0 if plot == Level.EASY else None)
        m = gen_maze3d(plot, srng, branches)
        try:
            d = _TASKS[task.task_id](task, m, rng.fork("qa", attempt))
        except GenerationError:
            continue
        d.intro = intro(m.points)
        return d
    raise GenerationError(f"maze3d {task.task_id}: no suitable maze")


GAME = GameDescriptor(GAME_ID, "3D Maze", TASKS, build, "")
