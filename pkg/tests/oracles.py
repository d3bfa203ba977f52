"""Independent reference implementations used to cross-check the solvers.

None of these import solver code from the package; they take plain data
(walls, cells, shapes) and recompute the answer the slow, obvious way.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations

import numpy as np

MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))


def sokoban_bfs(rows, cols, walls, player, box, target) -> int | None:
    """Fewest moves putting a single box on its target, by BFS over (player, box)."""
    blocked = set(walls)

    def free(cell):
        r, c = cell
        return 0 <= r < rows and 0 <= c < cols and cell not in blocked

    start = (player, box)
    dist = {start: 0}
    q = deque([start])
    while q:
        pl, bx = q.popleft()
        if bx == target:
            return dist[(pl, bx)]
        for dr, dc in MOVES:
            nxt = (pl[0] + dr, pl[1] + dc)
            if not free(nxt):
                continue
            nb = bx
            if nxt == bx:
                nb = (bx[0] + dr, bx[1] + dc)
                if not free(nb):
                    continue
            state = (nxt, nb)
            if state not in dist:
                dist[state] = dist[(pl, bx)] + 1
                q.append(state)
    return None


# ----------------------------------------------------------------- voxel completion

_ALL = [(x, y, z) for x in range(1, 4) for y in range(1, 4) for z in range(1, 4)]
_BIT = {v: i for i, v in enumerate(_ALL)}


def _proj_bits(v):
    x, y, z = v
    return 1 << ((y - 1) * 3 + (z - 1)), 1 << ((x - 1) * 3 + (z - 1))


def _matrix_bits(m) -> int:
    """Bit mask of a 3x3 matrix whose rows run z=3..1 and columns 1..3."""
    out = 0
    for ri, row in enumerate(m):
        z = 3 - ri
        for ci, val in enumerate(row):
            if val:
                out |= 1 << (ci * 3 + (z - 1))
    return out


def _connected(cells) -> bool:
    cells = set(cells)
    start = next(iter(cells))
    seen = {start}
    q = deque([start])
    while q:
        x, y, z = q.popleft()
        for d in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            n = (x + d[0], y + d[1], z + d[2])
            if n in cells and n not in seen:
                seen.add(n)
                q.append(n)
    return len(seen) == len(cells)


def voxel_min_additions(occupied, target_yz, target_xz, limit: int) -> int | None:
    """Smallest subset of empty cells (size <= limit) giving both projections, connected."""
    occ = set(occupied)
    want_yz, want_xz = _matrix_bits(target_yz), _matrix_bits(target_xz)
    base_yz = base_xz = 0
    for v in occ:
        a, b = _proj_bits(v)
        base_yz |= a
        base_xz |= b
    empty = [v for v in _ALL if v not in occ]
    bits = [_proj_bits(v) for v in empty]
    for k in range(0, limit + 1):
        for combo in combinations(range(len(empty)), k):
            yz, xz = base_yz, base_xz
            for i in combo:
                yz |= bits[i][0]
                xz |= bits[i][1]
            if yz != want_yz or xz != want_xz:
                continue
            if _connected(occ | {empty[i] for i in combo}):
                return k
    return None


# ----------------------------------------------------------------- tangram rotation


def _bitmap(cells) -> np.ndarray:
    rs = [r for r, _ in cells]
    cs = [c for _, c in cells]
    r0, c0 = min(rs), min(cs)
    m = np.zeros((max(rs) - r0 + 1, max(cs) - c0 + 1), dtype=bool)
    for r, c in cells:
        m[r - r0, c - c0] = True
    return m


def _fits_somewhere(shape: np.ndarray, hole: set, n: int) -> bool:
    h, w = shape.shape
    for top in range(n - h + 1):
        for left in range(n - w + 1):
            placed = {(top + r, left + c) for r, c in zip(*np.nonzero(shape))}
            if placed == hole:
                return True
    return False


def rotation_verdict(shown_cells, hole_cells, n: int):
    """Clockwise rotations (degrees) under which the shown piece exactly fills the hole,
    or "flipped" if only a mirrored copy does, or None if nothing fits."""
    shape = _bitmap(shown_cells)
    hole = set(hole_cells)
    fits = frozenset(
        deg for deg in (0, 90, 180, 270) if _fits_somewhere(np.rot90(shape, -deg // 90), hole, n)
    )
    if fits:
        return fits
    flipped = np.fliplr(shape)
    if any(_fits_somewhere(np.rot90(flipped, -k), hole, n) for k in range(4)):
        return "flipped"
    return None
