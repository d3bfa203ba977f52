from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, TypeVar

Cell = tuple[int, int]
N = TypeVar("N", bound=Hashable)

# Order matters: BFS expansions and therefore tie-breaks follow it.
DIRS: dict[str, Cell] = {"Up": (-1, 0), "Down": (1, 0), "Left": (0, -1), "Right": (0, 1)}
DIR_ORDER = tuple(DIRS)


class GenerationError(RuntimeError):
    """Raised when a generator exhausts its retry budget; callers resample."""


def step(cell: Cell, d: str) -> Cell:
    dr, dc = DIRS[d]
    return (cell[0] + dr, cell[1] + dc)


def fmt_cell(cell: Cell) -> str:
    return f"({cell[0]}, {cell[1]})"


def fmt_cells(cells: Iterable[Cell]) -> str:
    return ", ".join(fmt_cell(c) for c in cells)


def neighbors4(cell: Cell) -> list[Cell]:
    r, c = cell
    return [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]


def bfs_path(start: N, goal: Callable[[N], bool], successors: Callable[[N], Iterable[tuple[object, N]]]):
    """Breadth-first search; returns (list of edge labels, list of nodes) or None.

    Successors are expanded in the order yielded, which fixes tie-breaking.
    """
    if goal(start):
        return [], [start]
    parent: dict[N, tuple[N, object] | None] = {start: None}
    q = deque([start])
    while q:
        node = q.popleft()
        for label, nxt in successors(node):
            if nxt in parent:
                continue
            parent[nxt] = (node, label)
            if goal(nxt):
                labels: list[object] = []
                nodes = [nxt]
                cur = nxt
                while parent[cur] is not None:
                    prev, lab = parent[cur]  # type: ignore[misc]
                    labels.append(lab)
                    nodes.append(prev)
                    cur = prev
                return labels[::-1], nodes[::-1]
            q.append(nxt)
    return None


def connected(cells: set[Cell]) -> bool:
    if not cells:
        return True
    start = next(iter(sorted(cells)))
    seen = {start}
    q = deque([start])
    while q:
        cur = q.popleft()
        for n in neighbors4(cur):
            if n in cells and n not in seen:
                seen.add(n)
                q.append(n)
    return len(seen) == len(cells)


def word_count(text: str) -> int:
    return len(text.split())
