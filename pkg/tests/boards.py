"""Hand-built boards reproducing the worked examples used as golden inputs.

Each fixture encodes the state stated by the example text.  Where the text
leaves cells unspecified (walls, unrelated pieces) the fixture picks values
consistent with every step of the worked trace.
"""

from __future__ import annotations

from gamesynth.games import langton, starbattle, sudoku, tangram, tictactoe
from gamesynth.games.common import neighbors4
from gamesynth.games.sokoban import SokobanState


def _border(rows: int, cols: int) -> frozenset:
    return frozenset(
        (r, c) for r in range(rows) for c in range(cols) if r in (0, rows - 1) or c in (0, cols - 1)
    )


def sokoban_board() -> SokobanState:
    """8x8 room, walls on the border only; player (1,5), box (4,3), target (5,2)."""
    return SokobanState(8, 8, _border(8, 8), (1, 5), frozenset({(4, 3)}), frozenset({(5, 2)}))


def ant_start() -> langton.AntState:
    return langton.white_board(5, (0, 0), "right")


def ttt_q1() -> tictactoe.TttBoard:
    return tictactoe.TttBoard.from_rows([["O", "O", "X"], ["X", "X", "O"], [" ", "O", "X"]])


def ttt_q2() -> tictactoe.TttBoard:
    return tictactoe.TttBoard.from_rows([[" ", "O", " "], [" ", " ", " "], [" ", "X", "O"]])


def ttt_q3() -> tictactoe.TttBoard:
    return tictactoe.TttBoard.from_rows([[" ", " ", " "], [" ", "X", "O"], [" ", " ", " "]])


_SOL4 = (
    ("red", "green", "blue", "magenta"),
    ("blue", "magenta", "red", "green"),
    ("green", "red", "magenta", "blue"),
    ("magenta", "blue", "green", "red"),
)


def sudoku_sparse() -> sudoku.SudokuBoard:
    """4x4 board whose columns have empties at rows {1,2,3}, {1,4}, {2}, {1,4}."""
    empty = {(1, 1), (2, 1), (3, 1), (1, 2), (4, 2), (2, 3), (1, 4), (4, 4)}
    cells = tuple(
        tuple(None if (r + 1, c + 1) in empty else _SOL4[r][c] for c in range(4)) for r in range(4)
    )
    return sudoku.SudokuBoard(4, 2, 2, cells, sudoku.PALETTE_4, _SOL4)


def sudoku_candidates() -> sudoku.SudokuBoard:
    """9x9 partial board where (7,1) sees every colour but magenta."""
    b = sudoku.empty_board(9)
    placed = {
        # column 1
        (1, 1): "purple", (2, 1): "red", (3, 1): "green", (4, 1): "yellow", (5, 1): "forest green",
        (8, 1): "blue", (9, 1): "aqua",
        # row 7
        (7, 2): "purple", (7, 3): "green", (7, 4): "aqua", (7, 5): "forest green", (7, 6): "gray",
        (7, 7): "yellow", (7, 8): "red",
        # rest of box 7
        (8, 2): "yellow", (8, 3): "gray",
    }
    for pos, col in placed.items():
        b = b.with_color(pos, col)
    return b


def starbattle_final() -> starbattle.StarBattleBoard:
    """8x8 board, one region per row band; seven stars placed, (0,2) left."""
    rows = ["7" * 8] + [str(i) * 8 for i in range(7)]
    stars = {(1, 0), (2, 3), (3, 7), (4, 5), (5, 1), (6, 4), (7, 6)}
    return starbattle.board_from_rows(rows, stars, stars | {(0, 2)})


def _components(cells: set) -> list[frozenset]:
    out = []
    rest = set(cells)
    while rest:
        start = min(rest)
        seen, stack = {start}, [start]
        while stack:
            for nb in neighbors4(stack.pop()):
                if nb in rest and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        out.append(frozenset(seen))
        rest -= seen
    return out


def _tangram(n: int, pieces: dict[int, frozenset], removed: dict[int, frozenset]) -> tangram.TangramBoard:
    hues = {pid: ((pid * 0.13) % 1.0, 0.8, 0.9) for pid in pieces}
    return tangram.TangramBoard(n, pieces, removed, hues)


# Piece 1: rows 0-5 holding 2, 2, 3, 4, 4, 2 cells.  Piece 3: rows 3-7, cols 4-8,
# touching piece 4 along seven edges.  Pieces 1, 2 and 5 are off the board.
_P1 = frozenset(
    [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    + [(3, c) for c in range(4)] + [(4, c) for c in range(4)] + [(5, 0), (5, 1)]
)
_P3 = frozenset(
    [(3, 7), (3, 8)] + [(4, c) for c in range(4, 9)] + [(5, c) for c in range(4, 9)]
    + [(6, c) for c in range(5, 9)] + [(7, 6), (7, 7), (7, 8)]
)
_P4 = frozenset([(6, 4), (7, 4), (7, 5)] + [(8, c) for c in range(4, 9)])


def tangram_nine() -> tangram.TangramBoard:
    all_cells = {(r, c) for r in range(9) for c in range(9)}
    rest = all_cells - _P1 - _P3 - _P4
    top = frozenset(cell for cell in rest if cell[0] <= 3)
    bottom = frozenset(rest - top)
    pieces = {1: _P1, 2: top, 3: _P3, 4: _P4, 5: bottom}
    removed = {pid: tangram.normalize(pieces[pid]) for pid in (1, 2, 5)}
    return _tangram(9, pieces, removed)


_Q2_HOLE = frozenset(
    [(0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (3, 1), (3, 2), (3, 3), (3, 4), (3, 5), (4, 2), (5, 2)]
)


def tangram_rotation() -> tangram.TangramBoard:
    """8x8 board; piece 1 is a 6x6-bounded hole at offset (2,2), shown rotated 90 degrees."""
    p1 = frozenset((r + 2, c + 2) for r, c in _Q2_HOLE)
    rest = {(r, c) for r in range(8) for c in range(8)} - p1
    pieces = {1: p1}
    for i, comp in enumerate(_components(rest), 2):
        pieces[i] = comp
    return _tangram(8, pieces, {1: tangram.rotate_cw(_Q2_HOLE, 90)})


def tangram_placement() -> tangram.TangramBoard:
    """10x10 board; pieces 1 (7x4) and 4 (4x4) removed from a 7x5 hole at rows 0-6, cols 5-9."""
    p4 = frozenset([(0, 5), (1, 5), (2, 5), (3, 5), (0, 6), (0, 7), (0, 8)])
    p1 = frozenset([(0, 9)] + [(r, c) for r in range(1, 7) for c in range(6, 10)])
    p2 = frozenset((r, c) for r in range(10) for c in range(5))
    p3 = frozenset([(r, 5) for r in range(4, 10)] + [(r, c) for r in range(7, 10) for c in range(6, 10)])
    pieces = {1: p1, 2: p2, 3: p3, 4: p4}
    return _tangram(10, pieces, {1: tangram.normalize(p1), 4: tangram.normalize(p4)})
