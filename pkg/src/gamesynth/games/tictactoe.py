"""TicTacToe: rule-cascade move choice and the three question types."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SO, TP, GameDescriptor, Level, TaskSpec
from ..qa import Derivation, fixed_options
from ..render import CellPaint, TileGrid
from ..rng import RngStream
from .common import Cell, GenerationError, fmt_cell

GAME_ID = "tictactoe"
EMPTY = " "
CELLS: tuple[Cell, ...] = tuple((r, c) for r in range(3) for c in range(3))

# Piece counts on the generated board per plot level.
PIECES = {Level.EASY: (2, 3), Level.MEDIUM: (4, 5), Level.HARD: (6, 7)}

LINES: tuple[tuple[str, tuple[Cell, Cell, Cell]], ...] = (
    *((f"Row {r}", ((r, 0), (r, 1), (r, 2))) for r in range(3)),
    *((f"Column {c}", ((0, c), (1, c), (2, c))) for c in range(3)),
    ("Top-left to bottom-right diagonal", ((0, 0), (1, 1), (2, 2))),
    ("Top-right to bottom-left diagonal", ((0, 2), (1, 1), (2, 0))),
)

COLOR_OF = {"O": "red", "X": "blue", EMPTY: "white"}
COLOR_OPTIONS = ("red", "blue", "white")
NONE = "None"
LAST_ROW = "(2, 0) or (2, 1) or (2, 2)"
MOVE_OPTIONS = (NONE, *(fmt_cell(c) for c in CELLS[:6]), LAST_ROW)

INTRO = (
    "Tic-Tac-Toe is a classic two-player game played on a 3x3 grid, (row, col) from (0, 0) to (2, 2). "
    "Players take turns marking a space in the grid, one using **O** (the red block) and the other using "
    "**X** (the blue block). In each game, player **O** starts first. The objective is to be the first to "
    "get three of your marks in a row (horizontally, vertically, or diagonally). If all nine squares are "
    "filled without either player achieving this, the game ends in a draw. Notice: the current player to "
    "make a move should be inferred from the number of pieces for each players on the board. When inferring "
    "the optimal move, if optimal move can be inferred by some rules, choose the optimal move. Otherwise, "
    "choose the first move. (The order of choices is (0, 0), (0, 1), (0, 2), (1, 0), ..., (2, 2), choose "
    "the first move that is not occupied)"
)


class BoardError(ValueError):
    pass


@dataclass(frozen=True)
class TttBoard:
    cells: tuple[tuple[str, str, str], ...]

    @classmethod
    def from_rows(cls, rows) -> "TttBoard":
        norm = tuple(tuple(EMPTY if v in ("", "_", None, EMPTY) else str(v) for v in row) for row in rows)
        if len(norm) != 3 or any(len(r) != 3 for r in norm):
            raise BoardError("board must be 3x3")
        if any(v not in ("O", "X", EMPTY) for r in norm for v in r):
            raise BoardError("cells must be O, X or empty")
        return cls(norm)  # type: ignore[arg-type]

    def __getitem__(self, cell: Cell) -> str:
        return self.cells[cell[0]][cell[1]]

    def count(self, mark: str) -> int:
        return sum(v == mark for r in self.cells for v in r)

    def empties(self) -> list[Cell]:
        return [c for c in CELLS if self[c] == EMPTY]

    def place(self, cell: Cell, mark: str) -> "TttBoard":
        rows = [list(r) for r in self.cells]
        rows[cell[0]][cell[1]] = mark
        return TttBoard.from_rows(rows)

    def winner(self) -> str | None:
        for _, line in LINES:
            vals = {self[c] for c in line}
            if len(vals) == 1 and EMPTY not in vals:
                return vals.pop()
        return None

    def __str__(self) -> str:
        return str([list(r) for r in self.cells])


def current_player(b: TttBoard) -> str:
    diff = b.count("O") - b.count("X")
    if diff not in (0, 1):
        raise BoardError(f"illegal piece counts: O={b.count('O')}, X={b.count('X')}")
    return "O" if diff == 0 else "X"


def other(mark: str) -> str:
    return "X" if mark == "O" else "O"


@dataclass(frozen=True)
class MoveChoice:
    cell: Cell | None
    rule: str  # win | block | fork | first | none
    lines: tuple[str, ...] = ()


def _completing(b: TttBoard, mark: str) -> list[tuple[Cell, str]]:
    out = []
    for cell in b.empties():
        for name, line in LINES:
            if cell in line and all(b[c] == mark for c in line if c != cell):
                out.append((cell, name))
    return out


def choose_move(b: TttBoard, player: str | None = None) -> MoveChoice:
    """Rule cascade: win, block, block a fork, else the first empty cell (all row-major)."""
    me = player or current_player(b)
    opp = other(me)
    empties = b.empties()
    if not empties:
        return MoveChoice(None, "none")
    wins = _completing(b, me)
    if wins:
        cell = wins[0][0]
        return MoveChoice(cell, "win", tuple(n for c, n in wins if c == cell))
    threats = _completing(b, opp)
    if threats:
        cell = threats[0][0]
        return MoveChoice(cell, "block", tuple(n for c, n in threats if c == cell))
    best, best_lines = None, ()
    for cell in empties:
        lines = tuple(
            name
            for name, line in LINES
            if cell in line
            and sum(b[c] == opp for c in line) == 1
            and not any(b[c] == me for c in line)
        )
        if len(lines) > len(best_lines):
            best, best_lines = cell, lines
    if best is not None and len(best_lines) >= 2:
        return MoveChoice(best, "fork", best_lines)
    return MoveChoice(empties[0], "first")


def optimal_move(b: TttBoard) -> Cell | None:
    return choose_move(b).cell


def move_option(cell: Cell | None) -> str:
    if cell is None:
        return NONE
    return LAST_ROW if cell[0] == 2 else fmt_cell(cell)


def gen_board(plot: Level, rng: RngStream, budget: int = 200) -> TttBoard:
    lo, hi = PIECES[plot]
    for _ in range(budget):
        pieces = rng.randint(lo, hi)
        b = TttBoard.from_rows([[EMPTY] * 3 for _ in range(3)])
        ok = True
        for i in range(pieces):
            b = b.place(rng.choice(b.empties()), "O" if i % 2 == 0 else "X")
            if b.winner():
                ok = False
                break
        if ok:
            return b
    raise GenerationError("tictactoe: no undecided board found")


def scene(b: TttBoard) -> TileGrid:
    cells = {c: CellPaint(fill=COLOR_OF[b[c]]) for c in CELLS}
    return TileGrid(3, 3, cells, cell_px=120, grid_color="black")


def _line_list(lines: tuple[str, ...]) -> str:
    return " and ".join(lines)


def explain(b: TttBoard, choice: MoveChoice, me: str) -> str:
    opp = other(me)
    head = f"Current player is {me}, opponent is {opp}. "
    if choice.rule == "win":
        return head + f"Can win immediately on {_line_list(choice.lines)}, so player {me} should choose position {fmt_cell(choice.cell)}."
    if choice.rule == "block":
        return head + f"Must block opponent {opp}'s winning threat on {_line_list(choice.lines)}, so player {me} should choose position {fmt_cell(choice.cell)}."
    if choice.rule == "fork":
        return head + (
            f"Must block opponent {opp}'s potential double threat on {_line_list(choice.lines)}, "
            f"so player {me} should choose position {fmt_cell(choice.cell)}."
        )
    if choice.rule == "first":
        return head + (
            "No winning move, winning threat or double threat can be found, so choose the first move that is "
            f"not occupied, and player {me} should choose position {fmt_cell(choice.cell)}."
        )
    return head + "The board is full, so no move exists."


def _who_moves(b: TttBoard) -> str:
    o, x = b.count("O"), b.count("X")
    me = current_player(b)
    return (
        f"The current board is {b}. Since the player \"O\" plays first in each game, if the count of \"O\" is "
        "the same as \"X\", the current player is \"O\". Otherwise, the current player is \"X\". "
        f"The count of \"O\" is {o} and the count of \"X\" is {x}, so the player now is {me}."
    )


def _task_color(task, b, rng):
    cell = rng.choice(CELLS)
    mark = b[cell]
    col = COLOR_OF[mark]
    if mark == EMPTY:
        seen = "is empty, and an empty block is white"
    else:
        seen = f"is \"{mark}\", and the color matching \"{mark}\" is {col}"
    a = f"The current board is {b}. The block at {fmt_cell(cell)} {seen}, so the block at {fmt_cell(cell)} is {col}."
    q = f"What is the color of the block at {fmt_cell(cell)}?"
    return Derivation(q, a, col, scene(b), fixed_options(COLOR_OPTIONS, col), state=b)


def _task_best(task, b, rng):
    me = current_player(b)
    choice = choose_move(b)
    a = _who_moves(b) + " " + explain(b, choice, me)
    ans = move_option(choice.cell)
    q = 'What is the optimal move for the current player? If no move exists, choose the answer "None".'
    return Derivation(q, a, ans, scene(b), fixed_options(MOVE_OPTIONS, ans), state=b)


def _task_reply(task, b, rng):
    me = current_player(b)
    cell = rng.choice(CELLS)
    q = (
        f"If the current player moves to {fmt_cell(cell)}, will this move be successful? If not, choose the answer "
        '"None". If successful, will the current player win immediately? If yes, choose the answer "None". '
        "Otherwise, what is the opponent's optimal move following this step?"
    )
    if b[cell] != EMPTY:
        a = (
            f"The current board is {b}. The block at {fmt_cell(cell)} is already occupied by \"{b[cell]}\", "
            "so this move will not be successful, and the answer is None."
        )
        ans = NONE
    else:
        after = b.place(cell, me)
        a = "Yes, this move will be successful. " + _who_moves(b) + " "
        if after.winner() == me:
            a += f"Since the current player {me} moves to {fmt_cell(cell)}, the current player will win immediately, so the answer is None."
            ans = NONE
        else:
            a += f"Since the current player {me} moves to {fmt_cell(cell)}, the current player won't win immediately. After that, "
            choice = choose_move(after, other(me))
            text = explain(after, choice, other(me))
            a += text[0].lower() + text[1:]
            ans = move_option(choice.cell)
    return Derivation(q, a, ans, scene(b), fixed_options(MOVE_OPTIONS, ans), state=b)


_TASKS = {"q1": _task_color, "q2": _task_best, "q3": _task_reply}

TASKS = (
    TaskSpec(GAME_ID, "q1", TP, Level.EASY, 3, "Questions about the current state of a specific block of the board", "letter"),
    TaskSpec(GAME_ID, "q2", SO, Level.MEDIUM, 8, "The optimal move for the current player", "letter"),
    TaskSpec(GAME_ID, "q3", SO, Level.HARD, 8, "The opponent's optimal reply after a given move", "letter"),
)


def build(task: TaskSpec, plot: Level, rng: RngStream) -> Derivation:
    b = gen_board(plot, rng.fork("state"))
    return _TASKS[task.task_id](task, b, rng.fork("qa"))


GAME = GameDescriptor(GAME_ID, "TicTacToe", TASKS, build, INTRO)
