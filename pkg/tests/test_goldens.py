"""Worked examples: answers plus the intermediate facts their analyses state."""

import pytest

import boards
from goldens import GOLDENS
from gamesynth.games import langton, sokoban, sudoku, tangram, tictactoe


@pytest.mark.parametrize("name,compute,expected", GOLDENS, ids=[g[0] for g in GOLDENS])
def test_golden_answer(name, compute, expected):
    assert compute() == expected


def test_sokoban_blocked_first_move():
    tr = sokoban.apply_sequence(boards.sokoban_board(), ["Up", "Down"])
    first, second = tr.steps
    assert not first.moved and first.reason == "Wall in the way" and first.end == (1, 5)
    assert second.moved and second.end == (2, 5)


def test_sokoban_min_solution_pushes_twice():
    s = boards.sokoban_board()
    tr = sokoban.apply_sequence(s, sokoban.min_solution(s))
    pushes = [o for o in tr.steps if o.box_from is not None]
    assert len(pushes) == 2 and tr.final_state.solved


PAPER_ANT_STEPS = [
    "- Step 1: Ant is on a white cell at (0, 0), facing right. It turns right, changes the cell to black, "
    "moves forward to (1, 0), now facing down.",
    "- Step 2: Ant is on a white cell at (1, 0), facing down. It turns right, changes the cell to black, "
    "moves forward to (1, 4), now facing left.",
    "- Step 5: Ant is on a black cell at (0, 0), facing right. It turns left, changes the cell to white, "
    "moves forward to (4, 0), now facing up.",
    "- Step 6: Ant is on a white cell at (4, 0), facing up. It turns right, changes the cell to black, "
    "moves forward to (4, 1), now facing right.",
]


def test_langton_step_narration_matches_example():
    lines = [langton.step_line(r) for r in langton.ant_simulate(boards.ant_start(), 6).trace]
    for want in PAPER_ANT_STEPS:
        assert want in lines


def test_langton_flip_count_by_rule():
    # the worked example's final state (0,0) facing left, 2 flips, is reached after 8 steps
    sim = langton.ant_simulate(boards.ant_start(), 8, watch=(0, 0))
    assert (sim.final.ant, sim.final.facing, sim.flips) == ((0, 0), "left", 2)


def test_tictactoe_reasons():
    c2 = tictactoe.choose_move(boards.ttt_q2())
    assert tictactoe.current_player(boards.ttt_q2()) == "X"
    assert c2.cell == (0, 0) and c2.rule == "fork"
    b = boards.ttt_q3()
    reply = tictactoe.choose_move(b.place((0, 2), "O"))
    assert reply.rule == "block" and reply.lines == ("Column 2",)
    assert tictactoe.move_option(reply.cell) == "(2, 0) or (2, 1) or (2, 2)"


def test_sudoku_sparse_listing():
    _, listing = sudoku.unit_emptiness(boards.sudoku_sparse(), "col", 1)
    assert listing == [(1, [1, 2, 3]), (2, [1, 4]), (3, [2]), (4, [1, 4])]


def test_sudoku_candidate_constraints():
    b = boards.sudoku_candidates()
    seen = set(b.row_colors((7, 1))) | set(b.col_colors((7, 1))) | set(b.box_colors((7, 1)))
    assert seen == set(sudoku.PALETTE_9) - {"magenta"}


def test_tangram_area_breakdown():
    _, rows = tangram.piece_area(boards.tangram_nine(), 1)
    assert [len(cols) for _, cols in rows] == [2, 2, 3, 4, 4, 2]
    assert rows[0] == (0, [0, 1])


def test_tangram_adjacency_bounds():
    b = boards.tangram_nine()
    assert tangram.dims(b.pieces[3]) == (5, 5)
    assert min(r for r, _ in b.pieces[3]) == 3 and min(c for _, c in b.pieces[3]) == 4
    assert b.owner((6, 4)) == 4 and b.owner((8, 8)) == 4


def test_tangram_zero_rotation_mismatch():
    b = boards.tangram_rotation()
    cell, why = tangram.first_mismatch(b.removed[1], tangram.hole_of(b, 1))
    assert cell == (0, 1) and "hole was empty" in why
    assert tangram.dims(b.removed[1]) == (6, 6)
    assert tangram.fit_text(tangram.rotation_fit(b, 1)) == "rotate 90 degrees counterclockwise"


def test_tangram_two_piece_placement_trace():
    p = tangram.two_piece_placement(boards.tangram_placement(), 1, 4)
    assert (p.a_rect, p.b_rect, p.successes) == ("(0,6) to (6,9)", "(0,5) to (3,8)", 1)
    assert p.lines[:5] == (
        "- upper-left: Attempting to place Piece 1 at (0,5) to (6,8)",
        "  Failed: Cell (4,0) on Removed Pieces plot maps to board position (4,5) which isn't empty",
        "- upper-right: Attempting to place Piece 1 at (0,6) to (6,9)",
        "  Success! Remaining hole dimensions: 4x4",
        "  Then placing Piece 4 at (0,5) to (3,8)",
    )
    assert p.lines[6].startswith("- bottom-left: Since Piece 1 has the same height as the hole")


def test_fixture_boards_are_well_formed():
    for b in (boards.tangram_nine(), boards.tangram_rotation(), boards.tangram_placement()):
        assert b.check() == []
    assert boards.starbattle_final().check() == []
    assert boards.sokoban_board().check() == []
