"""Worked-example answers, each as (name, compute, expected)."""

from __future__ import annotations

import boards
from gamesynth.games import langton, sokoban, starbattle, sudoku, tangram, tictactoe, voxel


def _sokoban_q3():
    moves = ["Up", "Down", "Left", "Up", "Down", "Left", "Left", "Up"]
    return sokoban.apply_sequence(boards.sokoban_board(), moves).final


def _sokoban_q4():
    moves = ["up", "right", "down", "up", "left", "right", "up", "left"]
    return sokoban.box_self_move(boards.sokoban_board(), (4, 3), moves).final


def _sokoban_q5():
    return " → ".join(sokoban.shortest_player_path(boards.sokoban_board(), (1, 5), (1, 6)))


def _ant_q2():
    sim = langton.ant_simulate(boards.ant_start(), 6)
    return sim.final.ant, sim.final.facing


def _ttt_q3():
    b = boards.ttt_q3()
    after = b.place((0, 2), tictactoe.current_player(b))
    return after.winner(), tictactoe.choose_move(after).cell


def _tangram_q4():
    b = boards.tangram_nine()
    return tangram.piece_adjacency(b, 3)


GOLDENS = [
    ("sokoban q3 final position", _sokoban_q3, (1, 2)),
    ("sokoban q4 box position", _sokoban_q4, (2, 3)),
    ("sokoban q2 manhattan distance", lambda: sokoban.manhattan((4, 3), (5, 2)), 2),
    ("sokoban q5 shortest walk", _sokoban_q5, "Right"),
    ("sokoban q6 minimum moves", lambda: len(sokoban.min_solution(boards.sokoban_board())), 8),
    ("langton 6-step state", _ant_q2, ((4, 1), "right")),
    ("langton 12-step flips of (0,0)", lambda: langton.ant_simulate(boards.ant_start(), 12, watch=(0, 0)).flips, 2),
    ("tictactoe q1 colour", lambda: tictactoe.COLOR_OF[boards.ttt_q1()[(0, 0)]], "red"),
    ("tictactoe q2 best move", lambda: tictactoe.optimal_move(boards.ttt_q2()), (0, 0)),
    ("tictactoe q3 reply", _ttt_q3, (None, (2, 2))),
    ("sudoku q3 sparse columns", lambda: sudoku.unit_emptiness(boards.sudoku_sparse(), "col", 1)[0], 3),
    ("sudoku q4 candidates", lambda: sudoku.candidates(boards.sudoku_candidates(), (7, 1)), ["magenta"]),
    ("starbattle q4 final star", lambda: starbattle.final_star(boards.starbattle_final()), (0, 2)),
    ("tangram q3 area", lambda: tangram.piece_area(boards.tangram_nine(), 1)[0], 17),
    ("tangram q4 adjacency", _tangram_q4, {4: 7}),
    ("tangram q2 rotation", lambda: tangram.rotation_fit(boards.tangram_rotation(), 1), frozenset({270})),
    ("voxel q1 count", lambda: voxel.count_voxels({(2, 1, 1), (2, 2, 1)}), 2),
    ("voxel q4 projection", lambda: voxel.project({(2, 2, 1)}, voxel.XZ), ((0, 0, 0), (0, 0, 0), (0, 1, 0))),
]
