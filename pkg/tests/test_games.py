"""Every task builds valid samples; generated states satisfy their game's invariants."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamesynth.core import LEVELS, Level, validate_sample
from gamesynth.games import (
    colorhue,
    default_registry,
    langton,
    maze,
    maze3d,
    sokoban,
    starbattle,
    sudoku,
    tangram,
    tictactoe,
    voxel,
)
from gamesynth.pipeline import GenerationConfig, WorkItem, produce
from gamesynth.qa import extract_final_answer
from gamesynth.rng import derive_rng

_REG = default_registry()
_CASES = [(t.game_id, t.task_id, lv) for t in _REG.all_tasks() for lv in t.plot_levels]


@pytest.mark.parametrize("game_id,task_id,plot", _CASES, ids=[f"{g}-{t}-{p.initial}" for g, t, p in _CASES])
def test_task_builds_valid_samples(game_id, task_id, plot, tmp_path):
    cfg = GenerationConfig(master_seed=11, output_dir=tmp_path, plot_mix={plot: 1.0})
    task = _REG.task(game_id, task_id)
    for i in range(3):
        p = produce(_REG, cfg, WorkItem(game_id, task_id, i))
        assert p.error is None, p.error
        s = p.sample
        assert s.plot_level == plot.value
        assert validate_sample(s, task) == []
        got = extract_final_answer(s.analysis, task.answer_mode)
        assert got == s.answer
        assert p.png[:8] == b"\x89PNG\r\n\x1a\n"


def test_mcq_tasks_declare_expected_option_counts():
    cfg = GenerationConfig(master_seed=5)
    for task in _REG.all_tasks():
        if not task.is_mcq:
            continue
        p = produce(_REG, cfg, WorkItem(task.game_id, task.task_id, 0))
        assert len(p.sample.options) == task.option_count(Level(p.sample.plot_level))


seeds = st.integers(0, 10**9)
levels = st.sampled_from(LEVELS)
few = settings(max_examples=20, deadline=None)


@given(seeds, levels)
@few
def test_sokoban_generated_rooms_are_solvable(seed, plot):
    s = sokoban.gen_sokoban(plot, derive_rng(seed, ["soko"]))
    assert s.check() == []
    plan = sokoban.min_solution(s)
    assert plan is not None and len(plan) >= 2
    assert sokoban.apply_sequence(s, plan).final_state.solved


@given(seeds, levels)
@few
def test_tictactoe_boards_are_legal_and_undecided(seed, plot):
    b = tictactoe.gen_board(plot, derive_rng(seed, ["ttt"]))
    me = tictactoe.current_player(b)
    assert b.winner() is None
    choice = tictactoe.choose_move(b)
    if b.empties():
        assert choice.cell in b.empties()
        after = b.place(choice.cell, me)
        # a move that can win must win
        if choice.rule == "win":
            assert after.winner() == me


@given(seeds, levels)
@few
def test_sudoku_candidates_contain_the_solution(seed, plot):
    b = sudoku.gen_sudoku(plot, derive_rng(seed, ["sudoku"]))
    assert b.check() == []
    for r, c in b.empties():
        assert b.solution[r - 1][c - 1] in sudoku.candidates(b, (r, c))


@given(seeds, levels)
@few
def test_starbattle_final_star_completes_solution(seed, plot):
    rng = derive_rng(seed, ["star"])
    n = starbattle.SIZES[plot]
    b = starbattle.gen_starbattle(plot, rng, placed=n - 1)
    assert b.check() == []
    (missing,) = b.full_solution - b.stars
    assert starbattle.final_star(b) == missing
    assert starbattle.placeable(b, missing).ok


@given(seeds, levels)
@few
def test_maze_goal_reachable_and_path_consistent(seed, plot):
    m = maze.gen_maze(plot, derive_rng(seed, ["maze"]))
    path, moves, turns = maze.path_and_turns(m)
    assert path[0] == m.player and path[-1] == m.goal
    assert m.n / 2 <= len(moves) <= 3 * m.n
    assert all(cell in m.open for cell in path)
    assert turns <= max(0, len(moves) - 1)


@given(seeds, levels, st.integers(1, 30))
@few
def test_langton_flips_bounded_by_visits(seed, plot, steps):
    s = langton.gen_ant(plot, derive_rng(seed, ["ant"]))
    sim = langton.ant_simulate(s, steps, watch=s.ant)
    visits = sum(rec.at == s.ant for rec in sim.trace)
    assert sim.flips == visits
    assert len(sim.trace) == steps


@given(seeds, levels)
@few
def test_tangram_partition_and_fit(seed, plot):
    b = tangram.gen_tangram(plot, derive_rng(seed, ["tg"]))
    assert b.check() == []
    assert 1 <= len(b.removed) <= 2
    for pid, shape in b.removed.items():
        assert len(shape) == len(b.pieces[pid])
        assert tangram.rotation_fit(b, pid) not in (None, frozenset())


@given(seeds, levels)
@few
def test_voxel_hidden_structure_meets_targets(seed, plot):
    p = voxel.gen_voxel_puzzle(plot, derive_rng(seed, ["vox"]))
    assert p.matches(p.hidden) == (True, True)
    assert voxel.face_connected(p.occupied) and p.occupied < p.hidden
    k, extra = voxel.min_completion(p)
    assert k <= p.limit
    assert voxel.check_sequence(p, voxel.placement_order(p.occupied, extra)).solves


@given(seeds, st.sampled_from([Level.EASY, Level.MEDIUM]))
@few
def test_maze3d_walk_graph_is_a_tree(seed, plot):
    m = maze3d.gen_maze3d(plot, derive_rng(seed, ["m3"]))
    g = maze3d.walk_graph(m.cubes, m.ladders)
    assert maze3d.is_tree(g)
    route = maze3d.find_path(g, m.start, m.goal)
    assert route is not None and route[0] == m.start and route[-1] == m.goal
    assert route == m.main
    if plot == Level.EASY:
        assert m.junctions == []


def test_maze3d_hard_is_medium():
    a = maze3d.gen_maze3d(Level.HARD, derive_rng(3, ["alias"]))
    b = maze3d.gen_maze3d(Level.MEDIUM, derive_rng(3, ["alias"]))
    assert a == b


@given(seeds, levels)
@few
def test_colorhue_gradients_exact_and_blanks_interior(seed, plot):
    g = colorhue.gen_hue(plot, derive_rng(seed, ["hue"]))
    assert g.residual() == pytest.approx(0.0, abs=1e-12)
    assert 1 <= len(g.labeled_blanks) <= 3
    for label, cell in g.labeled_blanks.items():
        assert g.cells[cell] is None
        grad, k = g.gradient_of(cell)
        assert 0 < k < g.n - 1
        _, name = colorhue.hue_fill_answer(g, label)
        assert name == colorhue.hsv_name(grad.color_at(g.n, k))
