"""Solver output against the independent reference implementations."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gamesynth.core import LEVELS
from gamesynth.games import sokoban, tangram, voxel
from gamesynth.rng import derive_rng


def random_sokoban(rng, max_side: int = 6) -> sokoban.SokobanState:
    """Small single-box room with random interior walls; may be unsolvable."""
    rows, cols = rng.randint(4, max_side), rng.randint(4, max_side)
    border = {(r, c) for r in range(rows) for c in range(cols) if r in (0, rows - 1) or c in (0, cols - 1)}
    interior = [(r, c) for r in range(1, rows - 1) for c in range(1, cols - 1)]
    inner_walls = {cell for cell in interior if rng.chance(0.15)}
    free = [cell for cell in interior if cell not in inner_walls]
    if len(free) < 3:
        inner_walls, free = set(), interior
    walls = border | inner_walls
    player, box, target = rng.sample(free, 3)
    return sokoban.SokobanState(rows, cols, frozenset(walls), player, frozenset({box}), frozenset({target}))


def sokoban_pairs(n_solvable: int, salt: str = "oracle"):
    """Random rooms until ``n_solvable`` of them are solvable; unsolvable ones are yielded too."""
    i = found = 0
    while found < n_solvable:
        s = random_sokoban(derive_rng(2024, ["soko", salt, i]))
        i += 1
        sol = sokoban.min_solution(s)
        (box,), (target,) = s.boxes, s.targets
        ref = oracles.sokoban_bfs(s.rows, s.cols, s.walls, s.player, box, target)
        found += ref is not None
        yield s, (None if sol is None else len(sol)), ref


def voxel_pairs(n: int, salt: str = "oracle", max_limit: int = 4):
    i = 0
    found = 0
    while found < n:
        rng = derive_rng(2024, ["vox", salt, i])
        p = voxel.gen_voxel_puzzle(LEVELS[i % 3], rng)
        i += 1
        if p.limit > max_limit:
            continue
        found += 1
        try:
            got = voxel.min_completion(p)[0]
        except voxel.Infeasible:
            got = None
        yield p, got, oracles.voxel_min_additions(p.occupied, p.target_yz, p.target_xz, p.limit)


def tangram_pairs(n: int, salt: str = "oracle"):
    for i in range(n):
        b = tangram.gen_tangram(LEVELS[i % 3], derive_rng(2024, ["tg", salt, i]), removed=1)
        (pid,) = b.removed
        yield b, tangram.rotation_fit(b, pid), oracles.rotation_verdict(b.removed[pid], b.pieces[pid], b.n)


def test_sokoban_matches_bfs_reference():
    pairs = list(sokoban_pairs(30, "unit"))
    assert all(got == ref for _, got, ref in pairs)
    assert any(ref is None for _, _, ref in pairs)


def test_sokoban_solution_actually_solves():
    for s, got, _ in sokoban_pairs(20, "replay"):
        if got is None:
            continue
        assert sokoban.apply_sequence(s, sokoban.min_solution(s)).final_state.solved


def test_voxel_matches_subset_reference():
    assert all(got == ref for _, got, ref in voxel_pairs(60, "unit"))


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_voxel_tight_limit_agrees(salt):
    # lowering the limit below the optimum must make both searches give up
    p = voxel.gen_voxel_puzzle(LEVELS[salt % 3], derive_rng(salt, ["tight"]))
    k, extra = voxel.min_completion(p)
    assert voxel.check_sequence(p, voxel.placement_order(p.occupied, extra)).solves
    if k == 0:
        return
    tight = voxel.VoxelPuzzle(p.occupied, k - 1, p.target_yz, p.target_xz, p.hidden)
    with pytest.raises(voxel.Infeasible):
        voxel.min_completion(tight)
    assert oracles.voxel_min_additions(tight.occupied, tight.target_yz, tight.target_xz, tight.limit) is None


def test_voxel_frozen_solution():
    p = voxel.VoxelPuzzle(
        frozenset({(2, 2, 1)}), 2,
        voxel.project({(2, 2, 1), (2, 2, 2), (3, 2, 1)}, voxel.YZ),
        voxel.project({(2, 2, 1), (2, 2, 2), (3, 2, 1)}, voxel.XZ),
    )
    assert voxel.min_completion(p) == (2, ((2, 2, 2), (3, 2, 1)))


def test_tangram_matches_placement_reference():
    assert all(got == ref for _, got, ref in tangram_pairs(40, "unit"))


def test_tangram_symmetric_pieces():
    square = frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})
    bar = frozenset({(0, 0), (0, 1), (0, 2)})
    assert oracles.rotation_verdict(square, square, 2) == frozenset({0, 90, 180, 270})
    assert oracles.rotation_verdict(bar, bar, 3) == frozenset({0, 180})
    ell = frozenset({(0, 0), (1, 0), (1, 1), (1, 2)})
    assert oracles.rotation_verdict(tangram.mirror(ell), ell, 3) == "flipped"
