"""Acceptance criteria; each test records one PASS/FAIL line before asserting."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import replace
from pathlib import Path

import pytest

from goldens import GOLDENS
from test_oracles import sokoban_pairs, tangram_pairs, voxel_pairs
from gamesynth.cli import EXIT_OK, main
from gamesynth.core import QaCategory, Level, validate_sample
from gamesynth.pipeline import GenerationConfig, generate, read_samples
from gamesynth.qa import DistractorPolicy, build_options, extract_final_answer
from gamesynth.quality import (
    DROP_REPETITION,
    FilterConfig,
    apply_filters,
    compute_stats,
    drop_reasons,
    repetition_rate_4gram,
)
from gamesynth.rng import derive_rng

pytestmark = pytest.mark.slow


def test_criterion_1_goldens(criterion):
    t0 = time.perf_counter()
    wrong = []
    for name, compute, expected in GOLDENS:
        got = compute()
        if got != expected:
            wrong.append(f"{name}: got {got!r}, expected {expected!r}")
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 1.0
    criterion(1, ok, f"{len(GOLDENS) - len(wrong)}/{len(GOLDENS)} worked examples in {dt:.3f}s"
              + (f"; mismatched: {'; '.join(wrong)}" if wrong else ""))
    assert ok, wrong


def test_criterion_2_oracles(criterion):
    parts, ok = [], True
    t0 = time.perf_counter()
    soko = list(sokoban_pairs(100, "acceptance"))
    dt = time.perf_counter() - t0
    bad = sum(got != ref for _, got, ref in soko)
    solvable = sum(ref is not None for _, _, ref in soko)
    ok &= bad == 0 and solvable == 100 and dt < 30
    parts.append(f"sokoban {solvable} solvable of {len(soko)} rooms, {bad} mismatches, {dt:.2f}s")

    t0 = time.perf_counter()
    vox = list(voxel_pairs(200, "acceptance"))
    dt = time.perf_counter() - t0
    bad = sum(got != ref for _, got, ref in vox)
    ok &= bad == 0 and len(vox) == 200 and dt < 60
    parts.append(f"voxel 200 puzzles, {bad} mismatches, {dt:.2f}s")

    t0 = time.perf_counter()
    tg = list(tangram_pairs(100, "acceptance"))
    dt = time.perf_counter() - t0
    bad = sum(got != ref for _, got, ref in tg)
    ok &= bad == 0 and dt < 10
    parts.append(f"tangram 100 boards, {bad} mismatches, {dt:.2f}s")
    criterion(2, ok, "; ".join(parts))
    assert ok


def _tree_bytes(root: Path) -> dict[str, bytes]:
    files = [root / "samples.jsonl", *sorted((root / "images").iterdir())]
    return {p.name: p.read_bytes() for p in files}


def test_criterion_3_determinism(criterion, tmp_path):
    args = ["generate", "--seed", "20240601", "--per-task", "23"]
    t0 = time.perf_counter()
    assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
    dt = time.perf_counter() - t0
    assert main([*args, "--out", str(tmp_path / "b")]) == EXIT_OK
    a, b = _tree_bytes(tmp_path / "a"), _tree_bytes(tmp_path / "b")
    n = len(read_samples(tmp_path / "a"))
    same = a == b
    ok = same and n >= 1000 and dt < 300
    criterion(3, ok, f"{n} samples, {len(a) - 1} PNGs, byte-identical={same}, one run {dt:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    cfg = GenerationConfig(master_seed=31337, per_task=67, output_dir=str(out))
    return out, generate(cfg)


def test_criterion_4_consistency_sweep(criterion, sweep, registry):
    out, res = sweep
    produced = res.kept + [d.sample for d in res.dropped]
    failures = mismatches = 0
    for s in produced:
        task = registry.task(s.game_id, s.task_id)
        failures += bool(validate_sample(s, task))
        mismatches += extract_final_answer(s.analysis, task.answer_mode) != s.answer
    ok = len(produced) >= 3000 and failures == 0 and mismatches == 0 and res.ok
    criterion(4, ok, f"{len(produced)} samples ({len(res.skipped)} skipped of {res.total}), "
              f"{failures} validation failures, {mismatches} answer mismatches")
    assert ok


def test_criterion_5_filters(criterion, sweep):
    out, _ = sweep
    clean = read_samples(out)[:300]
    text = " ".join(["a b c d"] * 10)
    rate = repetition_rate_4gram(text)
    injected = replace(clean[0], id="injected", analysis=text)
    reasons = drop_reasons(injected, FilterConfig(max_repetition=0.70))
    kept, dropped = apply_filters(clean + [injected], FilterConfig(max_repetition=0.70))
    kept_clean, dropped_clean = apply_filters(clean)
    again, dropped_again = apply_filters(kept)
    ok = (
        rate == pytest.approx(33 / 37)
        and DROP_REPETITION in reasons
        and [d.sample.id for d in dropped] == ["injected"]
        and dropped_clean == [] and kept_clean == clean
        and again == kept and dropped_again == []
    )
    criterion(5, ok, f"rate {rate:.3f} (hand count 33/37), injected dropped for {reasons}, "
              f"clean drops {len(dropped_clean)}, idempotent={again == kept}")
    assert ok


def test_criterion_6_dataset_shape(criterion, sweep):
    out, _ = sweep
    r = compute_stats(read_samples(out), out)
    side = (r.avg_image_width + r.avg_image_height) / 2
    ok = 6.5 <= r.avg_choices <= 7.5 and 300 <= side <= 700
    criterion(6, ok, f"avg choices {r.avg_choices:.2f}, avg image {r.avg_image_width:.0f}x{r.avg_image_height:.0f} "
              f"(side {side:.0f}px)")
    assert ok


_T, _S, _O = "Target Perception", "State Prediction", "Strategy Optimization"
# per game: (category, QA level) for q1, q2, ... as listed in each game's question table
TASK_TABLE = {
    "sokoban": [(_T, "Easy"), (_T, "Easy"), (_S, "Medium"), (_S, "Medium"), (_O, "Hard"), (_O, "Hard")],
    "maze": [(_T, "Easy"), (_T, "Easy"), (_T, "Easy"), (_S, "Medium"), (_O, "Hard"), (_O, "Hard")],
    "tictactoe": [(_T, "Easy"), (_O, "Medium"), (_O, "Hard")],
    "sudoku": [(_T, "Easy"), (_T, "Easy"), (_T, "Medium"), (_S, "Medium"), (_S, "Hard")],
    "starbattle": [(_T, "Easy"), (_T, "Easy"), (_S, "Medium"), (_S, "Hard")],
    "langton": [(_T, "Easy"), (_S, "Medium"), (_S, "Hard")],
    "tangram": [(_T, "Easy"), (_S, "Medium"), (_T, "Medium"), (_T, "Medium"), (_S, "Hard")],
    "colorhue": [(_T, "Easy"), (_T, "Medium"), (_S, "Hard")],
    "voxel": [(_T, "Easy"), (_T, "Easy"), (_T, "Medium"), (_S, "Medium"), (_S, "Hard"), (_O, "Hard")],
    "maze3d": [(_T, "Easy"), (_S, "Medium"), (_S, "Medium"), (_S, "Hard")],
}
_CATEGORY = {_T: QaCategory.TARGET_PERCEPTION, _S: QaCategory.STATE_PREDICTION, _O: QaCategory.STRATEGY_OPTIMIZATION}


def test_criterion_7_task_coverage(criterion, registry):
    expected = {
        (gid, f"q{i}"): (_CATEGORY[cat], Level(lv))
        for gid, rows in TASK_TABLE.items()
        for i, (cat, lv) in enumerate(rows, 1)
    }
    got = {(t.game_id, t.task_id): (t.category, t.qa_level) for t in registry.all_tasks()}
    per_game = "+".join(str(len(registry.tasks(g))) for g in TASK_TABLE)
    ok = got == expected and len(registry) == 10
    # the per-game counts sum to 45; that is the number the tables list
    criterion(7, ok, f"{len(got)} tasks over {len(registry)} games ({per_game}), "
              f"categories and levels match the tables: {got == expected}")
    assert ok


def test_criterion_8_option_fairness(criterion):
    worst, total = 0.0, 0
    pol = DistractorPolicy("NumericNeighborhood", {"lo": 0})
    for k in (4, 8):
        counts = Counter(
            build_options(25, pol, k, derive_rng(8, ["fairness", k, i])).correct_index for i in range(10_000)
        )
        total += sum(counts.values())
        worst = max(worst, *(abs(counts[slot] / 10_000 - 1 / k) for slot in range(1, k + 1)))
    ok = worst <= 0.03
    criterion(8, ok, f"{total} builds (k=4 and k=8), worst slot deviation {worst:.4f}")
    assert ok
