import json
import os
from pathlib import Path

import pytest

from gamesynth.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from gamesynth.core import Level, Sample
from gamesynth.pipeline import (
    ConfigError,
    DatasetError,
    GenerationConfig,
    generate,
    load_config,
    prepare_output,
    read_samples,
    validate_dataset,
    work_items,
)


def _files(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def soko(tmp_path_factory):
    out = tmp_path_factory.mktemp("soko")
    assert main(["generate", "--games", "sokoban", "--per-task", "3", "--seed", "1", "--out", str(out)]) == EXIT_OK
    return out


def test_generate_counts(soko):
    lines = (soko / "samples.jsonl").read_text().splitlines()
    assert len(lines) == 18
    assert len(list((soko / "images").iterdir())) == 18
    for name in ("dropped.jsonl", "skipped.jsonl", "stats.txt", "stats.kv", "config.used"):
        assert (soko / name).is_file()


def test_generate_twice_is_byte_identical(soko, tmp_path):
    again = tmp_path / "again"
    assert main(["generate", "--games", "sokoban", "--per-task", "3", "--seed", "1", "--out", str(again)]) == EXIT_OK
    a, b = _files(soko), _files(again)
    a.pop("config.used"), b.pop("config.used")  # records the output directory itself
    assert a == b


def test_different_seed_changes_output(soko, tmp_path):
    other = tmp_path / "other"
    main(["generate", "--games", "sokoban", "--per-task", "3", "--seed", "2", "--out", str(other)])
    assert (other / "samples.jsonl").read_bytes() != (soko / "samples.jsonl").read_bytes()


def test_parallel_matches_serial(soko, tmp_path):
    par = tmp_path / "par"
    args = ["generate", "--games", "sokoban", "--per-task", "3", "--seed", "1", "--jobs", "2", "--out", str(par)]
    assert main(args) == EXIT_OK
    assert (par / "samples.jsonl").read_bytes() == (soko / "samples.jsonl").read_bytes()


def test_manifest_key_order(soko):
    first = json.loads((soko / "samples.jsonl").read_text().splitlines()[0])
    assert list(first)[:3] == ["id", "game_id", "task_id"]
    assert Sample.from_dict(first).to_dict() == first


def test_validate_fresh_dataset(soko, capsys):
    assert main(["validate", str(soko)]) == EXIT_OK
    assert "18 records checked, 0 problems" in capsys.readouterr().out


def _copy(src: Path, dst: Path) -> Path:
    import shutil

    shutil.copytree(src, dst)
    return dst


def test_validate_reports_missing_image(soko, tmp_path, capsys):
    d = _copy(soko, tmp_path / "broken")
    victim = read_samples(d)[4]
    os.remove(d / victim.image_path)
    assert main(["validate", str(d)]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert victim.id in out and "not found" in out


def test_validate_reports_corrupted_answer(soko, tmp_path):
    d = _copy(soko, tmp_path / "bad")
    rows = [json.loads(x) for x in (d / "samples.jsonl").read_text().splitlines()]
    i = next(k for k, r in enumerate(rows) if r["options"])
    rows[i]["answer"] = rows[i]["answer"] % len(rows[i]["options"]) + 1
    (d / "samples.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))
    problems = validate_dataset(d)
    assert any(rows[i]["id"] in p and "does not match" in p for p in problems)


def test_validate_reports_orphan_image(soko, tmp_path):
    d = _copy(soko, tmp_path / "orphan")
    (d / "images" / "stray.png").write_bytes(b"x")
    assert "orphan image images/stray.png" in validate_dataset(d)


def test_stats_command(soko, capsys):
    assert main(["stats", str(soko)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "18" in out
    kv = dict(line.split("=", 1) for line in (soko / "stats.kv").read_text().splitlines() if "=" in line)
    assert kv["total_questions"] == "18" and kv["total_games"] == "1"


def test_filter_clean_drops_nothing(soko, tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["filter", str(soko), "--out", str(out), "--max-rep", "0.70"]) == EXIT_OK
    assert "kept 18 of 18" in capsys.readouterr().out
    assert (out / "samples.jsonl").read_bytes() == (soko / "samples.jsonl").read_bytes()
    assert validate_dataset(out) == []


def test_filter_drops_injected_sample(soko, tmp_path):
    d = _copy(soko, tmp_path / "inj")
    rows = [json.loads(x) for x in (d / "samples.jsonl").read_text().splitlines()]
    rows[0]["analysis"] = " ".join(["a b c d"] * 10)
    (d / "samples.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))
    out = tmp_path / "inj-out"
    assert main(["filter", str(d), "--out", str(out), "--no-consistency"]) == EXIT_OK
    dropped = [json.loads(x) for x in (out / "dropped.jsonl").read_text().splitlines()]
    assert [x["id"] for x in dropped] == [rows[0]["id"]]
    assert "repetition" in json.dumps(dropped[0])
    assert not (out / rows[0]["image_path"]).exists()
    assert len(read_samples(out)) == 17


def test_filter_refuses_in_place(soko, capsys):
    assert main(["filter", str(soko), "--out", str(soko)]) == EXIT_FAIL
    assert "in place" in capsys.readouterr().err


def test_augment_dry_run_keeps_analyses(soko, tmp_path):
    out = tmp_path / "aug"
    assert main(["augment", str(soko), "--out", str(out), "--dry-run"]) == EXIT_OK
    assert [s.analysis for s in read_samples(out)] == [s.analysis for s in read_samples(soko)]
    log = [json.loads(x) for x in (out / "augment_log.jsonl").read_text().splitlines()]
    assert {e["status"] for e in log} == {"dry-run"} and len(log) == 18


def test_augment_needs_endpoint(soko, tmp_path):
    assert main(["augment", str(soko), "--out", str(tmp_path / "x")]) == EXIT_USAGE


def test_generate_refuses_existing_images_without_force(soko, capsys):
    assert main(["generate", "--games", "sokoban", "--per-task", "1", "--out", str(soko)]) == EXIT_FAIL
    assert "--force" in capsys.readouterr().err


def test_prepare_output_force(tmp_path):
    (tmp_path / "images").mkdir()
    (tmp_path / "images" / "old.png").write_bytes(b"x")
    with pytest.raises(DatasetError):
        prepare_output(tmp_path, force=False)
    prepare_output(tmp_path, force=True)
    assert list((tmp_path / "images").iterdir()) == []


def test_unknown_game_is_usage_error(tmp_path):
    assert main(["generate", "--games", "chess", "--out", str(tmp_path / "c")]) == EXIT_USAGE


@pytest.mark.parametrize("mix", ["0.5,0.5", "0.5,0.3,0.3", "easy=1,extreme=0", "-1,1,1"])
def test_bad_plot_mix(mix):
    with pytest.raises(ConfigError):
        GenerationConfig(plot_mix=mix)


def test_plot_mix_forms():
    a = GenerationConfig(plot_mix="0.5,0.25,0.25").plot_mix
    b = GenerationConfig(plot_mix="easy=0.5,medium=0.25,hard=0.25").plot_mix
    assert a == b == {Level.EASY: 0.5, Level.MEDIUM: 0.25, Level.HARD: 0.25}


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "cfg.yaml"
    p.write_text("master_seed: 9\nper_task: 4\nper_task_counts:\n  sokoban/q1: 1\nfilter:\n  min_words: 5\n")
    cfg = load_config(p, {"per_task": 2, "games": None})
    assert cfg.master_seed == 9 and cfg.per_task == 2 and cfg.filter.min_words == 5
    counts = {(w.game_id, w.task_id) for w in work_items(__import__("gamesynth").default_registry(),
                                                          GenerationConfig(games=["sokoban"], per_task=2,
                                                                           per_task_counts={"sokoban/q1": 1}))}
    assert ("sokoban", "q1") in counts


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        GenerationConfig.from_mapping({"seeed": 1})
    with pytest.raises(ConfigError):
        GenerationConfig(master_seed=-1)


def test_count_overrides_and_split_offset(registry):
    cfg = GenerationConfig(games=["sokoban"], per_task=2, per_task_counts={"sokoban/q1": 5}, split="test")
    items = work_items(registry, cfg)
    assert sum(w.task_id == "q1" for w in items) == 5
    assert len(items) == 5 + 2 * 5
    assert min(w.index for w in items) == 1_000_000


def test_zero_per_task_yields_empty_dataset(tmp_path):
    res = generate(GenerationConfig(games=["maze"], per_task=0, output_dir=str(tmp_path)))
    assert res.total == 0 and res.ok
    assert read_samples(tmp_path) == []


def test_read_samples_errors(tmp_path):
    with pytest.raises(DatasetError):
        read_samples(tmp_path)
    (tmp_path / "samples.jsonl").write_text("{not json}\n")
    with pytest.raises(DatasetError):
        read_samples(tmp_path)
