"""Dataset generation: config, per-sample work, manifest writing and reading."""

from __future__ import annotations

import json
import logging
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

import yaml

from .core import LABEL_STYLES, LEVELS, Level, Registry, Sample, TaskSpec
from .games import default_registry
from .qa import assemble_sample
from .quality import Dropped, FilterConfig, apply_filters, compute_stats
from .render import render
from .rng import U64_MASK, derive_rng

log = logging.getLogger(__name__)

SAMPLES_FILE = "samples.jsonl"
DROPPED_FILE = "dropped.jsonl"
SKIPPED_FILE = "skipped.jsonl"
STATS_TXT = "stats.txt"
STATS_KV = "stats.kv"
CONFIG_USED = "config.used"
IMAGES_DIR = "images"

SPLITS = {"train": 0, "test": 1_000_000}
MAX_SKIP_RATE = 0.01


class ConfigError(ValueError):
    pass


class DatasetError(RuntimeError):
    pass


def _parse_plot_mix(raw: Any) -> dict[Level, float]:
    if raw is None:
        return {lv: 1 / 3 for lv in LEVELS}
    if isinstance(raw, str):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if all("=" in p for p in parts):
            raw = dict(p.split("=", 1) for p in parts)
        else:
            raw = [float(p) for p in parts]
    if isinstance(raw, (list, tuple)):
        if len(raw) != len(LEVELS):
            raise ConfigError("plot mix needs one fraction per level (easy, medium, hard)")
        raw = dict(zip(LEVELS, raw))
    mix = {}
    names = {lv.value.lower(): lv for lv in LEVELS}
    for k, v in dict(raw).items():
        lv = k if isinstance(k, Level) else names.get(str(k).lower())
        if lv is None:
            raise ConfigError(f"unknown plot level {k!r}")
        mix[lv] = float(v)
    mix = {lv: mix.get(lv, 0.0) for lv in LEVELS}
    if any(v < 0 for v in mix.values()) or abs(sum(mix.values()) - 1.0) > 1e-9:
        raise ConfigError(f"plot mix fractions must be >= 0 and sum to 1, got {mix}")
    return mix


@dataclass
class GenerationConfig:
    master_seed: int = 0
    games: list[str] | None = None  # None means every registered game
    per_task: int = 10
    per_task_counts: dict[str, int] = field(default_factory=dict)  # "game/task" or "game" -> count
    plot_mix: dict[Level, float] = field(default_factory=lambda: {lv: 1 / 3 for lv in LEVELS})
    output_dir: str = "out"
    label_styles: dict[str, str] = field(default_factory=dict)  # "game/task" -> label style
    filter: FilterConfig = field(default_factory=FilterConfig)
    augment: dict[str, Any] | None = None
    split: str = "train"
    jobs: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= U64_MASK:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.per_task < 0 or any(v < 0 for v in self.per_task_counts.values()):
            raise ConfigError("sample counts must be >= 0")
        self.plot_mix = _parse_plot_mix(self.plot_mix)
        if self.split not in SPLITS:
            raise ConfigError(f"split must be one of {sorted(SPLITS)}")
        for key, style in self.label_styles.items():
            if style not in LABEL_STYLES:
                raise ConfigError(f"{key}: unknown label style {style!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @classmethod
    def from_mapping(cls, d: Mapping[str, Any]) -> "GenerationConfig":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(d.get("filter"), Mapping):
            d["filter"] = FilterConfig(**d["filter"])
        if isinstance(d.get("games"), str):
            d["games"] = [g.strip() for g in d["games"].split(",") if g.strip()]
        return cls(**d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "master_seed": self.master_seed,
            "games": list(self.games) if self.games is not None else None,
            "per_task": self.per_task,
            "per_task_counts": dict(sorted(self.per_task_counts.items())),
            "plot_mix": {lv.value: self.plot_mix[lv] for lv in LEVELS},
            "output_dir": self.output_dir,
            "label_styles": dict(sorted(self.label_styles.items())),
            "filter": {
                "min_words": self.filter.min_words,
                "max_words": self.filter.max_words,
                "max_repetition": self.filter.max_repetition,
                "check_consistency": self.filter.check_consistency,
            },
            "augment": self.augment,
            "split": self.split,
            "jobs": self.jobs,
        }

    def count_for(self, task: TaskSpec) -> int:
        for key in (task.key, task.game_id):
            if key in self.per_task_counts:
                return self.per_task_counts[key]
        return self.per_task


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> GenerationConfig:
    """Read a YAML (or JSON) config file and apply non-None overrides on top."""
    data: dict[str, Any] = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, Mapping):
            raise ConfigError(f"{path}: config must be a mapping")
        data.update(loaded)
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return GenerationConfig.from_mapping(data)


# --------------------------------------------------------------------------- per-sample work


@dataclass(frozen=True)
class WorkItem:
    game_id: str
    task_id: str
    index: int  # global index (split offset included)


@dataclass
class Produced:
    item: WorkItem
    sample: Sample | None = None
    png: bytes | None = None
    error: str | None = None


def choose_plot(task: TaskSpec, mix: Mapping[Level, float], rng) -> Level:
    levels = list(task.plot_levels)
    weights = [mix.get(lv, 0.0) for lv in levels]
    if sum(weights) <= 0:
        weights = [1.0] * len(levels)
    return levels[rng.weighted_index(weights)]


def produce(registry: Registry, cfg: GenerationConfig, item: WorkItem) -> Produced:
    """Generate, assemble and render one sample; errors are captured, not raised."""
    try:
        game = registry.get(item.game_id)
        task = game.task(item.task_id)
        style = cfg.label_styles.get(task.key)
        if style:
            task = replace(task, label_style=style)
        rng = derive_rng(cfg.master_seed, [item.game_id, item.task_id, item.index])
        plot = choose_plot(task, cfg.plot_mix, rng.fork("plot"))
        d = game.build(task, plot, rng.fork("build"))
        sample = assemble_sample(
            task, plot, d, intro=d.intro or game.intro, index=item.index, seed=rng.seed >> 64
        )
        png = render(d.scene).bytes
        return Produced(item, sample, png)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a skip record
        return Produced(item, error=f"{type(exc).__name__}: {exc}")


def work_items(registry: Registry, cfg: GenerationConfig) -> list[WorkItem]:
    games = cfg.games if cfg.games is not None else registry.game_ids()
    offset = SPLITS[cfg.split]
    items = []
    for gid in games:
        for task in registry.tasks(gid):
            items += [WorkItem(gid, task.task_id, offset + i) for i in range(cfg.count_for(task))]
    return items


_WORKER: tuple[Registry, GenerationConfig] | None = None


def _init_worker(cfg_dict: dict[str, Any]) -> None:
    global _WORKER
    _WORKER = (default_registry(), GenerationConfig.from_mapping(_cfg_from_dict(cfg_dict)))


def _cfg_from_dict(d: Mapping[str, Any]) -> dict[str, Any]:
    return {**d, "plot_mix": dict(d["plot_mix"])}


def _work(item: WorkItem) -> Produced:
    assert _WORKER is not None
    return produce(_WORKER[0], _WORKER[1], item)


def produce_all(registry: Registry, cfg: GenerationConfig, items: Sequence[WorkItem]) -> Iterator[Produced]:
    """Results in ``items`` order whatever the worker count."""
    if cfg.jobs <= 1 or len(items) < 2:
        for it in items:
            yield produce(registry, cfg, it)
        return
    with ProcessPoolExecutor(max_workers=cfg.jobs, initializer=_init_worker, initargs=(cfg.to_dict(),)) as pool:
        yield from pool.map(_work, items, chunksize=max(1, len(items) // (cfg.jobs * 8)))


# --------------------------------------------------------------------------- manifest I/O


def write_jsonl(path: Path, rows: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(row + "\n")


def read_samples(root: str | Path) -> list[Sample]:
    path = Path(root) / SAMPLES_FILE
    if not path.is_file():
        raise DatasetError(f"no {SAMPLES_FILE} in {root}")
    out = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(Sample.from_dict(json.loads(line)))
            except (ValueError, KeyError) as exc:
                raise DatasetError(f"{path}:{n}: unreadable record ({exc})") from exc
    return out


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_stats(root: Path, samples: Sequence[Sample]) -> None:
    rep = compute_stats(samples, root)
    (root / STATS_TXT).write_text(rep.to_text(), encoding="utf-8")
    (root / STATS_KV).write_text(rep.to_kv(), encoding="utf-8")


def prepare_output(root: Path, force: bool) -> None:
    root.mkdir(parents=True, exist_ok=True)
    images = root / IMAGES_DIR
    if images.exists() and any(images.iterdir()):
        if not force:
            raise DatasetError(f"{images} is not empty; pass --force to replace it")
        shutil.rmtree(images)
    images.mkdir(exist_ok=True)


def write_dataset(root: Path, kept: Sequence[Sample], dropped: Sequence[Dropped], images_from: Path | None) -> None:
    """Write records for ``kept`` and copy their images from ``images_from`` (another dataset root)."""
    (root / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
    if images_from is not None:
        for s in kept:
            src = images_from / s.image_path
            if not src.is_file():
                raise DatasetError(f"{s.id}: missing image {src}")
            shutil.copyfile(src, root / s.image_path)
    write_jsonl(root / SAMPLES_FILE, (s.to_json() for s in kept))
    write_jsonl(root / DROPPED_FILE, (_dump(d.to_dict()) for d in dropped))
    write_stats(root, kept)


@dataclass
class GenerateResult:
    kept: list[Sample]
    dropped: list[Dropped]
    skipped: list[Produced]
    total: int

    @property
    def skip_rate(self) -> float:
        return len(self.skipped) / self.total if self.total else 0.0

    @property
    def ok(self) -> bool:
        return self.skip_rate <= MAX_SKIP_RATE


def generate(cfg: GenerationConfig, registry: Registry | None = None, *, force: bool = False) -> GenerateResult:
    registry = registry or default_registry()
    unknown = [gid for gid in cfg.games or [] if gid not in registry]
    if unknown:
        raise ConfigError(f"unknown game ids {unknown}; known: {registry.game_ids()}")
    root = Path(cfg.output_dir)
    prepare_output(root, force)
    items = work_items(registry, cfg)
    samples: list[Sample] = []
    skipped: list[Produced] = []
    for res in produce_all(registry, cfg, items):
        if res.sample is None:
            log.warning("skipped %s/%s #%d: %s", res.item.game_id, res.item.task_id, res.item.index, res.error)
            skipped.append(res)
            continue
        (root / res.sample.image_path).write_bytes(res.png)
        samples.append(res.sample)
    kept, dropped = apply_filters(samples, cfg.filter)
    for d in dropped:
        img = root / d.sample.image_path
        if img.exists():
            os.remove(img)
    write_jsonl(root / SAMPLES_FILE, (s.to_json() for s in kept))
    write_jsonl(root / DROPPED_FILE, (_dump(d.to_dict()) for d in dropped))
    write_jsonl(
        root / SKIPPED_FILE,
        (_dump({"game_id": p.item.game_id, "task_id": p.item.task_id, "index": p.item.index, "error": p.error})
         for p in skipped),
    )
    write_stats(root, kept)
    (root / CONFIG_USED).write_text(_dump(cfg.to_dict()) + "\n", encoding="utf-8")
    return GenerateResult(kept, dropped, skipped, len(items))


# --------------------------------------------------------------------------- validation


def validate_dataset(root: str | Path, registry: Registry | None = None) -> list[str]:
    """Every problem found in a dataset directory; empty means valid."""
    from .core import validate_sample
    from .qa import AnswerExtractionError, extract_final_answer

    registry = registry or default_registry()
    root = Path(root)
    problems = []
    samples = read_samples(root)
    seen_ids = set()
    for s in samples:
        if s.id in seen_ids:
            problems.append(f"{s.id}: duplicate id")
        seen_ids.add(s.id)
        try:
            task = registry.task(s.game_id, s.task_id)
        except KeyError as exc:
            problems.append(f"{s.id}: {exc.args[0]}")
            task = None
        problems += [f"{s.id}: {p}" for p in validate_sample(s, task)]
        if not (root / s.image_path).is_file():
            problems.append(f"{s.id}: image {s.image_path} not found")
        mode = "MultipleChoice" if s.options else "FillIn"
        try:
            if extract_final_answer(s.analysis, mode) != s.answer:
                problems.append(f"{s.id}: analysis final answer does not match the answer field")
        except AnswerExtractionError as exc:
            problems.append(f"{s.id}: {exc}")
    referenced = {Path(s.image_path).name for s in samples}
    images = root / IMAGES_DIR
    if images.is_dir():
        for f in sorted(images.iterdir()):
            if f.name not in referenced:
                problems.append(f"orphan image {IMAGES_DIR}/{f.name}")
    return problems
