"""Post-generation filtering and dataset statistics."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from PIL import Image

from .core import Sample
from .qa import AnswerExtractionError, extract_final_answer

_PUNCT = str.maketrans("", "", string.punctuation)

DROP_TOO_SHORT = "too short"
DROP_TOO_LONG = "too long"
DROP_REPETITION = "repetition"
DROP_INCONSISTENT = "inconsistent answer"


def tokens(text: str) -> list[str]:
    """Lowercase, strip ASCII punctuation, split on whitespace; empty tokens vanish."""
    return [t for t in (w.translate(_PUNCT) for w in text.lower().split()) if t]


def repetition_rate_4gram(text: str) -> float:
    """1 - distinct/total over contiguous 4-token windows (0 for fewer than 4 tokens)."""
    toks = tokens(text)
    if len(toks) < 4:
        return 0.0
    grams = [tuple(toks[i : i + 4]) for i in range(len(toks) - 3)]
    return 1.0 - len(set(grams)) / len(grams)


def word_count(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class FilterConfig:
    min_words: int = 30
    max_words: int = 1200
    max_repetition: float = 0.70
    check_consistency: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.min_words < self.max_words:
            raise ValueError("need 0 <= min_words < max_words")
        if not 0.0 <= self.max_repetition <= 1.0:
            raise ValueError("max_repetition must lie in [0, 1]")


@dataclass(frozen=True)
class Dropped:
    sample: Sample
    reasons: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"id": self.sample.id, "reasons": list(self.reasons)}


def drop_reasons(s: Sample, cfg: FilterConfig) -> list[str]:
    reasons = []
    n = word_count(s.analysis)
    if n < cfg.min_words:
        reasons.append(DROP_TOO_SHORT)
    if n > cfg.max_words:
        reasons.append(DROP_TOO_LONG)
    if repetition_rate_4gram(s.analysis) > cfg.max_repetition:
        reasons.append(DROP_REPETITION)
    if cfg.check_consistency:
        mode = "MultipleChoice" if s.options else "FillIn"
        try:
            if extract_final_answer(s.analysis, mode) != s.answer:
                reasons.append(DROP_INCONSISTENT)
        except AnswerExtractionError:
            reasons.append(DROP_INCONSISTENT)
    return reasons


def apply_filters(samples: Iterable[Sample], cfg: FilterConfig | None = None) -> tuple[list[Sample], list[Dropped]]:
    cfg = cfg or FilterConfig()
    kept: list[Sample] = []
    dropped: list[Dropped] = []
    for s in samples:
        reasons = drop_reasons(s, cfg)
        if reasons:
            dropped.append(Dropped(s, tuple(reasons)))
        else:
            kept.append(s)
    return kept, dropped


# --------------------------------------------------------------------------- stats


class MissingImageError(FileNotFoundError):
    pass


@dataclass
class StatsReport:
    total_games: int = 0
    total_tasks: int = 0
    total_questions: int = 0
    unique_images: int = 0
    avg_image_width: float = 0.0
    avg_image_height: float = 0.0
    avg_question_words: float = 0.0
    avg_analysis_words: float = 0.0
    mcq_count: int = 0
    avg_choices: float = 0.0
    fillin_count: int = 0
    per_game: dict[str, int] = field(default_factory=dict)

    ROWS = (
        ("total_games", "Total Games"),
        ("total_tasks", "Total Tasks"),
        ("total_questions", "Total Questions"),
        ("unique_images", "Unique Images"),
        ("avg_image_width", "Avg. Image Width"),
        ("avg_image_height", "Avg. Image Height"),
        ("avg_question_words", "Avg. Question Length"),
        ("avg_analysis_words", "Avg. Analysis Length"),
        ("mcq_count", "Multiple Choice Questions"),
        ("avg_choices", "Avg. Choices for MCQs"),
        ("fillin_count", "Fill-in Questions"),
    )

    def to_kv(self) -> str:
        lines = []
        for key, _ in self.ROWS:
            v = getattr(self, key)
            lines.append(f"{key}={v:.4f}" if isinstance(v, float) else f"{key}={v}")
        for g, n in sorted(self.per_game.items()):
            lines.append(f"questions.{g}={n}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = max(len(label) for _, label in self.ROWS)
        lines = [f"{'Statistic'.ljust(width)}  Value", f"{'-' * width}  -----"]
        for key, label in self.ROWS:
            v = getattr(self, key)
            shown = f"{v:.2f}" if isinstance(v, float) else f"{v:,}"
            lines.append(f"{label.ljust(width)}  {shown}")
        if self.per_game:
            lines.append("")
            lines.append("Questions per game")
            for g, n in sorted(self.per_game.items()):
                lines.append(f"  {g.ljust(width - 2)}  {n:,}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "StatsReport":
        r = cls()
        for line in text.splitlines():
            if "=" not in line:
                continue
            k, v = line.split("=", 1)
            if k.startswith("questions."):
                r.per_game[k[len("questions."):]] = int(v)
            elif hasattr(r, k):
                setattr(r, k, float(v) if isinstance(getattr(r, k), float) else int(v))
        return r


def image_size(path: Path) -> tuple[int, int]:
    with Image.open(path) as im:
        return im.size


def compute_stats(samples: Sequence[Sample], root: str | Path | None = None, *, read_images: bool = True) -> StatsReport:
    """Exact dataset statistics; image dimensions are read from the files under ``root``."""
    r = StatsReport()
    r.total_questions = len(samples)
    if not samples:
        return r
    r.total_games = len({s.game_id for s in samples})
    r.total_tasks = len({(s.game_id, s.task_id) for s in samples})
    paths = sorted({s.image_path for s in samples})
    r.unique_images = len(paths)
    if read_images:
        base = Path(root) if root is not None else Path(".")
        missing = [s.id for s in samples if not (base / s.image_path).is_file()]
        if missing:
            raise MissingImageError("missing image for sample(s): " + ", ".join(missing[:20]))
        sizes = [image_size(base / p) for p in paths]
        r.avg_image_width = sum(w for w, _ in sizes) / len(sizes)
        r.avg_image_height = sum(h for _, h in sizes) / len(sizes)
    r.avg_question_words = sum(word_count(s.question) for s in samples) / len(samples)
    r.avg_analysis_words = sum(word_count(s.analysis) for s in samples) / len(samples)
    mcq = [s for s in samples if s.options]
    r.mcq_count = len(mcq)
    r.fillin_count = len(samples) - len(mcq)
    r.avg_choices = sum(len(s.options) for s in mcq) / len(mcq) if mcq else 0.0
    for s in samples:
        r.per_game[s.game_id] = r.per_game.get(s.game_id, 0) + 1
    return r
