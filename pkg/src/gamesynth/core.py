"""Shared framework types: QA taxonomy, task catalog, game registry, sample record."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable, Mapping

if TYPE_CHECKING:
    from .qa import Derivation
    from .rng import RngStream


class QaCategory(str, Enum):
    TARGET_PERCEPTION = "TargetPerception"
    STATE_PREDICTION = "StatePrediction"
    STRATEGY_OPTIMIZATION = "StrategyOptimization"


class Level(str, Enum):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"

    @property
    def initial(self) -> str:
        return self.value[0]


LEVELS = (Level.EASY, Level.MEDIUM, Level.HARD)

TP = QaCategory.TARGET_PERCEPTION
SP = QaCategory.STATE_PREDICTION
SO = QaCategory.STRATEGY_OPTIMIZATION

# How option labels are printed in the question and named in the analysis terminal.
LABEL_STYLES = ("bracket", "colon", "dot", "letter")


@dataclass(frozen=True)
class TaskSpec:
    """One (game, question type) pair.

    ``num_options == 0`` means the task is answered by fill-in.  Tasks whose
    option count depends on the board (Sudoku colour questions) carry a
    per-plot override in ``options_by_plot``.
    """

    game_id: str
    task_id: str
    category: QaCategory
    qa_level: Level
    num_options: int
    description: str
    label_style: str = "bracket"
    options_by_plot: Mapping[Level, int] | None = None
    plot_levels: tuple[Level, ...] = LEVELS

    def __post_init__(self) -> None:
        if self.label_style not in LABEL_STYLES:
            raise ValueError(f"unknown label style {self.label_style!r}")
        counts = [self.num_options, *(self.options_by_plot or {}).values()]
        if self.num_options != 0 and min(counts) < 2:
            raise ValueError(f"{self.key}: multiple choice needs at least 2 options")

    @property
    def key(self) -> str:
        return f"{self.game_id}/{self.task_id}"

    @property
    def is_mcq(self) -> bool:
        return self.num_options > 0

    @property
    def answer_mode(self) -> str:
        return "MultipleChoice" if self.is_mcq else "FillIn"

    def option_count(self, plot: Level) -> int:
        if self.options_by_plot and plot in self.options_by_plot:
            return self.options_by_plot[plot]
        return self.num_options


BuildFn = Callable[["TaskSpec", Level, "RngStream"], "Derivation"]


@dataclass(frozen=True)
class GameDescriptor:
    game_id: str
    title: str
    tasks: tuple[TaskSpec, ...]
    build: BuildFn
    intro: str = ""

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.task_id == task_id:
                return t
        raise KeyError(f"{self.game_id} has no task {task_id!r}")


class RegistrationError(ValueError):
    pass


class Registry:
    def __init__(self) -> None:
        self._games: dict[str, GameDescriptor] = {}

    def register(self, game: GameDescriptor) -> GameDescriptor:
        if game.game_id in self._games:
            raise RegistrationError(f"duplicate game id {game.game_id!r}")
        ids = [t.task_id for t in game.tasks]
        if len(set(ids)) != len(ids):
            raise RegistrationError(f"duplicate task ids in {game.game_id!r}")
        for t in game.tasks:
            if t.game_id != game.game_id:
                raise RegistrationError(f"task {t.key} registered under {game.game_id!r}")
        self._games[game.game_id] = game
        return game

    def __contains__(self, game_id: object) -> bool:
        return game_id in self._games

    def __len__(self) -> int:
        return len(self._games)

    def get(self, game_id: str) -> GameDescriptor:
        try:
            return self._games[game_id]
        except KeyError:
            raise KeyError(f"unknown game {game_id!r}") from None

    def game_ids(self) -> list[str]:
        return list(self._games)

    def tasks(self, game_id: str) -> tuple[TaskSpec, ...]:
        return self.get(game_id).tasks

    def all_tasks(self) -> list[TaskSpec]:
        return [t for g in self._games.values() for t in g.tasks]

    def task(self, game_id: str, task_id: str) -> TaskSpec:
        return self.get(game_id).task(task_id)


def register_game(registry: Registry, game: GameDescriptor) -> Registry:
    registry.register(game)
    return registry


# JSONL key order is part of the on-disk contract.
SAMPLE_KEYS = (
    "id",
    "game_id",
    "task_id",
    "category",
    "qa_level",
    "plot_level",
    "image_path",
    "question",
    "options",
    "answer",
    "analysis",
    "seed",
    "meta",
)


@dataclass
class Sample:
    id: str
    game_id: str
    task_id: str
    category: QaCategory
    qa_level: Level
    plot_level: Level
    image_path: str
    question: str
    options: list[str]
    answer: int | str
    analysis: str
    seed: int
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def is_mcq(self) -> bool:
        return bool(self.options)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "game_id": self.game_id,
            "task_id": self.task_id,
            "category": self.category.value,
            "qa_level": self.qa_level.value,
            "plot_level": self.plot_level.value,
            "image_path": self.image_path,
            "question": self.question,
            "options": list(self.options),
            "answer": self.answer,
            "analysis": self.analysis,
            "seed": self.seed,
            "meta": dict(sorted(self.meta.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Sample":
        return cls(
            id=d["id"],
            game_id=d["game_id"],
            task_id=d["task_id"],
            category=QaCategory(d["category"]),
            qa_level=Level(d["qa_level"]),
            plot_level=Level(d["plot_level"]),
            image_path=d["image_path"],
            question=d["question"],
            options=list(d["options"]),
            answer=d["answer"],
            analysis=d["analysis"],
            seed=int(d["seed"]),
            meta={str(k): str(v) for k, v in d.get("meta", {}).items()},
        )


def sample_id(game_id: str, task_id: str, plot: Level, index: int) -> str:
    return f"{game_id}-{task_id}-{plot.initial}-{index:05d}"


def validate_sample(s: Sample, task: TaskSpec | None = None) -> list[str]:
    """Return every violated sample invariant; an empty list means valid."""
    from .qa import AnswerExtractionError, extract_final_answer

    problems: list[str] = []
    if not 0 <= s.seed < (1 << 64):
        problems.append("seed out of u64 range")
    if not s.image_path or s.image_path.startswith("/") or ".." in s.image_path.split("/"):
        problems.append("image path must be relative")
    if "<" in s.question and _has_placeholder(s.question):
        problems.append("unresolved placeholder in question")
    if s.options:
        if not isinstance(s.answer, int) or isinstance(s.answer, bool):
            problems.append("multiple-choice answer must be an option index")
        elif not 1 <= s.answer <= len(s.options):
            problems.append("answer index out of range")
        if len(set(s.options)) != len(s.options):
            problems.append("options not distinct")
        if any(not o.strip() for o in s.options):
            problems.append("empty option text")
    else:
        if not isinstance(s.answer, str) or not s.answer.strip():
            problems.append("fill-in answer must be a nonempty string")
    if task is not None:
        if (task.game_id, task.task_id) != (s.game_id, s.task_id):
            problems.append("sample does not belong to task")
        if task.category != s.category or task.qa_level != s.qa_level:
            problems.append("category or qa level differs from task catalog")
        if task.is_mcq and len(s.options) != task.option_count(s.plot_level):
            problems.append("option count differs from task catalog")
        if not task.is_mcq and s.options:
            problems.append("fill-in task carries options")
    mode = "MultipleChoice" if s.options else "FillIn"
    try:
        extracted = extract_final_answer(s.analysis, mode)
    except AnswerExtractionError as e:
        problems.append(f"analysis has no final answer: {e}")
    else:
        if extracted != s.answer:
            problems.append(
                f"analysis-answer inconsistency: analysis says {extracted!r}, answer is {s.answer!r}"
            )
    return problems


def _has_placeholder(text: str) -> bool:
    from .qa import PLACEHOLDER_RE

    return PLACEHOLDER_RE.search(text) is not None

