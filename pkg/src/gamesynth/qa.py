"""QA construction: template filling, distractor options, answer extraction, sample assembly."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import Level, Sample, TaskSpec, sample_id, validate_sample
from .rng import RngStream

PLACEHOLDER_RE = re.compile(r"<([a-z_][a-z0-9_]*)>")
LETTERS = string.ascii_uppercase


class TemplateError(ValueError):
    pass


class OptionDomainError(ValueError):
    """Raised when a distractor policy cannot supply enough distinct options."""


class AnswerExtractionError(ValueError):
    pass


class SampleAssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class QuestionTemplate:
    intro: str
    body: str
    option_slots: int = 0


@dataclass(frozen=True)
class AnalysisTemplate:
    steps: tuple[str, ...]
    terminal: str = ""


def placeholders(text: str) -> list[str]:
    return PLACEHOLDER_RE.findall(text)


def _substitute(text: str, bindings: Mapping[str, object]) -> str:
    def repl(m: re.Match[str]) -> str:
        name = m.group(1)
        if name not in bindings:
            raise TemplateError(f"unbound placeholder {name}")
        return str(bindings[name])

    return PLACEHOLDER_RE.sub(repl, text)


def fill_template(t: QuestionTemplate | AnalysisTemplate | str, bindings: Mapping[str, object]) -> str:
    """Instantiate a template; every ``<name>`` placeholder must be bound.

    Question templates get their intro prepended verbatim (the intro itself is
    not scanned for placeholders).
    """
    if isinstance(t, str):
        return _substitute(t, bindings)
    if isinstance(t, QuestionTemplate):
        body = _substitute(t.body, bindings)
        return f"{t.intro}\n\n{body}" if t.intro else body
    parts = [_substitute(s, bindings) for s in t.steps]
    if t.terminal:
        parts.append(_substitute(t.terminal, bindings))
    return "\n".join(parts)


# --------------------------------------------------------------------------- options


@dataclass(frozen=True)
class OptionSet:
    options: tuple[str, ...]
    correct_index: int  # 1-based

    def __post_init__(self) -> None:
        if len(set(self.options)) != len(self.options):
            raise OptionDomainError(f"options not distinct: {self.options}")
        if not 1 <= self.correct_index <= len(self.options):
            raise OptionDomainError("correct index out of range")

    @property
    def correct(self) -> str:
        return self.options[self.correct_index - 1]

    def __len__(self) -> int:
        return len(self.options)


@dataclass(frozen=True)
class DistractorPolicy:
    """How wrong-but-well-formed options are drawn for one task.

    kinds and their params:
      ``CategoricalPool``      pool: sequence of option texts
      ``NumericNeighborhood``  lo, hi (hi may be None), fmt (callable int->str)
      ``CoordinatePerturb``    cells: sequence of (r, c); neighbors_first: bool; fmt
      ``SequenceVariant``      alphabet, length, sep, extra: extra candidate texts
    ``accept`` (optional callable text->bool) rejects candidates that would be
    a second correct answer.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)


def _fmt_default(x: object) -> str:
    return str(x)


def fmt_cell(cell: tuple[int, int]) -> str:
    return f"({cell[0]}, {cell[1]})"


def _candidates(correct: object, policy: DistractorPolicy, need: int, rng: RngStream) -> list[str]:
    p = policy.params
    kind = policy.kind
    if kind == "CategoricalPool":
        return [str(x) for x in p["pool"]]
    if kind == "NumericNeighborhood":
        fmt = p.get("fmt", _fmt_default)
        lo = p.get("lo", 0)
        hi = p.get("hi")
        c = int(correct)  # type: ignore[arg-type]
        width = max(3, abs(c))
        while True:
            a = max(lo, c - width)
            b = c + width if hi is None else min(hi, c + width)
            values = [v for v in range(a, b + 1) if v != c]
            full = (a == lo) and (hi is not None and b == hi)
            if len(values) >= need or full:
                return [fmt(v) for v in values]
            width *= 2
    if kind == "CoordinatePerturb":
        fmt = p.get("fmt", fmt_cell)
        cells = list(p["cells"])
        if p.get("neighbors_first"):
            r, c = correct  # type: ignore[misc]
            near = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            near = [x for x in near if x in set(cells)]
            rest = [x for x in cells if x not in near and x != (r, c)]
            picked = near[:need]
            if len(picked) < need:
                picked += rng.sample(rest, min(len(rest), need - len(picked)))
            return [fmt(x) for x in picked]
        return [fmt(x) for x in cells]
    if kind == "SequenceVariant":
        alphabet = list(p["alphabet"])
        length = int(p["length"])
        sep = p.get("sep", ", ")
        out = [str(x) for x in p.get("extra", ())]
        base = list(correct) if not isinstance(correct, str) else correct.split(sep)
        # truncations / extensions of the correct sequence
        if len(base) > 1:
            out.append(sep.join(base[:-1]))
        out.append(sep.join(base + [rng.choice(alphabet)]))
        tries = 0
        while len(set(out)) < need + 4 and tries < 400:
            n = max(1, length + rng.randint(-1, 1)) if tries % 3 == 0 else length
            out.append(sep.join(rng.choice(alphabet) for _ in range(n)))
            tries += 1
        return out
    raise ValueError(f"unknown distractor policy {kind!r}")


def build_options(
    correct: object,
    policy: DistractorPolicy,
    k: int,
    rng: RngStream,
    *,
    fmt: Callable[[object], str] | None = None,
) -> OptionSet:
    """k distinct options including ``correct`` at an rng-chosen position."""
    if k < 2:
        raise OptionDomainError("need at least 2 options")
    if fmt is not None:
        correct_text = fmt(correct)
    elif policy.kind == "CoordinatePerturb":
        correct_text = policy.params.get("fmt", fmt_cell)(correct)
    elif policy.kind == "NumericNeighborhood":
        correct_text = policy.params.get("fmt", _fmt_default)(correct)
    else:
        correct_text = str(correct)
    accept = policy.params.get("accept")
    raw = _candidates(correct, policy, k - 1, rng)
    seen: set[str] = {correct_text}
    pool: list[str] = []
    for text in raw:
        if text in seen or not text.strip():
            continue
        if accept is not None and not accept(text):
            continue
        seen.add(text)
        pool.append(text)
    if len(pool) < k - 1:
        raise OptionDomainError(
            f"{policy.kind} supplies {len(pool)} distractors, {k - 1} needed"
        )
    picked = rng.sample(pool, k - 1)
    pos = rng.randbelow(k)
    opts = picked[:pos] + [correct_text] + picked[pos:]
    return OptionSet(tuple(opts), pos + 1)


def fixed_options(options: Sequence[str], correct: str) -> OptionSet:
    """Options in a canonical order that the task always presents unchanged."""
    opts = tuple(options)
    if correct not in opts:
        raise OptionDomainError(f"correct answer {correct!r} not among fixed options")
    return OptionSet(opts, opts.index(correct) + 1)


def canonical_options(
    correct: str, pool: Sequence[str], k: int, rng: RngStream, order: Sequence[str]
) -> OptionSet:
    """Draw k-1 distractors from ``pool`` but present options in ``order``."""
    rest = [x for x in dict.fromkeys(pool) if x != correct]
    if len(rest) < k - 1:
        raise OptionDomainError(f"pool supplies {len(rest)} distractors, {k - 1} needed")
    chosen = set(rng.sample(rest, k - 1)) | {correct}
    opts = [x for x in order if x in chosen]
    return fixed_options(opts, correct)


def option_label(style: str, i: int) -> str:
    """Label text for 1-based option ``i``."""
    if style == "letter":
        return LETTERS[i - 1]
    return str(i)


def format_options(opts: Sequence[str], style: str) -> str:
    lines = []
    for i, o in enumerate(opts, 1):
        if style == "bracket":
            lines.append(f"[{i}] {o}")
        elif style == "colon":
            lines.append(f"{i}: {o}")
        elif style == "dot":
            lines.append(f"{i}. {o}")
        else:
            lines.append(f"{LETTERS[i - 1]}. {o}")
    return "Options:\n" + "\n".join(lines)


# --------------------------------------------------------------------------- answers

_MCQ_TERMINAL = re.compile(r"The option (number|letter) is ([0-9]+|[A-Z])\.?")
_FILL_TERMINAL = "So the answer is "


def terminal_line(task: TaskSpec, answer_text: str, index: int | None = None) -> str:
    if task.is_mcq:
        assert index is not None
        if task.label_style == "letter":
            return f"So the answer is {answer_text}. The option letter is {LETTERS[index - 1]}."
        return f"So the answer is {answer_text}. The option number is {index}."
    return f"So the answer is {answer_text}."


def extract_final_answer(analysis: str, mode: str) -> int | str:
    """Final declared answer of an analysis: option index for MCQ, literal for fill-in."""
    if mode == "MultipleChoice":
        matches = list(_MCQ_TERMINAL.finditer(analysis))
        if not matches:
            raise AnswerExtractionError("no 'The option number/letter is' declaration")
        kind, value = matches[-1].groups()
        if kind == "letter" or value.isalpha():
            return LETTERS.index(value) + 1
        return int(value)
    if mode == "FillIn":
        pos = analysis.rfind(_FILL_TERMINAL)
        if pos < 0:
            raise AnswerExtractionError("no 'So the answer is' declaration")
        tail = analysis[pos + len(_FILL_TERMINAL):].strip()
        line = tail.splitlines()[0].strip() if tail else ""
        if line.endswith("."):
            line = line[:-1].rstrip()
        if not line:
            raise AnswerExtractionError("empty final answer")
        return line
    raise ValueError(f"unknown answer mode {mode!r}")


# --------------------------------------------------------------------------- assembly


@dataclass
class Derivation:
    """Everything a game hands to the pipeline for one sample.

    ``question`` and ``analysis`` are the filled bodies; the intro, the option
    block and the terminal answer line are added by :func:`assemble_sample`.
    """

    question: str
    analysis: str
    answer_text: str
    scene: Any
    options: OptionSet | None = None
    meta: dict[str, str] = field(default_factory=dict)
    state: Any = None
    intro: str | None = None  # overrides the game intro when it depends on the board


def assemble_sample(
    task: TaskSpec,
    plot: Level,
    derivation: Derivation,
    *,
    intro: str,
    index: int,
    seed: int,
    image_path: str | None = None,
) -> Sample:
    d = derivation
    if task.is_mcq:
        if d.options is None:
            raise SampleAssemblyError(f"{task.key}: multiple-choice task produced no options")
        if len(d.options) != task.option_count(plot):
            raise SampleAssemblyError(
                f"{task.key}: {len(d.options)} options, catalog says {task.option_count(plot)}"
            )
        if d.options.correct != d.answer_text:
            raise SampleAssemblyError(f"{task.key}: correct option differs from derived answer")
        question = d.question + "\n\n" + format_options(d.options.options, task.label_style)
        answer: int | str = d.options.correct_index
        options = list(d.options.options)
        terminal = terminal_line(task, d.answer_text, d.options.correct_index)
    else:
        if d.options is not None:
            raise SampleAssemblyError(f"{task.key}: fill-in task produced options")
        question = d.question
        answer = d.answer_text
        options = []
        terminal = terminal_line(task, d.answer_text)
    if intro:
        question = f"{intro}\n\n{question}"
    sid = sample_id(task.game_id, task.task_id, plot, index)
    sample = Sample(
        id=sid,
        game_id=task.game_id,
        task_id=task.task_id,
        category=task.category,
        qa_level=task.qa_level,
        plot_level=plot,
        image_path=image_path or f"images/{sid}.png",
        question=question,
        options=options,
        answer=answer,
        analysis=d.analysis.rstrip() + "\n\n" + terminal,
        seed=seed,
        meta=dict(d.meta),
    )
    problems = validate_sample(sample, task)
    if problems:
        raise SampleAssemblyError(f"{sid}: " + "; ".join(problems))
    return sample


def join_list(items: Iterable[object], sep: str = ", ") -> str:
    return sep.join(str(x) for x in items)
