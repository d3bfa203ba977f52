"""Optional paraphrasing of analysis texts through a chat-completion service.

Only the analysis field is ever rewritten.  A rewrite is accepted when it
still passes the length/repetition filters and still ends in a terminal line
that extracts to the sample's answer; otherwise the original is kept and the
rejection is logged.

Request body (POST to the configured endpoint)::

    {"model": "<model_name>", "messages": [{"role": "user", "content": "<prompt>"}]}

Response body: ``{"choices": [{"message": {"content": "<rewritten analysis>"}}]}``.
The bearer token, if any, comes from the ``GAMESYNTH_AUGMENT_TOKEN`` environment
variable.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping, Protocol, Sequence

import httpx

from .core import Sample
from .quality import FilterConfig, drop_reasons

log = logging.getLogger(__name__)

TOKEN_ENV = "GAMESYNTH_AUGMENT_TOKEN"

PROMPT_TEMPLATE = (
    "## Question: {query}\n\n"
    "## Ground Truth: {response}\n\n"
    "Based on the above question and the provided ground truth, the current process of providing the answer is "
    "overly mechanical and simplistic. Please provide detailed reasoning steps based on the content of the question "
    "and the reasoning steps in the Ground Truth. The reasoning steps should be detailed, logical, and consistent "
    "with the Ground Truth.\n\n"
    'Additionally, before starting the reasoning, emphasize: "I will carefully analyze the question and the image '
    'and provide detailed reasoning steps." Do not include statements such as "This matches the provided Ground '
    'Truth" or similar expressions in your response.\n\n'
    "Please follow the above requirements to provide a detailed analysis, reasoning, and answer."
)

STATUS_REWRITTEN = "rewritten"
STATUS_REJECTED = "rejected"
STATUS_TRANSPORT = "transport-error"
STATUS_DRY_RUN = "dry-run"


def build_augment_prompt(question: str, response: str) -> str:
    # plain replacement so braces inside the texts are left alone
    return PROMPT_TEMPLATE.replace("{query}", question, 1).replace("{response}", response, 1)


class TransportError(RuntimeError):
    pass


class Adapter(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass
class AugmentConfig:
    endpoint: str | None = None
    model_name: str = ""
    timeout: float = 60.0
    retries: int = 2
    max_parallel: int = 4
    dry_run: bool = False

    def __post_init__(self) -> None:
        if self.retries < 0 or self.max_parallel < 1 or self.timeout <= 0:
            raise ValueError("retries >= 0, max_parallel >= 1 and timeout > 0 are required")

    @classmethod
    def from_mapping(cls, d: Mapping[str, Any] | None) -> "AugmentConfig":
        return cls(**dict(d or {}))


class HttpChatAdapter:
    """Minimal chat-completion client."""

    def __init__(self, cfg: AugmentConfig, client: httpx.Client | None = None):
        if not cfg.endpoint:
            raise ValueError("an endpoint URL is required")
        self.cfg = cfg
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.client = client or httpx.Client(timeout=cfg.timeout, headers=headers)

    def complete(self, prompt: str) -> str:
        body = {"model": self.cfg.model_name, "messages": [{"role": "user", "content": prompt}]}
        try:
            resp = self.client.post(self.cfg.endpoint, json=body)
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError(str(exc)) from exc


class StubAdapter:
    """In-process adapter driven by a function of the prompt (tests, offline runs)."""

    def __init__(self, fn: Callable[[str], str]):
        self.fn = fn

    def complete(self, prompt: str) -> str:
        return self.fn(prompt)


def ground_truth_of(prompt: str) -> str:
    """The response text embedded in a prompt built by :func:`build_augment_prompt`."""
    head = "## Ground Truth: "
    tail = "\n\nBased on the above question and the provided ground truth"
    start = prompt.index(head) + len(head)
    return prompt[start : prompt.rindex(tail)]


def echo_stub() -> StubAdapter:
    return StubAdapter(ground_truth_of)


@dataclass(frozen=True)
class AugmentLogEntry:
    sample_id: str
    status: str
    reason: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"id": self.sample_id, "status": self.status, "reason": self.reason}


def _one(s: Sample, adapter: Adapter, cfg: AugmentConfig, fcfg: FilterConfig) -> tuple[Sample, AugmentLogEntry]:
    prompt = build_augment_prompt(s.question, s.analysis)
    last = ""
    for attempt in range(cfg.retries + 1):
        try:
            text = adapter.complete(prompt)
            break
        except TransportError as exc:
            last = str(exc)
            log.info("augment %s attempt %d failed: %s", s.id, attempt + 1, exc)
    else:
        return s, AugmentLogEntry(s.id, STATUS_TRANSPORT, last)
    candidate = replace(s, analysis=text.strip())
    reasons = drop_reasons(candidate, fcfg)
    if reasons:
        return s, AugmentLogEntry(s.id, STATUS_REJECTED, "; ".join(reasons))
    return candidate, AugmentLogEntry(s.id, STATUS_REWRITTEN)


def augment_batch(
    samples: Sequence[Sample],
    cfg: AugmentConfig,
    adapter: Adapter | None = None,
    filter_cfg: FilterConfig | None = None,
) -> tuple[list[Sample], list[AugmentLogEntry]]:
    """Rewrite analyses; output order always matches input order."""
    if cfg.dry_run:
        return list(samples), [AugmentLogEntry(s.id, STATUS_DRY_RUN) for s in samples]
    adapter = adapter or HttpChatAdapter(cfg)
    fcfg = filter_cfg or FilterConfig()
    with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
        results = list(pool.map(lambda s: _one(s, adapter, cfg, fcfg), samples))
    return [r[0] for r in results], [r[1] for r in results]
