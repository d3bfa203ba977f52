"""Command-line entry point: generate, validate, stats, filter, augment."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import augment as aug
from .pipeline import (
    ConfigError,
    DatasetError,
    _dump,
    generate,
    load_config,
    read_samples,
    validate_dataset,
    write_dataset,
    write_jsonl,
)
from .quality import FilterConfig, MissingImageError, apply_filters, compute_stats

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-rep", type=float, help="maximum 4-gram repetition rate (default 0.70)")
    p.add_argument("--min-words", type=int, help="minimum analysis word count (default 30)")
    p.add_argument("--max-words", type=int, help="maximum analysis word count (default 1200)")


def _filter_cfg(args, base: FilterConfig | None = None) -> FilterConfig:
    base = base or FilterConfig()
    changes = {
        k: v
        for k, v in (("max_repetition", args.max_rep), ("min_words", args.min_words), ("max_words", args.max_words))
        if v is not None
    }
    if getattr(args, "no_consistency", False):
        changes["check_consistency"] = False
    return replace(base, **changes)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gamesynth", description="Generate and curate game-reasoning VQA datasets.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="generate a dataset")
    g.add_argument("--config", help="YAML or JSON config file")
    g.add_argument("--out", help="output directory")
    g.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    g.add_argument("--games", help="comma-separated game ids (default: all)")
    g.add_argument("--per-task", type=int, help="samples per task")
    g.add_argument("--plot-mix", help="plot level fractions, e.g. '0.5,0.3,0.2' or 'easy=0.5,medium=0.5,hard=0'")
    g.add_argument("--jobs", type=int, help="worker processes")
    g.add_argument("--split", choices=("train", "test"), help="seed range partition")
    g.add_argument("--force", action="store_true", help="replace an existing images/ directory")
    _filter_flags(g)

    v = sub.add_parser("validate", help="check every record of a dataset")
    v.add_argument("dataset")

    s = sub.add_parser("stats", help="print dataset statistics")
    s.add_argument("dataset")

    f = sub.add_parser("filter", help="apply quality filters into a new directory")
    f.add_argument("dataset")
    f.add_argument("--out", required=True)
    f.add_argument("--no-consistency", action="store_true", help="skip the final-answer consistency check")
    _filter_flags(f)

    a = sub.add_parser("augment", help="paraphrase analyses into a new directory")
    a.add_argument("dataset")
    a.add_argument("--out", required=True)
    a.add_argument("--config", help="config file whose 'augment' section supplies defaults")
    a.add_argument("--endpoint", help="chat-completion URL")
    a.add_argument("--model", help="model name sent with each request")
    a.add_argument("--timeout", type=float)
    a.add_argument("--retries", type=int)
    a.add_argument("--jobs", type=int, help="parallel requests")
    a.add_argument("--dry-run", action="store_true", help="copy analyses unchanged")
    _filter_flags(a)
    return p


def _cmd_generate(args) -> int:
    overrides = {
        "master_seed": args.seed,
        "output_dir": args.out,
        "games": args.games,
        "per_task": args.per_task,
        "plot_mix": args.plot_mix,
        "jobs": args.jobs,
        "split": args.split,
    }
    cfg = load_config(args.config, overrides)
    cfg = replace(cfg, filter=_filter_cfg(args, cfg.filter))
    res = generate(cfg, force=args.force)
    print(
        f"generated {len(res.kept)} samples in {cfg.output_dir} "
        f"({len(res.dropped)} dropped by filters, {len(res.skipped)} skipped)"
    )
    if not res.ok:
        print(f"error: skip rate {res.skip_rate:.2%} exceeds 1%", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_validate(args) -> int:
    problems = validate_dataset(args.dataset)
    for p in problems:
        print(p)
    n = len(read_samples(args.dataset))
    print(f"{n} records checked, {len(problems)} problems")
    return EXIT_FAIL if problems else EXIT_OK


def _cmd_stats(args) -> int:
    samples = read_samples(args.dataset)
    print(compute_stats(samples, args.dataset).to_text(), end="")
    return EXIT_OK


def _same_dir(a: str, b: str) -> bool:
    return Path(a).resolve() == Path(b).resolve()


def _cmd_filter(args) -> int:
    if _same_dir(args.dataset, args.out):
        raise DatasetError("refusing to filter in place; choose a different --out")
    samples = read_samples(args.dataset)
    kept, dropped = apply_filters(samples, _filter_cfg(args))
    write_dataset(Path(args.out), kept, dropped, Path(args.dataset))
    print(f"kept {len(kept)} of {len(samples)} samples ({len(dropped)} dropped)")
    return EXIT_OK


def _cmd_augment(args) -> int:
    if _same_dir(args.dataset, args.out):
        raise DatasetError("refusing to augment in place; choose a different --out")
    base = load_config(args.config).augment if args.config else None
    acfg = aug.AugmentConfig.from_mapping(base)
    changes = {
        k: v
        for k, v in (("endpoint", args.endpoint), ("model_name", args.model), ("timeout", args.timeout),
                     ("retries", args.retries), ("max_parallel", args.jobs))
        if v is not None
    }
    if args.dry_run:
        changes["dry_run"] = True
    acfg = replace(acfg, **changes)
    if not acfg.dry_run and not acfg.endpoint:
        raise ConfigError("augment needs --endpoint (or a config 'augment.endpoint') unless --dry-run is given")
    samples = read_samples(args.dataset)
    out_samples, entries = aug.augment_batch(samples, acfg, filter_cfg=_filter_cfg(args))
    out = Path(args.out)
    write_dataset(out, out_samples, [], Path(args.dataset))
    write_jsonl(out / "augment_log.jsonl", (_dump(e.to_dict()) for e in entries))
    counts: dict[str, int] = {}
    for e in entries:
        counts[e.status] = counts.get(e.status, 0) + 1
    print("augment: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "filter": _cmd_filter,
    "augment": _cmd_augment,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.cmd](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, MissingImageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
