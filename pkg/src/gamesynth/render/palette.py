"""Named colour palette loaded from the versioned ``palette.txt`` file."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

RGB = tuple[int, int, int]


@lru_cache(maxsize=1)
def load_palette() -> dict[str, RGB]:
    text = resources.files("gamesynth.render").joinpath("palette.txt").read_text("utf-8")
    out: dict[str, RGB] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, _, value = (s.strip() for s in line.partition("="))
        if name == "version":
            continue
        out[name] = hex_to_rgb(value)
    return out


def palette_version() -> int:
    text = resources.files("gamesynth.render").joinpath("palette.txt").read_text("utf-8")
    for line in text.splitlines():
        name, _, value = (s.strip() for s in line.partition("="))
        if name == "version":
            return int(value)
    raise ValueError("palette file carries no version")


def hex_to_rgb(value: str) -> RGB:
    v = value.lstrip("#")
    if len(v) != 6:
        raise ValueError(f"bad hex colour {value!r}")
    return (int(v[0:2], 16), int(v[2:4], 16), int(v[4:6], 16))


def color(c: str | RGB) -> RGB:
    """Resolve a palette name or pass an RGB triple through."""
    if isinstance(c, tuple):
        return c
    if c.startswith("#"):
        return hex_to_rgb(c)
    try:
        return load_palette()[c]
    except KeyError:
        raise KeyError(f"colour {c!r} not in palette") from None


def shade(rgb: RGB, factor: float) -> RGB:
    """Scale towards black (factor < 1) or white (factor > 1)."""
    if factor <= 1:
        return tuple(int(round(ch * factor)) for ch in rgb)  # type: ignore[return-value]
    t = factor - 1
    return tuple(int(round(ch + (255 - ch) * t)) for ch in rgb)  # type: ignore[return-value]
