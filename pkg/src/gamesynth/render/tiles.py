"""2D tile-board rendering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from PIL import Image, ImageDraw

from .image import ImageBlob, RenderError, captioned, draw_text_centered, encode_png, stack_horizontal, stack_vertical
from .palette import RGB, color

GLYPHS = (
    "player",
    "circle",
    "box",
    "target",
    "brick",
    "star",
    "arrow_up",
    "arrow_right",
    "arrow_down",
    "arrow_left",
    "crosshatch",
)


@dataclass(frozen=True)
class CellPaint:
    fill: str | RGB = "white"
    glyph: str | None = None
    glyph_color: str | RGB | None = None
    label: str | None = None
    label_color: str | RGB = "black"

    def __post_init__(self) -> None:
        if self.glyph is not None and self.glyph not in GLYPHS:
            raise RenderError(f"unknown glyph {self.glyph!r}")


@dataclass
class TileGrid:
    rows: int
    cols: int
    cells: dict[tuple[int, int], CellPaint] = field(default_factory=dict)
    default: CellPaint = CellPaint()
    axis_labels: bool = True
    label_base: int = 0
    cell_px: int = 64
    footer: list["Panel"] = field(default_factory=list)
    footer_caption: str | None = None
    grid_color: str | RGB = "grid line"

    @property
    def margin(self) -> int:
        return max(24, self.cell_px // 2) if self.axis_labels else 8

    def board_size(self) -> tuple[int, int]:
        """(width, height) of the board part: cols*cell_px + 2*margin by rows*cell_px + 2*margin."""
        return (self.cols * self.cell_px + 2 * self.margin, self.rows * self.cell_px + 2 * self.margin)

    def paint(self, r: int, c: int) -> CellPaint:
        return self.cells.get((r, c), self.default)


Panel = Union[TileGrid, Image.Image, tuple[str, Union[TileGrid, Image.Image]]]


def _draw_glyph(d: ImageDraw.ImageDraw, glyph: str, x0: int, y0: int, s: int, col: RGB | None) -> None:
    cx, cy = x0 + s / 2, y0 + s / 2
    pad = max(2, s // 8)
    if glyph in ("player", "circle"):
        r = s * 0.32
        d.ellipse([cx - r, cy - r, cx + r, cy + r], fill=col or color("black"))
    elif glyph == "star":
        r = s * 0.22
        d.ellipse([cx - r, cy - r, cx + r, cy + r], fill=col or color("black"))
    elif glyph == "box":
        c = col or color("box brown")
        d.rectangle([x0 + pad, y0 + pad, x0 + s - pad, y0 + s - pad], fill=c, outline=color("brown"), width=max(2, s // 20))
        w = max(2, s // 16)
        d.line([x0 + pad, y0 + pad, x0 + s - pad, y0 + s - pad], fill=color("brown"), width=w)
        d.line([x0 + pad, y0 + s - pad, x0 + s - pad, y0 + pad], fill=color("brown"), width=w)
    elif glyph == "target":
        c = col or color("target green")
        w = max(3, s // 10)
        p = s // 4
        d.line([x0 + p, y0 + p, x0 + s - p, y0 + s - p], fill=c, width=w)
        d.line([x0 + p, y0 + s - p, x0 + s - p, y0 + p], fill=c, width=w)
    elif glyph == "brick":
        c = col or color("mortar")
        w = max(1, s // 24)
        rows = 4
        bh = s / rows
        for i in range(1, rows):
            y = y0 + i * bh
            d.line([x0, y, x0 + s - 1, y], fill=c, width=w)
        for i in range(rows):
            off = 0 if i % 2 == 0 else s / 4
            for k in range(3):
                x = x0 + off + k * s / 2
                if x0 < x < x0 + s:
                    d.line([x, y0 + i * bh, x, y0 + (i + 1) * bh], fill=c, width=w)
    elif glyph.startswith("arrow_"):
        c = col or color("red")
        a = s * 0.34
        pts = {
            "arrow_up": [(cx, cy - a), (cx - a * 0.8, cy + a * 0.7), (cx + a * 0.8, cy + a * 0.7)],
            "arrow_down": [(cx, cy + a), (cx - a * 0.8, cy - a * 0.7), (cx + a * 0.8, cy - a * 0.7)],
            "arrow_left": [(cx - a, cy), (cx + a * 0.7, cy - a * 0.8), (cx + a * 0.7, cy + a * 0.8)],
            "arrow_right": [(cx + a, cy), (cx - a * 0.7, cy - a * 0.8), (cx - a * 0.7, cy + a * 0.8)],
        }[glyph]
        d.polygon(pts, fill=c)
    elif glyph == "crosshatch":
        c = col or color("gray")
        # 45 degree lines every 6 px in both directions, clipped to the cell
        for k in range(-s, s + 1, 6):
            _clipped_line(d, x0, y0, s, k, c, +1)
            _clipped_line(d, x0, y0, s, k, c, -1)


def _clipped_line(d: ImageDraw.ImageDraw, x0: int, y0: int, s: int, k: int, c: RGB, sign: int) -> None:
    # sign +1: y = x + k ; sign -1: y = -x + k + s  (cell-local coords)
    pts = []
    for t in range(s):
        y = t + k if sign > 0 else -t + k + s - 1
        if 0 <= y < s:
            pts.append((x0 + t, y0 + y))
    if len(pts) >= 2:
        d.line([pts[0], pts[-1]], fill=c, width=1)


def _board_image(g: TileGrid) -> Image.Image:
    if g.rows < 1 or g.cols < 1:
        raise RenderError(f"grid must be at least 1x1, got {g.rows}x{g.cols}")
    w, h = g.board_size()
    img = Image.new("RGB", (w, h), color("background"))
    d = ImageDraw.Draw(img)
    m, s = g.margin, g.cell_px
    line = color(g.grid_color)
    for r in range(g.rows):
        for c in range(g.cols):
            p = g.paint(r, c)
            x0, y0 = m + c * s, m + r * s
            d.rectangle([x0, y0, x0 + s - 1, y0 + s - 1], fill=color(p.fill))
            if p.glyph:
                _draw_glyph(d, p.glyph, x0, y0, s, color(p.glyph_color) if p.glyph_color else None)
            if p.label:
                draw_text_centered(d, x0 + s / 2, y0 + s / 2, p.label, max(10, int(s * 0.42)), color(p.label_color))
    for r in range(g.rows + 1):
        d.line([m, m + r * s, m + g.cols * s, m + r * s], fill=line, width=1)
    for c in range(g.cols + 1):
        d.line([m + c * s, m, m + c * s, m + g.rows * s], fill=line, width=1)
    if g.axis_labels:
        fs = max(10, min(18, m // 2 + 2))
        tc = color("axis text")
        for c in range(g.cols):
            draw_text_centered(d, m + c * s + s / 2, m / 2, str(c + g.label_base), fs, tc)
        for r in range(g.rows):
            draw_text_centered(d, m / 2, m + r * s + s / 2, str(r + g.label_base), fs, tc)
    return img


def _panel_image(p: Panel) -> Image.Image:
    if isinstance(p, tuple):
        caption, inner = p
        return captioned(_panel_image(inner), caption)
    if isinstance(p, TileGrid):
        return tile_image(p)
    return p


def tile_image(g: TileGrid) -> Image.Image:
    board = _board_image(g)
    if not g.footer:
        return board
    row = stack_horizontal([_panel_image(p) for p in g.footer], gap=12)
    if g.footer_caption:
        row = captioned(row, g.footer_caption)
    return stack_vertical([board, row], gap=10)


def render_tiles(g: TileGrid) -> ImageBlob:
    return encode_png(tile_image(g))
