from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache

from PIL import Image, ImageDraw, ImageFont


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class ImageBlob:
    bytes: bytes
    width: int
    height: int

    def to_image(self) -> Image.Image:
        return Image.open(io.BytesIO(self.bytes)).convert("RGB")


def encode_png(img: Image.Image) -> ImageBlob:
    # no metadata chunks are written, so identical pixels give identical bytes
    buf = io.BytesIO()
    img.convert("RGB").save(buf, format="PNG", compress_level=6)
    return ImageBlob(buf.getvalue(), img.width, img.height)


@lru_cache(maxsize=32)
def font(size: int) -> ImageFont.FreeTypeFont | ImageFont.ImageFont:
    return ImageFont.load_default(size=size)


def draw_text_centered(draw: ImageDraw.ImageDraw, cx: float, cy: float, text: str, size: int, fill) -> None:
    f = font(size)
    draw.text((cx, cy), text, fill=fill, font=f, anchor="mm")


def stack_vertical(images: list[Image.Image], gap: int = 8, bg=(255, 255, 255)) -> Image.Image:
    w = max(im.width for im in images)
    h = sum(im.height for im in images) + gap * (len(images) - 1)
    out = Image.new("RGB", (w, h), bg)
    y = 0
    for im in images:
        out.paste(im, ((w - im.width) // 2, y))
        y += im.height + gap
    return out


def stack_horizontal(images: list[Image.Image], gap: int = 8, bg=(255, 255, 255)) -> Image.Image:
    h = max(im.height for im in images)
    w = sum(im.width for im in images) + gap * (len(images) - 1)
    out = Image.new("RGB", (w, h), bg)
    x = 0
    for im in images:
        out.paste(im, (x, (h - im.height) // 2))
        x += im.width + gap
    return out


def captioned(img: Image.Image, caption: str, size: int = 14) -> Image.Image:
    pad = size + 10
    out = Image.new("RGB", (img.width, img.height + pad), (255, 255, 255))
    out.paste(img, (0, pad))
    d = ImageDraw.Draw(out)
    draw_text_centered(d, img.width / 2, pad / 2, caption, size, (40, 40, 40))
    return out
