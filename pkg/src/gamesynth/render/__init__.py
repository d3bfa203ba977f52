"""Deterministic PNG rendering for tile boards and isometric voxel scenes."""

from .image import ImageBlob, RenderError, captioned, encode_png, stack_horizontal, stack_vertical
from .iso import IsoScene, Ladder, iso_image, render_iso
from .palette import color, load_palette, palette_version
from .tiles import CellPaint, TileGrid, render_tiles, tile_image

__all__ = [
    "CellPaint",
    "ImageBlob",
    "IsoScene",
    "Ladder",
    "RenderError",
    "TileGrid",
    "captioned",
    "color",
    "encode_png",
    "iso_image",
    "load_palette",
    "palette_version",
    "render",
    "render_iso",
    "render_tiles",
    "stack_horizontal",
    "stack_vertical",
    "tile_image",
]


def render(scene) -> ImageBlob:
    """Render a TileGrid, an IsoScene, or a PIL image composed by a game."""
    from PIL import Image

    if isinstance(scene, TileGrid):
        return render_tiles(scene)
    if isinstance(scene, IsoScene):
        return render_iso(scene)
    if isinstance(scene, Image.Image):
        return encode_png(scene)
    if callable(scene):
        return render(scene())
    raise RenderError(f"cannot render {type(scene).__name__}")
