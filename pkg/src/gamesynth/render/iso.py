"""Isometric voxel rendering.

Render frame: the camera looks from the (+x, +y, +z) side, so the visible
faces of a unit cube are its top, its +x face and its +y face.  Screen
coordinates are ``u = (x - y) * A`` and ``v = (x + y) * B - z * H``; cubes are
painted in increasing ``x + y`` then increasing ``z``, which draws every cube
before any cube that can cover it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from PIL import Image, ImageDraw

from .image import ImageBlob, RenderError, draw_text_centered, encode_png
from .palette import RGB, color, shade

Voxel = tuple[int, int, int]


@dataclass(frozen=True)
class Ladder:
    """A ladder on one vertical face of a column, spanning cubes z_lo..z_hi."""

    x: int
    y: int
    z_lo: int
    z_hi: int
    face: str = "+x"  # "+x" or "+y"


@dataclass
class IsoScene:
    voxels: dict[Voxel, str | RGB]
    ladders: list[Ladder] = field(default_factory=list)
    labels: dict[Voxel, str] = field(default_factory=dict)
    bounds: tuple[int, int, int] = (3, 3, 3)  # voxel coords must lie in [0, bound)
    origin: tuple[int, int, int] = (0, 0, 0)
    unit: int = 48
    pad: int = 16
    floor_grid: bool = False

    def check(self) -> None:
        ox, oy, oz = self.origin
        bx, by, bz = self.bounds
        for v in self.voxels:
            x, y, z = v[0] - ox, v[1] - oy, v[2] - oz
            if not (0 <= x < bx and 0 <= y < by and 0 <= z < bz):
                raise RenderError(f"voxel {v} outside bounds {self.bounds} (origin {self.origin})")
        for lad in self.ladders:
            if lad.face not in ("+x", "+y"):
                raise RenderError(f"ladder face {lad.face!r} not visible")
            for z in range(lad.z_lo, lad.z_hi + 1):
                if (lad.x, lad.y, z) not in self.voxels:
                    raise RenderError(f"ladder at {(lad.x, lad.y, z)} has no cube behind it")


def draw_order(voxels) -> list[Voxel]:
    return sorted(voxels, key=lambda v: (v[0] + v[1], v[2], v[0]))


class _Projector:
    def __init__(self, scene: IsoScene):
        self.a = scene.unit * math.cos(math.radians(30))
        self.b = scene.unit * 0.5
        self.h = float(scene.unit)
        ox, oy, oz = scene.origin
        bx, by, bz = scene.bounds
        corners = [
            (ox + i * bx, oy + j * by, oz + k * bz) for i in (0, 1) for j in (0, 1) for k in (0, 1)
        ]
        us = [self._u(*p) for p in corners]
        vs = [self._v(*p) for p in corners]
        self.du = scene.pad - min(us)
        self.dv = scene.pad - min(vs)
        self.width = int(math.ceil(max(us) - min(us))) + 2 * scene.pad
        self.height = int(math.ceil(max(vs) - min(vs))) + 2 * scene.pad

    def _u(self, x, y, z) -> float:  # noqa: ARG002
        return (x - y) * self.a

    def _v(self, x, y, z) -> float:
        return (x + y) * self.b - z * self.h

    def __call__(self, x: float, y: float, z: float) -> tuple[float, float]:
        return (self._u(x, y, z) + self.du, self._v(x, y, z) + self.dv)


def _faces(x: int, y: int, z: int):
    top = [(x, y, z + 1), (x + 1, y, z + 1), (x + 1, y + 1, z + 1), (x, y + 1, z + 1)]
    fx = [(x + 1, y, z), (x + 1, y + 1, z), (x + 1, y + 1, z + 1), (x + 1, y, z + 1)]
    fy = [(x, y + 1, z), (x + 1, y + 1, z), (x + 1, y + 1, z + 1), (x, y + 1, z + 1)]
    return top, fx, fy


def _draw_ladder_face(d: ImageDraw.ImageDraw, proj: _Projector, x: int, y: int, z: int, face: str) -> None:
    col = color("ladder brown")
    w = max(2, int(proj.h // 14))
    if face == "+x":
        def pt(s, t):  # s along y, t along z
            return proj(x + 1, y + s, z + t)
    else:
        def pt(s, t):  # s along x
            return proj(x + s, y + 1, z + t)
    d.line([pt(0.25, 0), pt(0.25, 1)], fill=col, width=w)
    d.line([pt(0.75, 0), pt(0.75, 1)], fill=col, width=w)
    for t in (0.2, 0.5, 0.8):
        d.line([pt(0.25, t), pt(0.75, t)], fill=col, width=w)


def iso_image(scene: IsoScene) -> Image.Image:
    scene.check()
    proj = _Projector(scene)
    img = Image.new("RGB", (proj.width, proj.height), color("background"))
    d = ImageDraw.Draw(img)
    if scene.floor_grid:
        ox, oy, oz = scene.origin
        bx, by, _ = scene.bounds
        lc = color("light gray")
        for i in range(bx + 1):
            d.line([proj(ox + i, oy, oz), proj(ox + i, oy + by, oz)], fill=lc, width=1)
        for j in range(by + 1):
            d.line([proj(ox, oy + j, oz), proj(ox + bx, oy + j, oz)], fill=lc, width=1)
    ladder_faces: dict[Voxel, str] = {}
    for lad in scene.ladders:
        for z in range(lad.z_lo, lad.z_hi + 1):
            ladder_faces[(lad.x, lad.y, z)] = lad.face
    edge = color("dark gray")
    for v in draw_order(scene.voxels):
        base = color(scene.voxels[v])
        top, fx, fy = _faces(*v)
        d.polygon([proj(*p) for p in fx], fill=shade(base, 0.78), outline=edge)
        d.polygon([proj(*p) for p in fy], fill=shade(base, 0.62), outline=edge)
        d.polygon([proj(*p) for p in top], fill=shade(base, 1.12) if sum(base) < 700 else base, outline=edge)
        if v in ladder_faces:
            _draw_ladder_face(d, proj, *v, ladder_faces[v])
        if v in scene.labels:
            cx, cy = proj(v[0] + 0.5, v[1] + 0.5, v[2] + 1)
            draw_text_centered(d, cx, cy, scene.labels[v], max(10, int(scene.unit * 0.42)), color("black"))
    return img


def render_iso(scene: IsoScene) -> ImageBlob:
    return encode_png(iso_image(scene))


def silhouette(scene: IsoScene, v: Voxel) -> list[tuple[float, float]]:
    """Screen-space hexagon covered by cube ``v`` (used for occlusion scoring)."""
    proj = _Projector(scene)
    x, y, z = v
    pts = [
        (x, y, z + 1),
        (x + 1, y, z + 1),
        (x + 1, y, z),
        (x + 1, y + 1, z),
        (x, y + 1, z),
        (x, y + 1, z + 1),
    ]
    return [proj(*p) for p in pts]
