"""Game engines and the default registry."""

from __future__ import annotations

from ..core import Registry
from . import colorhue, langton, maze, maze3d, sokoban, starbattle, sudoku, tangram, tictactoe, voxel

GAME_MODULES = (sokoban, maze, tictactoe, sudoku, starbattle, langton, tangram, colorhue, voxel, maze3d)


def default_registry() -> Registry:
    reg = Registry()
    for mod in GAME_MODULES:
        reg.register(mod.GAME)
    return reg


__all__ = ["GAME_MODULES", "default_registry"]
