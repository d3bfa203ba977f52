"""Deterministic synthesis of game-reasoning visual QA datasets."""

from .core import GameDescriptor, Level, LEVELS, Registry, Sample, TaskSpec, validate_sample
from .games import default_registry
from .pipeline import GenerationConfig, generate, load_config, read_samples, validate_dataset
from .rng import derive_rng

__version__ = "0.1.0"

__all__ = [
    "GameDescriptor",
    "GenerationConfig",
    "LEVELS",
    "Level",
    "Registry",
    "Sample",
    "TaskSpec",
    "default_registry",
    "derive_rng",
    "generate",
    "load_config",
    "read_samples",
    "validate_dataset",
    "validate_sample",
]
