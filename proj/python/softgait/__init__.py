"""Soft voxel biped gait optimisation: simulation, CMA-ES and a grid archive search."""

from ._softgait import (
    Archive,
    CmaEs,
    ConfigError,
    ControlParams,
    Error,
    GaitResult,
    ProtocolError,
    Qda,
    Terrain,
    TerrainKind,
    ValidationError,
    __version__,
    decode,
    evaluate,
    trial_seed,
)

__all__ = [
    "Archive",
    "CmaEs",
    "ConfigError",
    "ControlParams",
    "Error",
    "GaitResult",
    "ProtocolError",
    "Qda",
    "Terrain",
    "TerrainKind",
    "ValidationError",
    "__version__",
    "decode",
    "evaluate",
    "trial_seed",
]
