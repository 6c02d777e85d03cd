"""3-D statistical spatial channel model for 28 GHz dense-urban NLOS links."""

__version__ = "0.1.0"

from .distributions import RngStream
from .params import LinkConfig, ModelParams, ParameterError, SpatialParams, TemporalParams
from .channel import ChannelRealization, assemble_spectrum, generate_channel, impulse_response
from .ensemble import EnsembleStats, run_ensemble

__all__ = [
    "RngStream",
    "LinkConfig",
    "TemporalParams",
    "SpatialParams",
    "ModelParams",
    "ParameterError",
    "ChannelRealization",
    "generate_channel",
    "impulse_response",
    "assemble_spectrum",
    "EnsembleStats",
    "run_ensemble",
]
