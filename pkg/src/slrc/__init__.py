"""Reservoir computing with time-multiplexed networks of delay-coupled Stuart-Landau oscillators."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .model import ConfigurationError, NetworkState, OscillatorParams, derivative  # noqa: E402

__all__ = ["BACKEND", "ConfigurationError", "NetworkState", "OscillatorParams", "derivative", "__version__"]
