"""Stuart-Landau network vector field with delayed coupling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Inconsistent or invalid model/run configuration."""


# Paper default operating point: supercritical, with amplitude-phase coupling.
GAMMA_DEFAULT = complex(-0.1, 0.5)
INITIAL_AMPLITUDE = 0.001 * (1 + 1j)


@dataclass(frozen=True)
class OscillatorParams:
    """Parameters shared by every oscillator in the network.

    ``lambda_pump`` is only the base operating point; the instantaneous,
    per-node pump is passed to :func:`derivative` as ``drive``.
    """

    lambda_pump: float = 0.0
    omega: float = 1.0
    gamma: complex = GAMMA_DEFAULT
    kappa: float = 0.04
    phi: float = 0.0
    tau: float = 34.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "gamma", complex(self.gamma))

    @property
    def coupling(self) -> complex:
        """Complex coupling prefactor kappa * exp(i phi)."""
        return self.kappa * np.exp(1j * self.phi)


@dataclass
class NetworkState:
    z: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.complex128)

    @classmethod
    def initial(cls, n: int) -> "NetworkState":
        """Small symmetric kick off the origin, identical for every node."""
        return cls(np.full(n, INITIAL_AMPLITUDE, dtype=np.complex128), 0.0)

    @property
    def n(self) -> int:
        return self.z.shape[0]


def derivative(state: NetworkState, delayed, params: OscillatorParams, adjacency, drive) -> np.ndarray:
    """dZ_k/dt = (drive_k + i omega + gamma |Z_k|^2) Z_k + kappa e^{i phi} sum_l G_kl Z_l(t - tau)."""
    z = np.asarray(state.z, dtype=np.complex128)
    delayed = np.asarray(delayed, dtype=np.complex128)
    drive = np.asarray(drive, dtype=np.float64)
    G = np.asarray(adjacency, dtype=np.float64)
    n = z.shape[0]
    if G.shape != (n, n) or delayed.shape != (n,) or drive.shape != (n,):
        raise ConfigurationError(
            f"dimension mismatch: state {z.shape}, delayed {delayed.shape}, "
            f"drive {drive.shape}, adjacency {G.shape}"
        )
    local = (drive + 1j * params.omega + params.gamma * (z.real ** 2 + z.imag ** 2)) * z
    return local + params.coupling * (G @ delayed)
