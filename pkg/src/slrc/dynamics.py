"""Classification of the input-free network dynamics.

Two labels per parameter point: the synchronization class of the settled
trajectory and the number of distinct maxima levels of the amplitude |Z(t)|
(0 = constant amplitude, 1 = regular amplitude oscillation, more = period
doubling, quasi-periodic or irregular dynamics).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dde import DDEIntegrator, IntegratorConfig
from .model import OscillatorParams

SYNC_TOL = 1e-3
BIN_TOL = 1e-3
TRANSIENT_TAUS = 50
WINDOW_TAUS = 10


class InsufficientDataError(ValueError):
    pass


class SyncState(str, enum.Enum):
    OFF = "off"
    SYNCHRONIZED = "sync"
    ANTI_SYNCHRONIZED = "antisync"
    OTHER = "other"


@dataclass(frozen=True)
class DynamicsLabel:
    sync: SyncState
    n_extrema_levels: int

    def __post_init__(self):
        if self.sync is SyncState.OFF and self.n_extrema_levels != 0:
            raise ValueError("the off state has no amplitude maxima")


def classify_sync(z_tail, tol: float = SYNC_TOL) -> SyncState:
    """Label a settled trajectory ``z_tail`` of shape (samples, N_R).

    For N_R > 2 synchronization means every node follows node 0; the
    anti-synchronized class only exists for two nodes.
    """
    z = np.asarray(z_tail, dtype=np.complex128)
    if z.ndim == 1:
        z = z[:, None]
    if z.size == 0:
        raise InsufficientDataError("empty trajectory tail")
    amp = np.abs(z)
    if amp.max() < tol:
        return SyncState.OFF
    nr = z.shape[1]
    if nr == 1:
        return SyncState.OTHER
    scale = tol * amp[:, 0].max()
    if np.abs(z[:, 1:] - z[:, :1]).max() < scale:
        return SyncState.SYNCHRONIZED
    if nr == 2 and np.abs(z[:, 1] + z[:, 0]).max() < scale:
        return SyncState.ANTI_SYNCHRONIZED
    return SyncState.OTHER


def count_extrema_levels(amplitude, bin_tol: float = BIN_TOL) -> int:
    """Number of distinct values taken by the strict local maxima of a series.

    Maxima closer than ``bin_tol`` (single linkage) count as one level; a
    series whose total range is below ``bin_tol`` counts as constant (0).
    """
    a = np.asarray(amplitude, dtype=np.float64).ravel()
    if a.size < 3 or np.ptp(a) < bin_tol:
        return 0
    inner = a[1:-1]
    peaks = inner[(inner > a[:-2]) & (inner > a[2:])]
    if peaks.size == 0:
        return 0
    peaks = np.sort(peaks)
    return int(1 + np.count_nonzero(np.diff(peaks) > bin_tol))


def probe_dynamics(params: OscillatorParams, adjacency, config: IntegratorConfig | None = None,
                   transient_taus: float = TRANSIENT_TAUS, window_taus: float = WINDOW_TAUS,
                   sample_dt: float = 0.1, tol: float = SYNC_TOL, bin_tol: float = BIN_TOL) -> DynamicsLabel:
    """Integrate without input at pump ``params.lambda_pump`` and label the tail."""
    config = config or IntegratorConfig()
    integ = DDEIntegrator(params, adjacency, config)
    d = integ.delay_steps
    level = np.full((1, integ.n), params.lambda_pump)
    integ.run(level, int(round(transient_taus * d)))
    stride = max(1, int(round(sample_dt / config.dt)))
    window = max(stride, int(round(window_taus * d)) // stride * stride)
    tail = integ.run(level, window, stride=stride).traj_z
    sync = classify_sync(tail, tol)
    if sync is SyncState.OFF:
        return DynamicsLabel(sync, 0)
    levels = max(count_extrema_levels(np.abs(tail[:, k]), bin_tol) for k in range(tail.shape[1]))
    return DynamicsLabel(sync, levels)
