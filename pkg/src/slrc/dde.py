"""Fixed-step RK4 integration of constant-delay Stuart-Landau networks.

Delayed states at the RK4 half steps come from cubic Hermite interpolation on
the stored (state, derivative) grid, so ``tau`` must be a multiple of ``dt``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .model import ConfigurationError, NetworkState, OscillatorParams
from .topology import edges, validate_adjacency


class DivergenceError(RuntimeError):
    """State left the physical range (|Z| > 1e6 or non-finite)."""

    def __init__(self, t: float, message: str | None = None):
        self.t = float(t)
        super().__init__(message or f"integration diverged at t = {self.t:.6g}")


class HistoryUnderflowError(RuntimeError):
    """The history buffer is too short for the requested delay."""


class OutOfRangeError(ValueError):
    """A drive or pump schedule was queried outside its time span."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    method: str = "rk4-hermite"

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.method.lower() != "rk4-hermite":
            raise ConfigurationError(f"unsupported method {self.method!r}; only 'rk4-hermite'")

    def steps(self, duration: float, what: str = "duration") -> int:
        """Number of grid steps in ``duration``; it must be a multiple of dt."""
        ratio = duration / self.dt
        k = int(round(ratio))
        if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, abs(ratio)):
            raise ConfigurationError(f"{what} = {duration} is not a positive multiple of dt = {self.dt}")
        return k


@dataclass
class HistoryBuffer:
    """Ring buffer of past states and both one-sided derivatives."""

    dt: float
    delay_steps: int
    z: np.ndarray
    f_right: np.ndarray
    f_left: np.ndarray

    @classmethod
    def constant(cls, z0, delay_steps: int, dt: float) -> "HistoryBuffer":
        z0 = np.asarray(z0, dtype=np.complex128)
        depth = delay_steps + 2
        z = np.empty((depth, z0.shape[0]), dtype=np.complex128)
        z[:] = z0
        return cls(dt, delay_steps, z, np.zeros_like(z), np.zeros_like(z))

    @property
    def depth(self) -> int:
        return self.z.shape[0]

    def check(self, delay_steps: int) -> None:
        if delay_steps != self.delay_steps or self.depth < delay_steps + 2:
            raise HistoryUnderflowError(
                f"history holds {self.depth} samples, delay needs {delay_steps + 2}"
            )


@dataclass
class SegmentRun:
    """Output of one :meth:`DDEIntegrator.run` call."""

    samples: np.ndarray  # state at the end of each segment, (n_segments, n)
    sample_times: np.ndarray
    traj_t: np.ndarray
    traj_z: np.ndarray


class DDEIntegrator:
    """Stateful integrator; successive :meth:`run` calls continue the trajectory."""

    def __init__(self, params: OscillatorParams, adjacency, config: IntegratorConfig | None = None,
                 state: NetworkState | None = None):
        self.params = params
        self.config = config or IntegratorConfig()
        G = validate_adjacency(adjacency)
        self.n = G.shape[0]
        self.delay_steps = self.config.steps(params.tau, "tau")
        src, dst, w = edges(G)
        wc = w * params.coupling
        self._src, self._dst = src, dst
        self._w_re = np.ascontiguousarray(wc.real)
        self._w_im = np.ascontiguousarray(wc.imag)
        state = state if state is not None else NetworkState.initial(self.n)
        if state.z.shape != (self.n,):
            raise ConfigurationError(f"state has {state.z.shape[0]} nodes, adjacency {self.n}")
        self.z = state.z.copy()
        self.t0 = float(state.t)
        self.step = 0
        self.history = HistoryBuffer.constant(self.z, self.delay_steps, self.config.dt)

    @property
    def t(self) -> float:
        return self.t0 + self.step * self.config.dt

    @property
    def state(self) -> NetworkState:
        return NetworkState(self.z.copy(), self.t)

    def run(self, levels, seg_steps: int, *, stride: int = 0) -> SegmentRun:
        """Advance through ``len(levels)`` segments of ``seg_steps`` steps each.

        ``levels[s]`` is the per-node pump held constant during segment ``s``.
        With ``stride > 0`` the state is also recorded every ``stride`` steps.
        """
        levels = np.ascontiguousarray(levels, dtype=np.float64)
        if levels.ndim == 1:
            levels = np.ascontiguousarray(np.repeat(levels[:, None], self.n, axis=1))
        if levels.ndim != 2 or levels.shape[1] != self.n:
            raise ConfigurationError(f"levels must have shape (segments, {self.n}), got {levels.shape}")
        seg_steps = int(seg_steps)
        if seg_steps < 1:
            raise ConfigurationError("seg_steps must be >= 1")
        self.history.check(self.delay_steps)
        nseg = levels.shape[0]
        dt = self.config.dt
        start = self.step
        samples = np.zeros((nseg, self.n), dtype=np.complex128)
        n_rec = (nseg * seg_steps) // stride if stride > 0 else 0
        traj = np.zeros((n_rec, self.n), dtype=np.complex128)
        if nseg:
            h = self.history
            step, status, rec = kernels.advance(
                self.z, h.z, h.f_right, h.f_left, self.step, self.delay_steps,
                levels, seg_steps, dt, float(self.params.omega),
                self.params.gamma.real, self.params.gamma.imag,
                self._src, self._dst, self._w_re, self._w_im,
                samples, traj, int(stride),
            )
            self.step = int(step)
            if status == kernels.STATUS_DIVERGED:
                raise DivergenceError(self.t)
        else:
            rec = 0
        seg_ends = start + seg_steps * np.arange(1, nseg + 1)
        traj_steps = start + stride * np.arange(1, rec + 1) if stride > 0 else np.zeros(0)
        return SegmentRun(
            samples=samples,
            sample_times=self.t0 + seg_ends * dt,
            traj_t=self.t0 + traj_steps * dt,
            traj_z=traj[:rec],
        )


class PiecewiseDrive:
    """Per-node pump held constant over consecutive segments of equal length."""

    def __init__(self, levels, duration: float, t0: float = 0.0):
        levels = np.asarray(levels, dtype=np.float64)
        if levels.ndim == 1:
            levels = levels[:, None]
        if levels.ndim != 2 or levels.shape[0] < 1:
            raise ConfigurationError("drive levels must be a non-empty (segments, nodes) array")
        if not duration > 0:
            raise ConfigurationError("segment duration must be positive")
        self.levels = levels
        self.duration = float(duration)
        self.t0 = float(t0)

    @property
    def t_end(self) -> float:
        return self.t0 + self.duration * self.levels.shape[0]

    def __call__(self, t: float) -> np.ndarray:
        idx = math.floor((t - self.t0) / self.duration)
        if not 0 <= idx < self.levels.shape[0]:
            raise OutOfRangeError(f"t = {t} outside drive schedule [{self.t0}, {self.t_end})")
        return self.levels[idx].copy()


def linear_ramp_drive(base, steps, duration: float, t0: float = 0.0) -> PiecewiseDrive:
    """Drive equal to ``base`` plus a piecewise-constant offset per segment.

    ``steps`` holds the offsets, shape ``(segments,)`` or ``(segments, nodes)``;
    the masked input ``eta * mask * u`` from :mod:`slrc.masking` is the usual
    source.
    """
    steps = np.asarray(steps, dtype=np.float64)
    return PiecewiseDrive(np.asarray(base, dtype=np.float64) + steps, duration, t0)


def integrate(config: IntegratorConfig, params: OscillatorParams, adjacency,
              drive_fn: Callable[[float], np.ndarray], t_end: float,
              observer: Callable[[float, np.ndarray], None] | None = None,
              *, stride: int = 1, state: NetworkState | None = None) -> NetworkState:
    """Integrate from ``state`` (default: the small initial kick) up to ``t_end``.

    A :class:`PiecewiseDrive` is handed to the compiled kernel segment by
    segment; any other callable is sampled once per step at the step start.
    ``observer(t, z)`` is called for every ``stride``-th grid point once the
    run completes.
    """
    if not t_end > 0:
        raise ConfigurationError("t_end must be positive")
    integ = DDEIntegrator(params, adjacency, config, state)
    n_steps = config.steps(t_end - integ.t0, "t_end")
    rec_stride = stride if observer is not None else 0
    runs = []
    if isinstance(drive_fn, PiecewiseDrive):
        seg = config.steps(drive_fn.duration, "drive segment duration")
        first = integ.t0 - drive_fn.t0
        if first < -1e-12 or integ.t0 + n_steps * config.dt > drive_fn.t_end + 1e-9 * config.dt:
            raise OutOfRangeError(f"drive schedule [{drive_fn.t0}, {drive_fn.t_end}) does not cover the run")
        full, rem = divmod(n_steps, seg)
        s0 = int(round(first / drive_fn.duration))
        levels = np.broadcast_to(drive_fn.levels, (drive_fn.levels.shape[0], integ.n))
        if full:
            runs.append(integ.run(levels[s0:s0 + full], seg, stride=rec_stride))
        if rem:
            runs.append(integ.run(levels[s0 + full:s0 + full + 1], rem, stride=rec_stride))
    else:
        dt = config.dt
        levels = np.empty((n_steps, integ.n))
        for i in range(n_steps):
            levels[i] = np.broadcast_to(np.asarray(drive_fn(integ.t0 + i * dt), dtype=np.float64), (integ.n,))
        runs.append(integ.run(levels, 1, stride=rec_stride))
    if observer is not None:
        for r in runs:
            for t, z in zip(r.traj_t, r.traj_z):
                observer(float(t), z)
    return integ.state


def write_trajectory_csv(path, t, z, stride: int = 1) -> None:
    """Rows ``t, Re(Z_0), Im(Z_0), ...`` every ``stride`` samples."""
    t = np.asarray(t)[::stride]
    z = np.asarray(z)[::stride]
    header = ["t"]
    for k in range(z.shape[1] if z.ndim == 2 else 0):
        header += [f"re_z{k}", f"im_z{k}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for ti, zi in zip(t, z):
            row = [repr(float(ti))]
            for v in zi:
                row += [repr(float(v.real)), repr(float(v.imag))]
            w.writerow(row)
