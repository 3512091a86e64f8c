"""Masking / time-multiplexing of a scalar input stream onto the pump.

One input sample ``u[w]`` is held for a window of length ``T = theta * N_V``.
Each real node ``k`` owns a binary mask row; during slot ``s`` of every window
its pump is ``base_lambda + eta * mask[k, s] * u[w]``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dde import OutOfRangeError
from .model import ConfigurationError

MAX_MASK_REDRAWS = 100


@dataclass(frozen=True)
class TimingConstants:
    theta: float = 12.0
    n_virtual: int = 128
    n_real: int = 2
    tau: float | None = None

    def __post_init__(self):
        if self.n_virtual < 1 or self.n_real < 1:
            raise ConfigurationError("n_virtual and n_real must be >= 1")
        if not self.theta > 0:
            raise ConfigurationError("theta must be positive")
        if self.tau is None:
            object.__setattr__(self, "tau", 17.0 * self.n_virtual)
        elif not self.tau > 0:
            raise ConfigurationError("tau must be positive")

    @property
    def T(self) -> float:
        return self.theta * self.n_virtual

    @property
    def n_features(self) -> int:
        return self.n_real * self.n_virtual


@dataclass(frozen=True)
class Mask:
    values: np.ndarray  # (n_real, n_virtual) of {0, 1}
    seed: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or not np.all((v == 0) | (v == 1)):
            raise ConfigurationError("mask must be a 2-D array of zeros and ones")
        if not np.all(v.any(axis=1)):
            raise ConfigurationError("every mask row needs at least one nonzero entry")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class InputSchedule:
    u: np.ndarray
    eta: float = 0.01
    base_lambda: float = 0.0

    def __post_init__(self):
        if not self.eta >= 0:
            raise ConfigurationError(f"eta must be >= 0, got {self.eta}")
        u = np.asarray(self.u, dtype=np.float64).ravel()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


def generate_mask(n_real: int, n_virtual: int, seed: int) -> Mask:
    """I.i.d. fair binary mask from a Philox (counter-based) stream.

    Rows without a single one would leave a node undriven; they are redrawn.
    """
    if n_real < 1 or n_virtual < 1:
        raise ConfigurationError("mask dimensions must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    values = rng.integers(0, 2, size=(n_real, n_virtual))
    for _ in range(MAX_MASK_REDRAWS):
        empty = ~values.any(axis=1)
        if not empty.any():
            return Mask(values.astype(np.float64), seed)
        values[empty] = rng.integers(0, 2, size=(int(empty.sum()), n_virtual))
    raise RuntimeError(f"mask generation did not converge after {MAX_MASK_REDRAWS} redraws")


def pump_at(t: float, schedule: InputSchedule, mask: Mask, timing: TimingConstants) -> np.ndarray:
    """Per-node pump lambda_k(t)."""
    T = timing.T
    n_win = schedule.u.shape[0]
    if not 0 <= t < n_win * T:
        raise OutOfRangeError(f"t = {t} outside input schedule [0, {n_win * T})")
    w = math.floor(t / T)
    s = min(math.floor((t - w * T) / timing.theta), timing.n_virtual - 1)
    return schedule.base_lambda + schedule.eta * mask.values[:, s] * schedule.u[w]


def pump_levels(schedule: InputSchedule, mask: Mask) -> np.ndarray:
    """All slot pumps at once, shape ``(len(u) * N_V, N_R)``; row ``w * N_V + s``."""
    m = mask.values.T  # (n_virtual, n_real)
    levels = schedule.base_lambda + schedule.eta * m[None, :, :] * schedule.u[:, None, None]
    return levels.reshape(-1, m.shape[1])


def write_mask_csv(mask: Mask, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# seed {mask.seed}\n")
        w = csv.writer(fh)
        for row in mask.values.astype(int):
            w.writerow(row.tolist())


def read_mask_csv(path) -> Mask:
    seed = -1
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "seed":
                    seed = int(parts[1])
                continue
            rows.append([float(x) for x in line.split(",")])
    return Mask(np.array(rows), seed)
