"""Benchmark tasks: NARMA10 and Santa Fe one-step prediction."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .model import ConfigurationError

NARMA_LIMIT = 10.0
NARMA_MAX_DRAWS = 50
# Scale between the reservoir input u in [0, 1] and the value fed to the
# NARMA10 recursion; the recursion diverges almost surely at scale 1.
NARMA_INPUT_SCALE = 0.5

NARMA_LENGTHS_TWO_NODE = (150, 1500, 500)
NARMA_LENGTHS_NETWORK = (1000, 5000, 5000)
SANTA_FE_LENGTHS = (100, 2900, 2900)

SANTA_FE_ENV = "SLRC_SANTAFE"
SANTA_FE_HINT = (
    "The Santa Fe laser series (competition data set A, one integer per line) is required. "
    f"Point ${SANTA_FE_ENV} or the 'santa_fe_path' option at it; this repository ships a copy "
    "at data/santafe_laser.txt, and the original is distributed with the Santa Fe Time Series "
    "Competition archive."
)


class NarmaDivergenceError(ArithmeticError):
    def __init__(self, index: int):
        self.index = int(index)
        super().__init__(f"NARMA10 series left [-{NARMA_LIMIT}, {NARMA_LIMIT}] at index {index}")


class TaskGenerationError(RuntimeError):
    pass


class MissingDataError(FileNotFoundError):
    pass


class DegenerateDataError(ValueError):
    pass


@dataclass(frozen=True)
class TaskData:
    inputs: np.ndarray
    targets: np.ndarray
    split: tuple[int, int, int]
    name: str = "task"
    seed: int | None = None
    redraws: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        u = np.asarray(self.inputs, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64)
        split = tuple(int(x) for x in self.split)
        if len(split) != 3 or min(split) < 0:
            raise ConfigurationError(f"split must be three non-negative lengths, got {self.split}")
        if u.shape != y.shape or u.shape[0] != sum(split):
            raise ConfigurationError(
                f"inputs {u.shape} / targets {y.shape} do not match split total {sum(split)}"
            )
        if u.size and (u.min() < 0 or u.max() > 1):
            raise ConfigurationError("task inputs must lie in [0, 1]")
        for a in (u, y):
            a.setflags(write=False)
        object.__setattr__(self, "inputs", u)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "split", split)

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def train_slice(self) -> slice:
        b, tr, _ = self.split
        return slice(b, b + tr)

    @property
    def test_slice(self) -> slice:
        b, tr, te = self.split
        return slice(b + tr, b + tr + te)


def narma10(u, limit: float = NARMA_LIMIT) -> np.ndarray:
    """Return A_0..A_n of the NARMA10 recursion driven by ``u`` (A_0 = 0).

    Indices before the start of the series count as zero.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    A, bad = kernels.narma10_recursion(u, float(limit))
    if bad >= 0:
        raise NarmaDivergenceError(bad)
    return A


def generate_narma_task(lengths=NARMA_LENGTHS_TWO_NODE, seed: int = 0,
                        input_scale: float = NARMA_INPUT_SCALE,
                        max_draws: int = NARMA_MAX_DRAWS) -> TaskData:
    """Uniform [0, 1] inputs paired with NARMA10 targets.

    The input fed to the reservoir at step k is ``u_k``; the target is
    ``A_{k+1}`` computed from ``input_scale * u``.  A divergent draw is
    discarded and the next seed tried.
    """
    lengths = tuple(int(x) for x in lengths)
    if len(lengths) != 3 or min(lengths) < 0 or sum(lengths) < 1:
        raise ConfigurationError(f"lengths must be three non-negative ints, got {lengths}")
    n = sum(lengths)
    for attempt in range(max_draws):
        s = seed + attempt
        u = np.random.default_rng(s).random(n)
        try:
            A = narma10(input_scale * u)
        except NarmaDivergenceError:
            continue
        return TaskData(u, A[1:], lengths, name="narma10", seed=s, redraws=attempt,
                        meta={"input_scale": input_scale, "requested_seed": seed})
    raise TaskGenerationError(f"{max_draws} consecutive NARMA10 draws diverged (seeds {seed}..{seed + max_draws - 1})")


def resolve_santa_fe_path(path=None) -> Path:
    p = path or os.environ.get(SANTA_FE_ENV)
    if not p:
        raise MissingDataError(f"no Santa Fe data file configured. {SANTA_FE_HINT}")
    p = Path(p)
    if not p.is_file():
        raise MissingDataError(f"Santa Fe data file {str(p)!r} not found. {SANTA_FE_HINT}")
    return p


def read_series(path) -> np.ndarray:
    values = []
    for line in Path(path).read_text().split():
        values.append(float(line))
    return np.asarray(values)


def santa_fe_from_series(series, split=SANTA_FE_LENGTHS) -> TaskData:
    x = np.asarray(series, dtype=np.float64)
    split = tuple(int(v) for v in split)
    need = sum(split) + 1
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi == lo:
        raise DegenerateDataError("Santa Fe series has zero dynamic range")
    if x.shape[0] < need:
        raise DegenerateDataError(f"Santa Fe series has {x.shape[0]} samples, split needs {need}")
    scaled = (x - lo) / (hi - lo)
    n = sum(split)
    return TaskData(scaled[:n], scaled[1:n + 1], split, name="santafe",
                    meta={"min": lo, "max": hi, "samples": int(x.shape[0])})


def load_santa_fe(path=None, split=SANTA_FE_LENGTHS) -> TaskData:
    """Min-max scaled Santa Fe series; target = next sample."""
    return santa_fe_from_series(read_series(resolve_santa_fe_path(path)), split)


def write_task_csv(task: TaskData, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "u", "y"])
        for k, (u, y) in enumerate(zip(task.inputs, task.targets)):
            w.writerow([k, repr(float(u)), repr(float(y))])
