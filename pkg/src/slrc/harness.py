"""Train/test runs, 2-D (lambda, phi) scans, aggregation and cross-task correlation."""

from __future__ import annotations

import csv
import dataclasses
import functools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dde import DDEIntegrator, DivergenceError, IntegratorConfig
from .dynamics import probe_dynamics
from .masking import InputSchedule, TimingConstants, generate_mask, pump_levels
from .model import ConfigurationError, OscillatorParams
from .readout import DEFAULT_RIDGE, SingularSystemError, harvest, nrmse, train
from .tasks import (
    NARMA_INPUT_SCALE,
    NARMA_LENGTHS_NETWORK,
    NARMA_LENGTHS_TWO_NODE,
    SANTA_FE_LENGTHS,
    NarmaDivergenceError,
    TaskData,
    TaskGenerationError,
    generate_narma_task,
    read_series,
    resolve_santa_fe_path,
    santa_fe_from_series,
)
from .topology import canonical_topology, make_topology, spectral_radius

TASKS = ("narma10", "santafe")
READOUT_DIMENSION = 256
CSV_COLUMNS = ("lambda", "phi", "nrmse_test", "nrmse_train", "sync_label", "extrema_levels",
               "mask_seed", "task_seed", "status")
_SEED_TAGS = {"mask": 1, "task": 2}


class EmptyAggregateError(ValueError):
    pass


class InsufficientOverlapError(ValueError):
    pass


@dataclass(frozen=True)
class ReservoirConfig:
    """Everything needed to build and drive one multiplexed network."""

    n_real: int = 2
    n_virtual: int = 128
    topology: str = "ring"
    lambda_pump: float = 0.0
    phi: float = 0.0
    kappa: float = 0.04
    omega: float = 1.0
    gamma_re: float = -0.1
    gamma_im: float = 0.5
    theta: float = 12.0
    tau: float | None = None
    eta: float = 0.01
    dt: float = 0.01
    ridge: float = DEFAULT_RIDGE
    observable: str = "abs"

    def __post_init__(self):
        object.__setattr__(self, "topology", canonical_topology(self.topology))
        if self.tau is None:
            object.__setattr__(self, "tau", 17.0 * self.n_virtual)
        timing = self.timing()
        cfg = self.integrator()
        cfg.steps(timing.theta, "theta")
        cfg.steps(timing.tau, "tau")

    def params(self) -> OscillatorParams:
        return OscillatorParams(self.lambda_pump, self.omega, complex(self.gamma_re, self.gamma_im),
                                self.kappa, self.phi, self.tau)

    def timing(self) -> TimingConstants:
        return TimingConstants(self.theta, self.n_virtual, self.n_real, self.tau)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.dt)

    def adjacency(self) -> np.ndarray:
        return make_topology(self.topology, self.n_real)

    def at(self, lambda_pump: float, phi: float) -> "ReservoirConfig":
        return dataclasses.replace(self, lambda_pump=float(lambda_pump), phi=float(phi))

    def off_threshold(self) -> float:
        """Pump below which the origin is stable for every input (long-delay limit)."""
        return -self.kappa * spectral_radius(self.adjacency()) - self.eta


@dataclass(frozen=True)
class RunResult:
    nrmse_train: float
    nrmse_test: float
    mask_seed: int
    task_seed: int | None
    ridge: float


def simulate_states(config: ReservoirConfig, inputs, mask_seed: int) -> np.ndarray:
    """Drive the reservoir with ``inputs`` and return the harvested state matrix."""
    timing = config.timing()
    mask = generate_mask(config.n_real, config.n_virtual, mask_seed)
    schedule = InputSchedule(inputs, config.eta, config.lambda_pump)
    integ = DDEIntegrator(config.params(), config.adjacency(), config.integrator())
    seg = integ.config.steps(timing.theta, "theta")
    run = integ.run(pump_levels(schedule, mask), seg)
    return harvest(run.samples, timing, config.observable)


def run_single(config: ReservoirConfig, task: TaskData, mask_seed: int) -> RunResult:
    """Integrate buffer + train + test windows in one pass, fit on the train rows."""
    states = simulate_states(config, task.inputs, mask_seed)
    tr, te = task.train_slice, task.test_slice
    ridge = config.ridge
    try:
        weights = train(states[tr], task.targets[tr], ridge)
    except SingularSystemError:
        ridge = max(ridge, DEFAULT_RIDGE) * 100
        weights = train(states[tr], task.targets[tr], ridge)
    return RunResult(
        nrmse(task.targets[tr], weights.predict(states[tr])),
        nrmse(task.targets[te], weights.predict(states[te])),
        int(mask_seed),
        task.seed,
        ridge,
    )


def derive_seed(base_seed: int, i: int, j: int, tag: str) -> int:
    """Stable 31-bit seed for grid cell (i, j) and purpose ``tag``."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(i), int(j), _SEED_TAGS[tag]))
    return int(ss.generate_state(1, np.uint32)[0] >> 1)


@dataclass(frozen=True)
class ScanSpec:
    base: ReservoirConfig = field(default_factory=ReservoirConfig)
    lambda_range: tuple[float, float, int] = (-0.02, 0.05, 8)
    phi_range: tuple[float, float, int] = (0.0, 2 * math.pi, 8)
    task: str = "narma10"
    lengths: tuple[int, int, int] = NARMA_LENGTHS_TWO_NODE
    base_seed: int = 0
    fixed_task: bool = False
    probe_dynamics: bool = True
    santa_fe_path: str | None = None
    narma_input_scale: float = NARMA_INPUT_SCALE
    preset: str | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigurationError(f"task must be one of {TASKS}, got {self.task!r}")
        for name in ("lambda_range", "phi_range"):
            lo, hi, n = getattr(self, name)
            if int(n) < 1:
                raise ConfigurationError(f"{name} needs a count >= 1")
            object.__setattr__(self, name, (float(lo), float(hi), int(n)))
        object.__setattr__(self, "lengths", tuple(int(x) for x in self.lengths))

    @property
    def lambdas(self) -> np.ndarray:
        lo, hi, n = self.lambda_range
        return np.linspace(lo, hi, n) if n > 1 else np.array([lo])

    @property
    def phis(self) -> np.ndarray:
        """Half-open: phi is periodic, so the upper end is excluded."""
        lo, hi, n = self.phi_range
        return np.linspace(lo, hi, n, endpoint=False) if n > 1 else np.array([lo])

    @property
    def shape(self) -> tuple[int, int]:
        return self.lambda_range[2], self.phi_range[2]

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda_axis"] = self.lambdas.tolist()
        d["phi_axis"] = self.phis.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScanSpec":
        d = {k: v for k, v in d.items() if k not in ("lambda_axis", "phi_axis")}
        d["base"] = ReservoirConfig(**d["base"])
        for k in ("lambda_range", "phi_range", "lengths"):
            d[k] = tuple(d[k])
        return cls(**d)


@dataclass(frozen=True)
class CellResult:
    lambda_pump: float
    phi: float
    nrmse_test: float
    nrmse_train: float
    sync_label: str
    extrema_levels: int
    mask_seed: int
    task_seed: int
    status: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def row(self) -> list[str]:
        return [repr(self.lambda_pump), repr(self.phi), repr(self.nrmse_test), repr(self.nrmse_train),
                self.sync_label, str(self.extrema_levels), str(self.mask_seed), str(self.task_seed),
                self.status]


@dataclass
class ScanResult:
    spec: ScanSpec
    cells: list[CellResult]
    meta: dict = field(default_factory=dict)

    def grid(self, column: str = "nrmse_test") -> np.ndarray:
        vals = np.array([getattr(c, column) if c.ok else np.nan for c in self.cells], dtype=float)
        return vals.reshape(self.spec.shape)

    @property
    def n_failed(self) -> int:
        return sum(not c.ok for c in self.cells)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for c in self.cells:
                w.writerow(c.row())

    def write_metadata(self, path, extra: dict | None = None) -> None:
        meta = {"spec": self.spec.to_dict(), "version": __version__, **self.meta, **(extra or {})}
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True, default=str)

    @classmethod
    def from_csv(cls, path, spec: ScanSpec | None = None) -> "ScanResult":
        cells = []
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                cells.append(CellResult(float(r["lambda"]), float(r["phi"]), float(r["nrmse_test"]),
                                        float(r["nrmse_train"]), r["sync_label"], int(r["extrema_levels"]),
                                        int(r["mask_seed"]), int(r["task_seed"]), r["status"]))
        if spec is None:
            lams = sorted({c.lambda_pump for c in cells})
            phis = sorted({c.phi for c in cells})
            if len(lams) * len(phis) != len(cells):
                raise ConfigurationError(f"{path}: cells do not form a rectangular grid")
            step = (phis[1] - phis[0]) if len(phis) > 1 else 0.0
            spec = ScanSpec(lambda_range=(lams[0], lams[-1], len(lams)),
                            phi_range=(phis[0], phis[-1] + step, len(phis)), probe_dynamics=False)
        return cls(spec, cells)


@functools.lru_cache(maxsize=4)
def _santa_fe_series(path: str) -> np.ndarray:
    return read_series(path)


def cell_task(spec: ScanSpec, i: int, j: int) -> TaskData:
    if spec.task == "santafe":
        path = str(resolve_santa_fe_path(spec.santa_fe_path))
        return santa_fe_from_series(_santa_fe_series(path), spec.lengths)
    seed = derive_seed(spec.base_seed, 0, 0, "task") if spec.fixed_task else derive_seed(spec.base_seed, i, j, "task")
    return generate_narma_task(spec.lengths, seed, spec.narma_input_scale)


def evaluate_cell(spec: ScanSpec, i: int, j: int) -> CellResult:
    lam = float(spec.lambdas[i])
    phi = float(spec.phis[j])
    config = spec.base.at(lam, phi)
    mask_seed = derive_seed(spec.base_seed, i, j, "mask")
    sync, levels = "", -1
    if spec.probe_dynamics:
        try:
            label = probe_dynamics(config.params(), config.adjacency(), config.integrator())
            sync, levels = label.sync.value, label.n_extrema_levels
        except DivergenceError:
            sync = "diverged"
    try:
        task = cell_task(spec, i, j)
    except (TaskGenerationError, NarmaDivergenceError):
        return CellResult(lam, phi, math.nan, math.nan, sync, levels, mask_seed, -1, "failed:task")
    task_seed = -1 if task.seed is None else int(task.seed)
    try:
        res = run_single(config, task, mask_seed)
    except DivergenceError:
        status = "failed:divergence"
    except SingularSystemError:
        status = "failed:singular"
    else:
        return CellResult(lam, phi, res.nrmse_test, res.nrmse_train, sync, levels, mask_seed, task_seed, "ok")
    return CellResult(lam, phi, math.nan, math.nan, sync, levels, mask_seed, task_seed, status)


def _evaluate_index(args):
    spec, i, j = args
    return evaluate_cell(spec, i, j)


def default_jobs() -> int:
    return os.cpu_count() or 1


def scan2d(spec: ScanSpec, jobs: int = 1, progress=None) -> ScanResult:
    """Evaluate every (lambda, phi) cell; output order is lambda-major, independent of ``jobs``."""
    if spec.task == "santafe":
        resolve_santa_fe_path(spec.santa_fe_path)
    nl, nphi = spec.shape
    work = [(spec, i, j) for i in range(nl) for j in range(nphi)]
    start = time.perf_counter()
    cells = []
    if jobs <= 1:
        for w in work:
            cells.append(_evaluate_index(w))
            if progress:
                progress(len(cells), len(work))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for c in pool.map(_evaluate_index, work, chunksize=1):
                cells.append(c)
                if progress:
                    progress(len(cells), len(work))
    meta = {"wall_time_s": time.perf_counter() - start, "jobs": int(jobs), "cells": len(cells)}
    return ScanResult(spec, cells, meta)


@dataclass(frozen=True)
class Aggregate:
    best: float
    mean: float
    std: float
    n_used: int


def _nrmse_values(result) -> np.ndarray:
    if isinstance(result, ScanResult):
        vals = result.grid("nrmse_test").ravel()
    else:
        vals = np.asarray(result, dtype=float).ravel()
    return vals[np.isfinite(vals)]


def aggregate(result, exclusion_cutoff: float = 0.95) -> Aggregate:
    """Best over all cells; mean and population std over cells below the cutoff."""
    vals = _nrmse_values(result)
    kept = vals[vals < exclusion_cutoff]
    if kept.size == 0:
        raise EmptyAggregateError(f"no cell has NRMSE below {exclusion_cutoff}")
    return Aggregate(float(vals.min()), float(kept.mean()), float(kept.std()), int(kept.size))


@dataclass(frozen=True)
class CorrelationReport:
    corr: float
    corr_unfiltered: float
    cov: float
    cov_unfiltered: float
    n_filtered: int
    n_unfiltered: int


def _pearson(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    cov = float(np.mean((a - a.mean()) * (b - b.mean())))
    denom = float(a.std() * b.std())
    return (cov / denom if denom > 0 else math.nan), cov


def task_covariance(grid_a, grid_b, cutoff: float = 0.9) -> CorrelationReport:
    """Pearson correlation of two NRMSE landscapes, raw and restricted to cells <= cutoff."""
    if isinstance(grid_a, ScanResult) and isinstance(grid_b, ScanResult):
        sa, sb = grid_a.spec, grid_b.spec
        if sa.shape != sb.shape or not (np.allclose(sa.lambdas, sb.lambdas) and np.allclose(sa.phis, sb.phis)):
            raise ConfigurationError("scans do not share (lambda, phi) axes")
        a, b = grid_a.grid().ravel(), grid_b.grid().ravel()
    else:
        a, b = np.asarray(grid_a, float).ravel(), np.asarray(grid_b, float).ravel()
        if a.shape != b.shape:
            raise ConfigurationError("grids differ in shape")
    both = np.isfinite(a) & np.isfinite(b)
    keep = both & (a <= cutoff) & (b <= cutoff)
    if keep.sum() < 3:
        raise InsufficientOverlapError(f"only {int(keep.sum())} cells survive the {cutoff} cutoff")
    corr, cov = _pearson(a[keep], b[keep])
    corr_u, cov_u = _pearson(a[both], b[both])
    return CorrelationReport(corr, corr_u, cov, cov_u, int(keep.sum()), int(both.sum()))


# Parameter sets of the published scans.  Axis ranges are not printed with the
# figures; the lambda window spans the coupled oscillation threshold.
FIGURE_PRESETS = {
    "fig4": {"topology": "ring", "n_real": 2, "task": "narma10", "lengths": NARMA_LENGTHS_TWO_NODE,
             "lambda_range": (-0.02, 0.05, 32), "phi_range": (0.0, 2 * math.pi, 32)},
    "fig5": {"topology": "ring"},
    "fig6": {"topology": "ring"},
    "fig7": {"topology": "ring_jumps"},
    "fig8": {"topology": "bidirectional"},
}


def preset_spec(name: str, *, n_real: int | None = None, task: str | None = None, reduced: int = 1,
                base_seed: int = 0, santa_fe_path: str | None = None, dt: float = 0.01,
                fixed_task: bool = False) -> ScanSpec:
    """ScanSpec for a figure preset; ``reduced`` divides grid counts and lengths."""
    if name not in FIGURE_PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; expected one of {sorted(FIGURE_PRESETS)}")
    p = dict(FIGURE_PRESETS[name])
    nr = n_real or p.get("n_real", 16)
    if name == "fig4" and nr != 2:
        raise ConfigurationError("preset fig4 is the two-oscillator scan (n_real = 2)")
    if READOUT_DIMENSION % nr:
        raise ConfigurationError(f"n_real must divide {READOUT_DIMENSION}")
    task = task or p.get("task", "narma10")
    base = ReservoirConfig(n_real=nr, n_virtual=READOUT_DIMENSION // nr, topology=p["topology"],
                           kappa=0.04, gamma_re=-0.1, gamma_im=0.0, omega=1.0, dt=dt)
    if "lambda_range" in p:
        lam = p["lambda_range"]
    else:
        lam = (round(-1.5 * base.kappa * spectral_radius(base.adjacency()), 6), 0.05, 32)
    phi = p.get("phi_range", (0.0, 2 * math.pi, 32))
    if task == "santafe":
        lengths = SANTA_FE_LENGTHS
    else:
        lengths = p.get("lengths", NARMA_LENGTHS_NETWORK)
    r = max(1, int(reduced))
    lam = (lam[0], lam[1], max(1, math.ceil(lam[2] / r)))
    phi = (phi[0], phi[1], max(1, math.ceil(phi[2] / r)))
    lengths = tuple(max(1, math.ceil(x / r)) for x in lengths)
    return ScanSpec(base=base, lambda_range=lam, phi_range=phi, task=task, lengths=lengths,
                    base_seed=base_seed, santa_fe_path=santa_fe_path, fixed_task=fixed_task, preset=name)
