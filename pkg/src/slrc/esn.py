"""Time-discrete echo state network sharing the readout of the oscillator reservoir."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError
from .readout import DEFAULT_RIDGE, nrmse, train
from .tasks import TaskData


class SpectralEstimateError(RuntimeError):
    pass


@dataclass(frozen=True)
class EsnConfig:
    n_nodes: int = 256
    spectral_radius: float = 0.9
    input_scale: float = 1.0
    density: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ConfigurationError("n_nodes must be >= 1")
        if not self.spectral_radius > 0:
            raise ConfigurationError("spectral_radius must be > 0")
        if not 0 < self.density <= 1:
            raise ConfigurationError("density must lie in (0, 1]")


@dataclass(frozen=True)
class EsnMatrices:
    W_res: np.ndarray
    W_in: np.ndarray


def estimate_spectral_radius(W, tol: float = 1e-10, max_iter: int = 10_000,
                             block: int = 8, seed: int = 0) -> float:
    """Largest eigenvalue modulus by block power (subspace) iteration.

    A block rather than a single vector handles complex-conjugate dominant
    pairs, which are the common case for random non-symmetric matrices.
    """
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[0]
    if not np.any(W):
        return 0.0
    b = min(block, n)
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, b)))
    prev = np.inf
    for _ in range(max_iter):
        Z = W @ Q
        rho = float(np.max(np.abs(np.linalg.eigvals(Q.T @ Z))))
        Q, _ = np.linalg.qr(Z)
        if abs(rho - prev) <= tol * max(rho, 1e-300):
            return rho
        prev = rho
    raise SpectralEstimateError(f"power iteration did not converge in {max_iter} iterations")


def esn_build(config: EsnConfig) -> EsnMatrices:
    rng = np.random.default_rng(config.seed)
    n = config.n_nodes
    W = rng.uniform(-1.0, 1.0, (n, n)) * (rng.random((n, n)) < config.density)
    if not np.any(W):
        i, j = rng.integers(0, n, 2)
        W[i, j] = rng.uniform(0.5, 1.0)
    W *= config.spectral_radius / estimate_spectral_radius(W, seed=config.seed)
    W_in = rng.uniform(-config.input_scale, config.input_scale, n)
    return EsnMatrices(W, W_in)


def esn_run(matrices: EsnMatrices, inputs, x0=None) -> np.ndarray:
    """State matrix with one row per input: row t is X(t+1) plus a bias column."""
    W, W_in = matrices.W_res, matrices.W_in
    u = np.asarray(inputs, dtype=np.float64).ravel()
    n = W.shape[0]
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    out = np.empty((u.shape[0], n + 1))
    out[:, n] = 1.0
    for t, ut in enumerate(u):
        x = np.tanh(W @ x + W_in * ut)
        out[t, :n] = x
    return out


def evaluate_esn(config: EsnConfig, task: TaskData, ridge: float = DEFAULT_RIDGE) -> tuple[float, float]:
    """Train on the task's training rows, return (train NRMSE, test NRMSE)."""
    states = esn_run(esn_build(config), task.inputs)
    tr, te = task.train_slice, task.test_slice
    weights = train(states[tr], task.targets[tr], ridge)
    return (nrmse(task.targets[tr], weights.predict(states[tr])),
            nrmse(task.targets[te], weights.predict(states[te])))
