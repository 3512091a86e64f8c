"""State harvesting, linear readout training and the NRMSE metric."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .dde import DivergenceError
from .masking import TimingConstants
from .model import ConfigurationError

DEFAULT_RIDGE = 1e-8
OBSERVABLES = ("abs", "real")


class SingularSystemError(np.linalg.LinAlgError):
    pass


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class ReadoutWeights:
    w: np.ndarray
    ridge: float

    def predict(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=np.float64)
        if states.shape[-1] != self.w.shape[0]:
            raise ConfigurationError(f"states have {states.shape[-1]} columns, weights {self.w.shape[0]}")
        return states @ self.w


def harvest(samples, timing: TimingConstants, observable: str = "abs") -> np.ndarray:
    """Build the state matrix from slot-end samples.

    ``samples`` holds Z at the end of every theta slot, shape
    ``(n_windows * N_V, N_R)``.  Column ``k * N_V + s`` of the result is the
    observable of node ``k`` at the end of slot ``s``; a bias column of ones
    is appended.
    """
    samples = np.asarray(samples)
    nv, nr = timing.n_virtual, timing.n_real
    if samples.ndim != 2 or samples.shape[1] != nr or samples.shape[0] % nv:
        raise ConfigurationError(f"samples of shape {samples.shape} do not fit N_V={nv}, N_R={nr}")
    if observable == "abs":
        x = np.abs(samples)
    elif observable == "real":
        x = samples.real.astype(np.float64)
    else:
        raise ConfigurationError(f"observable must be one of {OBSERVABLES}, got {observable!r}")
    if not np.all(np.isfinite(x)):
        raise DivergenceError(float("nan"), "non-finite reservoir state in harvested samples")
    n_win = samples.shape[0] // nv
    feats = x.reshape(n_win, nv, nr).transpose(0, 2, 1).reshape(n_win, nr * nv)
    return np.hstack([feats, np.ones((n_win, 1))])


def train(states, targets, ridge: float = DEFAULT_RIDGE) -> ReadoutWeights:
    """Ridge regression ``argmin |S w - y|^2 + ridge |w|^2`` via Cholesky."""
    S = np.asarray(states, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if S.ndim != 2 or y.shape != (S.shape[0],):
        raise ConfigurationError(f"states {S.shape} and targets {y.shape} do not align")
    if ridge < 0:
        raise ConfigurationError("ridge must be >= 0")
    if ridge == 0 and np.linalg.matrix_rank(S) < S.shape[1]:
        raise SingularSystemError("state matrix is rank deficient; use ridge > 0")
    A = S.T @ S
    A[np.diag_indices_from(A)] += ridge
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations not positive definite ({exc}); use ridge > 0") from exc
    return ReadoutWeights(linalg.cho_solve(factor, S.T @ y), float(ridge))


def nrmse(y, y_hat) -> float:
    """sqrt(mean((y - y_hat)^2) / var(y)), population variance."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1 or y.shape[0] < 2:
        raise ConfigurationError(f"need two equal-length series of >= 2 samples, got {y.shape}, {y_hat.shape}")
    var = np.var(y)
    if not var > 0:
        raise UndefinedMetricError("target has zero variance")
    return float(np.sqrt(np.mean((y - y_hat) ** 2) / var))


def write_weights_csv(weights: ReadoutWeights, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "weight"])
        for i, v in enumerate(weights.w):
            w.writerow([i, repr(float(v))])
        fh.write(f"# ridge {weights.ridge!r}\n")
