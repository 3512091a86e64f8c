"""Adjacency matrices G_kl for the three ring topologies.

Convention: ``G[k, l]`` is the weight with which node ``l``'s delayed state
drives node ``k``.  Edge lists store one ``src dst weight`` triple per line.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .model import ConfigurationError

TOPOLOGIES = ("ring", "ring_jumps", "bidirectional")
_ALIASES = {
    "a": "ring",
    "unidirectional": "ring",
    "b": "ring_jumps",
    "jumps": "ring_jumps",
    "c": "bidirectional",
    "bidir": "bidirectional",
}


def _check_size(n) -> int:
    if int(n) != n or n < 1:
        raise ConfigurationError(f"node count must be a positive integer, got {n!r}")
    return int(n)


def unidirectional_ring(n: int) -> np.ndarray:
    n = _check_size(n)
    G = np.zeros((n, n))
    k = np.arange(n)
    G[k, (k - 1) % n] = 1.0
    return G


def ring_with_jumps(n: int) -> np.ndarray:
    """Unidirectional ring plus a forward link of length 4 from every fourth node.

    Sources are the nodes k = 0, 4, 8, ...; the target is (k + 4) mod n.  For
    n <= 4 the result equals :func:`unidirectional_ring`.
    """
    G = unidirectional_ring(n)
    n = G.shape[0]
    if n > 4:
        for k in range(0, n, 4):
            G[(k + 4) % n, k] = 1.0
    return G


def bidirectional_ring_selffeedback(n: int) -> np.ndarray:
    """Bidirectional ring whose self-feedback has weight -2 (difference coupling).

    Parallel links are summed, so n = 2 gives off-diagonal weight 2 and n = 1
    collapses to the zero matrix.
    """
    n = _check_size(n)
    G = np.zeros((n, n))
    for k in range(n):
        G[k, (k + 1) % n] += 1.0
        G[k, (k - 1) % n] += 1.0
        G[k, k] -= 2.0
    if n == 1:
        warnings.warn(
            "bidirectional ring with one node collapses to zero coupling",
            RuntimeWarning,
            stacklevel=2,
        )
    return G


def make_topology(kind: str, n: int) -> np.ndarray:
    name = _ALIASES.get(kind.lower(), kind.lower())
    if name == "ring":
        return unidirectional_ring(n)
    if name == "ring_jumps":
        return ring_with_jumps(n)
    if name == "bidirectional":
        return bidirectional_ring_selffeedback(n)
    raise ConfigurationError(f"unknown topology {kind!r}; expected one of {TOPOLOGIES}")


def canonical_topology(kind: str) -> str:
    name = _ALIASES.get(kind.lower(), kind.lower())
    if name not in TOPOLOGIES:
        raise ConfigurationError(f"unknown topology {kind!r}; expected one of {TOPOLOGIES}")
    return name


def validate_adjacency(G) -> np.ndarray:
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
        raise ConfigurationError(f"adjacency must be a non-empty square matrix, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ConfigurationError("adjacency contains non-finite entries")
    return G


def spectral_radius(G) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(validate_adjacency(G)))))


def edges(G) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nonzero entries as ``(src, dst, weight)`` arrays, row-major in dst."""
    G = validate_adjacency(G)
    dst, src = np.nonzero(G)
    return src.astype(np.int64), dst.astype(np.int64), G[dst, src]


def write_edge_list(G, path) -> None:
    G = validate_adjacency(G)
    src, dst, w = edges(G)
    lines = [f"# n {G.shape[0]}"]
    lines += [f"{s} {d} {float(x)!r}" for s, d, x in zip(src, dst, w)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path, n: int | None = None) -> np.ndarray:
    """Parse ``src dst weight`` lines; ``# n <count>`` fixes the node count."""
    triples = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n" and n is None:
                n = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigurationError(f"{path}:{lineno}: expected 'src dst weight', got {raw!r}")
        triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if n is None:
        if not triples:
            raise ConfigurationError(f"{path}: empty edge list and no node count")
        n = 1 + max(max(s, d) for s, d, _ in triples)
    G = np.zeros((_check_size(n), n))
    for s, d, w in triples:
        if not (0 <= s < n and 0 <= d < n):
            raise ConfigurationError(f"{path}: edge {s}->{d} outside node range 0..{n - 1}")
        G[d, s] += w
    return G
