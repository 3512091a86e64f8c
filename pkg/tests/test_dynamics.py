import numpy as np
import pytest

from slrc.dde import IntegratorConfig
from slrc.dynamics import (
    DynamicsLabel,
    InsufficientDataError,
    SyncState,
    classify_sync,
    count_extrema_levels,
    probe_dynamics,
)
from slrc.model import OscillatorParams
from slrc.topology import make_topology, spectral_radius

t = np.linspace(0, 200, 4001)
e = np.exp(1j * t)


def test_sync_labels():
    assert classify_sync(np.c_[e, e]) is SyncState.SYNCHRONIZED
    assert classify_sync(np.c_[e, -e]) is SyncState.ANTI_SYNCHRONIZED
    assert classify_sync(np.zeros((100, 2))) is SyncState.OFF
    assert classify_sync(np.c_[e, 1j * e]) is SyncState.OTHER


def test_sync_tolerance_is_relative():
    z = 5 * np.c_[e, e * (1 + 2e-4)]
    assert classify_sync(z) is SyncState.SYNCHRONIZED
    z = np.c_[e, e * (1 + 2e-3)]
    assert classify_sync(z) is SyncState.OTHER


def test_sync_rotation_invariant():
    for z in (np.c_[e, e], np.c_[e, -e], np.c_[e, 0.5 * e]):
        base = classify_sync(z)
        for a in (0.3, 2.0, 5.5):
            assert classify_sync(np.exp(1j * a) * z) is base


def test_sync_many_nodes():
    assert classify_sync(np.c_[e, e, e, e]) is SyncState.SYNCHRONIZED
    assert classify_sync(np.c_[e, -e, e, -e]) is SyncState.OTHER
    assert classify_sync(e) is SyncState.OTHER


def test_empty_tail():
    with pytest.raises(InsufficientDataError):
        classify_sync(np.zeros((0, 2)))


def test_extrema_levels():
    assert count_extrema_levels(np.full(500, 0.7)) == 0
    assert count_extrema_levels(1 + 0.1 * np.sin(0.05 * t)) == 1
    s = np.linspace(0, 40 * np.pi, 20001)
    two = np.abs(np.sin(s)) * np.where((np.floor(s / np.pi) % 2) == 0, 1.1, 1.3)
    assert count_extrema_levels(two) == 2
    assert count_extrema_levels(np.abs(e)) == 0


def test_extrema_time_shift_invariant():
    s = np.linspace(0, 60 * np.pi, 30001)
    series = 1 + 0.2 * np.sin(s) + 0.05 * np.sin(s / 3)
    base = count_extrema_levels(series)
    assert base >= 2
    for shift in (137, 1111, 4999):
        assert count_extrema_levels(np.roll(series, shift)[10:-10]) == base


def test_label_invariant():
    with pytest.raises(ValueError):
        DynamicsLabel(SyncState.OFF, 2)


@pytest.mark.parametrize("kind,n", [("ring", 2), ("ring_jumps", 8), ("bidirectional", 4)])
def test_probe_off_below_coupled_threshold(kind, n):
    G = make_topology(kind, n)
    eta, kappa = 0.01, 0.04
    lam = -kappa * spectral_radius(G) - eta - 0.01
    label = probe_dynamics(OscillatorParams(lambda_pump=lam + eta, kappa=kappa, tau=34.0), G,
                           IntegratorConfig(0.02), transient_taus=30, window_taus=5)
    assert label == DynamicsLabel(SyncState.OFF, 0)


def test_probe_real_gamma_two_node_sync():
    p = OscillatorParams(lambda_pump=0.02, gamma=-0.1, kappa=0.04, phi=0.0, tau=68.0)
    label = probe_dynamics(p, make_topology("ring", 2), IntegratorConfig(0.02))
    assert label.sync is SyncState.SYNCHRONIZED
    assert label.n_extrema_levels == 0


def test_probe_antisync_at_phase_pi():
    p = OscillatorParams(lambda_pump=0.02, gamma=-0.1, kappa=0.04, phi=np.pi, tau=68.0)
    label = probe_dynamics(p, make_topology("ring", 2), IntegratorConfig(0.02))
    assert label.sync in (SyncState.SYNCHRONIZED, SyncState.ANTI_SYNCHRONIZED)
