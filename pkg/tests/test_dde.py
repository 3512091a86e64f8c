import math

import numpy as np
import pytest

from slrc import kernels
from slrc.dde import (
    DDEIntegrator,
    DivergenceError,
    HistoryBuffer,
    HistoryUnderflowError,
    IntegratorConfig,
    OutOfRangeError,
    PiecewiseDrive,
    integrate,
    linear_ramp_drive,
    write_trajectory_csv,
)
from slrc.masking import InputSchedule, generate_mask, pump_levels
from slrc.model import ConfigurationError, NetworkState, OscillatorParams
from slrc.topology import make_topology, unidirectional_ring


def delay_polynomial(t, kappa, tau):
    """z' = kappa z(t - tau) with z = 1 on [-tau, 0], solved by the method of steps."""
    total = 0.0
    for j in range(int(t // tau) + 2):
        s = t - (j - 1) * tau
        if s >= 0:
            total += kappa ** j * s ** j / math.factorial(j)
    return total


@pytest.mark.parametrize("dt", [0.1, 0.05, 0.01])
def test_pure_delay_matches_method_of_steps(dt):
    # piecewise polynomial of degree <= 4 on each grid step: RK4 + cubic Hermite is exact
    p = OscillatorParams(omega=0.0, gamma=0j, kappa=0.5, tau=1.0)
    end = integrate(IntegratorConfig(dt), p, np.ones((1, 1)), PiecewiseDrive([0.0], 4.0), 4.0,
                    state=NetworkState(np.array([1.0 + 0j])))
    assert end.z[0].real == pytest.approx(delay_polynomial(4.0, 0.5, 1.0), abs=1e-12)
    assert delay_polynomial(4.0, 0.5, 1.0) == pytest.approx(4.294270833333334, abs=1e-14)


def test_solitary_radius_matches_closed_form():
    lam, g, r0, t = 0.05, -0.1, 0.01, 100.0
    p = OscillatorParams(kappa=0.0, gamma=complex(g, 0.5), tau=1.0)
    end = integrate(IntegratorConfig(0.01), p, np.zeros((1, 1)), PiecewiseDrive([lam], t), t,
                    state=NetworkState(np.array([r0 + 0j])))
    exact = math.sqrt(lam / (-g + (lam / r0 ** 2 + g) * math.exp(-2 * lam * t)))
    assert abs(end.z[0]) == pytest.approx(exact, abs=1e-9)


def test_unit_amplitude_at_t2000():
    p = OscillatorParams(kappa=0.0, gamma=complex(-0.1, 0.5), tau=34.0)
    end = integrate(IntegratorConfig(), p, unidirectional_ring(1), PiecewiseDrive([0.1], 2000.0), 2000.0)
    assert abs(abs(end.z[0]) - 1.0) < 1e-5


@pytest.mark.parametrize("kind,n", [("ring", 1), ("ring", 2), ("ring", 8), ("ring_jumps", 4)])
def test_subthreshold_drive_decays(kind, n):
    p = OscillatorParams(kappa=0.04, tau=34.0)
    end = integrate(IntegratorConfig(), p, make_topology(kind, n), PiecewiseDrive([-0.05], 2000.0), 2000.0)
    assert np.all(np.abs(end.z) < 1e-4)


def test_off_state_is_absorbing():
    p = OscillatorParams(kappa=0.04, tau=34.0)
    integ = DDEIntegrator(p, make_topology("bidirectional", 4), state=NetworkState(np.zeros(4)))
    run = integ.run(np.full((10, 4), -0.01), 500, stride=50)
    assert np.all(run.traj_z == 0) and np.all(integ.z == 0)


def _masked_run(dt, n_windows=6):
    p = OscillatorParams(kappa=0.04, gamma=complex(-0.1, 0.5), phi=1.0, tau=34.0)
    mask = generate_mask(2, 8, 3)
    u = np.random.default_rng(0).random(n_windows)
    levels = pump_levels(InputSchedule(u, 0.01, 0.02), mask)
    integ = DDEIntegrator(p, unidirectional_ring(2), IntegratorConfig(dt),
                          state=NetworkState(np.array([0.3 + 0.1j, -0.2 + 0.25j])))
    integ.run(levels, integ.config.steps(12.0))
    return integ.z.copy()


def test_convergence_order():
    ref = _masked_run(0.0025)
    e1 = np.abs(_masked_run(0.02) - ref).max()
    e2 = np.abs(_masked_run(0.01) - ref).max()
    assert e1 / e2 >= 8


def test_bitwise_determinism():
    assert np.array_equal(_masked_run(0.02), _masked_run(0.02))


def test_split_runs_equal_single_run():
    p = OscillatorParams(tau=34.0)
    G = unidirectional_ring(2)
    levels = np.random.default_rng(1).uniform(0, 0.02, (20, 2))
    a = DDEIntegrator(p, G)
    a.run(levels, 300)
    b = DDEIntegrator(p, G)
    b.run(levels[:7], 300)
    b.run(levels[7:], 300)
    assert np.array_equal(a.z, b.z)
    assert a.t == pytest.approx(b.t)


def test_generic_callable_matches_piecewise():
    p = OscillatorParams(tau=5.0)
    G = unidirectional_ring(2)
    drive = PiecewiseDrive(np.array([[0.01, 0.02], [0.03, 0.0], [0.015, 0.015]]), 4.0)
    a = integrate(IntegratorConfig(0.01), p, G, drive, 12.0)
    b = integrate(IntegratorConfig(0.01), p, G, lambda t: drive(t), 12.0)
    assert np.allclose(a.z, b.z, atol=1e-13)


def test_observer_sees_every_stride_point():
    seen = []
    integrate(IntegratorConfig(0.01), OscillatorParams(tau=1.0), unidirectional_ring(1),
              PiecewiseDrive([0.01], 2.0), 2.0, observer=lambda t, z: seen.append(t), stride=1)
    assert len(seen) == 200
    assert seen[0] == pytest.approx(0.01) and seen[-1] == pytest.approx(2.0)


def test_history_depth_independent_of_run_length():
    integ = DDEIntegrator(OscillatorParams(tau=3.4), unidirectional_ring(2))
    depth = integ.history.depth
    integ.run(np.zeros((50, 2)), 1000)
    assert integ.history.depth == depth == 342


def test_history_underflow():
    integ = DDEIntegrator(OscillatorParams(tau=1.0), unidirectional_ring(1))
    integ.history = HistoryBuffer.constant(integ.z, 50, 0.01)
    with pytest.raises(HistoryUnderflowError):
        integ.run(np.zeros((1, 1)), 10)


def test_divergence_reports_time():
    p = OscillatorParams(kappa=0.0, gamma=complex(0.1, 0.0), tau=1.0)
    with pytest.raises(DivergenceError) as info:
        integrate(IntegratorConfig(0.01), p, unidirectional_ring(1), PiecewiseDrive([0.1], 200.0), 200.0,
                  state=NetworkState(np.array([1.0 + 0j])))
    assert 0 < info.value.t < 200


def test_tau_must_be_grid_multiple():
    with pytest.raises(ConfigurationError):
        DDEIntegrator(OscillatorParams(tau=34.005), unidirectional_ring(2))
    with pytest.raises(ConfigurationError):
        IntegratorConfig(0.0)
    with pytest.raises(ConfigurationError):
        IntegratorConfig(method="euler")


def test_drive_examples():
    const = PiecewiseDrive([0.02], 12.0)
    assert const(0.0)[0] == const(11.99)[0] == 0.02
    masked = linear_ramp_drive(0.02, np.array([0.01 * 1 * 0.5, 0.01 * 0 * 0.5]), 12.0)
    assert masked(3.0)[0] == pytest.approx(0.025)
    assert masked(13.0)[0] == pytest.approx(0.02)
    with pytest.raises(OutOfRangeError):
        masked(24.0)
    with pytest.raises(OutOfRangeError):
        masked(-0.1)


def test_drive_must_cover_run():
    with pytest.raises(OutOfRangeError):
        integrate(IntegratorConfig(0.01), OscillatorParams(tau=1.0), unidirectional_ring(1),
                  PiecewiseDrive([0.0], 1.0), 2.0)


def test_trajectory_csv(tmp_path):
    integ = DDEIntegrator(OscillatorParams(tau=1.0), unidirectional_ring(2))
    run = integ.run(np.zeros((1, 2)), 100, stride=10)
    p = tmp_path / "traj.csv"
    write_trajectory_csv(p, run.traj_t, run.traj_z, stride=2)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,re_z0,im_z0,re_z1,im_z1"
    assert len(lines) == 1 + 5


def test_kernel_status_flags():
    assert kernels.STATUS_OK == 0 and kernels.STATUS_DIVERGED == 1
