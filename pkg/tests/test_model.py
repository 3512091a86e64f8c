import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slrc.dde import IntegratorConfig, PiecewiseDrive, integrate
from slrc.model import ConfigurationError, NetworkState, OscillatorParams, derivative
from slrc.topology import unidirectional_ring


def test_defaults():
    p = OscillatorParams()
    assert p.gamma == complex(-0.1, 0.5)
    assert p.omega == 1.0
    assert p.kappa == 0.04


def test_tau_must_be_positive():
    with pytest.raises(ConfigurationError):
        OscillatorParams(tau=0.0)


def test_origin_is_fixed_point():
    d = derivative(NetworkState(np.zeros(1)), np.zeros(1), OscillatorParams(), np.ones((1, 1)), np.array([0.3]))
    assert d[0] == 0


def test_radial_growth_vanishes_on_unit_circle():
    p = OscillatorParams(kappa=0.0, gamma=complex(-0.1, 0.5))
    z = np.array([1.0 + 0j])
    d = derivative(NetworkState(z), np.zeros(1), p, np.ones((1, 1)), np.array([0.1]))
    # radial part Re(conj(z) dz) / |z| = lambda + Re(gamma)|z|^2
    assert (np.conj(z) * d).real[0] == pytest.approx(0.0, abs=1e-15)


def test_coupling_term_two_node_ring():
    G = unidirectional_ring(2)
    p = OscillatorParams(kappa=0.04, phi=0.0)
    delayed = np.array([0.3 - 0.2j, -0.7 + 0.5j])
    d = derivative(NetworkState(np.zeros(2)), delayed, p, G, np.zeros(2))
    assert d[0] == pytest.approx(0.04 * delayed[1], abs=1e-16)
    assert d[1] == pytest.approx(0.04 * delayed[0], abs=1e-16)


def test_coupling_phase_rotates_input():
    G = unidirectional_ring(2)
    p = OscillatorParams(kappa=0.04, phi=np.pi / 2)
    d = derivative(NetworkState(np.zeros(2)), np.array([0, 1.0]), p, G, np.zeros(2))
    assert d[0] == pytest.approx(0.04j, abs=1e-16)


def test_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        derivative(NetworkState(np.zeros(2)), np.zeros(3), OscillatorParams(), np.eye(2), np.zeros(2))
    with pytest.raises(ConfigurationError):
        derivative(NetworkState(np.zeros(2)), np.zeros(2), OscillatorParams(), np.eye(3), np.zeros(2))


cplx = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(z=st.lists(cplx, min_size=3, max_size=3), dl=st.lists(cplx, min_size=3, max_size=3),
       alpha=st.floats(0, 2 * np.pi), phi=st.floats(0, 2 * np.pi))
def test_rotation_equivariance(z, dl, alpha, phi):
    G = np.array([[-2.0, 1, 1], [1, -2, 1], [1, 1, -2]])
    p = OscillatorParams(phi=phi)
    drive = np.array([0.01, -0.02, 0.03])
    rot = cmath.exp(1j * alpha)
    lhs = derivative(NetworkState(rot * np.array(z)), rot * np.array(dl), p, G, drive)
    rhs = rot * derivative(NetworkState(np.array(z)), np.array(dl), p, G, drive)
    assert np.allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("lam,gamma_re", [(0.1, -0.1), (0.05, -0.2), (0.02, -0.1)])
def test_steady_amplitude(lam, gamma_re):
    p = OscillatorParams(kappa=0.0, gamma=complex(gamma_re, 0.5), tau=1.0)
    drive = PiecewiseDrive([lam], 3000.0)
    end = integrate(IntegratorConfig(0.01), p, np.zeros((1, 1)), drive, 3000.0)
    assert abs(end.z[0]) == pytest.approx(np.sqrt(lam / -gamma_re), abs=1e-6)


def test_subthreshold_decay_is_monotone():
    p = OscillatorParams(kappa=0.0, tau=1.0)
    amps = []
    integrate(IntegratorConfig(0.01), p, np.zeros((1, 1)), PiecewiseDrive([-0.05], 200.0), 200.0,
              observer=lambda t, z: amps.append(abs(z[0])), stride=10,
              state=NetworkState(np.array([0.05 + 0j])))
    a = np.array(amps)
    assert np.all(np.diff(a) < 0)
    assert a[-1] < 0.05 * np.exp(-0.05 * 200) * 1.01
