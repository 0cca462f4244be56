import numpy as np
import pytest
from scipy.linalg import expm

from spinsel.pulses import ideal_transition_pulse, PulseEvent, SoftPulse, X, Y
from spinsel.softpulse import (default_dt, pulse_fidelity, rf_norm, soft_pulse_propagator,
                               soft_transition_event, soften)
from spinsel.system import build_spin_system, hamiltonian, spin_operator
from spinsel.transitions import list_transitions, spin_transitions


def single_spin(offset_hz=0.0):
    return build_spin_system({"spectrometer": {"1H": 100.0},
                              "spins": [{"label": "H", "channel": "1H",
                                         "shift_ppm": offset_hz / 100.0}]})


def rotating_frame_oracle(system, channel_spins, b1, carrier, phase, T):
    """Closed form for a constant-amplitude pulse: H is static in the rotating frame."""
    n = system.n
    Fz = sum(spin_operator(n, k, "z") for k in channel_spins)
    Fx = sum(spin_operator(n, k, "x") for k in channel_spins)
    Fy = sum(spin_operator(n, k, "y") for k in channel_spins)
    wc = 2 * np.pi * carrier
    Hrf = -2 * np.pi * b1 * (np.cos(phase) * Fx + np.sin(phase) * Fy)
    return expm(-1j * wc * T * Fz) @ expm(-1j * (hamiltonian(system) - wc * Fz + Hrf) * T)


@pytest.mark.parametrize("offset, b1, phase", [(0.0, 50.0, X), (30.0, 50.0, Y), (-80.0, 20.0, 1.1)])
def test_rabi_oracle_single_spin(offset, b1, phase):
    s = single_spin(offset)
    T = 0.01
    ev = PulseEvent("spin", 0, np.pi, phase, SoftPulse(b1, T, 0.0))
    U = soft_pulse_propagator(s, ev, dt=T / 4000)
    np.testing.assert_allclose(U, rotating_frame_oracle(s, [0], b1, 0.0, phase, T), atol=1e-6)


def test_on_resonance_pi_matches_ideal_pulse_sign():
    s = single_spin(0.0)
    t = list_transitions(s)[0]
    ev = soft_transition_event(s, t, np.pi, duration_s=0.01)
    U = soft_pulse_propagator(s, ev)
    np.testing.assert_allclose(U, ideal_transition_pulse(t, np.pi), atol=1e-6)


def test_coupled_pair_matches_rotating_frame_oracle(coumarin):
    t = spin_transitions(coumarin, "A")[0]
    ev = soft_transition_event(coumarin, t, np.pi, b1_hz=2.0)
    U = soft_pulse_propagator(coumarin, ev)
    oracle = rotating_frame_oracle(coumarin, [0, 1], 2.0, t.frequency_hz, X, ev.realization.duration_s)
    assert np.abs(U - oracle).max() < 1e-4


def test_step_guard_and_defaults(benzofurazan):
    t = spin_transitions(benzofurazan, "A")[0]
    ev = soft_transition_event(benzofurazan, t, np.pi, b1_hz=2.0)
    assert rf_norm(benzofurazan, "1H", 2.0) == pytest.approx(2 * np.pi * 2.0)
    assert ev.realization.duration_s / default_dt(benzofurazan, ev) >= 2048
    with pytest.raises(ValueError, match="too large"):
        soft_pulse_propagator(benzofurazan, ev, dt=0.05)
    with pytest.raises(ValueError):
        soft_transition_event(benzofurazan, t, np.pi)
    with pytest.raises(ValueError, match="no soft realization"):
        soft_pulse_propagator(benzofurazan, PulseEvent("transition", t, np.pi))


def test_soft_pulse_only_touches_its_channel(benzofurazan):
    t = spin_transitions(benzofurazan, "X")[0]
    ev = soft_transition_event(benzofurazan, t, np.pi, b1_hz=2.0)
    fid = pulse_fidelity(benzofurazan, ev, t)
    assert fid["swap_error"] < 1e-3 and fid["leakage"] < 0.05


def test_soften_keeps_hard_pulses(coumarin):
    from spinsel.gates import compile_gate
    seq = soften(coumarin, compile_gate(coumarin, "NOT+SWAP") + compile_gate(coumarin, "NOT1"), 2.0)
    kinds = [(e.kind, e.realization is None) for e in seq]
    assert kinds == [("transition", False)] * 3 + [("spin", True)]


def test_fidelity_requires_single_quantum_target(coumarin):
    from spinsel.transitions import make_transition
    t = spin_transitions(coumarin, "A")[0]
    ev = soft_transition_event(coumarin, t, np.pi, b1_hz=2.0)
    with pytest.raises(ValueError):
        pulse_fidelity(coumarin, ev, make_transition(coumarin, 1, 2))
