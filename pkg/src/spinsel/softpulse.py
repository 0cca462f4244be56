"""Rectangular soft pulses integrated by piecewise-constant exponential steps.

The pulse is described in the same frame as :func:`spinsel.system.hamiltonian`
(each channel referenced to its base frequency).  The rf field of amplitude
``b1`` rotates at ``carrier_hz`` and acts on the spins of one channel only:

    H(t) = H0 - 2 pi b1 sum_k [I_kx cos(2 pi f_c t + phi) + I_ky sin(2 pi f_c t + phi)]

(the minus sign makes an on-resonance pulse match the ``exp(+i theta I_phi)``
convention of the ideal pulses).  Integration runs in the interaction picture
of ``H0``, so the step size only has to resolve the rf and the offsets of the
irradiated lines, never the large chemical-shift offsets.  Each step uses the
generator sampled at the step midpoint.
"""

from __future__ import annotations

import math

import numpy as np

from .pulses import PulseEvent, SoftPulse, X, transition_pulse
from .system import SpinSystem, hamiltonian, spin_operator, thermal_deviation
from .transitions import Transition

DEFAULT_STEPS = 2048
MAX_STEP_PHASE = 0.1  # rad; bound on ||H|| dt


def pulse_channel(system: SpinSystem, event: PulseEvent) -> str:
    if event.kind == "transition":
        return system.spins[event.target.spin].channel
    if event.kind == "spin":
        return system.spins[system.index(event.target)].channel
    if event.target in (None, "all"):
        channels = system.channels
        if len(channels) != 1:
            raise ValueError("a soft pulse irradiates a single channel; name it")
        return channels[0]
    return event.target


def rf_norm(system: SpinSystem, channel: str, b1_hz: float) -> float:
    """Largest eigenvalue magnitude (rad/s) of the rf Hamiltonian."""
    return 2 * np.pi * abs(b1_hz) * len(system.spins_on(channel)) / 2


def default_dt(system: SpinSystem, event: PulseEvent) -> float:
    soft = event.realization
    norm = rf_norm(system, pulse_channel(system, event), soft.b1_hz)
    steps = max(DEFAULT_STEPS, math.ceil(norm * soft.duration_s / MAX_STEP_PHASE))
    return soft.duration_s / steps


def soft_pulse_propagator(system: SpinSystem, event: PulseEvent, dt: float | None = None) -> np.ndarray:
    """Propagator of a rectangular soft pulse, including free precession."""
    soft = event.realization
    if soft is None:
        raise ValueError("event has no soft realization")
    channel = pulse_channel(system, event)
    spins = system.spins_on(channel)
    T = soft.duration_s
    if dt is None:
        dt = soft.dt_s if soft.dt_s is not None else default_dt(system, event)
    if not dt > 0:
        raise ValueError("time step must be positive")
    if rf_norm(system, channel, soft.b1_hz) * dt > MAX_STEP_PHASE:
        raise ValueError(f"time step {dt:g} s too large: ||H|| dt exceeds {MAX_STEP_PHASE} rad")
    nsteps = max(1, round(T / dt))
    dt = T / nsteps

    n = system.n
    raising = sum(spin_operator(n, k, "x") + 1j * spin_operator(n, k, "y") for k in spins)
    w, V = np.linalg.eigh(hamiltonian(system))
    P = V.conj().T @ raising @ V
    Wdiff = w[:, None] - w[None, :]
    wc = 2 * np.pi * soft.carrier_hz
    amp = -np.pi * soft.b1_hz

    U = np.eye(system.dim, dtype=complex)
    for step in range(nsteps):
        t = (step + 0.5) * dt
        theta = wc * t + event.phase
        Hrf = amp * (np.exp(-1j * theta) * P + np.exp(1j * theta) * P.conj().T)
        HI = Hrf * np.exp(1j * Wdiff * t)
        lam, Q = np.linalg.eigh(HI)
        U = (Q * np.exp(-1j * lam * dt)) @ Q.conj().T @ U
    U = np.exp(-1j * w * T)[:, None] * U
    return V @ U @ V.conj().T


def soft_transition_event(system: SpinSystem, transition: Transition, angle: float = np.pi,
                          duration_s: float | None = None, b1_hz: float | None = None,
                          phase: float = X, dt_s: float | None = None) -> PulseEvent:
    """Transition-selective pulse realized as an on-resonance rectangular pulse.

    Give either the duration or the rf amplitude; the other follows from
    ``b1 = angle / (2 pi duration)``.
    """
    if (duration_s is None) == (b1_hz is None):
        raise ValueError("give exactly one of duration_s and b1_hz")
    if duration_s is None:
        duration_s = angle / (2 * np.pi * b1_hz)
    else:
        b1_hz = angle / (2 * np.pi * duration_s)
    soft = SoftPulse(b1_hz, duration_s, transition.frequency_hz, dt_s)
    return transition_pulse(transition, angle, phase, soft)


def pulse_fidelity(system: SpinSystem, event: PulseEvent, target: Transition) -> dict[str, float]:
    """Population bookkeeping of a (soft) inversion pulse on the thermal state.

    ``swap_error`` is how far the two target levels are from exchanged
    populations; ``leakage`` is the largest change of any other population;
    ``error`` is their sum.
    """
    if target.order != "single":
        raise ValueError("fidelity is defined against a single-quantum transition")
    from .pulses import event_propagator

    rho0 = thermal_deviation(system)
    U = event_propagator(system, event)
    rho = U @ rho0 @ U.conj().T
    p0 = np.real(np.diag(rho0))
    p = np.real(np.diag(rho))
    r, s = target.lower, target.upper
    swap_error = abs(p[r] - p0[s]) + abs(p[s] - p0[r])
    others = [i for i in range(system.dim) if i not in (r, s)]
    leakage = max((abs(p[i] - p0[i]) for i in others), default=0.0)
    return {"swap_error": float(swap_error), "leakage": float(leakage),
            "error": float(swap_error + leakage)}


def soften(system: SpinSystem, seq, b1_hz: float, dt_s: float | None = None):
    """Copy of ``seq`` with every transition-selective pulse made soft.

    Spin-selective and non-selective pulses stay ideal (hard).
    """
    from .pulses import PulseSequence

    events = []
    for e in seq:
        if e.kind == "transition" and e.realization is None:
            events.append(soft_transition_event(system, e.target, e.angle, b1_hz=b1_hz,
                                                phase=e.phase, dt_s=dt_s))
        else:
            events.append(e)
    return PulseSequence(tuple(events), seq.label)
