"""Logically labeled pseudo-pure states from selective population inversions."""

from __future__ import annotations

import numpy as np

from .pulses import PulseSequence, SoftPulse, apply_sequence, transition_pulse
from .softpulse import soft_transition_event
from .system import SpinSystem, bits, from_bits, thermal_deviation
from .transitions import Transition, classify_connectivity, make_transition

METHODS = ("sq", "dq-sq", "sq-zq")


def populations(rho: np.ndarray) -> np.ndarray:
    """Diagonal of ``rho`` in basis order, as reals."""
    return np.real(np.diag(np.asarray(rho))).copy()


def _relabel(system: SpinSystem, label: int | str, states: list[str]) -> list[int]:
    """Map state words written with the label spin first onto basis indices."""
    k = system.index(label)
    work = [i for i in range(system.n) if i != k]
    out = []
    for word in states:
        b = [0] * system.n
        b[k] = 0 if word[0] == "u" else 1
        for pos, ch in zip(work, word[1:]):
            b[pos] = 0 if ch == "u" else 1
        out.append(from_bits(b))
    return out


def compile_mq_inversion(system: SpinSystem, transition: Transition, angle_phase=0.0,
                         soft_duration: float | None = None) -> PulseSequence:
    """Three-pulse cascade exchanging the populations of a zero/double-quantum pair.

    The pulses act on ``(r, m)``, ``(m, s)`` and ``(r, m)`` for an intermediate
    level ``m`` linked to both ends by single-quantum transitions.  Of the two
    candidate intermediates, the one whose repeated pulse sits on the more
    strongly coupled spin is used (ties: lower level index).
    """
    if transition.order == "single":
        raise ValueError("single-quantum transitions are inverted by one pulse")
    n = system.n
    r, s = transition.lower, transition.upper
    br = bits(r, n)
    candidates = []
    for k in transition.active:
        b = list(br)
        b[k] ^= 1
        m = from_bits(b)
        strength = sum(abs(system.j(k, l)) for l in range(n) if l != k)
        candidates.append((-strength, m, k))
    if not candidates:
        raise ValueError("no intermediate level")
    _, m, _ = min(candidates)
    first = make_transition(system, r, m)
    second = make_transition(system, m, s)

    def pulse(t):
        if soft_duration is None:
            return transition_pulse(t, np.pi, angle_phase)
        return soft_transition_event(system, t, np.pi, duration_s=soft_duration, phase=angle_phase)

    kind = classify_connectivity(first, second)
    return PulseSequence((pulse(first), pulse(second), pulse(first)),
                         f"{transition.order}-quantum inversion {transition.name()} ({kind} cascade)")


def preparation_sequence(system: SpinSystem, method: str = "sq", label: int | str = 0,
                         soft_duration: float | None = None) -> PulseSequence:
    """Pulse sequence for one of the three labeling schemes.

    ``sq``: invert the two unconnected label-spin lines uud->dud and udu->ddu
    (with soft pulses too long to resolve them, one pulse between the two).
    ``dq-sq``: invert the double quantum duu<->ddd, then the line udd->ddd.
    ``sq-zq``: invert the line duu->dud, then the zero quantum udd<->dud.
    State words list the label spin first.
    """
    if system.n != 3:
        raise ValueError("the labeling schemes are defined for three spins")

    def pulse(t):
        if soft_duration is None:
            return transition_pulse(t)
        return soft_transition_event(system, t, np.pi, duration_s=soft_duration)

    if method == "sq":
        a1, b1, a2, b2 = _relabel(system, label, ["uud", "dud", "udu", "ddu"])
        t1, t2 = make_transition(system, a1, b1), make_transition(system, a2, b2)
        if soft_duration is not None and abs(t1.frequency_hz - t2.frequency_hz) < 1 / (2 * soft_duration):
            # the two lines are not resolved by the rf field: a single pulse
            # centred between them inverts both (a second one would undo it)
            centre = (t1.frequency_hz + t2.frequency_hz) / 2
            seq = PulseSequence((transition_pulse(t1, np.pi, realization=SoftPulse(
                1 / (2 * soft_duration), soft_duration, centre)),))
        else:
            seq = PulseSequence((pulse(t1), pulse(t2)))
    elif method == "dq-sq":
        d1, d2, u, v = _relabel(system, label, ["duu", "ddd", "udd", "ddd"])
        seq = (compile_mq_inversion(system, make_transition(system, d1, d2), soft_duration=soft_duration)
               + PulseSequence((pulse(make_transition(system, u, v)),)))
    elif method == "sq-zq":
        u, v, z1, z2 = _relabel(system, label, ["duu", "dud", "udd", "dud"])
        seq = (PulseSequence((pulse(make_transition(system, u, v)),))
               + compile_mq_inversion(system, make_transition(system, z1, z2), soft_duration=soft_duration))
    else:
        raise ValueError(f"unknown preparation method {method!r}; choose from {METHODS}")
    return PulseSequence(seq.events, f"pseudo-pure ({method}, label {system.labels[system.index(label)]})")


def prepare(system: SpinSystem, method: str = "sq", label: int | str = 0,
            soft_duration: float | None = None, rho0: np.ndarray | None = None) -> np.ndarray:
    rho0 = thermal_deviation(system) if rho0 is None else rho0
    return apply_sequence(system, rho0, preparation_sequence(system, method, label, soft_duration))


def prepare_ppure_sq(system: SpinSystem, label: int | str = 0, **kw) -> np.ndarray:
    return prepare(system, "sq", label, **kw)


def prepare_ppure_dq_sq(system: SpinSystem, label: int | str = 0, **kw) -> np.ndarray:
    return prepare(system, "dq-sq", label, **kw)


def prepare_ppure_sq_zq(system: SpinSystem, label: int | str = 0, **kw) -> np.ndarray:
    return prepare(system, "sq-zq", label, **kw)


def pseudo_pure_blocks(pops, label: int = 0, n: int = 3) -> list[np.ndarray]:
    """Population blocks of the work spins for label up and label down,
    each relative to its own mean."""
    pops = np.asarray(pops, dtype=float)
    blocks = []
    for value in (0, 1):
        idx = [i for i in range(2 ** n) if bits(i, n)[label] == value]
        block = pops[idx]
        blocks.append(block - block.mean())
    return blocks
