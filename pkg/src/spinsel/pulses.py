"""Ideal pulse unitaries, pulse sequences and phase cycling.

Rotation convention: a pulse of angle theta and phase phi is
``exp(+i theta (cos phi I_x + sin phi I_y))`` on the addressed operator, so a
transition-selective pi_x pulse has off-diagonal entries ``+i``.  This is the
sign used in the printed pulse matrices of the portmanteau-gate construction;
the opposite sign is physically equivalent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np

from .system import SpinSystem, check_deviation
from .transitions import Transition, make_transition

X, Y, MINUS_X, MINUS_Y = 0.0, np.pi / 2, np.pi, 3 * np.pi / 2
DJ_CYCLE = (X, MINUS_X, Y, MINUS_Y)

KINDS = ("transition", "spin", "nonselective")


@dataclass(frozen=True)
class SoftPulse:
    """Rectangular low-power pulse: rf amplitude, length, carrier and time step."""

    b1_hz: float
    duration_s: float
    carrier_hz: float
    dt_s: float | None = None

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ValueError("soft pulse duration must be positive")
        if self.dt_s is not None and not self.dt_s > 0:
            raise ValueError("soft pulse time step must be positive")


@dataclass(frozen=True)
class PulseEvent:
    """One pulse.

    ``target`` is a :class:`Transition` for ``kind="transition"``, a spin label
    or index for ``kind="spin"`` and a channel name (or ``None`` for every
    spin) for ``kind="nonselective"``.  ``realization`` is ``None`` for an
    ideal pulse or a :class:`SoftPulse`.
    """

    kind: str
    target: object
    angle: float
    phase: float = X
    realization: SoftPulse | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not 0 < self.angle <= 2 * np.pi + 1e-12:
            raise ValueError(f"flip angle {self.angle} outside (0, 2pi]")
        if self.kind == "transition" and not isinstance(self.target, Transition):
            raise TypeError("transition-selective pulses need a Transition target")

    @property
    def is_ideal(self) -> bool:
        return self.realization is None

    def describe(self) -> str:
        deg = np.degrees(self.angle)
        ph = {0: "x", 90: "y", 180: "-x", 270: "-y"}.get(round(np.degrees(self.phase)) % 360,
                                                        f"{np.degrees(self.phase):g}")
        if self.kind == "transition":
            where = self.target.name()
        else:
            where = str(self.target)
        return f"[{deg:g}]_{ph}^{{{where}}}"


@dataclass(frozen=True)
class PulseSequence:
    """Pulses in time order (the first event acts first)."""

    events: tuple[PulseEvent, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __add__(self, other: PulseSequence) -> PulseSequence:
        label = " ".join(x for x in (self.label, other.label) if x)
        return PulseSequence(self.events + other.events, label)

    def describe(self) -> str:
        return " ".join(e.describe() for e in self.events) or "(no pulses)"


def _rotation_2x2(angle: float, phase: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    # exact zeros at multiples of pi keep pi-pulse matrices monomial
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    return np.array([[c, 1j * s * np.exp(-1j * phase)],
                     [1j * s * np.exp(1j * phase), c]], dtype=complex)


def ideal_transition_pulse(transition: Transition, angle: float, phase: float = X) -> np.ndarray:
    """Rotation restricted to the two levels of a single-quantum transition."""
    if transition.order != "single":
        raise ValueError(f"{transition.order}-quantum transitions cannot be pulsed directly")
    if not 0 < angle <= 2 * np.pi + 1e-12:
        raise ValueError(f"flip angle {angle} outside (0, 2pi]")
    U = np.eye(2 ** transition.n, dtype=complex)
    idx = np.array([transition.lower, transition.upper])
    U[np.ix_(idx, idx)] = _rotation_2x2(angle, phase)
    return U


def ideal_spin_pulse(system: SpinSystem, spin: int | str, angle: float, phase: float = X) -> np.ndarray:
    """Hard rotation of one spin (every line of its multiplet)."""
    k = system.index(spin)
    return _product_rotation(system.n, [k], angle, phase)


def nonselective_pulse(system: SpinSystem, channel: str | None, angle: float,
                       phase: float = X) -> np.ndarray:
    """Rotation of every spin on ``channel`` (``None`` or ``"all"``: every spin)."""
    return _product_rotation(system.n, system.spins_on(channel), angle, phase)


def _product_rotation(n: int, spins, angle: float, phase: float) -> np.ndarray:
    R = _rotation_2x2(angle, phase)
    E = np.eye(2, dtype=complex)
    return reduce(np.kron, [R if k in spins else E for k in range(n)])


def event_propagator(system: SpinSystem, event: PulseEvent) -> np.ndarray:
    if event.realization is not None:
        from .softpulse import soft_pulse_propagator
        return soft_pulse_propagator(system, event)
    if event.kind == "transition":
        if event.target.n != system.n:
            raise ValueError("transition does not belong to this spin system")
        return ideal_transition_pulse(event.target, event.angle, event.phase)
    if event.kind == "spin":
        return ideal_spin_pulse(system, event.target, event.angle, event.phase)
    return nonselective_pulse(system, event.target, event.angle, event.phase)


def sequence_propagator(system: SpinSystem, seq: PulseSequence) -> np.ndarray:
    """``U_n ... U_2 U_1`` for events applied in time order."""
    U = np.eye(system.dim, dtype=complex)
    for ev in seq:
        U = event_propagator(system, ev) @ U
    return U


def apply_sequence(system: SpinSystem, rho: np.ndarray, seq: PulseSequence,
                   check: bool = True) -> np.ndarray:
    """Evolve ``rho`` through every pulse of ``seq``, verifying invariants."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (system.dim, system.dim):
        raise ValueError(f"density matrix shape {rho.shape} does not match dimension {system.dim}")
    for ev in seq:
        U = event_propagator(system, ev)
        rho = U @ rho @ U.conj().T
        if check:
            check_deviation(rho, tol=1e-10)
    return rho


def transition_pulse(transition: Transition, angle: float = np.pi, phase: float = X,
                     realization: SoftPulse | None = None) -> PulseEvent:
    return PulseEvent("transition", transition, angle, phase, realization)


def spin_pulse(spin, angle: float = np.pi, phase: float = X,
               realization: SoftPulse | None = None) -> PulseEvent:
    return PulseEvent("spin", spin, angle, phase, realization)


def hard_pulse(channel=None, angle: float = np.pi / 2, phase: float = Y) -> PulseEvent:
    return PulseEvent("nonselective", channel, angle, phase)


def phase_cycle(seq: PulseSequence, phases=DJ_CYCLE) -> list[PulseSequence]:
    """One copy of ``seq`` per phase, transition-selective phases offset by it.

    Spin-selective and non-selective pulses keep their phase; the receiver
    phase is not touched.
    """
    phases = list(phases)
    if not phases:
        raise ValueError("phase cycle needs at least one phase")
    if not any(e.kind == "transition" for e in seq):
        raise ValueError("phase cycling needs at least one transition-selective pulse")
    out = []
    for p in phases:
        events = tuple(replace(e, phase=(e.phase + p) % (2 * np.pi)) if e.kind == "transition" else e
                       for e in seq)
        out.append(PulseSequence(events, seq.label))
    return out


def to_records(seq: PulseSequence) -> list[dict]:
    """Plain-data form of a sequence, suitable for JSON."""
    records = []
    for e in seq:
        if e.kind == "transition":
            target = [int(e.target.lower), int(e.target.upper)]
        else:
            target = e.target
        rec = {"kind": e.kind, "target": target,
               "angle_deg": float(np.degrees(e.angle)),
               "phase_deg": float(np.degrees(e.phase))}
        if e.realization is not None:
            rec["realization"] = {"b1_hz": e.realization.b1_hz,
                                  "duration_s": e.realization.duration_s,
                                  "carrier_hz": e.realization.carrier_hz,
                                  "dt_s": e.realization.dt_s}
        else:
            rec["realization"] = "ideal"
        records.append(rec)
    return records


def from_records(records: list[dict], system: SpinSystem, label: str = "") -> PulseSequence:
    events = []
    for rec in records:
        kind = rec["kind"]
        target = rec["target"]
        if kind == "transition":
            target = make_transition(system, int(target[0]), int(target[1]))
        real = rec.get("realization", "ideal")
        soft = None if real in (None, "ideal") else SoftPulse(**real)
        events.append(PulseEvent(kind, target, float(np.radians(rec["angle_deg"])),
                                 float(np.radians(rec.get("phase_deg", 0.0))), soft))
    return PulseSequence(tuple(events), label)


def is_unitary(U: np.ndarray, tol: float = 1e-10) -> bool:
    U = np.asarray(U)
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()) < tol
