"""Two-qubit logic gates and their transition-selective pulse cascades.

Transition names follow the printed pulse matrices of the portmanteau-gate
construction: ``L1``/``L2`` is the line on which spin ``L`` stays fixed, in
state down (``1``) or up (``2``), while the other spin flips.  For an A-X pair
in basis order uu, ud, du, dd this gives

    A1 = du<->dd   A2 = uu<->ud   X1 = ud<->dd   X2 = uu<->du

so that (A1, X2) share a level progressively and (A1, X1) regressively.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pulses import PulseSequence, apply_sequence, sequence_propagator, spin_pulse, transition_pulse
from .spectrum import StickSpectrum, read_spectrum
from .system import SpinSystem, thermal_deviation
from .transitions import Transition, find_transition


def _permutation(action) -> np.ndarray:
    """Permutation matrix of a map on two-bit basis states."""
    U = np.zeros((4, 4))
    for e1 in (0, 1):
        for e2 in (0, 1):
            f1, f2 = action(e1, e2)
            U[2 * f1 + f2, 2 * e1 + e2] = 1
    return U


PRIMITIVES = {
    "SWAP": _permutation(lambda a, b: (b, a)),
    "XOR1": _permutation(lambda a, b: (a ^ b, b)),
    "XOR2": _permutation(lambda a, b: (a, a ^ b)),
    "XNOR1": _permutation(lambda a, b: (1 - (a ^ b), b)),
    "XNOR2": _permutation(lambda a, b: (a, 1 - (a ^ b))),
    "NOT1": _permutation(lambda a, b: (1 - a, b)),
    "NOT2": _permutation(lambda a, b: (a, 1 - b)),
    "NOT": _permutation(lambda a, b: (1 - a, 1 - b)),
}

# products written as matrices: the rightmost factor acts first
COMPOSITES = {
    "SWAP+XOR": ("XOR1", "SWAP"),
    "SWAP+XNOR": ("XNOR1", "SWAP"),
    "XOR+SWAP+NOT": ("NOT1", "SWAP", "XOR1"),
    "XNOR+SWAP+NOT": ("NOT2", "SWAP", "XNOR2"),
    "NOT+SWAP": ("SWAP", "NOT"),
}

# pulse programs in time order; strings name transitions, ("spin", k) a spin pulse
PROGRAMS = {
    "SWAP": ("A1", "X1", "A1"),
    "XOR1": ("X1",),
    "XOR2": ("A1",),
    "XNOR1": ("X2",),
    "XNOR2": ("A2",),
    "NOT1": (("spin", 0),),
    "NOT2": (("spin", 1),),
    "NOT": (("spin", 0), ("spin", 1)),
    "SWAP+XOR": ("X1", "A1"),
    "SWAP+XNOR": ("X2", "A2"),
    "XOR+SWAP+NOT": ("A1", "X2"),
    "XNOR+SWAP+NOT": ("X2", "A1"),
    "NOT+SWAP": ("A1", "X2", "A1"),
}

GATE_NAMES = tuple(PROGRAMS)


class PhaseMismatch(ValueError):
    """A pulse propagator is not a row-rephased copy of the ideal gate."""

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


@dataclass(frozen=True)
class PhaseEquivalence:
    """Row phases ``d`` with ``U_seq = diag(d) U_ideal``."""

    phases: tuple[complex, ...]
    permutation: tuple[int, ...]


def normalize_name(name: str) -> str:
    key = name.strip().upper().replace("-", "+").replace("_", "+")
    aliases = {"SWAP+DEMO": "SWAP-demo", "SWAPDEMO": "SWAP-demo"}
    return aliases.get(key, key)


def ideal_gate(spec) -> np.ndarray:
    """0/1 matrix of a named gate or of an explicit product of primitives.

    ``spec`` is a name from :data:`GATE_NAMES` or a sequence of primitive names
    written as a matrix product (rightmost acts first).
    """
    if isinstance(spec, str):
        name = normalize_name(spec)
        if name in PRIMITIVES:
            return PRIMITIVES[name].copy()
        if name in COMPOSITES:
            return ideal_gate(COMPOSITES[name])
        raise KeyError(f"unknown gate {spec!r}")
    factors = [normalize_name(s) for s in spec]
    if not factors:
        raise ValueError("empty gate composition")
    for f in factors:
        if f not in PRIMITIVES:
            raise KeyError(f"unknown primitive gate {f!r}")
    return reduce(np.matmul, [PRIMITIVES[f] for f in factors])


def named_transition(system: SpinSystem, name: str) -> Transition:
    """Resolve ``A1``/``A2``/``X1``/``X2``-style names on a two-spin system."""
    if system.n != 2:
        raise ValueError("transition names are defined for two spins")
    fixed = system.index(name[:-1])
    state = {"1": 1, "2": 0}[name[-1]]
    flipped = 1 - fixed
    return find_transition(system, flipped, (state,))


def compile_gate(system: SpinSystem, spec) -> PulseSequence:
    """Transition-selective pi_x cascade realizing a gate up to row phases."""
    if system.n != 2:
        raise ValueError("gates are defined on two spins")
    if isinstance(spec, str):
        name = normalize_name(spec)
        if name == "SWAP-demo":
            return PulseSequence(compile_gate(system, "XOR2").events + compile_gate(system, "SWAP").events,
                                 "SWAP on the state prepared by a pi pulse on A1")
        if name not in PROGRAMS:
            raise KeyError(f"unknown gate {spec!r}")
        events = []
        for item in PROGRAMS[name]:
            if isinstance(item, tuple):
                events.append(spin_pulse(item[1]))
            else:
                events.append(transition_pulse(named_transition(system, item)))
        return PulseSequence(tuple(events), name)
    # explicit composition: rightmost factor is applied first
    seq = PulseSequence((), "")
    for f in reversed(list(spec)):
        seq = seq + compile_gate(system, f)
    return PulseSequence(seq.events, "*".join(normalize_name(s) for s in spec))


def phase_equivalence(U_seq: np.ndarray, U_ideal: np.ndarray, tol: float = 1e-10) -> PhaseEquivalence:
    """Factor ``U_seq = diag(d) U_ideal`` for a permutation matrix ``U_ideal``.

    Raises :class:`PhaseMismatch` naming the offending rows when ``U_seq`` is
    not monomial or permutes the basis differently.
    """
    U_seq = np.asarray(U_seq, dtype=complex)
    U_ideal = np.asarray(U_ideal, dtype=complex)
    if U_seq.shape != U_ideal.shape:
        raise PhaseMismatch(f"shape {U_seq.shape} differs from {U_ideal.shape}")
    bad, phases, perm = [], [], []
    for i in range(U_seq.shape[0]):
        nz = np.flatnonzero(np.abs(U_seq[i]) > tol)
        target = np.flatnonzero(np.abs(U_ideal[i]) > tol)
        if len(nz) != 1 or len(target) != 1 or nz[0] != target[0]:
            bad.append(i)
            continue
        j = nz[0]
        d = U_seq[i, j] / U_ideal[i, j]
        if abs(abs(d) - 1) > tol:
            bad.append(i)
            continue
        phases.append(complex(d))
        perm.append(int(j))
    if bad:
        raise PhaseMismatch(f"rows {bad} do not match the ideal permutation", bad)
    return PhaseEquivalence(tuple(phases), tuple(perm))


def population_map(U: np.ndarray, tol: float = 1e-10) -> tuple[int, ...]:
    """Where a monomial unitary sends each basis state (column -> row)."""
    U = np.asarray(U)
    out = []
    for j in range(U.shape[1]):
        nz = np.flatnonzero(np.abs(U[:, j]) > tol)
        if len(nz) != 1:
            raise ValueError(f"column {j} is not a single basis state")
        out.append(int(nz[0]))
    return tuple(out)


def initial_state(system: SpinSystem, initial="thermal") -> np.ndarray:
    """``"thermal"``, ``"ppure"`` (pseudo-pure |00>), a basis index for the
    pseudo-pure state of that index, a population vector, or a full matrix."""
    dim = system.dim
    if isinstance(initial, str):
        if initial == "thermal":
            return thermal_deviation(system)
        if initial == "ppure":
            initial = 0
        else:
            raise ValueError(f"unknown initial state {initial!r}")
    if isinstance(initial, (int, np.integer)):
        rho = -np.eye(dim, dtype=complex) / dim
        rho[initial, initial] += 1
        return rho
    arr = np.asarray(initial, dtype=complex)
    if arr.shape == (dim,):
        return np.diag(arr - arr.mean())
    if arr.shape == (dim, dim):
        return arr
    raise ValueError(f"initial state of shape {arr.shape} does not fit dimension {dim}")


@dataclass(frozen=True)
class GateRun:
    sequence: PulseSequence
    rho: np.ndarray
    spectrum: StickSpectrum


def run_gate(system: SpinSystem, spec, initial="thermal", read_angle: float = np.radians(10),
             channel: str | None = None) -> GateRun:
    """Apply a compiled gate to an initial state and read it with a small pulse."""
    seq = compile_gate(system, spec)
    rho = apply_sequence(system, initial_state(system, initial), seq)
    return GateRun(seq, rho, read_spectrum(system, rho, read_angle, channel=channel))


def verify_all(system: SpinSystem) -> dict[str, PhaseEquivalence | PhaseMismatch]:
    """Phase-equivalence check of every named gate."""
    out = {}
    for name in GATE_NAMES:
        U = sequence_propagator(system, compile_gate(system, name))
        try:
            out[name] = phase_equivalence(U, ideal_gate(name))
        except PhaseMismatch as exc:
            out[name] = exc
    return out
