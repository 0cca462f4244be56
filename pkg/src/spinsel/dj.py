"""Deutsch-Jozsa oracles as selective-pulse programs on two and three spins.

Qubit layout.  For one input bit the input x sits on spin 0 (A) and the
output y on spin 1 (X), so the oracle matrices come out exactly as
``|x>|y> -> |x>|y + f(x)>`` in basis order.  For two input bits the output
sits on spin 0 (A, the spin whose multiplet has four resolved lines) and the
inputs (x, y) on spins 1 and 2 (M, X).  An oracle flips the output spin on
every line whose passive (input) state has f = 1.

Readout.  After a hard [pi/2]_y on every spin the inputs' lines survive only
if f is unchanged by flipping that input; the output spin keeps the lines
whose passive state has f = 0.  A function is called balanced when some input
spin's multiplet disappears.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .pulses import (DJ_CYCLE, Y, PulseSequence, apply_sequence, hard_pulse, phase_cycle,
                     spin_pulse, transition_pulse)
from .spectrum import StickSpectrum, average_spectra, multiplet_integrals, read_spectrum
from .system import SpinSystem, bits, from_bits, thermal_deviation
from .transitions import find_transition

EPS_ABS = 1e-8
EPS_REL = 1e-6


@dataclass(frozen=True)
class OracleFunction:
    """Truth table over inputs in binary order (first input most significant)."""

    n_inputs: int
    table: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if self.n_inputs not in (1, 2):
            raise ValueError("only one- and two-bit functions are supported")
        table = tuple(int(v) for v in self.table)
        if len(table) != 2 ** self.n_inputs or any(v not in (0, 1) for v in table):
            raise ValueError(f"bad truth table {self.table}")
        object.__setattr__(self, "table", table)
        if self.kind is None:
            raise ValueError(f"{table} is neither constant nor balanced")

    @property
    def kind(self) -> str | None:
        ones = sum(self.table)
        if ones in (0, len(self.table)):
            return "constant"
        if 2 * ones == len(self.table):
            return "balanced"
        return None

    def __call__(self, *x) -> int:
        return self.table[from_bits(x)]


# columns of the published function tables
_TABLES = {
    1: {"f1": (0, 0), "f2": (1, 1), "f3": (0, 1), "f4": (1, 0)},
    2: {"f1": (0, 0, 0, 0), "f2": (1, 1, 1, 1), "f3": (0, 0, 1, 1), "f4": (1, 1, 0, 0),
        "f5": (1, 0, 1, 0), "f6": (0, 1, 0, 1), "f7": (1, 0, 0, 1), "f8": (0, 1, 1, 0)},
}


def functions(n_inputs: int) -> dict[str, OracleFunction]:
    return {k: OracleFunction(n_inputs, v, k) for k, v in _TABLES[n_inputs].items()}


def function(n_inputs: int, name: str) -> OracleFunction:
    try:
        return functions(n_inputs)[name]
    except KeyError:
        raise KeyError(f"no function {name!r} for {n_inputs} input bit(s)") from None


@dataclass(frozen=True)
class Layout:
    inputs: tuple[int, ...]
    output: int

    @classmethod
    def for_inputs(cls, n_inputs: int) -> Layout:
        return cls((0,), 1) if n_inputs == 1 else cls((1, 2), 0)

    def spin_order(self) -> tuple[int, ...]:
        """Spin index carrying each logical qubit (inputs first, output last)."""
        return self.inputs + (self.output,)


def uf_matrix(f: OracleFunction) -> np.ndarray:
    """Permutation ``|x>|z> -> |x>|z + f(x)>`` in logical order (output last)."""
    n = f.n_inputs + 1
    U = np.zeros((2 ** n, 2 ** n))
    for col in range(2 ** n):
        b = bits(col, n)
        x, z = b[:-1], b[-1]
        U[from_bits(x + (z ^ f(*x),)), col] = 1
    return U


def spin_uf_matrix(f: OracleFunction, layout: Layout | None = None) -> np.ndarray:
    """:func:`uf_matrix` with logical qubits moved onto their spins."""
    layout = layout or Layout.for_inputs(f.n_inputs)
    n = f.n_inputs + 1
    order = layout.spin_order()

    def to_spin(index):
        logical = bits(index, n)
        b = [0] * n
        for q, spin in enumerate(order):
            b[spin] = logical[q]
        return from_bits(b)

    perm = [to_spin(i) for i in range(2 ** n)]
    P = np.zeros((2 ** n, 2 ** n))
    P[perm, range(2 ** n)] = 1
    return P @ uf_matrix(f) @ P.T


def oracle_sequence(system: SpinSystem, f: OracleFunction) -> PulseSequence:
    """Selective pi_x pulses encoding ``f`` on the output spin."""
    if system.n != f.n_inputs + 1:
        raise ValueError(f"{f.n_inputs}-bit oracle needs {f.n_inputs + 1} spins, system has {system.n}")
    layout = Layout.for_inputs(f.n_inputs)
    label = f"U_f {f.name or f.table}"
    if f.kind == "constant":
        if f.table[0] == 0:
            return PulseSequence((), label)
        return PulseSequence((spin_pulse(layout.output),), label)
    events = []
    for x in product((0, 1), repeat=f.n_inputs):
        if f(*x):
            events.append(transition_pulse(find_transition(system, layout.output, x)))
    return PulseSequence(tuple(events), label)


def pulse_mask(system: SpinSystem, f: OracleFunction) -> list[float]:
    """Flip angle on each output-spin line, lines in passive-state order."""
    angles = []
    for x in product((0, 1), repeat=f.n_inputs):
        angles.append(np.pi if f(*x) else 0.0)
    return angles


def compile_dj(system: SpinSystem, f: OracleFunction) -> PulseSequence:
    """Full program: hard [pi/2]_y on every spin, then the oracle pulses."""
    return PulseSequence((hard_pulse(None, np.pi / 2, Y),), "superposition") + oracle_sequence(system, f)


@dataclass(frozen=True)
class Classification:
    kind: str
    margin: float
    integrals: dict[str, float]
    ratios: dict[str, float]


def classify(spectrum: StickSpectrum, system: SpinSystem, target_spins,
             reference: StickSpectrum | None = None) -> Classification:
    """Constant or balanced from the input spins' multiplet integrals.

    A multiplet counts as gone when its integrated magnitude is below
    ``EPS_ABS`` or below ``EPS_REL`` times the same multiplet in
    ``reference`` (normally the f1 run).  ``margin`` is how far the deciding
    ratio sits from ``EPS_REL`` (always >= 1 away from the boundary when the
    decision is clear; infinite for an exactly empty multiplet).
    """
    integrals, ratios = {}, {}
    for spin in target_spins:
        label = system.labels[system.index(spin)]
        _, total = multiplet_integrals(spectrum, label)
        integrals[label] = total
        if reference is not None:
            _, ref = multiplet_integrals(reference, label)
            ratios[label] = total / ref if ref > 0 else (0.0 if total == 0 else np.inf)
        else:
            ratios[label] = total
    gone = [lab for lab in integrals
            if integrals[lab] < EPS_ABS or (reference is not None and ratios[lab] < EPS_REL)]
    if gone:
        worst = min(ratios[lab] for lab in gone)
        margin = np.inf if worst == 0 else EPS_REL / worst
        return Classification("balanced", float(margin), integrals, ratios)
    worst = min(ratios.values())
    return Classification("constant", float(worst / EPS_REL), integrals, ratios)


@dataclass(frozen=True)
class DJResult:
    function: OracleFunction
    spectrum: StickSpectrum
    classification: Classification
    program: PulseSequence
    variants: tuple[StickSpectrum, ...] = field(default=())

    @property
    def kind(self) -> str:
        return self.classification.kind

    def dispersive(self) -> float:
        """Largest imaginary (dispersive) line component of the averaged spectrum."""
        return max((abs(l.amplitude.imag) for l in self.spectrum.lines), default=0.0)

    def residual(self) -> float:
        """Largest line-amplitude difference between any single cycle step and
        the averaged spectrum (zero without cycling)."""
        out = 0.0
        for v in self.variants:
            for a, b in zip(v.lines, self.spectrum.lines):
                out = max(out, abs(a.amplitude - b.amplitude))
        return out


def _spectrum(system, f, read_angle, cycle, phases, realize):
    rho = apply_sequence(system, thermal_deviation(system), PulseSequence((hard_pulse(None, np.pi / 2, Y),)))
    oracle = oracle_sequence(system, f)
    has_selective = any(e.kind == "transition" for e in oracle)
    variants = phase_cycle(oracle, phases) if cycle and has_selective else [oracle]
    if realize is not None:
        variants = [realize(v) for v in variants]
    spectra = [read_spectrum(system, apply_sequence(system, rho, v), read_angle) for v in variants]
    return average_spectra(spectra), tuple(spectra)


def run_dj(system: SpinSystem, f: OracleFunction, read_angle: float = 0.0, cycle: bool = True,
           phases=DJ_CYCLE, realize=None) -> DJResult:
    """Thermal state, superposition pulse, oracle, (cycled) readout, decision.

    ``read_angle`` 0 acquires the coherences left by the oracle directly (the
    [pi/2]_y pulse is the excitation); a nonzero value adds a detection pulse.
    ``realize`` optionally rewrites each oracle program before it runs, e.g.
    :func:`spinsel.softpulse.soften`.
    """
    layout = Layout.for_inputs(f.n_inputs)
    avg, variants = _spectrum(system, f, read_angle, cycle, phases, realize)
    ref, _ = _spectrum(system, OracleFunction(f.n_inputs, (0,) * 2 ** f.n_inputs, "f1"),
                       read_angle, False, phases, None)
    verdict = classify(avg, system, layout.inputs, reference=ref)
    return DJResult(f, avg, verdict, compile_dj(system, f), variants if len(variants) > 1 else ())
