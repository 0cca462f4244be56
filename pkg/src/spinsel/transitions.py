"""Transition enumeration and connectivity between transitions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .system import SpinSystem, bits, hamiltonian, magnetization, state_name

ORDERS = ("single", "zero", "double")


@dataclass(frozen=True)
class Transition:
    """A pair of basis states.

    ``lower`` is the member with the larger total m_z (ties: smaller index),
    ``upper`` the other one; inverting a transition moves population between
    them.  ``frequency_hz`` is ``(E_lower - E_upper) / 2 pi``, which for a
    single-quantum line of spin k equals ``nu_k + sum_l J_kl m_l``.
    """

    lower: int
    upper: int
    n: int
    order: str
    active: tuple[int, ...]
    passive: tuple[tuple[int, int], ...]
    frequency_hz: float = 0.0

    @property
    def states(self) -> tuple[int, int]:
        return (self.lower, self.upper)

    @property
    def spin(self) -> int:
        """The flipped spin of a single-quantum transition."""
        if self.order != "single":
            raise ValueError("only single-quantum transitions have a single active spin")
        return self.active[0]

    def passive_bits(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.passive)

    def name(self) -> str:
        return f"{state_name(self.lower, self.n)}-{state_name(self.upper, self.n)}"


def level_energies(system: SpinSystem) -> np.ndarray:
    """Energy (rad/s) assigned to each basis state.

    Exact for weak coupling; with strong coupling every eigenvalue is assigned
    to the basis state its eigenvector overlaps most.
    """
    H = hamiltonian(system)
    if not system.strong_coupling:
        return np.real(np.diag(H)).copy()
    w, v = np.linalg.eigh(H)
    E = np.empty(system.dim)
    taken = set()
    for col in np.argsort(-np.abs(v).max(axis=0)):
        for row in np.argsort(-np.abs(v[:, col])):
            if row not in taken:
                taken.add(row)
                E[row] = w[col]
                break
    return E


def make_transition(system: SpinSystem, a: int, b: int, energies=None) -> Transition:
    n = system.n
    if a == b or not (0 <= a < system.dim and 0 <= b < system.dim):
        raise ValueError(f"invalid state pair ({a}, {b})")
    ba, bb = bits(a, n), bits(b, n)
    active = tuple(k for k in range(n) if ba[k] != bb[k])
    if len(active) == 1:
        order = "single"
    elif len(active) == 2:
        flips = [bb[k] - ba[k] for k in active]
        order = "zero" if flips[0] != flips[1] else "double"
    else:
        raise ValueError(f"states {a} and {b} differ in {len(active)} spins")
    ma, mb = magnetization(a, n), magnetization(b, n)
    lower, upper = (a, b) if (ma, -a) > (mb, -b) else (b, a)
    passive = tuple((k, ba[k]) for k in range(n) if k not in active)
    E = level_energies(system) if energies is None else energies
    freq = (E[lower] - E[upper]) / (2 * np.pi)
    return Transition(lower, upper, n, order, active, passive, float(freq))


def list_transitions(system: SpinSystem, orders=("single",)) -> list[Transition]:
    """All transitions of the requested quantum orders, sorted by state pair."""
    for o in orders:
        if o not in ORDERS:
            raise ValueError(f"unknown order {o!r}")
    E = level_energies(system)
    out = []
    for a, b in combinations(range(system.dim), 2):
        diff = sum(x != y for x, y in zip(bits(a, system.n), bits(b, system.n)))
        if diff > 2:
            continue
        t = make_transition(system, a, b, E)
        if t.order in orders:
            out.append(t)
    return out


def spin_transitions(system: SpinSystem, spin: int | str) -> list[Transition]:
    """Single-quantum transitions of one spin, ordered by passive-state word.

    With up = 0 the order is passive uu.., ud.., du.., dd.., i.e. the passive
    bits read as a binary number.
    """
    k = system.index(spin)
    ts = [t for t in list_transitions(system) if t.spin == k]
    return sorted(ts, key=lambda t: t.passive_bits())


def find_transition(system: SpinSystem, spin: int | str, passive) -> Transition:
    """The single-quantum transition of ``spin`` with the other spins in ``passive``.

    ``passive`` lists the bits (0 = up) of the remaining spins in index order.
    """
    k = system.index(spin)
    passive = tuple(int(x) for x in passive)
    for t in spin_transitions(system, k):
        if t.passive_bits() == passive:
            return t
    raise KeyError(f"no transition of spin {spin} with passive state {passive}")


def classify_connectivity(t1: Transition, t2: Transition) -> str:
    """``"progressive"``, ``"regressive"`` or ``"unconnected"``.

    Two transitions are connected when they share exactly one level.  The
    connection is regressive when the two non-shared levels have equal total
    magnetization and progressive otherwise (for single-quantum pairs the
    difference is then +-2).
    """
    if t1.n != t2.n:
        raise ValueError("transitions belong to different systems")
    s1, s2 = set(t1.states), set(t2.states)
    if s1 == s2:
        raise ValueError("cannot classify a transition against itself")
    shared = s1 & s2
    if not shared:
        return "unconnected"
    (a,) = s1 - shared
    (b,) = s2 - shared
    dm = magnetization(a, t1.n) - magnetization(b, t1.n)
    return "regressive" if dm == 0 else "progressive"
