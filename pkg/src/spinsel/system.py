"""Spin-system description and the basic spin-1/2 operator algebra.

Basis convention: a basis state index is read as an N-bit word with spin 0 as
the most significant bit; a 0 bit is spin up (m = +1/2, logical 0) and a 1 bit
is spin down (m = -1/2, logical 1).  For three spins the ordering is
uuu, uud, udu, udd, duu, dud, ddu, ddd.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

SIGMA = {
    "E": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex) / 2,
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    "z": np.array([[1, 0], [0, -1]], dtype=complex) / 2,
}

MOLECULE_DIR_ENV = "SPINSEL_MOLECULE_DIR"


class ConfigError(ValueError):
    """Raised for an invalid or unreadable molecule description."""


@dataclass(frozen=True)
class Spin:
    label: str
    channel: str
    shift_ppm: float
    polarization_weight: float = 1.0


@dataclass(frozen=True)
class SpinSystem:
    """Weakly (or optionally strongly) coupled spin-1/2 system.

    ``couplings`` maps ordered index pairs ``(i, j)`` with ``i < j`` to J in Hz.
    ``spectrometer`` maps a channel name (e.g. ``"1H"``) to its base frequency
    in MHz, so that ``shift_ppm * MHz`` is the offset in Hz.
    """

    spins: tuple[Spin, ...]
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)
    spectrometer: dict[str, float] = field(default_factory=dict)
    strong_coupling: bool = False
    name: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.spins) < 1:
            raise ConfigError("a spin system needs at least one spin")
        labels = [s.label for s in self.spins]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate spin labels: {labels}")
        for s in self.spins:
            if s.channel not in self.spectrometer:
                raise ConfigError(f"no base frequency for channel {s.channel!r} (spin {s.label})")
            if not s.polarization_weight > 0:
                raise ConfigError(f"polarization weight of {s.label} must be positive")
        n = len(self.spins)
        for (i, j) in self.couplings:
            if not (0 <= i < n and 0 <= j < n) or i >= j:
                raise ConfigError(f"bad coupling key {(i, j)}")

    @property
    def n(self) -> int:
        return len(self.spins)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.spins)

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(s.channel for s in self.spins))

    def index(self, spin: int | str) -> int:
        if isinstance(spin, (int, np.integer)):
            if not 0 <= spin < self.n:
                raise KeyError(f"no spin with index {spin}")
            return int(spin)
        try:
            return self.labels.index(spin)
        except ValueError:
            raise KeyError(f"unknown spin {spin!r}") from None

    def j(self, a: int | str, b: int | str) -> float:
        i, k = sorted((self.index(a), self.index(b)))
        if i == k:
            return 0.0
        return self.couplings.get((i, k), 0.0)

    def offset_hz(self, spin: int | str) -> float:
        s = self.spins[self.index(spin)]
        return s.shift_ppm * self.spectrometer[s.channel]

    def spins_on(self, channel: str | None) -> list[int]:
        """Indices of spins observed/irradiated on ``channel`` (``None`` = all)."""
        if channel is None or channel == "all":
            return list(range(self.n))
        if channel not in self.spectrometer:
            raise KeyError(f"unknown channel {channel!r}")
        return [k for k, s in enumerate(self.spins) if s.channel == channel]

    def with_coupling(self, a: int | str, b: int | str, j_hz: float) -> SpinSystem:
        i, k = sorted((self.index(a), self.index(b)))
        couplings = dict(self.couplings)
        couplings[(i, k)] = float(j_hz)
        return SpinSystem(self.spins, couplings, dict(self.spectrometer),
                          self.strong_coupling, self.name, self.notes)

    def with_weights(self, weights) -> SpinSystem:
        spins = tuple(Spin(s.label, s.channel, s.shift_ppm, float(w))
                      for s, w in zip(self.spins, weights, strict=True))
        return SpinSystem(spins, dict(self.couplings), dict(self.spectrometer),
                          self.strong_coupling, self.name, self.notes)


def build_spin_system(config: dict) -> SpinSystem:
    """Build a :class:`SpinSystem` from a molecule description dictionary.

    The accepted schema is ``{name, spectrometer: {channel: MHz}, spins:
    [{label, channel, shift_ppm, weight?}], couplings: [{a, b, j_hz}],
    strong_coupling?}``.  Coupling endpoints may be labels or indices.
    Listing the same pair twice with different values is rejected as an
    asymmetric coupling map.
    """
    try:
        spectrometer = {str(k): float(v) for k, v in config["spectrometer"].items()}
        spins = tuple(
            Spin(str(s["label"]), str(s["channel"]), float(s["shift_ppm"]),
                 float(s.get("weight", 1.0)))
            for s in config["spins"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed molecule description: {exc}") from exc
    labels = [s.label for s in spins]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate spin labels: {labels}")

    def resolve(x):
        if isinstance(x, int):
            return x
        if x not in labels:
            raise ConfigError(f"coupling refers to unknown spin {x!r}")
        return labels.index(x)

    couplings: dict[tuple[int, int], float] = {}
    for c in config.get("couplings", []):
        a, b = resolve(c["a"]), resolve(c["b"])
        if a == b:
            raise ConfigError(f"self-coupling on spin {labels[a]}")
        key = (min(a, b), max(a, b))
        j = float(c["j_hz"])
        if key in couplings and couplings[key] != j:
            raise ConfigError(f"asymmetric coupling between {labels[a]} and {labels[b]}")
        couplings[key] = j
    notes = tuple(str(x) for x in config.get("notes", ()))
    return SpinSystem(spins, couplings, spectrometer,
                      bool(config.get("strong_coupling", False)),
                      str(config.get("name", "")), notes)


def molecule_dir() -> Path:
    env = os.environ.get(MOLECULE_DIR_ENV)
    if env:
        return Path(env)
    return Path(__file__).parent / "molecules"


def load_molecule(name_or_path: str | os.PathLike) -> SpinSystem:
    """Load a molecule from a JSON path or by name from the molecule library."""
    path = Path(name_or_path)
    if not path.suffix:
        lib = molecule_dir()
        candidates = sorted(lib.glob(f"{path.name}*.json"))
        if not candidates:
            raise ConfigError(f"no molecule named {str(name_or_path)!r} in {lib}")
        path = candidates[0]
    try:
        config = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read molecule file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"molecule file {path} is not valid JSON: {exc}") from exc
    return build_spin_system(config)


def spin_operator(n: int, k: int, axis: str) -> np.ndarray:
    """Single-spin operator ``I_k{axis}`` embedded in the ``n``-spin space."""
    factors = [SIGMA[axis] if i == k else SIGMA["E"] for i in range(n)]
    return reduce(np.kron, factors)


def bits(index: int, n: int) -> tuple[int, ...]:
    """Bits of a basis index, spin 0 first (0 = up)."""
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def from_bits(b) -> int:
    return reduce(lambda acc, x: (acc << 1) | int(x), b, 0)


def magnetization(index: int, n: int) -> float:
    """Total m_z of a basis state."""
    return sum(0.5 - x for x in bits(index, n))


def state_name(index: int, n: int) -> str:
    return "".join("u" if x == 0 else "d" for x in bits(index, n))


def hamiltonian(system: SpinSystem) -> np.ndarray:
    """Free-precession Hamiltonian in rad/s.

    ``H = sum_k 2 pi nu_k I_kz + sum_{k<l} 2 pi J_kl I_kz I_lz``; with
    ``strong_coupling`` set, same-channel pairs get the full scalar product
    ``I_k . I_l`` instead of the secular ``I_kz I_lz`` term.
    """
    n = system.n
    if not system.strong_coupling:
        return np.diag(diagonal_energies(system)).astype(complex)
    H = np.zeros((system.dim, system.dim), dtype=complex)
    for k in range(n):
        H += 2 * np.pi * system.offset_hz(k) * spin_operator(n, k, "z")
    for (k, l), J in system.couplings.items():
        axes = "xyz" if system.spins[k].channel == system.spins[l].channel else "z"
        for a in axes:
            H += 2 * np.pi * J * spin_operator(n, k, a) @ spin_operator(n, l, a)
    return H


def diagonal_energies(system: SpinSystem) -> np.ndarray:
    """Weak-coupling eigenvalues (rad/s) in basis order."""
    n = system.n
    m = np.array([[0.5 - b for b in bits(i, n)] for i in range(system.dim)])
    nu = np.array([system.offset_hz(k) for k in range(n)])
    E = m @ nu
    for (k, l), J in system.couplings.items():
        E = E + J * m[:, k] * m[:, l]
    return 2 * np.pi * E


def thermal_deviation(system: SpinSystem) -> np.ndarray:
    """High-temperature deviation density matrix ``sum_k w_k I_kz``."""
    n = system.n
    rho = np.zeros((system.dim, system.dim), dtype=complex)
    for k, s in enumerate(system.spins):
        rho += s.polarization_weight * spin_operator(n, k, "z")
    return rho


# gyromagnetic ratios relative to 1H, for optional population weighting
GAMMA_RELATIVE = {"1H": 1.0, "19F": 0.94094, "13C": 0.25145, "15N": -0.10136, "31P": 0.40481}


def gamma_weights(system: SpinSystem) -> list[float]:
    """Polarization weights proportional to |gamma| (1H = 1).

    Not used by default: population tables are in uniform +-1/2 units.
    """
    return [abs(GAMMA_RELATIVE[s.channel]) for s in system.spins]


def check_deviation(rho: np.ndarray, tol: float = 1e-12) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian and traceless."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
    if np.abs(rho - rho.conj().T).max() > tol * scale:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho)) > tol * scale * rho.shape[0]:
        raise ValueError("deviation density matrix is not traceless")
