"""Detection pulses, stick spectra and flip-angle analysis.

A line of a single-quantum transition carries the coherence
``<upper| rho' |lower>`` after the detection pulse, i.e. ``(x + i y) / 2`` for
transverse magnetization ``x I_x + y I_y`` on that line.  With the default
detection phase (-y) an equilibrium spectrum has positive real lines.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .operators import decompose, label_words
from .pulses import MINUS_Y, nonselective_pulse
from .system import SpinSystem
from .transitions import Transition, list_transitions

CSV_HEADER = ("frequency_hz", "re", "im", "magnitude", "spin", "transition_id")


@dataclass(frozen=True)
class Line:
    frequency_hz: float
    amplitude: complex
    transition: Transition
    spin: str

    @property
    def magnitude(self) -> float:
        return abs(self.amplitude)


@dataclass(frozen=True)
class StickSpectrum:
    lines: tuple[Line, ...]
    read_angle: float
    read_phase: float = MINUS_Y
    channel: str | None = None
    flags: tuple[str, ...] = field(default=())

    def multiplet(self, spin: str) -> list[Line]:
        """Lines of one spin, highest frequency first."""
        return sorted((l for l in self.lines if l.spin == spin),
                      key=lambda l: (-l.frequency_hz, l.transition.lower))

    @property
    def spins(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(l.spin for l in self.lines))

    def total_magnitude(self) -> float:
        return float(sum(l.magnitude for l in self.lines))


def read_spectrum(system: SpinSystem, rho: np.ndarray, read_angle: float = np.radians(10),
                  read_phase: float = MINUS_Y, channel: str | None = None) -> StickSpectrum:
    """Apply a hard detection pulse on ``channel`` and collect every line there.

    A zero ``read_angle`` reads the coherences already present in ``rho``; if
    there are none the spectrum is all zeros and flagged.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (system.dim, system.dim):
        raise ValueError(f"density matrix shape {rho.shape} does not match dimension {system.dim}")
    observed = system.spins_on(channel)
    if read_angle != 0:
        R = nonselective_pulse(system, channel, read_angle, read_phase)
        rho = R @ rho @ R.conj().T
    lines = []
    for t in list_transitions(system):
        if t.spin in observed:
            lines.append(Line(t.frequency_hz, complex(rho[t.upper, t.lower]), t,
                              system.labels[t.spin]))
    flags = []
    if read_angle == 0:
        flags.append("zero read angle")
    if all(l.magnitude == 0 for l in lines):
        flags.append("no observable coherence")
    return StickSpectrum(tuple(lines), float(read_angle), float(read_phase), channel, tuple(flags))


def average_spectra(spectra: list[StickSpectrum]) -> StickSpectrum:
    """Equal-weight average of spectra that share their line list."""
    if not spectra:
        raise ValueError("nothing to average")
    first = spectra[0]
    for s in spectra[1:]:
        if [l.transition for l in s.lines] != [l.transition for l in first.lines]:
            raise ValueError("spectra have different line lists")
    lines = []
    for i, line in enumerate(first.lines):
        amp = sum(s.lines[i].amplitude for s in spectra) / len(spectra)
        lines.append(Line(line.frequency_hz, amp, line.transition, line.spin))
    return StickSpectrum(tuple(lines), first.read_angle, first.read_phase, first.channel, first.flags)


def multiplet_integrals(spectrum: StickSpectrum, spin: str) -> tuple[list[float], float]:
    """Line magnitudes of one multiplet (highest frequency first) and their sum."""
    mags = [l.magnitude for l in spectrum.multiplet(spin)]
    return mags, float(sum(mags))


def observable_terms(labels) -> dict[str, int]:
    """Observable product operators (one transverse factor) with their z-factor count."""
    out = {}
    for name, word in label_words(labels).items():
        if sum(a in "xy" for a in word) == 1:
            out[name] = sum(a == "z" for a in word)
    return out


@dataclass
class FlipAngleScan:
    angles: np.ndarray
    terms: dict[str, np.ndarray]
    z_order: dict[str, int]
    fits: dict[str, tuple[float, float]]

    def residual(self) -> float:
        return max((res for _, res in self.fits.values()), default=0.0)

    def grouped(self) -> dict[int, np.ndarray]:
        """Signed sum of observable terms per number of z factors."""
        out: dict[int, np.ndarray] = {}
        for name, vals in self.terms.items():
            k = self.z_order[name]
            out[k] = out.get(k, 0) + vals
        return out


def flip_angle_scan(system: SpinSystem, rho: np.ndarray, angles, read_phase: float = MINUS_Y,
                    channel: str | None = None, tol: float = 1e-12) -> FlipAngleScan:
    """Observable product-operator coefficients after detection pulses of each angle.

    A term with ``k`` z factors is fitted to ``a sin(alpha) cos(alpha)^k`` by
    least squares; ``fits`` maps the term to ``(a, max abs residual)``.
    """
    angles = np.asarray(angles, dtype=float)
    labels = system.labels
    rows = []
    for a in angles:
        R = nonselective_pulse(system, channel, a, read_phase)
        rows.append(decompose(R @ rho @ R.conj().T, labels))
    orders = observable_terms(labels)
    terms = {}
    for name in orders:
        vals = np.array([r[name] for r in rows])
        if np.abs(vals).max() > tol:
            terms[name] = vals
    fits = {}
    for name, vals in terms.items():
        model = np.sin(angles) * np.cos(angles) ** orders[name]
        amp = float(model @ vals / (model @ model))
        fits[name] = (amp, float(np.abs(vals - amp * model).max()))
    return FlipAngleScan(angles, terms, {k: orders[k] for k in terms}, fits)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def to_csv(spectrum: StickSpectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for l in spectrum.lines:
        w.writerow([_fmt(l.frequency_hz), _fmt(l.amplitude.real), _fmt(l.amplitude.imag),
                    _fmt(l.magnitude), l.spin, l.transition.name()])
    return buf.getvalue()


def to_dict(spectrum: StickSpectrum) -> dict:
    return {
        "read_angle": spectrum.read_angle,
        "read_phase": spectrum.read_phase,
        "channel": spectrum.channel,
        "flags": list(spectrum.flags),
        "lines": [{
            "frequency_hz": l.frequency_hz,
            "re": l.amplitude.real,
            "im": l.amplitude.imag,
            "spin": l.spin,
            "transition": {"lower": l.transition.lower, "upper": l.transition.upper,
                           "n": l.transition.n, "order": l.transition.order,
                           "active": list(l.transition.active),
                           "passive": [list(p) for p in l.transition.passive],
                           "frequency_hz": l.transition.frequency_hz},
        } for l in spectrum.lines],
    }


def from_dict(data: dict) -> StickSpectrum:
    lines = []
    for d in data["lines"]:
        t = d["transition"]
        tr = Transition(t["lower"], t["upper"], t["n"], t["order"], tuple(t["active"]),
                        tuple(tuple(p) for p in t["passive"]), t["frequency_hz"])
        lines.append(Line(d["frequency_hz"], complex(d["re"], d["im"]), tr, d["spin"]))
    return StickSpectrum(tuple(lines), data["read_angle"], data["read_phase"], data["channel"],
                         tuple(data.get("flags", ())))


def to_svg(spectrum: StickSpectrum, width: int = 640, height: int = 240,
           linewidth_hz: float | None = None) -> str:
    """Stick plot, height proportional to the real (absorption) part.

    With ``linewidth_hz`` the sticks are replaced by a sum of Lorentzians.
    Frequency runs high to low from left to right.
    """
    pad = 20
    base = height / 2
    if not spectrum.lines:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
                f'<line x1="{pad}" y1="{base}" x2="{width - pad}" y2="{base}" stroke="black"/></svg>\n')
    freqs = np.array([l.frequency_hz for l in spectrum.lines])
    reals = np.array([l.amplitude.real for l in spectrum.lines])
    lo, hi = freqs.min(), freqs.max()
    span = max(hi - lo, 1.0)
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    scale = (height / 2 - pad) / max(np.abs(reals).max(), 1e-300)

    def x(f):
        return pad + (hi - f) / (hi - lo) * (width - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<line x1="{pad}" y1="{base:.3f}" x2="{width - pad}" y2="{base:.3f}" stroke="gray"/>']
    if linewidth_hz:
        grid = np.linspace(lo, hi, 2000)
        g = linewidth_hz / 2
        curve = sum(r * g * g / ((grid - f) ** 2 + g * g) for f, r in zip(freqs, reals))
        pts = " ".join(f"{x(f):.3f},{base - c * scale:.3f}" for f, c in zip(grid, curve))
        parts.append(f'<polyline fill="none" stroke="black" points="{pts}"/>')
    else:
        for f, r in zip(freqs, reals):
            parts.append(f'<line x1="{x(f):.3f}" y1="{base:.3f}" x2="{x(f):.3f}" '
                         f'y2="{base - r * scale:.3f}" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export(spectrum: StickSpectrum, fmt: str, path: str | Path, **svg_options) -> Path:
    """Write ``spectrum`` as csv, json or svg; an svg always gets a csv twin."""
    path = Path(path)
    if fmt == "csv":
        path.write_text(to_csv(spectrum))
    elif fmt == "json":
        path.write_text(json.dumps(to_dict(spectrum), indent=1, sort_keys=True) + "\n")
    elif fmt == "svg":
        path.write_text(to_svg(spectrum, **svg_options))
        path.with_suffix(".csv").write_text(to_csv(spectrum))
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return path
