import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsel.system import (ConfigError, bits, build_spin_system, check_deviation, diagonal_energies,
                            from_bits, gamma_weights, hamiltonian, load_molecule, magnetization,
                            molecule_dir, spin_operator, state_name, thermal_deviation)


def test_basis_order_lists_up_first_with_spin0_most_significant():
    assert [state_name(i, 3) for i in range(8)] == ["uuu", "uud", "udu", "udd", "duu", "dud", "ddu", "ddd"]


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n - 1))))
def test_bits_roundtrip(n_index):
    n, index = n_index
    assert from_bits(bits(index, n)) == index
    assert magnetization(index, n) == sum(0.5 - b for b in bits(index, n))


def test_two_spin_hamiltonian_closed_form(two_spin):
    nA, nX, J = 100.0, -100.0, 10.0
    want = 2 * np.pi * np.array([nA / 2 + nX / 2 + J / 4, nA / 2 - nX / 2 - J / 4,
                                 -nA / 2 + nX / 2 - J / 4, -nA / 2 - nX / 2 + J / 4])
    np.testing.assert_allclose(np.diag(hamiltonian(two_spin)).real, want, atol=1e-9)
    np.testing.assert_allclose(diagonal_energies(two_spin), want, atol=1e-9)


def test_equal_shifts_without_coupling_are_degenerate():
    s = build_spin_system({"spectrometer": {"1H": 100.0},
                           "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1.0},
                                     {"label": "B", "channel": "1H", "shift_ppm": 1.0}]})
    E = diagonal_energies(s) / (2 * np.pi)
    np.testing.assert_allclose(E, [100.0, 0.0, 0.0, -100.0], atol=1e-12)


def test_strong_coupling_mixes_only_same_channel_pairs(benzofurazan):
    strong = build_spin_system({
        "spectrometer": {"1H": 400.0, "19F": 376.376},
        "spins": [{"label": "A", "channel": "1H", "shift_ppm": 7.28},
                  {"label": "M", "channel": "1H", "shift_ppm": 8.57},
                  {"label": "X", "channel": "19F", "shift_ppm": -110.35}],
        "couplings": [{"a": "A", "b": "M", "j_hz": 8.1}, {"a": "A", "b": "X", "j_hz": 8.01},
                      {"a": "M", "b": "X", "j_hz": 3.81}],
        "strong_coupling": True})
    H = hamiltonian(strong)
    assert np.allclose(H, H.conj().T)
    off = H - np.diag(np.diag(H))
    # the flip-flop term links uud<->dud-type pairs of A and M only
    assert abs(off[2, 4]) > 0 and abs(off[1, 2]) == 0
    np.testing.assert_allclose(np.diag(H).real, diagonal_energies(benzofurazan), atol=1e-9)


def test_thermal_amx_diagonal(dibromo):
    np.testing.assert_allclose(np.diag(thermal_deviation(dibromo)).real,
                               [1.5, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, -1.5])


def test_thermal_single_spin():
    s = build_spin_system({"spectrometer": {"1H": 400.0},
                           "spins": [{"label": "H", "channel": "1H", "shift_ppm": 1.0}]})
    np.testing.assert_allclose(np.diag(thermal_deviation(s)).real, [0.5, -0.5])


def test_thermal_with_weights(benzofurazan):
    w = (1.0, 1.0, 0.94)
    rho = thermal_deviation(benzofurazan.with_weights(w))
    want = [sum(wk * (0.5 - b) for wk, b in zip(w, bits(i, 3))) for i in range(8)]
    np.testing.assert_allclose(np.diag(rho).real, want)


def test_gamma_weights(benzofurazan):
    assert gamma_weights(benzofurazan) == pytest.approx([1.0, 1.0, 0.94094])


def test_spin_operator_commutation():
    Ix, Iy, Iz = (spin_operator(2, 1, a) for a in "xyz")
    np.testing.assert_allclose(Ix @ Iy - Iy @ Ix, 1j * Iz, atol=1e-15)


def test_shipped_molecules_load_with_published_values(benzofurazan, dibromo):
    assert benzofurazan.offset_hz("A") == pytest.approx(7.28 * 400)
    assert benzofurazan.j("A", "M") == 8.1 and benzofurazan.j("X", "A") == 8.01
    assert benzofurazan.j("M", "X") == 3.81
    assert benzofurazan.channels == ("1H", "19F")
    assert [s.shift_ppm for s in dibromo.spins] == [3.91, 3.69, 4.48]
    for f in molecule_dir().glob("*.json"):
        notes = json.loads(f.read_text())["notes"]
        assert any("unspecified-in-paper" in n for n in notes)


def test_molecule_dir_environment_override(tmp_path, monkeypatch):
    (tmp_path / "lonely-1spin.json").write_text(json.dumps(
        {"spectrometer": {"1H": 400}, "spins": [{"label": "H", "channel": "1H", "shift_ppm": 2}]}))
    monkeypatch.setenv("SPINSEL_MOLECULE_DIR", str(tmp_path))
    assert load_molecule("lonely").n == 1


@pytest.mark.parametrize("config, message", [
    ({"spectrometer": {}, "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1}]}, "base frequency"),
    ({"spectrometer": {"1H": 1}, "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1},
                                             {"label": "A", "channel": "1H", "shift_ppm": 2}]}, "duplicate"),
    ({"spectrometer": {"1H": 1}, "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1},
                                             {"label": "B", "channel": "1H", "shift_ppm": 2}],
      "couplings": [{"a": "A", "b": "B", "j_hz": 1}, {"a": "B", "b": "A", "j_hz": 2}]}, "asymmetric"),
    ({"spectrometer": {"1H": 1}, "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1}],
      "couplings": [{"a": "A", "b": "A", "j_hz": 1}]}, "self-coupling"),
    ({"spectrometer": {"1H": 1}, "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1, "weight": 0}]},
     "weight"),
    ({"spins": []}, "malformed"),
])
def test_invalid_configs_rejected(config, message):
    with pytest.raises(ConfigError, match=message):
        build_spin_system(config)


def test_missing_molecule_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_molecule("no-such-molecule")
    with pytest.raises(ConfigError):
        load_molecule(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_molecule(bad)


def test_check_deviation_rejects_bad_states():
    check_deviation(np.diag([0.5, -0.5]))
    with pytest.raises(ValueError, match="Hermitian"):
        check_deviation(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError, match="traceless"):
        check_deviation(np.eye(2))
