import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinsel.system import build_spin_system
from spinsel.transitions import (classify_connectivity, find_transition, list_transitions,
                                 make_transition, spin_transitions)


def test_single_quantum_count(benzofurazan, dibromo, coumarin):
    for s in (benzofurazan, dibromo, coumarin):
        assert len(list_transitions(s)) == s.n * 2 ** (s.n - 1)


def test_single_spin_has_one_transition():
    s = build_spin_system({"spectrometer": {"1H": 400.0},
                           "spins": [{"label": "H", "channel": "1H", "shift_ppm": 1.0}]})
    (t,) = list_transitions(s)
    assert t.frequency_hz == pytest.approx(400.0)


def test_benzofurazan_A_quartet_splittings(benzofurazan):
    f = sorted((t.frequency_hz for t in spin_transitions(benzofurazan, "A")), reverse=True)
    gaps = sorted(np.round(-np.diff(f), 9))
    assert gaps == pytest.approx([0.09, 8.01, 8.01]) or gaps == pytest.approx([0.09, 8.01, 8.1])
    assert f[0] - f[-1] == pytest.approx(8.1 + 8.01)


def test_frequency_is_offset_plus_couplings(dibromo):
    for t in list_transitions(dibromo):
        k = t.spin
        want = dibromo.offset_hz(k) + sum(dibromo.j(k, l) * (0.5 - b) for l, b in t.passive)
        assert t.frequency_hz == pytest.approx(want)


def test_orders_from_bit_flips(dibromo):
    for t in list_transitions(dibromo, ("single", "zero", "double")):
        diff = t.lower ^ t.upper
        if t.order == "single":
            assert bin(diff).count("1") == 1
        else:
            assert bin(diff).count("1") == 2
    zq = list_transitions(dibromo, ("zero",))
    dq = list_transitions(dibromo, ("double",))
    assert len(zq) == len(dq) == 6


def test_find_transition_by_passive_state(coumarin):
    t = find_transition(coumarin, "X", (1,))
    assert (t.lower, t.upper) == (2, 3)
    with pytest.raises(KeyError):
        find_transition(coumarin, "X", (2,))


def test_connectivity_examples(coumarin, dibromo):
    # A line (uu-du) and X line (du-dd) share du: endpoints uu and dd
    a = make_transition(coumarin, 0, 2)
    x = make_transition(coumarin, 2, 3)
    assert classify_connectivity(a, x) == "progressive"
    # A line (uu-du) and X line (uu-ud) share uu: endpoints du and ud
    assert classify_connectivity(a, make_transition(coumarin, 0, 1)) == "regressive"
    # AMX: the two A lines of the zero-quantum path udd -> ddd -> dud
    t1 = make_transition(dibromo, 3, 7)
    t2 = make_transition(dibromo, 7, 5)
    assert classify_connectivity(t1, t2) == "regressive"
    assert classify_connectivity(a, make_transition(coumarin, 1, 3)) == "unconnected"
    with pytest.raises(ValueError):
        classify_connectivity(a, a)


def test_cascades_use_regressive_zq_and_progressive_dq_paths(dibromo):
    from spinsel.prep import compile_mq_inversion
    for t in list_transitions(dibromo, ("zero", "double")):
        first, second, third = (e.target for e in compile_mq_inversion(dibromo, t))
        assert first == third
        want = "regressive" if t.order == "zero" else "progressive"
        assert classify_connectivity(first, second) == want


@given(st.integers(0, 11), st.integers(0, 11))
def test_connectivity_is_symmetric(i, j):
    s = build_spin_system({"spectrometer": {"1H": 400.0},
                           "spins": [{"label": "A", "channel": "1H", "shift_ppm": 3.91},
                                     {"label": "M", "channel": "1H", "shift_ppm": 3.69},
                                     {"label": "X", "channel": "1H", "shift_ppm": 4.48}],
                           "couplings": [{"a": "A", "b": "M", "j_hz": 10}]})
    ts = list_transitions(s)
    if i == j:
        return
    assert classify_connectivity(ts[i], ts[j]) == classify_connectivity(ts[j], ts[i])


def test_invalid_pairs_rejected(dibromo):
    with pytest.raises(ValueError):
        make_transition(dibromo, 0, 7)
    with pytest.raises(ValueError):
        make_transition(dibromo, 3, 3)
    with pytest.raises(ValueError):
        list_transitions(dibromo, ("triple",))
