import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsel.prep import (compile_mq_inversion, populations, preparation_sequence, prepare,
                          prepare_ppure_dq_sq, prepare_ppure_sq, prepare_ppure_sq_zq,
                          pseudo_pure_blocks)
from spinsel.pulses import apply_sequence, sequence_propagator
from spinsel.system import thermal_deviation
from spinsel.transitions import list_transitions, make_transition

EQ1 = [1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, -1.5]
EQ2 = [1.5, 0.5, 0.5, 0.5, -1.5, -0.5, -0.5, -0.5]
EQ3 = [1.5, 0.5, 0.5, 0.5, -0.5, -0.5, -0.5, -1.5]


@pytest.mark.parametrize("fn, want", [(prepare_ppure_sq, EQ1), (prepare_ppure_dq_sq, EQ2),
                                      (prepare_ppure_sq_zq, EQ3)])
def test_population_tables(dibromo, benzofurazan, fn, want):
    for s in (dibromo, benzofurazan):
        assert np.abs(populations(fn(s)) - want).max() < 1e-12


def test_sq_inverts_the_two_central_A_lines(dibromo):
    seq = preparation_sequence(dibromo, "sq")
    assert [e.target.name() for e in seq] == ["uud-dud", "udu-ddu"]


@pytest.mark.parametrize("method, order", [("sq", 2), ("dq-sq", 3), ("sq-zq", 3)])
def test_preparation_permutation_order(dibromo, method, order):
    # sq swaps two disjoint pairs; the other schemes chain two swaps through a
    # shared level, which is a three-cycle
    seq = preparation_sequence(dibromo, method)
    thermal = populations(thermal_deviation(dibromo))
    rho = thermal_deviation(dibromo)
    for k in range(1, order + 1):
        rho = apply_sequence(dibromo, rho, seq)
        restored = np.abs(populations(rho) - thermal).max() < 1e-12
        assert restored == (k == order)


@pytest.mark.parametrize("method", ["sq", "dq-sq", "sq-zq"])
def test_work_blocks_are_pseudo_pure(dibromo, method):
    for block in pseudo_pure_blocks(populations(prepare(dibromo, method))):
        # three equal levels and one distinct level, relative to the block mean
        vals = np.sort(block)
        three = vals[:3] if abs(vals[0] - vals[2]) < 1e-12 else vals[1:]
        assert np.ptp(three) < 1e-12 and abs(vals.sum()) < 1e-12
        assert abs(vals[0] - vals[3]) > 0.5


def test_population_sum_is_zero(dibromo):
    for m in ("sq", "dq-sq", "sq-zq"):
        assert abs(populations(prepare(dibromo, m)).sum()) < 1e-12
    assert np.array_equal(populations(np.zeros((4, 4))), np.zeros(4))


def test_label_spin_is_configurable(dibromo):
    # labeling on M permutes the Eq. (1) vector accordingly
    pops = populations(prepare(dibromo, "sq", label="M"))
    from spinsel.system import bits
    for i, p in enumerate(pops):
        m_bits = bits(i, 3)
        j = (m_bits[1] << 2) | (m_bits[0] << 1) | m_bits[2]
        assert p == pytest.approx(EQ1[j])


def test_mq_cascade_swaps_exactly_two_populations(dibromo, benzofurazan):
    rng = np.random.default_rng(1)
    for s in (dibromo, benzofurazan):
        for t in list_transitions(s, ("zero", "double")):
            U = sequence_propagator(s, compile_mq_inversion(s, t))
            for _ in range(20):
                p = rng.normal(size=8)
                q = p.copy()
                q[[t.lower, t.upper]] = q[[t.upper, t.lower]]
                assert np.abs(U @ np.diag(p) @ U.conj().T - np.diag(q)).max() < 1e-12


def test_two_spin_zero_quantum_cascade_is_swap(coumarin):
    from spinsel.gates import ideal_gate, population_map
    seq = compile_mq_inversion(coumarin, make_transition(coumarin, 1, 2))
    assert population_map(sequence_propagator(coumarin, seq)) == population_map(ideal_gate("SWAP"))
    names = [e.target.name() for e in seq]
    assert len(names) == 3 and names[0] == names[2]


def test_intermediate_follows_strongest_coupling(dibromo):
    # flipping the A spin (|J_AM| + |J_AX| = 21.6 Hz) is preferred over M (14.5 Hz)
    t = make_transition(dibromo, 3, 5)  # udd <-> dud
    first = compile_mq_inversion(dibromo, t).events[0].target
    assert first.spin == 0


def test_errors(dibromo, coumarin):
    with pytest.raises(ValueError):
        compile_mq_inversion(dibromo, list_transitions(dibromo)[0])
    with pytest.raises(ValueError):
        preparation_sequence(coumarin, "sq")
    with pytest.raises(ValueError, match="unknown preparation"):
        preparation_sequence(dibromo, "magic")


def test_soft_preparation_is_close_to_ideal(benzofurazan):
    seq = preparation_sequence(benzofurazan, "sq", soft_duration=0.263)
    assert len(seq) == 1  # the central lines are 0.09 Hz apart
    pops = populations(prepare(benzofurazan, "sq", soft_duration=0.263))
    assert np.abs(pops - EQ1).max() < 0.1
