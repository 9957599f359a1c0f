import numpy as np
import pytest

from skqes.designs import (CLIFFORD_SIZES, H, NotEnumerable, S, X, Z, clifford_family,
                           design_deviation, haar_family, haar_moment, make_family,
                           pauli_family, projectively_equal, sample_clifford, swap_operator,
                           twirl)


def _rand_op(d, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def test_family_sizes():
    assert pauli_family(2).size == 16
    assert clifford_family(1).size == 24
    assert clifford_family(2).size == CLIFFORD_SIZES[2] == 11520


def test_members_are_unitary_and_deterministic():
    fam = clifford_family(2)
    for k in (0, 17, 11519, 2 ** 31 + 5):
        u = fam.resolve(k)
        assert np.allclose(u @ u.conj().T, np.eye(4))
        assert np.array_equal(u, fam.resolve(k))
    h = haar_family(2)
    assert np.array_equal(h.resolve(99), h.resolve(99))
    assert not np.allclose(h.resolve(99), h.resolve(100))


def test_clifford_elements_distinct_up_to_phase():
    us = clifford_family(1).stacked()
    for i in range(len(us)):
        for j in range(i):
            assert not projectively_equal(us[i], us[j])


def test_clifford_normalizes_paulis():
    rng = np.random.default_rng(3)
    for _ in range(5):
        c = sample_clifford(3, rng)
        assert np.allclose(c @ c.conj().T, np.eye(8))
        p = np.kron(np.kron(X, np.eye(2)), Z)
        image = c @ p @ c.conj().T
        # image is a Pauli up to phase: it squares to the identity and has 0/1 entries
        assert np.allclose(image @ image, np.eye(8))
        assert np.allclose(np.sort(np.abs(image).sum(axis=1)), np.ones(8))


def test_pauli_one_design_exact():
    for n in (1, 2):
        assert design_deviation(pauli_family(n), 1, _rand_op(2 ** n), "exact") <= 1e-12


def test_clifford_two_design_exact():
    assert design_deviation(clifford_family(1), 2, _rand_op(4), "exact") <= 1e-9


def test_pauli_is_not_two_design():
    assert design_deviation(pauli_family(1), 2, _rand_op(4), "exact") >= 0.1


def test_haar_moment_oracles():
    # first moment: the completely depolarizing map
    x = _rand_op(2)
    assert np.allclose(haar_moment(1, 1, x), np.trace(x) * np.eye(2) / 2)
    # the swap operator is invariant under U x U
    sw = swap_operator(2)
    assert np.allclose(haar_moment(2, 1, sw), sw)


def test_sampled_twirl_of_haar_family():
    dev = design_deviation(haar_family(1), 2, _rand_op(4, 5), "sampled", trials=4000,
                           rng=np.random.default_rng(0))
    assert dev <= 5e-2


def test_twirl_checks_shape_and_mode():
    with pytest.raises(ValueError):
        twirl(pauli_family(1), 1, np.eye(4))
    with pytest.raises(ValueError):
        twirl(pauli_family(1), 1, np.eye(2), mode="other")


def test_make_family_and_enumeration_limits():
    assert make_family("pauli", 1).size == 4
    with pytest.raises((KeyError, ValueError)):
        make_family("nope", 1)
    with pytest.raises(NotEnumerable):
        list(haar_family(1).keys())


def test_generators_are_cliffords():
    fam = clifford_family(1)
    members = fam.stacked()
    for g in (H, S):
        assert any(projectively_equal(g, u) for u in members)
