import numpy as np
import pytest

from skqes.auth import (AttackMap, choi_to_kraus, effective_choi, make_attack, qca_distance,
                        qca_report, qca_simulator, plaintext_marginal_deviation)
from skqes.linalg import KrausChannel, choi_state
from skqes.schemes import make_extra_bit_scheme, make_pauli_otp, make_scheme

from oracles import brute_force_acc_overlap


@pytest.fixture(scope="module")
def otp():
    return make_pauli_otp(1)


def test_identity_attack_is_simulated_exactly(otp):
    rep = qca_report(otp, make_attack(otp, "id"))
    assert rep["distance"] <= 1e-12
    assert rep["acc_trace"] == pytest.approx(1.0)


def test_frozen_values_for_the_one_time_pad(otp):
    # no tag: replacing the ciphertext is accepted and changes the plaintext
    rep = qca_report(otp, make_attack(otp, "replace_tau"))
    assert rep["distance"] == pytest.approx(0.75, abs=1e-12)
    assert rep["acc_trace"] == pytest.approx(0.25, abs=1e-12)
    assert qca_distance(otp, make_attack(otp, "unitary:x_message")) == pytest.approx(1.0)


def test_acc_trace_matches_brute_force(otp):
    for attack_id in ("id", "replace_tau", "unitary:z_message"):
        attack = make_attack(otp, attack_id)
        sim = qca_simulator(otp, attack)
        assert sim.acc_trace == pytest.approx(brute_force_acc_overlap(otp, attack), abs=1e-9)


def test_branch_traces_sum_to_one(otp):
    sim = qca_simulator(otp, make_attack(otp, "replace_tau"))
    assert sim.acc_trace + sim.rej_trace == pytest.approx(1.0)


def test_extra_bit_separates_qca_from_plaintext_authentication():
    s = make_extra_bit_scheme(make_pauli_otp(1))
    attack = make_attack(s, "flip_extra_bit")
    rep = qca_report(s, attack)
    assert rep["distance"] >= 0.4
    assert rep["plaintext_marginal"] <= 1e-6


def test_plaintext_marginal_reuses_effective_choi(otp):
    attack = make_attack(otp, "id")
    j = effective_choi(otp, attack)
    assert plaintext_marginal_deviation(otp, attack, j) <= 1e-12


def test_copy_classical_needs_randomness(otp):
    with pytest.raises(ValueError):
        make_attack(otp, "copy_classical")


def test_copy_classical_is_simulatable_on_augmented_scheme():
    s = make_scheme("twodes_tag_rand", m=1, t=1, q=2)
    attack = make_attack(s, "copy_classical")
    d = qca_distance(s, attack, mode="sampled", samples=40, rng=np.random.default_rng(0))
    assert d <= 1e-9


def test_too_much_randomness_is_rejected():
    s = make_scheme("twodes_tag_rand", m=1, t=1)
    with pytest.raises(ValueError):
        make_attack(s, "id")


def test_attack_must_be_trace_preserving():
    with pytest.raises(ValueError):
        AttackMap(KrausChannel(2, 2, (np.diag([1.0, 0]),), trace_nonincreasing=True))


def test_choi_to_kraus_roundtrip():
    ch = KrausChannel(2, 2, (np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * np.diag([1.0, -1])))
    j = choi_state(ch)
    back = choi_to_kraus(j, 2, 2)
    assert np.allclose(choi_state(back), j)


def test_unknown_attack(otp):
    with pytest.raises(KeyError):
        make_attack(otp, "nope")
