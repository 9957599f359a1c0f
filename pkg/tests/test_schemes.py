import numpy as np
import pytest

from skqes.designs import clifford_family
from skqes.linalg import random_density, trace_distance
from skqes.schemes import (SCHEME_IDS, MalformedRandomness, augment, iter_keys,
                           make_2des_tag, make_classical_otp, make_encrypt_then_tag,
                           make_extra_bit_scheme, make_no_reject_scheme, make_pauli_otp,
                           make_scheme)
from skqes.keyed import random_function


def _roundtrip_error(scheme, k, rho, rng):
    ct, _ = scheme.enc(k, rho, rng=rng)
    out = scheme.dec(k, ct)
    return trace_distance(out.plaintext(), rho), out.reject_weight


@pytest.mark.parametrize("n", [1, 2])
def test_pauli_otp_correct_for_every_key(n):
    s = make_pauli_otp(n)
    rng = np.random.default_rng(n)
    rho = random_density(2 ** n, rng)
    for k in s.keys():
        err, rej = _roundtrip_error(s, k, rho, rng)
        assert err <= 1e-9 and rej <= 1e-9


def test_pauli_otp_ciphertext_is_maximally_mixed_on_average():
    s = make_pauli_otp(1)
    rho = random_density(2, np.random.default_rng(0))
    avg = sum(s.enc(k, rho)[0].quantum_part.matrix for k in s.keys()) / s.key_size
    assert np.allclose(avg, np.eye(2) / 2)


def test_2des_tag_spot_check_200_keys():
    s = make_2des_tag(1, 1, clifford_family(2))
    rng = np.random.default_rng(1)
    rho = random_density(2, rng)
    for k in iter_keys(s, 200, rng):
        err, rej = _roundtrip_error(s, k, rho, rng)
        assert err <= 1e-9 and rej <= 1e-9


@pytest.mark.parametrize("scheme_id,params", [
    ("pauli_otp", {"n": 2}),
    ("twodes_tag", {"m": 1, "t": 1}),
    ("twodes_tag_rand", {"m": 1, "t": 2}),
    ("twodes_tag_prf", {"m": 1, "t": 1}),
    ("twodes_tag_twise", {"m": 1, "t": 2, "field_bits": 8}),
    ("extra_bit", {}),
    ("no_reject", {}),
])
def test_every_quantum_id_is_correct(scheme_id, params):
    s = make_scheme(scheme_id, **params)
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = random_density(s.d_m, rng)
        err, rej = _roundtrip_error(s, s.sample_key(rng), rho, rng)
        assert err <= 1e-9 and rej <= 1e-9


def test_garbage_acceptance_is_two_to_minus_t_exactly():
    # averaging the accept weight of a maximally mixed ciphertext over all 11520 keys
    s = make_2des_tag(1, 1, clifford_family(2))
    tau = np.eye(s.d_c) / s.d_c
    acc = np.mean([s.dec(k, tau).accept_weight for k in s.keys()])
    assert acc == pytest.approx(0.5, abs=1e-12)


def test_extra_bit_decryption_ignores_the_bit():
    base = make_2des_tag(1, 1, clifford_family(2))
    eb = make_extra_bit_scheme(base)
    assert eb.d_c == 2 * base.d_c
    rho = random_density(2, np.random.default_rng(0))
    ct, _ = eb.enc(5, rho)
    flip = np.kron(np.eye(base.d_c), np.array([[0, 1], [1, 0]]))
    out = eb.dec(5, flip @ ct.quantum_part.matrix @ flip)
    assert out.reject_weight < 1e-12
    assert trace_distance(out.plaintext(), rho) < 1e-9


def test_no_reject_outputs_zero_instead_of_bot():
    base = make_2des_tag(1, 1, clifford_family(2))
    nr = make_no_reject_scheme(base)
    tau = np.eye(nr.d_c) / nr.d_c
    out = nr.dec(3, tau)
    assert out.reject_weight < 1e-12
    # rejected weight lands on |0>
    assert out.state.matrix[0, 0].real > 0.5


def test_augmented_scheme_uses_derived_key():
    base = make_2des_tag(1, 1, clifford_family(2))
    f = random_function(4, base.key_bits, seed=1)
    s = augment(base, f)
    assert s.r_bits == 4 and s.key_size is None
    assert np.allclose(s.unitary(9, 3), base.unitary(f(9, 3)))
    with pytest.raises(MalformedRandomness):
        s.unitary(9, 16)


def test_dec_channel_matches_dec_front():
    s = make_scheme("twodes_tag", m=1, t=1)
    rho = random_density(s.d_c, np.random.default_rng(2))
    via_channel = s.dec_channel(11).apply_matrix(rho)
    assert np.allclose(via_channel, s.dec(11, rho).state.matrix)


def test_classical_schemes_roundtrip_and_reject():
    rng = np.random.default_rng(0)
    otp = make_classical_otp(8)
    etm = make_encrypt_then_tag(8, 16)
    for s in (otp, etm):
        k = s.sample_key(rng)
        for _ in range(20):
            m = s.sample_message(rng)
            assert s.dec(k, s.enc(k, m, rng)) == m
    k = etm.sample_key(rng)
    r, c, tag = etm.enc(k, 5, rng)
    assert etm.dec(k, (r, c ^ 1, tag)) is None


def test_registry_and_unknown_id():
    assert {"pauli_otp", "classical_etm", "extra_bit"} <= set(SCHEME_IDS)
    with pytest.raises(KeyError):
        make_scheme("foo")
