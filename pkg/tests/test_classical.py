import pytest

from skqes.games import ProtocolViolation, advantage, ae_advantage, uf_advantage
from skqes.games.classical import (BitFlipForger, ChallengeDecryptorC, RandomForgerC,
                                   ReplayForgerC, exact_tag_forgery_bound, run_cca2_fake,
                                   run_uf_cheat, run_uf_forge, tag_acceptance)
from skqes.games.reductions import ae_to_uf, cca2_self_checking
from skqes.schemes import make_classical_otp, make_encrypt_then_tag


@pytest.fixture(scope="module")
def otp():
    return make_classical_otp(8)


@pytest.fixture(scope="module")
def etm():
    return make_encrypt_then_tag(8, 16)


def test_exact_tag_forgery_bound(etm):
    assert exact_tag_forgery_bound(etm) == 2.0 ** -16


def test_tag_acceptance_needs_a_tag(otp):
    with pytest.raises(ValueError):
        tag_acceptance(otp, 0, 0, 0)


def test_otp_is_malleable(otp):
    assert uf_advantage(otp, BitFlipForger, 200).value == 1.0
    assert ae_advantage(otp, ae_to_uf(BitFlipForger), 400).value >= 0.4


def test_encrypt_then_tag_resists_forgers(etm):
    for adv in (BitFlipForger, ReplayForgerC, RandomForgerC):
        assert uf_advantage(etm, adv, 200).value <= 0.05


def test_replay_is_a_cheat_not_a_forgery(etm):
    assert run_uf_forge(etm, ReplayForgerC, 0).outcome == "win"
    assert run_uf_cheat(etm, ReplayForgerC, 0).outcome == "cheat"


def test_deterministic_records(etm):
    assert run_uf_forge(etm, BitFlipForger, 4) == run_uf_forge(etm, BitFlipForger, 4)


def test_malformed_classical_ciphertext(etm):
    class Bad:
        def forge(self, view):
            return view.decrypt((1, 2))
    with pytest.raises(ProtocolViolation):
        run_uf_forge(etm, Bad, 0)


def test_cca2_challenge_decryption_is_a_cheat(etm):
    assert run_cca2_fake(etm, ChallengeDecryptorC, 0).outcome == "cheat"
    est = advantage("cca2", etm, cca2_self_checking(ChallengeDecryptorC), 400)
    assert est.signed and abs(est.value) <= 0.1
