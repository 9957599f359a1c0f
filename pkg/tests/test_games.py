import numpy as np
import pytest

from skqes.games import (AdvantageEstimate, ProbEstimate, ProtocolViolation,
                         QueryBudgetExceeded, TrialRecord, estimate, qae_advantage,
                         qcca2_advantage, quf_advantage, run_trials, verdict)
from skqes.games.adversaries import (Adversary, ChallengeDecryptor, FlipForger,
                                     GarbageProber, Guesser, HonestDecryptGuesser,
                                     RandomForger, ReplayForger, RoundTripProber,
                                     make_adversary)
from skqes.games.quantum import (run_qae_ideal, run_qae_real, run_qcca2_fake,
                                 run_quf_cheat, run_quf_forge)
from skqes.games.runtime import ADVERSARY, CHALLENGER, Ciphertext, Runtime
from skqes.linalg import ket
from skqes.schemes import make_scheme


@pytest.fixture(scope="module")
def rand11():
    return make_scheme("twodes_tag_rand", m=1, t=1)


@pytest.fixture(scope="module")
def extra_bit():
    return make_scheme("extra_bit")


# --- runtime discipline ------------------------------------------------------

def test_runtime_alloc_measure_discard():
    rt = Runtime(np.random.default_rng(0))
    a = rt.alloc(ket(1, 2), ADVERSARY)
    b = rt.alloc(np.eye(3) / 3, CHALLENGER)
    assert rt.total_dim == 6
    assert rt.measure(np.diag([0, 1]).astype(complex), [a]) == 0
    rt.discard([a])
    assert np.allclose(rt.rho, np.eye(3) / 3)
    with pytest.raises(ProtocolViolation):
        rt.check([a], ADVERSARY)
    with pytest.raises(ProtocolViolation):
        rt.check([b], ADVERSARY)


class _Reuser(Adversary):
    """Uses a plaintext register after handing it to the oracle."""

    def forge(self, view):
        reg = view.prepare(ket(0, view.scheme.d_m))
        ct = view.encrypt(reg)
        view.discard([reg])
        return ct


class _Greedy(Adversary):
    def forge(self, view):
        for _ in range(3):
            ct = view.encrypt(view.prepare(ket(0, view.scheme.d_m)))
        return ct


class _Forger(Adversary):
    """Tries to touch the challenger's registers by guessing ids."""

    def forge(self, view):
        return Ciphertext(None, 0)


def test_consumed_register_raises(rand11):
    with pytest.raises(ProtocolViolation):
        run_quf_forge(rand11, _Reuser, 0)


def test_query_budget_enforced(rand11):
    with pytest.raises(QueryBudgetExceeded):
        run_quf_forge(rand11, _Greedy, 0, max_queries=2)
    assert run_quf_forge(rand11, _Greedy, 0, max_queries=3).enc_queries == 3


def test_malformed_ciphertext_raises(rand11):
    with pytest.raises(ProtocolViolation):
        run_quf_forge(rand11, _Forger, 0)


def test_seed_determinism(rand11):
    for game in (run_quf_forge, run_quf_cheat):
        assert game(rand11, RandomForger, 11) == game(rand11, RandomForger, 11)
    recs = [run_qcca2_fake(rand11, HonestDecryptGuesser, s) for s in range(5)]
    assert recs == [run_qcca2_fake(rand11, HonestDecryptGuesser, s) for s in range(5)]


def test_parallel_trials_match_serial(rand11):
    serial = run_trials("quf_forge", rand11, RandomForger, 40, base_seed=3)
    forked = run_trials("quf_forge", rand11, RandomForger, 40, base_seed=3, jobs=2)
    assert serial == forked


# --- single games -------------------------------------------------------------

def test_quf_cheat_without_queries_rejects(rand11):
    assert all(run_quf_cheat(rand11, RandomForger, s).outcome == "reject" for s in range(20))


def test_replay_wins_and_cheats(rand11):
    assert run_quf_forge(rand11, ReplayForger, 1).outcome == "win"
    assert run_quf_cheat(rand11, ReplayForger, 1).outcome == "cheat"


def test_flip_forger_vs_extra_bit(extra_bit):
    assert all(run_quf_forge(extra_bit, FlipForger, s).outcome == "win" for s in range(10))
    assert all(run_quf_cheat(extra_bit, FlipForger, s).outcome == "reject" for s in range(10))


def test_single_plaintext_measurement(rand11):
    class _Many(Adversary):
        def forge(self, view):
            cts = [view.encrypt(view.prepare(ket(0, 2))) for _ in range(4)]
            view.discard([c.reg for c in cts[1:]])
            return cts[0]
    recs = run_trials("quf_cheat", rand11, _Many, 200)
    assert sum(r.extra["plus_tests"] <= 1 for r in recs) >= 199


def test_qcca2_fake_flags_challenge_decryption(rand11):
    recs = [run_qcca2_fake(rand11, ChallengeDecryptor, s) for s in range(10)]
    assert all(r.outcome == "cheat" and r.extra["detected"] for r in recs)


def test_qae_ideal_returns_stored_plaintext(rand11):
    # the round-trip prober cannot tell the worlds apart
    assert all(run_qae_real(rand11, RoundTripProber, s).outcome == "real" for s in range(10))
    assert all(run_qae_ideal(rand11, RoundTripProber, s).outcome == "real" for s in range(10))
    assert all(run_qae_ideal(rand11, GarbageProber, s).outcome == "ideal" for s in range(10))


# --- estimates ----------------------------------------------------------------

def test_garbage_forger_rate_half_for_one_tag_qubit(rand11):
    est = estimate("quf_forge", rand11, RandomForger, 600)
    assert est.ci_lo <= 0.5 <= est.ci_hi


def test_advantages_have_expected_sign_and_size(rand11, extra_bit):
    assert quf_advantage(rand11, ReplayForger, 200).value <= 0.05
    assert quf_advantage(extra_bit, FlipForger, 200).value >= 0.9
    cd = qcca2_advantage(rand11, ChallengeDecryptor, 400)
    assert cd.signed and cd.value < 0          # 7/8 - 1, never clamped
    assert abs(qcca2_advantage(rand11, Guesser, 400).value) <= 0.1
    assert qae_advantage(make_scheme("no_reject"), GarbageProber, 200).value >= 0.9


def test_prob_estimate_oracles():
    sure = ProbEstimate.from_counts(1000, 1000)
    assert sure.p_hat == 1 and sure.ci_hi == 1 and sure.ci_lo > 0.996
    zero = ProbEstimate.from_counts(0, 1000)
    assert zero.ci_hi == pytest.approx(3.68e-3, rel=0.01)     # rule of three
    coin = ProbEstimate.from_counts(5000, 10_000)
    assert 0.48 < coin.ci_lo < coin.p_hat < coin.ci_hi < 0.52
    with pytest.raises(ValueError):
        ProbEstimate.from_counts(0, 0)


def test_advantage_difference_signed_and_absolute():
    a, b = ProbEstimate.from_counts(100, 1000), ProbEstimate.from_counts(300, 1000)
    signed = AdvantageEstimate.difference(a, b, signed=True)
    assert signed.value == pytest.approx(-0.2) and signed.ci_lo < -0.2 < signed.ci_hi
    absolute = AdvantageEstimate.difference(a, b)
    assert absolute.value == pytest.approx(0.2) and absolute.ci_lo >= 0


def test_verdict_thresholds():
    assert verdict(0.05) == "secure"
    assert verdict(0.1) == "inconclusive"
    assert verdict(0.25) == "broken"
    assert verdict(-0.3) == "secure"


def test_trial_record_outcome_validated():
    with pytest.raises(ValueError):
        TrialRecord("quf_forge", "cheat", 0)


def test_make_adversary_resolves_reductions():
    factory = make_adversary("qae_to_quf(flip)")
    assert factory().name == "qae_to_quf"
    with pytest.raises(KeyError):
        make_adversary("bogus")
    with pytest.raises(KeyError):
        make_adversary("bogus(flip)")
