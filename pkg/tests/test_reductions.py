import pytest

from skqes.games import advantage, qae_advantage
from skqes.games.adversaries import FlipForger, KeyLearner, RandomForger, make_adversary
from skqes.games.quantum import run_qae_real, run_quf_forge
from skqes.games.reductions import TRANSFORMERS, qae_to_quf, quf_to_qindcpa
from skqes.schemes import make_scheme


def test_registry():
    assert {"quf_to_qindcpa", "qae_to_qcca2", "qae_to_quf", "uf_to_intctxt", "ae_to_uf",
            "cca2_self_checking"} <= set(TRANSFORMERS)


def test_qae_to_quf_keeps_half_of_the_forging_advantage():
    est = qae_advantage(make_scheme("extra_bit"), qae_to_quf(FlipForger), 600)
    assert est.ci_lo <= 0.5 <= est.ci_hi


def test_qae_to_quf_never_decrypts():
    rec = run_qae_real(make_scheme("extra_bit"), qae_to_quf(FlipForger), 0)
    assert rec.dec_queries == 1          # only the final forgery check


def test_quf_to_qindcpa_forges_against_the_pad():
    pad = make_scheme("pauli_otp", n=1)
    rec = run_quf_forge(pad, quf_to_qindcpa(KeyLearner), 3)
    assert rec.outcome == "win" and "b_decision" in rec.extra
    est = advantage("quf", pad, quf_to_qindcpa(KeyLearner), 400)
    assert est.value >= 0.05


def test_reduction_of_a_null_distinguisher_is_harmless():
    rand = make_scheme("twodes_tag_rand", m=1, t=4)
    est = qae_advantage(rand, make_adversary("qae_to_quf(random)"), 200)
    assert est.value <= 0.1
    with pytest.raises(ValueError):
        qae_to_quf(RandomForger, on_reject="other")
