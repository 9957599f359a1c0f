"""Running the many-time security games.

Every trial builds one joint density matrix shared by a challenger and an
adversary.  The forge game simply checks whether the final ciphertext decrypts;
the cheat game additionally runs the entangled replay test, so a replayed
ciphertext counts as a cheat rather than as a forgery.  The advantage is the
difference of the two success rates.
"""
from skqes.games import qae_advantage, qcca2_advantage, quf_advantage, verdict
from skqes.games.adversaries import make_adversary
from skqes.schemes import make_scheme

TRIALS = 1000
rand = make_scheme("twodes_tag_rand", m=1, t=1)


def show(label, est):
    print(f"{label:<46} {est.first.p_hat:6.3f} {est.second.p_hat:6.3f}  "
          f"adv {est.value:+.3f} [{est.ci_lo:+.3f},{est.ci_hi:+.3f}]  {verdict(est.value)}")


print(f"{'':<46} {'first':>6} {'second':>6}  ({TRIALS} trials per game)")
show("QUF  replay vs random-function Clifford tag",
     quf_advantage(rand, make_adversary("replay"), TRIALS))
show("QUF  garbage forger (one tag qubit)",
     quf_advantage(rand, make_adversary("random"), TRIALS))
show("QUF  flip the unauthenticated qubit",
     quf_advantage(make_scheme("extra_bit"), make_adversary("flip"), TRIALS))
show("CCA2 decrypt the challenge (signed)",
     qcca2_advantage(rand, make_adversary("challenge_decryptor"), TRIALS))
show("CCA2 learn a reused pad key",
     qcca2_advantage(make_scheme("pauli_otp", n=1), make_adversary("key_learner"), TRIALS))
show("QAE  garbage vs a scheme that never rejects",
     qae_advantage(make_scheme("no_reject"), make_adversary("garbage"), TRIALS))
