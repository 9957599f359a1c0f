"""Turning attacks on one notion into attacks on another.

A forger against unforgeability becomes a distinguisher for authenticated
encryption: submit the forgery, answer "real" if it decrypts and flip a coin
otherwise.  In the ideal world every fresh ciphertext is rejected, so half of the
forging advantage survives.  The classical version shows the same halving for the
one-time pad.
"""
from skqes.games import advantage, qae_advantage, quf_advantage
from skqes.games.adversaries import make_adversary
from skqes.schemes import make_scheme

TRIALS = 2000
eb = make_scheme("extra_bit")
nu = quf_advantage(eb, make_adversary("flip"), TRIALS).value
qae = qae_advantage(eb, make_adversary("qae_to_quf(flip)"), TRIALS).value
print(f"forging advantage nu = {nu:.3f}; transformed QAE advantage {qae:.3f} "
      f"(nu/2 = {nu / 2:.3f})")

otp = make_scheme("classical_otp", bits=8)
uf = advantage("uf", otp, make_adversary("bit_flip"), TRIALS).value
ae = advantage("ae", otp, make_adversary("ae_to_uf(bit_flip)"), TRIALS).value
print(f"classical pad: UF advantage {uf:.3f}, AE advantage of the transformed forger {ae:.3f}")

etm = make_scheme("classical_etm", bits=8, tag_bits=16)
ae = advantage("ae", etm, make_adversary("ae_to_uf(bit_flip)"), TRIALS).value
print(f"encrypt-then-tag: AE advantage of the same transformed forger {ae:.3f}")
