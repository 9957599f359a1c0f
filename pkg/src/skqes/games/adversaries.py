"""Hand-written adversaries.

An adversary is any zero-argument callable returning an object with the methods a
game needs:

* ``forge(view) -> Ciphertext`` for the unforgeability games;
* ``choose(view) -> register`` and ``guess(view, challenge) -> bit`` for the
  chosen-ciphertext games;
* ``distinguish(view) -> bit`` (1 = real) for the authenticated-encryption games.

Classes are used directly as factories; parameters go through ``functools.partial``
or :func:`make_adversary`.  Adversaries discard registers they no longer need so the
global state stays small.
"""
from __future__ import annotations

from functools import partial

import numpy as np

from ..designs import X, kron_all
from ..keyed import _random_bits
from ..linalg import ket, phi_plus_projector
from .runtime import AdversaryView, Ciphertext


def _zero(view: AdversaryView) -> int:
    return view.prepare(ket(0, view.scheme.d_m))


def _x_on(n_qubits: int, which: int) -> np.ndarray:
    return kron_all(X if i == which else np.eye(2) for i in range(n_qubits))


def _not_bot(view: AdversaryView, reg: int) -> int:
    """1 if the decryption output is not reject (the register is consumed)."""
    p = np.zeros((view.scheme.d_out,) * 2, dtype=complex)
    p[-1, -1] = 1.0
    accepted = view.measure(p, [reg]) == 1
    view.discard([reg])
    return int(accepted)


def _plus_with_ref(view: AdversaryView, out: int, ref: int) -> int:
    """Test ``Pi+`` between a decryption output on ``M + bot`` and a reference."""
    d = view.scheme.d_m
    p = phi_plus_projector(d).reshape(d, d, d, d)
    big = np.zeros((d + 1, d, d + 1, d), dtype=complex)
    big[:d, :, :d, :] = p
    side = (d + 1) * d
    outcome = view.measure(big.reshape(side, side), [out, ref])
    view.discard([out, ref])
    return outcome


class Adversary:
    name = "adversary"

    def forge(self, view: AdversaryView) -> Ciphertext:
        raise NotImplementedError(f"{self.name} is not a forger")

    def choose(self, view: AdversaryView) -> int:
        raise NotImplementedError(f"{self.name} is not a chosen-ciphertext adversary")

    def guess(self, view: AdversaryView, challenge: Ciphertext) -> int:
        raise NotImplementedError(f"{self.name} is not a chosen-ciphertext adversary")

    def distinguish(self, view: AdversaryView) -> int:
        raise NotImplementedError(f"{self.name} is not a distinguisher")


# ---------------------------------------------------------------------------
# forgers
# ---------------------------------------------------------------------------

class ReplayForger(Adversary):
    """Encrypts ``|0>`` once and hands the ciphertext back."""
    name = "replay"

    def forge(self, view):
        return view.encrypt(_zero(view))


class RandomForger(Adversary):
    """No queries: a maximally mixed quantum part with a random classical part."""
    name = "random"

    def forge(self, view):
        s = view.scheme
        reg = view.prepare(np.eye(s.d_c, dtype=complex) / s.d_c)
        r = _random_bits(view.rng, s.r_bits) if s.r_bits else None
        return Ciphertext(r, reg)


class FlipForger(Adversary):
    """Encrypts ``|0>`` and flips the last qubit of the quantum part (the extra bit of
    the extra-bit scheme)."""
    name = "flip"

    def forge(self, view):
        ct = view.encrypt(_zero(view))
        n = view.scheme.m + view.scheme.t
        view.apply(_x_on(n, n - 1), [ct.reg])
        return ct


class RelabelForger(Adversary):
    """Makes ``queries`` encryption queries, keeps only the last quantum part and
    relabels it with the classical part of the first answer.

    Succeeds whenever the derived keys for the two classical parts coincide.
    """
    name = "relabel"

    def __init__(self, queries: int = 2):
        if queries < 2:
            raise ValueError("relabelling needs at least two queries")
        self.queries = queries

    def forge(self, view):
        first = view.encrypt(_zero(view))
        view.discard([first.reg])
        last = first
        for _ in range(self.queries - 1):
            if last is not first:
                view.discard([last.reg])
            last = view.encrypt(_zero(view))
        return Ciphertext(first.r, last.reg)


# ---------------------------------------------------------------------------
# chosen-ciphertext adversaries
# ---------------------------------------------------------------------------

class ChallengeDecryptor(Adversary):
    """Sends half of a maximally entangled pair, decrypts the challenge and tests the
    result against the kept half: equal pair means ``b = 0``."""
    name = "challenge_decryptor"

    def choose(self, view):
        m, self.ref = view.prepare_pair(view.scheme.d_m)
        return m

    def guess(self, view, challenge):
        out = view.decrypt(challenge)
        return _plus_with_ref(view, out, self.ref)


class Guesser(Adversary):
    """Never touches the challenge; outputs a uniformly random bit."""
    name = "guesser"

    def choose(self, view):
        return _zero(view)

    def guess(self, view, challenge):
        view.discard([challenge.reg])
        return int(view.rng.integers(2))


class HonestDecryptGuesser(Guesser):
    """Decrypts one fresh honest encryption in each phase, never the challenge."""
    name = "honest_decrypt_guesser"

    def _roundtrip(self, view):
        out = view.decrypt(view.encrypt(_zero(view)))
        view.discard([out])

    def choose(self, view):
        self._roundtrip(view)
        return _zero(view)

    def guess(self, view, challenge):
        self._roundtrip(view)
        return super().guess(view, challenge)


class KeyLearner(Adversary):
    """Chosen-plaintext attack on a scheme whose ciphertexts all use the same key
    and no tag (the one-time pad reused).

    Encrypts half of a maximally entangled pair and measures ciphertext and kept
    half in the basis ``{(V_k x 1)|phi+>}``, which identifies ``k``.  The challenge
    plaintext is again half of a pair; after undoing ``V_k`` the ``Pi+`` test
    separates ``Enc(M)`` from ``Enc(tau)``.
    """
    name = "key_learner"

    def choose(self, view):
        s = view.scheme
        if s.t != 0:
            raise ValueError("key learning assumes an untagged scheme")
        d = s.d_m
        a, ref = view.prepare_pair(d)
        ct = view.encrypt(a)
        phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
        keys = list(s.keys())
        basis = np.stack([np.kron(s.unitary(k), np.eye(d)) @ phi for k in keys], axis=1)
        view.apply(basis.conj().T, [ct.reg, ref])
        self.key = keys[view.measure_basis([ct.reg, ref])]
        view.discard([ct.reg, ref])
        m, self.ref = view.prepare_pair(d)
        return m

    def guess(self, view, challenge):
        s = view.scheme
        view.apply(s.unitary(self.key).conj().T, [challenge.reg])
        outcome = view.measure(phi_plus_projector(s.d_m), [challenge.reg, self.ref])
        view.discard([challenge.reg, self.ref])
        return outcome


# ---------------------------------------------------------------------------
# real/ideal distinguishers
# ---------------------------------------------------------------------------

class RoundTripProber(Adversary):
    """Encrypts ``|0>``, decrypts, outputs real iff the result is ``|0>``."""
    name = "round_trip"

    def distinguish(self, view):
        out = view.decrypt(view.encrypt(_zero(view)))
        p = np.zeros((view.scheme.d_out,) * 2, dtype=complex)
        p[0, 0] = 1.0
        bit = int(view.measure(p, [out]) == 0)
        view.discard([out])
        return bit


class ReplayDecrypt(Adversary):
    """Encrypts half of a pair, decrypts the untouched ciphertext and tests ``Pi+``
    against the kept half."""
    name = "replay_decrypt"

    def distinguish(self, view):
        m, ref = view.prepare_pair(view.scheme.d_m)
        out = view.decrypt(view.encrypt(m))
        return int(_plus_with_ref(view, out, ref) == 0)


class GarbageProber(Adversary):
    """Decrypts a maximally mixed ciphertext with a random classical part; outputs
    real iff it is not rejected."""
    name = "garbage"

    def distinguish(self, view):
        return _not_bot(view, view.decrypt(RandomForger().forge(view)))


class ModifyThenDecrypt(Adversary):
    """Encrypts ``|0>``, applies ``X`` on one qubit of the quantum part (the first by
    default), decrypts, outputs real iff not rejected."""
    name = "modify_then_decrypt"

    def __init__(self, qubit: int = 0):
        self.qubit = qubit

    def distinguish(self, view):
        s = view.scheme
        ct = view.encrypt(_zero(view))
        view.apply(_x_on(s.m + s.t, self.qubit), [ct.reg])
        return _not_bot(view, view.decrypt(ct))


class FlipThenDecrypt(Adversary):
    """Flip-forger followed by decryption: real iff accepted."""
    name = "flip_then_decrypt"

    def distinguish(self, view):
        return _not_bot(view, view.decrypt(FlipForger().forge(view)))


class ConstantDistinguisher(Adversary):
    """Makes no queries and outputs a fixed bit."""
    name = "constant"

    def __init__(self, bit: int = 1):
        self.bit = bit

    def distinguish(self, view):
        return self.bit


QUANTUM_ADVERSARIES = {
    "replay": ReplayForger,
    "random": RandomForger,
    "flip": FlipForger,
    "relabel": RelabelForger,
    "challenge_decryptor": ChallengeDecryptor,
    "guesser": Guesser,
    "honest_decrypt_guesser": HonestDecryptGuesser,
    "key_learner": KeyLearner,
    "round_trip": RoundTripProber,
    "replay_decrypt": ReplayDecrypt,
    "garbage": GarbageProber,
    "modify_then_decrypt": ModifyThenDecrypt,
    "flip_then_decrypt": FlipThenDecrypt,
    "constant": ConstantDistinguisher,
}


def make_adversary(adversary_id: str, **params):
    """Factory for a library adversary; ids of reductions are ``name(inner)``, e.g.
    ``qae_to_quf(flip)``."""
    from . import reductions
    if adversary_id.endswith(")") and "(" in adversary_id:
        outer, inner = adversary_id[:-1].split("(", 1)
        transform = reductions.TRANSFORMERS.get(outer)
        if transform is None:
            raise KeyError(f"unknown reduction {outer!r}")
        return transform(make_adversary(inner), **params)
    from .classical import CLASSICAL_ADVERSARIES
    table = {**QUANTUM_ADVERSARIES, **CLASSICAL_ADVERSARIES}
    if adversary_id not in table:
        raise KeyError(f"unknown adversary id {adversary_id!r}")
    cls = table[adversary_id]
    return partial(cls, **params) if params else cls
