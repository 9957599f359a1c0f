"""Reduction transformers: each takes an adversary factory for one game and returns
an adversary factory for another, built exactly as in the corresponding implication
proof.  The inner adversary only ever sees the outer adversary's own oracles (through
a thin proxy), so all register and budget rules keep applying.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .adversaries import Adversary, RandomForger, _not_bot, _zero


class _Proxy:
    """Forwards everything to ``view`` except the oracles given as overrides."""

    def __init__(self, view, encrypt=None, decrypt=None):
        self._view = view
        self._enc = encrypt
        self._dec = decrypt

    def __getattr__(self, name):
        return getattr(self._view, name)

    def encrypt(self, x):
        return self._enc(x) if self._enc is not None else self._view.encrypt(x)

    def decrypt(self, ct):
        return self._dec(ct) if self._dec is not None else self._view.decrypt(ct)


def _coin(view) -> int:
    return int(view.rng.integers(2))


def _replace_by_mixed(view, reg: int) -> int:
    d = view.dim(reg)
    view.discard([reg])
    return view.prepare(np.eye(d, dtype=complex) / d)


# ---------------------------------------------------------------------------
# QUF => QIND-CPA
# ---------------------------------------------------------------------------

def quf_to_qindcpa(inner: Callable) -> Callable:
    """Forger built from a chosen-plaintext distinguisher ``(choose, guess)``.

    The intermediate distinguisher runs the inner adversary with the forge game's
    encryption oracle, flips ``b``, replaces the challenge plaintext by a maximally
    mixed state when ``b = 1``, encrypts it and compares the guess: real when
    ``b = b'``, otherwise real or ideal with equal probability.  The forger queries
    the oracle once up front; on real it outputs that ciphertext, on ideal a random
    ciphertext.  The distinguisher's decision is recorded in the trial notes.
    """

    class QufFromCpa(Adversary):
        name = "quf_to_qindcpa"

        def _distinguish(self, view) -> int:
            a = inner()
            m = a.choose(view)
            b = _coin(view)
            if b == 1:
                m = _replace_by_mixed(view, m)
            challenge = view.encrypt(m)
            b_guess = int(a.guess(view, challenge))
            return 1 if b_guess == b else _coin(view)

        def forge(self, view):
            held = view.encrypt(_zero(view))
            real = self._distinguish(view)
            view.notes["b_decision"] = "real" if real else "ideal"
            if real:
                return held
            view.discard([held.reg])
            return RandomForger().forge(view)

    return QufFromCpa


# ---------------------------------------------------------------------------
# QAE => QIND-CCA2
# ---------------------------------------------------------------------------

def qae_to_qcca2(inner: Callable) -> Callable:
    """Real/ideal distinguisher from a chosen-ciphertext adversary: forward all
    queries, flip ``b``, replace the challenge plaintext by a maximally mixed state
    when ``b = 1``; output real iff the guess equals ``b``."""

    class QaeFromCca2(Adversary):
        name = "qae_to_qcca2"

        def distinguish(self, view):
            a = inner()
            m = a.choose(view)
            b = _coin(view)
            if b == 1:
                m = _replace_by_mixed(view, m)
            return int(int(a.guess(view, view.encrypt(m))) == b)

    return QaeFromCca2


# ---------------------------------------------------------------------------
# QAE => QUF
# ---------------------------------------------------------------------------

def qae_to_quf(inner: Callable, on_reject: str = "coin") -> Callable:
    """Real/ideal distinguisher from a forger: run it with the encryption oracle,
    decrypt its forgery with the decryption oracle and output real if the answer is
    not reject.

    ``on_reject="coin"`` answers real or ideal with equal probability after a
    reject, which gives exactly half the forger's advantage; ``"ideal"`` always
    answers ideal.
    """
    if on_reject not in ("coin", "ideal"):
        raise ValueError("on_reject must be 'coin' or 'ideal'")

    class QaeFromQuf(Adversary):
        name = "qae_to_quf"

        def distinguish(self, view):
            forger_view = _Proxy(view, decrypt=_no_decrypt)
            ct = inner().forge(forger_view)
            if _not_bot(view, view.decrypt(ct)):
                return 1
            return _coin(view) if on_reject == "coin" else 0

    return QaeFromQuf


def _no_decrypt(_ct):
    from .runtime import ProtocolViolation
    raise ProtocolViolation("a forger has no decryption oracle")


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

def uf_to_intctxt(inner: Callable) -> Callable:
    """Forger that records the encryption oracle's answers and replaces a non-fresh
    output of the inner adversary by a random ciphertext."""

    class FreshForger:
        name = "uf_to_intctxt"

        def forge(self, view):
            issued: list[tuple] = []

            def encrypt(msg):
                c = view.encrypt(msg)
                issued.append(c)
                return c

            c = tuple(inner().forge(_Proxy(view, encrypt=encrypt)))
            return view.random_ciphertext() if c in issued else c

    return FreshForger


def ae_to_uf(inner: Callable, on_reject: str = "coin") -> Callable:
    """AE distinguisher from a forger: forward encryption queries, decrypt the
    forgery; real if it is not rejected, otherwise real or ideal with equal
    probability (``on_reject="ideal"`` answers ideal instead)."""
    if on_reject not in ("coin", "ideal"):
        raise ValueError("on_reject must be 'coin' or 'ideal'")

    class AeFromUf:
        name = "ae_to_uf"

        def distinguish(self, view):
            c = inner().forge(_Proxy(view, decrypt=_no_decrypt))
            if view.decrypt(c) is not None:
                return 1
            return _coin(view) if on_reject == "coin" else 0

    return AeFromUf


class _Abort(Exception):
    pass


def cca2_self_checking(inner: Callable) -> Callable:
    """Self-checking version of a classical chosen-ciphertext adversary: it keeps
    the challenge and answers a random bit instead of ever sending the challenge to
    the decryption oracle.

    There is no quantum counterpart: a quantum challenge cannot be copied and
    compared.
    """

    class SelfChecking:
        name = "cca2_self_checking"

        def choose(self, view):
            self.a = inner()
            return self.a.choose(view)

        def guess(self, view, challenge):
            challenge = tuple(challenge)

            def decrypt(ct):
                if tuple(ct) == challenge:
                    raise _Abort
                return view.decrypt(ct)

            try:
                return int(self.a.guess(_Proxy(view, decrypt=decrypt), challenge))
            except _Abort:
                view.notes["aborted"] = True
                return _coin(view)

    return SelfChecking


TRANSFORMERS = {
    "quf_to_qindcpa": quf_to_qindcpa,
    "qae_to_qcca2": qae_to_qcca2,
    "qae_to_quf": qae_to_quf,
    "uf_to_intctxt": uf_to_intctxt,
    "ae_to_uf": ae_to_uf,
    "cca2_self_checking": cca2_self_checking,
}
