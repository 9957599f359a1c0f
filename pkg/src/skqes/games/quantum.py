"""Quantum security experiments: unforgeability (forge / cheat), chosen-ciphertext
indistinguishability (test / fake) and authenticated encryption (real / ideal).

Every ``run_*`` function plays one trial against a fresh adversary instance and
returns a :class:`TrialRecord`.  All randomness derives from ``seed``: the
challenger, the adversary and the measurement outcomes get independent streams.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..linalg import dagger, phi_plus_projector
from ..schemes import NormalFormScheme
from .records import TrialRecord
from .runtime import (ADVERSARY, CHALLENGER, AdversaryView, Ciphertext, ProtocolViolation,
                      Runtime)


class CheatDetected(Exception):
    """Raised inside an oracle when the game ends with ``cheat``."""


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    ss = np.random.SeedSequence(seed)
    a, b, c = ss.spawn(3)
    return np.random.default_rng(a), np.random.default_rng(b), np.random.default_rng(c)


def bot_projector(scheme: NormalFormScheme) -> np.ndarray:
    p = np.zeros((scheme.d_out, scheme.d_out), dtype=complex)
    p[-1, -1] = 1.0
    return p


def embedded_phi_plus(d_m: int) -> np.ndarray:
    """``Pi+`` on ``(M + bot) x M'`` (the reject dimension is excluded)."""
    p = phi_plus_projector(d_m).reshape(d_m, d_m, d_m, d_m)
    out = np.zeros((d_m + 1, d_m, d_m + 1, d_m), dtype=complex)
    out[:d_m, :, :d_m, :] = p
    side = (d_m + 1) * d_m
    return out.reshape(side, side)


class Challenger:
    """Scheme operations on runtime registers under a fixed key."""

    def __init__(self, rt: Runtime, scheme: NormalFormScheme, key: int, rng: np.random.Generator):
        self.rt = rt
        self.scheme = scheme
        self.key = key
        self.rng = rng

    def fresh_r(self) -> int | None:
        return self.scheme.sample_r(self.rng)

    def take(self, reg: int) -> None:
        self.rt.transfer([reg], CHALLENGER)

    def encrypt_reg(self, m_reg: int, r: int | None, owner: str = ADVERSARY) -> Ciphertext:
        # attaching the tag and applying V is one isometry M -> C
        w = self.scheme.enc_isometry(self.key, r)
        (c,) = self.rt.apply_channel([w], [m_reg], None, owner)
        return Ciphertext(r, c)

    def max_entangled_pair(self) -> tuple[int, int]:
        d = self.scheme.d_m
        v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
        reg = self.rt.alloc(v, CHALLENGER)
        a, b = self.rt.split(reg, [d, d])
        return a, b

    def decrypt_reg(self, ct: Ciphertext) -> int:
        """Honest decryption; returns a register on ``M + bot`` owned by the adversary."""
        s, k = self.scheme, self.key
        v = s.unitary(k, ct.r)
        (out,) = self.rt.map_front([ct.reg], lambda rho, d_rest: s.dec_front(rho, d_rest, k, ct.r, v),
                                   [s.d_out], ADVERSARY)
        return out

    def undo(self, ct: Ciphertext) -> tuple[int, int]:
        """Apply ``V^dag`` (under the classical part of ``ct``) and split into ``M, T``."""
        s = self.scheme
        self.rt.apply_unitary(dagger(s.unitary(self.key, ct.r)), [ct.reg])
        m, t = self.rt.split(ct.reg, [s.d_m, s.d_t])
        return m, t

    def tag_test(self, t_reg: int, ct_r: int | None, r: int | None) -> int:
        """``{Pi_{k,r}, 1 - Pi_{k,r}}`` on the tag; the classical part is part of the
        tag, so a different classical value fails with certainty."""
        if ct_r != r:
            return 1
        return self.rt.measure(self.scheme.tag_projector(self.key, r), [t_reg])

    def plus_test(self, m_reg: int, m2_reg: int) -> int:
        return self.rt.measure(phi_plus_projector(self.scheme.d_m), [m_reg, m2_reg])

    def embed_plaintext(self, m_reg: int, owner: str = ADVERSARY) -> int:
        d = self.scheme.d_m
        (out,) = self.rt.apply_channel([np.eye(d + 1, d)], [m_reg], None, owner)
        return out

    def invalid_map(self, regs: list[int], owner: str = ADVERSARY) -> int:
        """The default map for invalid ciphertexts: discard, prepare its fixed output."""
        self.rt.discard(regs)
        return self.rt.alloc(self.scheme.reject_state, owner)


def _bot(scheme: NormalFormScheme) -> np.ndarray:
    v = np.zeros(scheme.d_out, dtype=complex)
    v[-1] = 1.0
    return v


def _record(game: str, outcome: str, seed: int, view: AdversaryView, **extra) -> TrialRecord:
    extra.update(view.notes)
    return TrialRecord(game, outcome, seed, view.enc_queries, view.dec_queries, extra)


def _expect_ciphertext(rt: Runtime, ct, scheme: NormalFormScheme) -> Ciphertext:
    if not isinstance(ct, Ciphertext):
        raise ProtocolViolation("adversary must output a Ciphertext")
    rt.check([ct.reg], ADVERSARY)
    if rt.dims[ct.reg] != scheme.d_c:
        raise ProtocolViolation(f"ciphertext register has dim {rt.dims[ct.reg]}, "
                                f"expected {scheme.d_c}")
    if scheme.r_bits and (ct.r is None or not 0 <= ct.r < 2 ** scheme.r_bits):
        raise ProtocolViolation(f"classical part {ct.r!r} is not a {scheme.r_bits}-bit string")
    return ct


def _setup(scheme, seed, max_queries=None):
    chal_rng, adv_rng, meas_rng = _streams(seed)
    rt = Runtime(meas_rng)
    ch = Challenger(rt, scheme, scheme.sample_key(chal_rng), chal_rng)
    return rt, ch, adv_rng


# ---------------------------------------------------------------------------
# unforgeability
# ---------------------------------------------------------------------------

def _honest_encrypt(ch: Challenger):
    def encrypt(reg: int) -> Ciphertext:
        ch.take(reg)
        return ch.encrypt_reg(reg, ch.fresh_r())
    return encrypt


def _honest_decrypt(ch: Challenger):
    def decrypt(ct: Ciphertext) -> int:
        _expect_ciphertext(ch.rt, ct, ch.scheme)
        ch.take(ct.reg)
        return ch.decrypt_reg(ct)
    return decrypt


def run_quf_forge(scheme: NormalFormScheme, adversary: Callable, seed: int,
                  max_queries: int | None = None) -> TrialRecord:
    """Forge game: win iff the adversary's ciphertext decrypts to something other
    than reject."""
    rt, ch, adv_rng = _setup(scheme, seed)
    view = AdversaryView(rt, scheme, adv_rng, encrypt=_honest_encrypt(ch), max_queries=max_queries)
    ct = _expect_ciphertext(rt, adversary().forge(view), scheme)
    ch.take(ct.reg)
    out = ch.decrypt_reg(ct)
    rejected = rt.measure(bot_projector(scheme), [out]) == 0
    return _record("quf_forge", "reject" if rejected else "win", seed, view)


def run_quf_cheat(scheme: NormalFormScheme, adversary: Callable, seed: int,
                  max_queries: int | None = None) -> TrialRecord:
    """Cheat-detecting game: encryption queries are answered with encryptions of
    halves of maximally entangled pairs; the final ciphertext is tested against each
    stored pair."""
    rt, ch, adv_rng = _setup(scheme, seed)
    stored: list[tuple[int, int | None]] = []

    def encrypt(reg: int) -> Ciphertext:
        ch.take(reg)
        rt.discard([reg])
        m1, m2 = ch.max_entangled_pair()
        r = ch.fresh_r()
        ct = ch.encrypt_reg(m1, r)
        stored.append((m2, r))
        return ct

    view = AdversaryView(rt, scheme, adv_rng, encrypt=encrypt, max_queries=max_queries)
    ct = _expect_ciphertext(rt, adversary().forge(view), scheme)
    ch.take(ct.reg)
    m, t = ch.undo(ct)
    plus_tests = 0
    for m2, r in stored:
        if ch.tag_test(t, ct.r, r) == 0:
            plus_tests += 1
            if ch.plus_test(m, m2) == 0:
                return _record("quf_cheat", "cheat", seed, view, plus_tests=plus_tests)
    return _record("quf_cheat", "reject", seed, view, plus_tests=plus_tests)


# ---------------------------------------------------------------------------
# chosen-ciphertext security
# ---------------------------------------------------------------------------

def _maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def run_qcca2_test(scheme: NormalFormScheme, adversary: Callable, seed: int,
                   max_queries: int | None = None) -> TrialRecord:
    """Test game: the challenge is ``Enc(M)`` or ``Enc(tau)``; both oracles are
    unrestricted throughout."""
    rt, ch, adv_rng = _setup(scheme, seed)
    b = int(ch.rng.integers(2))
    view = AdversaryView(rt, scheme, adv_rng, encrypt=_honest_encrypt(ch),
                         decrypt=_honest_decrypt(ch), max_queries=max_queries)
    adv = adversary()
    m = adv.choose(view)
    rt.check([m], ADVERSARY)
    if rt.dims[m] != scheme.d_m:
        raise ProtocolViolation("challenge register has the wrong dimension")
    ch.take(m)
    if b == 1:
        rt.discard([m])
        m = rt.alloc(_maximally_mixed(scheme.d_m), CHALLENGER)
    challenge = ch.encrypt_reg(m, ch.fresh_r())
    b_guess = int(adv.guess(view, challenge))
    return _record("qcca2_test", "win" if b_guess == b else "fail", seed, view)


def run_qcca2_fake(scheme: NormalFormScheme, adversary: Callable, seed: int,
                   max_queries: int | None = None) -> TrialRecord:
    """Fake game: the challenge is an encryption of half of a maximally entangled
    pair, and after the challenge decryption queries go through the cheat-detecting
    oracle ``D``.  Encryption queries stay honest."""
    rt, ch, adv_rng = _setup(scheme, seed)
    s = scheme
    state: dict = {}

    def decrypt(ct: Ciphertext) -> int:
        _expect_ciphertext(rt, ct, s)
        ch.take(ct.reg)
        if "challenge" not in state:
            return ch.decrypt_reg(ct)
        m2, r = state["challenge"]
        m, t = ch.undo(ct)
        if rt.measure(s.accept_projector(), [t]) == 0:
            if ch.tag_test(t, ct.r, r) == 0:
                if ch.plus_test(m, m2) == 0:
                    raise CheatDetected
            rt.discard([t])
            return ch.embed_plaintext(m)
        return ch.invalid_map([m, t])

    view = AdversaryView(rt, s, adv_rng, encrypt=_honest_encrypt(ch), decrypt=decrypt,
                         max_queries=max_queries)
    adv = adversary()
    try:
        m = adv.choose(view)
        rt.check([m], ADVERSARY)
        ch.take(m)
        rt.discard([m])
        m1, m2 = ch.max_entangled_pair()
        r = ch.fresh_r()
        state["challenge"] = (m2, r)
        challenge = ch.encrypt_reg(m1, r)
        adv.guess(view, challenge)
    except CheatDetected:
        return _record("qcca2_fake", "cheat", seed, view, detected=True)
    coin = int(ch.rng.integers(2))
    return _record("qcca2_fake", "cheat" if coin == 1 else "reject", seed, view, detected=False)


# ---------------------------------------------------------------------------
# authenticated encryption
# ---------------------------------------------------------------------------

def _label(bit) -> str:
    return "real" if int(bit) == 1 else "ideal"


def run_qae_real(scheme: NormalFormScheme, adversary: Callable, seed: int,
                 max_queries: int | None = None) -> TrialRecord:
    """Real world: honest oracles; the adversary's output bit (1 = real) is the outcome."""
    rt, ch, adv_rng = _setup(scheme, seed)
    view = AdversaryView(rt, scheme, adv_rng, encrypt=_honest_encrypt(ch),
                         decrypt=_honest_decrypt(ch), max_queries=max_queries)
    return _record("qae_real", _label(adversary().distinguish(view)), seed, view)


def run_qae_ideal(scheme: NormalFormScheme, adversary: Callable, seed: int,
                  max_queries: int | None = None) -> TrialRecord:
    """Ideal world: ``E`` keeps the plaintext and encrypts half of a fresh pair;
    ``D`` returns a stored plaintext only for a recognized replay, else reject."""
    rt, ch, adv_rng = _setup(scheme, seed)
    s = scheme
    stored: list[tuple[int | None, int, int]] = []

    def encrypt(reg: int) -> Ciphertext:
        ch.take(reg)
        m1, m2 = ch.max_entangled_pair()
        r = ch.fresh_r()
        stored.append((r, m2, reg))
        return ch.encrypt_reg(m1, r)

    def decrypt(ct: Ciphertext) -> int:
        _expect_ciphertext(rt, ct, s)
        ch.take(ct.reg)
        m1, t = ch.undo(ct)
        for i, (r, m2, m) in enumerate(stored):
            if ch.tag_test(t, ct.r, r) == 0 and ch.plus_test(m1, m2) == 0:
                # the stored plaintext leaves the challenger; its entry is spent
                del stored[i]
                rt.discard([m1, t, m2])
                return ch.embed_plaintext(m)
        rt.discard([m1, t])
        return rt.alloc(_bot(s), ADVERSARY)

    view = AdversaryView(rt, s, adv_rng, encrypt=encrypt, decrypt=decrypt,
                         max_queries=max_queries)
    return _record("qae_ideal", _label(adversary().distinguish(view)), seed, view)
