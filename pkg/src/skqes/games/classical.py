"""Classical restrictions of the games: unforgeability (forge / cheat), authenticated
encryption (real / ideal), a minimal chosen-ciphertext game pair (test / fake) and an
exact tag-counting oracle for encrypt-then-tag.

Messages are ``bits``-bit integers and ciphertexts tuples of ints, so copying and
string equality are free.  Seeds are split exactly as in the quantum games.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..keyed import _random_bits
from ..schemes import ClassicalScheme
from .records import TrialRecord
from .runtime import ProtocolViolation, QueryBudgetExceeded


class ClassicalView:
    """Oracle handle for classical adversaries (same counting rules as the quantum
    :class:`~skqes.games.runtime.AdversaryView`)."""

    def __init__(self, scheme: ClassicalScheme, rng: np.random.Generator,
                 encrypt=None, decrypt=None, max_queries: int | None = None):
        self.scheme = scheme
        self.rng = rng
        self._encrypt = encrypt
        self._decrypt = decrypt
        self.max_queries = max_queries
        self.enc_queries = 0
        self.dec_queries = 0
        self.notes: dict = {}

    def _count(self) -> None:
        if self.max_queries is not None and self.queries >= self.max_queries:
            raise QueryBudgetExceeded(f"query budget of {self.max_queries} exhausted")

    def encrypt(self, msg: int) -> tuple:
        if self._encrypt is None:
            raise ProtocolViolation("this game provides no encryption oracle")
        self._count()
        self.enc_queries += 1
        return self._encrypt(int(msg))

    def decrypt(self, ct: tuple) -> int | None:
        if self._decrypt is None:
            raise ProtocolViolation("this game provides no decryption oracle")
        self._count()
        self.dec_queries += 1
        return self._decrypt(_as_ciphertext(self.scheme, ct))

    def random_ciphertext(self) -> tuple:
        return tuple(_random_bits(self.rng, w) for w in self.scheme.ciphertext_fields)

    @property
    def queries(self) -> int:
        return self.enc_queries + self.dec_queries


def _as_ciphertext(scheme: ClassicalScheme, ct) -> tuple:
    ct = tuple(int(x) for x in ct)
    widths = scheme.ciphertext_fields
    if len(ct) != len(widths) or any(not 0 <= x < 2 ** w for x, w in zip(ct, widths)):
        raise ProtocolViolation(f"{ct!r} is not a ciphertext of {scheme.name}")
    return ct


def _streams(seed: int):
    a, b, c = np.random.SeedSequence(seed).spawn(3)
    return np.random.default_rng(a), np.random.default_rng(b), np.random.default_rng(c)


def _record(game, outcome, seed, view, **extra) -> TrialRecord:
    extra.update(view.notes)
    return TrialRecord(game, outcome, seed, view.enc_queries, view.dec_queries, extra)


def _label(bit) -> str:
    return "real" if int(bit) == 1 else "ideal"


# ---------------------------------------------------------------------------
# unforgeability
# ---------------------------------------------------------------------------

def run_uf_forge(scheme: ClassicalScheme, adversary: Callable, seed: int,
                 max_queries: int | None = None) -> TrialRecord:
    """Win iff the output ciphertext decrypts (no freshness condition)."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    view = ClassicalView(scheme, adv_rng, encrypt=lambda m: scheme.enc(key, m, chal),
                         max_queries=max_queries)
    ct = _as_ciphertext(scheme, adversary().forge(view))
    return _record("uf_forge", "reject" if scheme.dec(key, ct) is None else "win", seed, view)


def run_uf_cheat(scheme: ClassicalScheme, adversary: Callable, seed: int,
                 max_queries: int | None = None) -> TrialRecord:
    """Queries are answered with encryptions of random plaintexts; cheat iff the
    output equals one of the answers."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    stored: set[tuple] = set()

    def encrypt(_msg):
        c = scheme.enc(key, scheme.sample_message(chal), chal)
        stored.add(c)
        return c

    view = ClassicalView(scheme, adv_rng, encrypt=encrypt, max_queries=max_queries)
    ct = _as_ciphertext(scheme, adversary().forge(view))
    return _record("uf_cheat", "cheat" if ct in stored else "reject", seed, view)


# ---------------------------------------------------------------------------
# authenticated encryption
# ---------------------------------------------------------------------------

def run_ae_real(scheme: ClassicalScheme, adversary: Callable, seed: int,
                max_queries: int | None = None) -> TrialRecord:
    """Honest encryption; decryption rejects every ciphertext previously output by
    the encryption oracle."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    issued: set[tuple] = set()

    def encrypt(msg):
        c = scheme.enc(key, msg, chal)
        issued.add(c)
        return c

    def decrypt(ct):
        return None if ct in issued else scheme.dec(key, ct)

    view = ClassicalView(scheme, adv_rng, encrypt, decrypt, max_queries)
    return _record("ae_real", _label(adversary().distinguish(view)), seed, view)


def run_ae_ideal(scheme: ClassicalScheme, adversary: Callable, seed: int,
                 max_queries: int | None = None) -> TrialRecord:
    """Encryption of a fresh random plaintext; decryption always rejects."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    view = ClassicalView(scheme, adv_rng,
                         encrypt=lambda _m: scheme.enc(key, scheme.sample_message(chal), chal),
                         decrypt=lambda _c: None, max_queries=max_queries)
    return _record("ae_ideal", _label(adversary().distinguish(view)), seed, view)


# ---------------------------------------------------------------------------
# chosen-ciphertext test / fake
# ---------------------------------------------------------------------------

class _Cheat(Exception):
    pass


def run_cca2_test(scheme: ClassicalScheme, adversary: Callable, seed: int,
                  max_queries: int | None = None) -> TrialRecord:
    """Challenge ``Enc(m)`` (b = 0) or ``Enc(random)`` (b = 1); oracles unrestricted."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    b = int(chal.integers(2))
    view = ClassicalView(scheme, adv_rng, lambda m: scheme.enc(key, m, chal),
                         lambda c: scheme.dec(key, c), max_queries)
    adv = adversary()
    m = int(adv.choose(view))
    challenge = scheme.enc(key, m if b == 0 else scheme.sample_message(chal), chal)
    guess = int(adv.guess(view, challenge))
    return _record("cca2_test", "win" if guess == b else "fail", seed, view)


def run_cca2_fake(scheme: ClassicalScheme, adversary: Callable, seed: int,
                  max_queries: int | None = None) -> TrialRecord:
    """Challenge is an encryption of a random plaintext; decrypting it ends the game
    with ``cheat``; otherwise a final coin decides."""
    chal, adv_rng, _ = _streams(seed)
    key = scheme.sample_key(chal)
    state: dict = {}

    def decrypt(c):
        if state.get("challenge") == c:
            raise _Cheat
        return scheme.dec(key, c)

    view = ClassicalView(scheme, adv_rng, lambda m: scheme.enc(key, m, chal), decrypt,
                         max_queries)
    adv = adversary()
    try:
        adv.choose(view)
        state["challenge"] = scheme.enc(key, scheme.sample_message(chal), chal)
        adv.guess(view, state["challenge"])
    except _Cheat:
        return _record("cca2_fake", "cheat", seed, view, detected=True)
    coin = int(chal.integers(2))
    return _record("cca2_fake", "cheat" if coin else "reject", seed, view, detected=False)


# ---------------------------------------------------------------------------
# adversaries
# ---------------------------------------------------------------------------

class BitFlipForger:
    """Encrypts ``0`` and flips the lowest bit of the message-carrying field."""
    name = "bit_flip"

    def __init__(self, field: int = 1):
        self.field = field

    def forge(self, view):
        ct = list(view.encrypt(0))
        ct[self.field] ^= 1
        return tuple(ct)


class ReplayForgerC:
    name = "replay_c"

    def forge(self, view):
        return view.encrypt(0)


class RandomForgerC:
    """No queries; a uniformly random ciphertext."""
    name = "random_c"

    def forge(self, view):
        return view.random_ciphertext()


class ChallengeDecryptorC:
    """Chooses ``0``, decrypts the challenge and guesses ``b = 0`` iff it gets ``0``."""
    name = "challenge_decryptor_c"

    def choose(self, view):
        return 0

    def guess(self, view, challenge):
        return int(view.decrypt(challenge) != 0)


CLASSICAL_ADVERSARIES = {
    "bit_flip": BitFlipForger,
    "replay_c": ReplayForgerC,
    "random_c": RandomForgerC,
    "challenge_decryptor_c": ChallengeDecryptorC,
}


# ---------------------------------------------------------------------------
# exact counting
# ---------------------------------------------------------------------------

def tag_acceptance(scheme: ClassicalScheme, key: int, r: int, c: int) -> float:
    """Fraction of all tag values accepted for ``(r, c)`` under ``key``, by
    enumerating every tag."""
    if len(scheme.ciphertext_fields) != 3:
        raise ValueError(f"{scheme.name} has no tag field")
    n_tags = 2 ** scheme.ciphertext_fields[2]
    accepted = sum(scheme.dec(key, (r, c, tag)) is not None for tag in range(n_tags))
    return accepted / n_tags


def exact_tag_forgery_bound(scheme: ClassicalScheme, samples: int = 4, seed: int = 0
                            ) -> float:
    """Largest per-``(key, r, c)`` acceptance probability of a guessed tag over
    ``samples`` random points; equals ``2**-tag_bits`` for a tag function."""
    rng = np.random.default_rng(seed)
    q, bits, _ = scheme.ciphertext_fields
    return max(tag_acceptance(scheme, scheme.sample_key(rng), _random_bits(rng, q),
                              _random_bits(rng, bits))
               for _ in range(samples))
