"""Symmetric-key quantum encryption schemes in normal form.

Every scheme is described by, for each key ``k`` and classical randomness ``r``:

* a unitary ``V`` on the plaintext register ``M`` joined with the tag register ``T``;
* a tag state ``|psi_{k,r}>`` on ``T``;
* an accept projector ``P`` on ``T`` (the support of the averaged tag state);
* the output of the invalid-ciphertext map, a fixed state on ``M + bot``.

Encryption is ``V (rho x |psi><psi|) V^dag``; decryption undoes ``V``, keeps the ``M``
part of the ``P`` branch and replaces the rejected branch by the invalid output.
The reject symbol is one extra basis vector appended to ``M`` (index ``2**m``).

Classical randomness ``r`` is carried next to the quantum ciphertext as an int.  In
the fully quantum picture it is a computational-basis register that decryption
measures first; keeping it classical is equivalent and much cheaper.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .designs import KeyedUnitaryFamily, NotEnumerable, make_family, pauli_family
from .keyed import (KeyedFunctionFamily, _random_bits, make_function_family,
                    prf_standin, random_function, t_wise_family)
from .linalg import DensityOp, KrausChannel, dagger, ket, proj

# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HybridCiphertext:
    """Classical part ``r`` (``None`` for schemes without randomness) plus the
    quantum part on ``C = M x T``."""

    classical_part: int | None
    quantum_part: DensityOp


@dataclass(frozen=True)
class PlaintextOrReject:
    """Decryption output: a density operator on ``M + bot`` with the two branch
    weights read off."""

    state: DensityOp
    plaintext_dim: int

    @property
    def reject_weight(self) -> float:
        return float(np.real(self.state.matrix[-1, -1]))

    @property
    def accept_weight(self) -> float:
        return 1.0 - self.reject_weight

    def plaintext(self) -> np.ndarray:
        """Unnormalized plaintext block (the accept branch)."""
        d = self.plaintext_dim
        return self.state.matrix[:d, :d]


class MalformedRandomness(ValueError):
    pass


# ---------------------------------------------------------------------------
# the scheme type
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NormalFormScheme:
    """A scheme in normal form.  See the module docstring.

    ``key_size`` is the number of distinct keys when the key space may be enumerated
    (``None`` otherwise).  ``r_bits`` is the length of the classical randomness; the
    randomness is uniform over ``{0,1}^r_bits``.
    """

    name: str
    m: int
    t: int
    key_bits: int
    r_bits: int
    unitary_fn: Callable[[int, int], np.ndarray] = field(repr=False)
    tag_fn: Callable[[int, int], np.ndarray] = field(repr=False)
    accept_basis: np.ndarray = field(repr=False)
    reject_state: np.ndarray = field(repr=False)
    key_size: int | None = None
    base: "NormalFormScheme | None" = field(default=None, repr=False)
    params: dict = field(default_factory=dict, repr=False)

    # dimensions -------------------------------------------------------------
    @property
    def d_m(self) -> int:
        return 2 ** self.m

    @property
    def d_t(self) -> int:
        return 2 ** self.t

    @property
    def d_c(self) -> int:
        """Dimension of the quantum part of a ciphertext."""
        return self.d_m * self.d_t

    @property
    def d_out(self) -> int:
        return self.d_m + 1

    @property
    def enumerable(self) -> bool:
        return self.key_size is not None and self.r_bits <= 12

    # sampling ---------------------------------------------------------------
    def sample_key(self, rng: np.random.Generator) -> int:
        if self.key_size is not None:
            return int(rng.integers(0, self.key_size))
        return _random_bits(rng, self.key_bits)

    def sample_r(self, rng: np.random.Generator) -> int | None:
        if self.r_bits == 0:
            return None
        return _random_bits(rng, self.r_bits)

    def keys(self) -> range:
        if self.key_size is None:
            raise NotEnumerable(f"key space of {self.name} is not enumerable")
        return range(self.key_size)

    def r_values(self) -> list[int | None]:
        if self.r_bits == 0:
            return [None]
        return list(range(2 ** self.r_bits))

    def _check_r(self, r: int | None) -> int:
        if self.r_bits == 0:
            if r not in (None, 0):
                raise MalformedRandomness(f"{self.name} takes no randomness, got {r!r}")
            return 0
        if r is None or not 0 <= int(r) < 2 ** self.r_bits:
            raise MalformedRandomness(f"randomness {r!r} is not an {self.r_bits}-bit string")
        return int(r)

    # normal-form components ---------------------------------------------------
    def unitary(self, k: int, r: int | None = None) -> np.ndarray:
        return self.unitary_fn(k, self._check_r(r))

    def tag_state(self, k: int, r: int | None = None) -> np.ndarray:
        return self.tag_fn(k, self._check_r(r))

    def accept_projector(self) -> np.ndarray:
        e = self.accept_basis
        return e @ dagger(e)

    def tag_projector(self, k: int, r: int | None = None) -> np.ndarray:
        """``Pi_{k,r}`` on the quantum tag register."""
        return proj(self.tag_state(k, r))

    # channels ---------------------------------------------------------------
    def enc_isometry(self, k: int, r: int | None = None) -> np.ndarray:
        """``rho -> W rho W^dag`` with ``W = V (1_M x |psi>)``; shape (d_c, d_m)."""
        v = self.unitary(k, r)
        psi = self.tag_state(k, r)
        return v @ np.kron(np.eye(self.d_m), psi.reshape(-1, 1))

    def enc_channel(self, k: int, r: int | None = None) -> KrausChannel:
        return KrausChannel(self.d_m, self.d_c, (self.enc_isometry(k, r),))

    def dec_channel(self, k: int, r: int | None = None) -> KrausChannel:
        """Decryption of a quantum part carrying classical randomness ``r``, as a
        channel ``C -> M + bot``."""
        vd = dagger(self.unitary(k, r))
        d_m, d_t = self.d_m, self.d_t
        embed = np.eye(self.d_out, d_m)
        ops = [np.kron(embed, e.conj().reshape(1, -1)) @ vd for e in self.accept_basis.T]
        reject = np.eye(d_t) - self.accept_projector()
        w, vecs = np.linalg.eigh(reject)
        s = self.reject_state.reshape(-1, 1)
        for j in np.flatnonzero(w > 0.5):
            for a in range(d_m):
                row = np.kron(ket(a, d_m), vecs[:, j]).conj().reshape(1, -1)
                ops.append(s @ row @ vd)
        return KrausChannel(self.d_c, self.d_out, tuple(ops))

    def dec_front(self, rho: np.ndarray, d_rest: int, k: int, r: int | None = None,
                  unitary: np.ndarray | None = None) -> np.ndarray:
        """Decrypt the leading ``C`` subsystem of ``rho`` (shape ``(d_c*d_rest,)*2``).

        Equivalent to applying :meth:`dec_channel` on the first subsystem; the output
        subsystem ``M + bot`` stays first.
        """
        d_m, d_t, d_c = self.d_m, self.d_t, self.d_c
        v = self.unitary(k, r) if unitary is None else unitary
        r4 = rho.reshape(d_c, d_rest * d_c * d_rest)
        left = (dagger(v) @ r4).reshape(d_c, d_rest, d_c, d_rest).transpose(0, 1, 3, 2)
        full = (left.reshape(-1, d_c) @ v).reshape(d_c, d_rest, d_rest, d_c)
        full = full.transpose(0, 1, 3, 2).reshape(d_m, d_t, d_rest, d_m, d_t, d_rest)
        e = self.accept_basis
        acc = np.einsum("atxbsy,tj,sj->axby", full, e.conj(), e, optimize=True)
        total = np.einsum("atxaty->xy", full)
        rej = total - np.einsum("axay->xy", acc)
        out = np.zeros((self.d_out, d_rest, self.d_out, d_rest), dtype=complex)
        out[:d_m, :, :d_m, :] = acc
        s = self.reject_state
        out += np.outer(s, s.conj())[:, None, :, None] * rej[None, :, None, :]
        side = self.d_out * d_rest
        return out.reshape(side, side)

    # state-level operations -------------------------------------------------
    def enc(self, k: int, rho: DensityOp | np.ndarray, r: int | None = None,
            rng: np.random.Generator | None = None) -> tuple[HybridCiphertext, int | None]:
        mat = rho.matrix if isinstance(rho, DensityOp) else np.asarray(rho, complex)
        if r is None and self.r_bits:
            r = self.sample_r(rng if rng is not None else np.random.default_rng())
        w = self.enc_isometry(k, r)
        c = DensityOp((self.d_m, self.d_t), w @ mat @ dagger(w), check=False)
        return HybridCiphertext(r, c), r

    def dec(self, k: int, ct: HybridCiphertext | DensityOp | np.ndarray,
            r: int | None = None) -> PlaintextOrReject:
        if isinstance(ct, HybridCiphertext):
            r, mat = ct.classical_part, ct.quantum_part.matrix
        else:
            mat = ct.matrix if isinstance(ct, DensityOp) else np.asarray(ct, complex)
        out = self.dec_front(mat, 1, k, r)
        return PlaintextOrReject(DensityOp((self.d_out,), out, check=False), self.d_m)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def bot_state(d_m: int) -> np.ndarray:
    return ket(d_m, d_m + 1)


def make_pauli_otp(n: int) -> NormalFormScheme:
    """Quantum one-time pad: ``V_k`` is the Pauli with key ``k``; no tag, never rejects."""
    family = pauli_family(n)
    return NormalFormScheme(
        name="pauli_otp", m=n, t=0, key_bits=family.key_bits, r_bits=0,
        unitary_fn=lambda k, r: family.resolve(k),
        tag_fn=lambda k, r: np.ones(1, dtype=complex),
        accept_basis=np.ones((1, 1), dtype=complex),
        reject_state=bot_state(2 ** n),
        key_size=family.size, params={"n": n})


def make_2des_tag(m_qubits: int, t_qubits: int, family: KeyedUnitaryFamily) -> NormalFormScheme:
    """Append ``|0^t>`` and conjugate by a member of a unitary two-design."""
    if family.n_qubits != m_qubits + t_qubits:
        raise ValueError(f"family acts on {family.n_qubits} qubits, "
                         f"scheme needs {m_qubits + t_qubits}")
    d_t = 2 ** t_qubits
    zero = ket(0, d_t)
    return NormalFormScheme(
        name="twodes_tag", m=m_qubits, t=t_qubits, key_bits=family.key_bits, r_bits=0,
        unitary_fn=lambda k, r: family.resolve(k),
        tag_fn=lambda k, r: zero,
        accept_basis=zero.reshape(-1, 1),
        reject_state=bot_state(2 ** m_qubits),
        key_size=family.size if family.enumerable else None,
        params={"m": m_qubits, "t": t_qubits, "family": family.name})


def augment(base: NormalFormScheme, f: KeyedFunctionFamily) -> NormalFormScheme:
    """Many-time scheme: draw ``r``, run ``base`` under key ``f_k(r)``, output ``(r, c)``."""
    if base.r_bits:
        raise ValueError("augment expects a base scheme without classical randomness")
    if f.output_bits != base.key_bits:
        raise ValueError(f"function outputs {f.output_bits} bits but the base key has "
                         f"{base.key_bits} bits")
    return NormalFormScheme(
        name=f"{base.name}+{f.name}", m=base.m, t=base.t, key_bits=f.key_bits,
        r_bits=f.input_bits,
        unitary_fn=lambda k, r: base.unitary_fn(f(k, r), 0),
        tag_fn=lambda k, r: base.tag_fn(f(k, r), 0),
        accept_basis=base.accept_basis, reject_state=base.reject_state,
        key_size=None, base=base, params={"q": f.input_bits, "function": f.name})


def make_extra_bit_scheme(base: NormalFormScheme) -> NormalFormScheme:
    """Append one unencrypted ``|0>`` qubit to the ciphertext that decryption ignores.

    The tag state includes the extra qubit, the accept projector does not test it.
    """
    plus_bit = np.eye(2, dtype=complex)
    zero = ket(0, 2)
    accept = np.kron(base.accept_basis, plus_bit)
    return replace(
        base, name=f"extra_bit({base.name})", t=base.t + 1,
        unitary_fn=lambda k, r: np.kron(base.unitary_fn(k, r), plus_bit),
        tag_fn=lambda k, r: np.kron(base.tag_fn(k, r), zero),
        accept_basis=accept, base=base)


def make_no_reject_scheme(base: NormalFormScheme) -> NormalFormScheme:
    """Replace the reject symbol by the all-zero plaintext."""
    return replace(base, name=f"no_reject({base.name})",
                   reject_state=ket(0, base.d_m + 1), base=base)


# ---------------------------------------------------------------------------
# classical schemes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassicalScheme:
    """Classical randomized scheme on ``bits``-bit messages.

    Ciphertexts are tuples of ints; decryption returns ``None`` for reject.
    """

    name: str
    bits: int
    key_bits: int
    encrypt: Callable[[int, int, np.random.Generator], tuple] = field(repr=False)
    decrypt: Callable[[int, tuple], int | None] = field(repr=False)
    ciphertext_fields: tuple[int, ...] = ()

    def sample_key(self, rng: np.random.Generator) -> int:
        return _random_bits(rng, self.key_bits)

    def sample_message(self, rng: np.random.Generator) -> int:
        return _random_bits(rng, self.bits)

    def enc(self, k: int, msg: int, rng: np.random.Generator) -> tuple:
        return self.encrypt(k, msg, rng)

    def dec(self, k: int, c: tuple) -> int | None:
        return self.decrypt(k, c)


def make_classical_otp(bits: int, q: int = 16, f: KeyedFunctionFamily | None = None
                       ) -> ClassicalScheme:
    """``(r, m xor f_k(r))``; never rejects, so trivially malleable."""
    f = f if f is not None else random_function(q, bits)

    def encrypt(k, msg, rng):
        r = _random_bits(rng, f.input_bits)
        return (r, msg ^ f(k, r))

    def decrypt(k, c):
        r, body = c
        return body ^ f(k, r)

    return ClassicalScheme("classical_otp", bits, f.key_bits, encrypt, decrypt,
                           (f.input_bits, bits))


def make_encrypt_then_tag(bits: int, tag_bits: int, f: KeyedFunctionFamily | None = None,
                          q: int = 16, seed: int = 0) -> ClassicalScheme:
    """``c = m xor F_{k1}(r)``, ``tag = F_{k2}(r || c)`` truncated to ``tag_bits``.

    ``f`` must map ``q + bits`` input bits to at least ``max(bits, tag_bits)`` bits; by
    default a random function is used.  The key is the pair ``(k1, k2)`` packed as
    ``k1 << f.key_bits | k2``.
    """
    width = max(bits, tag_bits)
    f = f if f is not None else random_function(q + bits, width, seed=seed)
    kb = f.key_bits

    def split(k):
        return k >> kb, k & ((1 << kb) - 1)

    def pad(k1, r):
        return f(k1, r) >> (f.output_bits - bits)

    def mac(k2, r, c):
        return f(k2, (r << bits) | c) >> (f.output_bits - tag_bits)

    def encrypt(k, msg, rng):
        k1, k2 = split(k)
        r = _random_bits(rng, q)
        c = msg ^ pad(k1, r)
        return (r, c, mac(k2, r, c))

    def decrypt(k, ct):
        k1, k2 = split(k)
        r, c, tag = ct
        if mac(k2, r, c) != tag:
            return None
        return c ^ pad(k1, r)

    return ClassicalScheme("classical_etm", bits, 2 * kb, encrypt, decrypt, (q, bits, tag_bits))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

QUANTUM_IDS = ("pauli_otp", "twodes_tag", "twodes_tag_prf", "twodes_tag_rand",
               "twodes_tag_twise", "extra_bit", "no_reject")
CLASSICAL_IDS = ("classical_otp", "classical_etm")
SCHEME_IDS = QUANTUM_IDS + CLASSICAL_IDS


def _base_family(m: int, t: int, family: str, key_bits: int | None) -> KeyedUnitaryFamily:
    kw = {} if key_bits is None else {"key_bits": key_bits}
    return make_family(family, m + t, **kw)


def make_scheme(scheme_id: str, **params):
    """Build a scheme from its config id and parameters.

    Quantum ids take ``m``, ``t`` (tag qubits), ``family`` (``clifford``/``haar``) and,
    for augmented ids, ``q`` (randomness bits) and ``seed``.  ``extra_bit`` and
    ``no_reject`` wrap ``base`` (an id or a nested ``{"id": ..., **params}`` mapping).
    """
    p = dict(params)
    if scheme_id == "pauli_otp":
        return make_pauli_otp(p.get("n", p.get("m", 1)))
    if scheme_id.startswith("twodes_tag"):
        m, t = p.get("m", 1), p.get("t", 1)
        family = p.get("family", "clifford" if m + t <= 3 else "haar")
        if scheme_id == "twodes_tag":
            return make_2des_tag(m, t, _base_family(m, t, family, p.get("key_bits")))
        q = p.get("q", 16)
        if scheme_id == "twodes_tag_rand":
            kb = p.get("key_bits", 32 if family == "clifford" else 16)
            base = make_2des_tag(m, t, _base_family(m, t, family, kb))
            return augment(base, random_function(q, kb, seed=p.get("seed", 0)))
        if scheme_id == "twodes_tag_prf":
            kb = p.get("key_bits", 32 if family == "clifford" else 16)
            base = make_2des_tag(m, t, _base_family(m, t, family, kb))
            return augment(base, prf_standin(p.get("p", 128), q, kb))
        if scheme_id == "twodes_tag_twise":
            field_bits = p.get("field_bits", 16)
            f = t_wise_family(p.get("independence", 2), field_bits)
            base = make_2des_tag(m, t, _base_family(m, t, family, field_bits))
            return augment(base, f)
    if scheme_id in ("extra_bit", "no_reject"):
        base_spec = p.get("base", {"id": "twodes_tag_rand"})
        base_spec = {"id": base_spec} if isinstance(base_spec, str) else dict(base_spec)
        base = make_scheme(base_spec.pop("id"), **base_spec)
        wrap = make_extra_bit_scheme if scheme_id == "extra_bit" else make_no_reject_scheme
        return wrap(base)
    if scheme_id == "classical_otp":
        return make_classical_otp(p.get("bits", 8), q=p.get("q", 16))
    if scheme_id == "classical_etm":
        bits, q = p.get("bits", 8), p.get("q", 16)
        f = None
        if "function" in p:
            f = make_function_family(p["function"], q=q + bits, s=max(bits, p.get("tag_bits", 16)),
                                     seed=p.get("seed", 0))
        return make_encrypt_then_tag(bits, p.get("tag_bits", 16), f=f, q=q, seed=p.get("seed", 0))
    raise KeyError(f"unknown scheme id {scheme_id!r}")


def iter_keys(scheme: NormalFormScheme, limit: int | None = None,
              rng: np.random.Generator | None = None) -> Iterable[int]:
    """All keys when enumerable (optionally a random subset of ``limit``); otherwise
    ``limit`` sampled keys."""
    if scheme.key_size is not None:
        if limit is None or limit >= scheme.key_size:
            return scheme.keys()
        rng = rng if rng is not None else np.random.default_rng(0)
        return [int(k) for k in rng.choice(scheme.key_size, size=limit, replace=False)]
    if limit is None:
        raise NotEnumerable(f"key space of {scheme.name} is not enumerable")
    rng = rng if rng is not None else np.random.default_rng(0)
    return [scheme.sample_key(rng) for _ in range(limit)]
