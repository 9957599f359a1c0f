"""One-time authentication checks.

For an attack ``Lambda`` on the ciphertext (plus an adversary side register ``B``),
the *effective map* is the key-averaged ``Dec_k o Lambda o Enc_k`` on ``M x B``.  A
scheme is ciphertext authenticating when the effective map is close to the fixed
simulator

    id_M x Lambda_acc  +  |bot><bot| x Lambda_rej,

where ``Lambda_acc`` keeps exactly the part of the attack that leaves the encrypted
entangled test state untouched.  All maps are handled through their normalized Choi
states; subsystem order is ``(outputs..., references...)``.

In these computations the classical randomness is treated as a quantum register
``R`` in the computational basis placed in front of the quantum ciphertext, so
attacks may read or rewrite it.
"""
from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .linalg import (KrausChannel, dagger, kron_all, ket, phi_plus_projector,
                     trace_distance, trace_norm)
from .schemes import NormalFormScheme, iter_keys

X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class AttackMap:
    """Channel on ``C x B -> C x B~`` where ``C = R x M x T``."""

    channel: KrausChannel
    side_in_dim: int = 1
    side_out_dim: int = 1
    name: str = "attack"

    def __post_init__(self):
        if self.channel.trace_nonincreasing:
            raise ValueError("attack maps must be trace preserving")


@dataclass(frozen=True)
class SplitSimulator:
    """Choi states (output ``B~`` first, reference ``B`` second) of the accept and
    reject branches; they sum to the Choi state of a TP map."""

    acc_choi: np.ndarray
    rej_choi: np.ndarray
    side_in_dim: int
    side_out_dim: int

    @property
    def acc_trace(self) -> float:
        return float(np.real(np.trace(self.acc_choi)))

    @property
    def rej_trace(self) -> float:
        return float(np.real(np.trace(self.rej_choi)))

    def _channel(self, choi: np.ndarray) -> KrausChannel:
        return choi_to_kraus(choi, self.side_in_dim, self.side_out_dim, tni=True)

    @property
    def acc(self) -> KrausChannel:
        return self._channel(self.acc_choi)

    @property
    def rej(self) -> KrausChannel:
        return self._channel(self.rej_choi)

    def apply(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Images of an operator ``z`` on ``B`` under both branches."""
        return (apply_choi(self.acc_choi, z, self.side_in_dim, self.side_out_dim),
                apply_choi(self.rej_choi, z, self.side_in_dim, self.side_out_dim))


# ---------------------------------------------------------------------------
# Choi helpers
# ---------------------------------------------------------------------------

def choi_to_kraus(choi: np.ndarray, d_in: int, d_out: int, tni: bool = False,
                  tol: float = 1e-12) -> KrausChannel:
    """Kraus form of the map with normalized Choi state ``choi`` (output first)."""
    w, v = np.linalg.eigh(d_in * (choi + dagger(choi)) / 2)
    ops = [np.sqrt(lam) * v[:, i].reshape(d_out, d_in) for i, lam in enumerate(w) if lam > tol]
    if not ops:
        ops = [np.zeros((d_out, d_in), dtype=complex)]
    return KrausChannel(d_in, d_out, tuple(ops), trace_nonincreasing=tni)


def apply_choi(choi: np.ndarray, z: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """``Phi(z) = d_in * Tr_ref[choi (1 x z^T)]``."""
    j = choi.reshape(d_out, d_in, d_out, d_in)
    return d_in * np.einsum("aibj,ji->ab", j, z)


# ---------------------------------------------------------------------------
# attack library
# ---------------------------------------------------------------------------

MAX_R_BITS = 4


def _ciphertext_dims(scheme: NormalFormScheme) -> tuple[int, int]:
    if scheme.r_bits > MAX_R_BITS:
        raise ValueError("authentication checks embed the classical part as a register; "
                         f"use at most {MAX_R_BITS} randomness bits (got {scheme.r_bits})")
    return 2 ** scheme.r_bits, scheme.d_c


def _quantum_unitary_attack(scheme: NormalFormScheme, u: np.ndarray, name: str) -> AttackMap:
    d_r, d_c = _ciphertext_dims(scheme)
    return AttackMap(KrausChannel.unitary(np.kron(np.eye(d_r), u)), name=name)


def _qubit_x(n_qubits: int, which: int) -> np.ndarray:
    return kron_all(X if i == which else np.eye(2) for i in range(n_qubits))


NAMED_UNITARIES = ("x_message", "x_tag", "haar", "z_message")


def named_unitary(scheme: NormalFormScheme, name: str) -> np.ndarray:
    n = scheme.m + scheme.t
    if name == "x_message":
        return _qubit_x(n, 0)
    if name == "z_message":
        return kron_all(np.diag([1, -1]) if i == 0 else np.eye(2) for i in range(n))
    if name == "x_tag":
        if scheme.t == 0:
            raise ValueError(f"{scheme.name} has no tag qubits")
        return _qubit_x(n, scheme.m)
    if name == "haar":
        from scipy.stats import unitary_group
        return unitary_group.rvs(2 ** n, random_state=np.random.default_rng(7))
    raise KeyError(f"unknown named unitary {name!r}")


ATTACK_IDS = ("id", "replace_tau", "unitary:<name>", "tag_flip", "flip_extra_bit",
              "copy_classical")


def make_attack(scheme: NormalFormScheme, attack_id: str) -> AttackMap:
    """Attack library: ``id``, ``replace_tau``, ``unitary:<name>`` (names in
    :data:`NAMED_UNITARIES`), ``tag_flip``, ``flip_extra_bit``, ``copy_classical``."""
    d_r, d_c = _ciphertext_dims(scheme)
    d = d_r * d_c
    if attack_id == "id":
        return AttackMap(KrausChannel.identity(d), name="id")
    if attack_id == "replace_tau":
        ops = tuple(np.outer(ket(i, d), ket(j, d)) / np.sqrt(d) for i in range(d) for j in range(d))
        return AttackMap(KrausChannel(d, d, ops), name="replace_tau")
    if attack_id.startswith("unitary:"):
        name = attack_id.split(":", 1)[1]
        return _quantum_unitary_attack(scheme, named_unitary(scheme, name), attack_id)
    if attack_id == "tag_flip":
        return _quantum_unitary_attack(scheme, named_unitary(scheme, "x_tag"), "tag_flip")
    if attack_id == "flip_extra_bit":
        n = scheme.m + scheme.t
        return _quantum_unitary_attack(scheme, _qubit_x(n, n - 1), "flip_extra_bit")
    if attack_id == "copy_classical":
        if scheme.r_bits == 0:
            raise ValueError(f"{scheme.name} has no classical part to copy")
        ops = []
        for r in range(d_r):
            k = np.kron(np.kron(np.outer(ket(r, d_r), ket(r, d_r)), np.eye(d_c)),
                        ket(r, d_r).reshape(-1, 1))
            ops.append(k)
        return AttackMap(KrausChannel(d, d * d_r, tuple(ops)), 1, d_r, "copy_classical")
    raise KeyError(f"unknown attack id {attack_id!r}")


# ---------------------------------------------------------------------------
# key/randomness averaging
# ---------------------------------------------------------------------------

def _key_r_pairs(scheme: NormalFormScheme, mode: str, samples: int,
                 rng: np.random.Generator | None) -> list[tuple[int, int | None, float]]:
    rng = rng if rng is not None else np.random.default_rng(0)
    if mode == "exact":
        keys = list(scheme.keys())
    elif mode == "sampled":
        keys = list(iter_keys(scheme, samples, rng)) if scheme.key_size is None or \
            samples < scheme.key_size else list(scheme.keys())
    else:
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    rs = scheme.r_values()
    w = 1.0 / (len(keys) * len(rs))
    return [(k, r, w) for k in keys for r in rs]


def _check_dims(scheme: NormalFormScheme, attack: AttackMap) -> None:
    d_r, d_c = _ciphertext_dims(scheme)
    if attack.channel.in_dim != d_r * d_c * attack.side_in_dim:
        raise ValueError(f"attack input dim {attack.channel.in_dim} does not match "
                         f"ciphertext x side dim {d_r * d_c * attack.side_in_dim}")
    if attack.channel.out_dim != d_r * d_c * attack.side_out_dim:
        raise ValueError("attack output dim does not match ciphertext x side dim")


def _attacked_state(scheme, attack, k, r, d_b: int) -> np.ndarray:
    """Encrypt the ``M`` half of ``phi+`` over ``(M B)(M' B')``, attack, and return
    the state on ``(R, C, B~, M', B')``."""
    d_r, d_c = _ciphertext_dims(scheme)
    d_m = scheme.d_m
    w = scheme.enc_isometry(k, r)
    rr = 0 if r is None else r
    w_full = np.kron(ket(rr, d_r).reshape(-1, 1), w)
    enc = np.kron(w_full, np.eye(d_b))                  # (R C B) <- (M B)
    d_in = d_m * d_b
    vec = np.eye(d_in, dtype=complex).reshape(-1) / np.sqrt(d_in)   # (M B, ref)
    vec = (enc @ vec.reshape(d_in, d_in)).reshape(-1)                # (R C B, ref)
    rho = np.outer(vec, vec.conj())
    out = np.zeros((attack.channel.out_dim * d_in,) * 2, dtype=complex)
    r_mat = rho.reshape(attack.channel.in_dim, -1)
    for op in attack.channel.kraus_ops:
        left = (op @ r_mat).reshape(op.shape[0], d_in, attack.channel.in_dim, d_in)
        left = left.transpose(0, 1, 3, 2).reshape(-1, attack.channel.in_dim)
        full = (left @ dagger(op)).reshape(op.shape[0], d_in, d_in, op.shape[0])
        out += full.transpose(0, 1, 3, 2).reshape(out.shape)
    return out


def _decrypt_classical(scheme, k, state: np.ndarray, d_rest: int) -> np.ndarray:
    """Measure ``R`` then decrypt; ``state`` is on ``(R, C, rest)``."""
    d_r, d_c = _ciphertext_dims(scheme)
    blk = state.reshape(d_r, d_c * d_rest, d_r, d_c * d_rest)
    out = np.zeros((scheme.d_out * d_rest,) * 2, dtype=complex)
    for rp in range(d_r):
        b = blk[rp, :, rp, :]
        if np.abs(np.trace(b)) < 1e-15 and np.max(np.abs(b)) < 1e-15:
            continue
        out += scheme.dec_front(b, d_rest, k, rp if scheme.r_bits else None)
    return out


def effective_choi(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
                   samples: int = 500, rng: np.random.Generator | None = None) -> np.ndarray:
    """Normalized Choi state of the effective map on ``(M+bot, B~, M', B')``."""
    _check_dims(scheme, attack)
    d_b, d_bt = attack.side_in_dim, attack.side_out_dim
    d_in = scheme.d_m * d_b
    d_rest = d_bt * d_in
    total = np.zeros((scheme.d_out * d_rest,) * 2, dtype=complex)
    for k, r, w in _key_r_pairs(scheme, mode, samples, rng):
        st = _attacked_state(scheme, attack, k, r, d_b)
        total += w * _decrypt_classical(scheme, k, st, d_rest)
    return total


def effective_map(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
                  samples: int = 500, rng: np.random.Generator | None = None) -> KrausChannel:
    """Key-averaged ``Dec o Lambda o Enc`` as a channel ``M x B -> (M+bot) x B~``."""
    j = effective_choi(scheme, attack, mode, samples, rng)
    return choi_to_kraus(j, scheme.d_m * attack.side_in_dim, scheme.d_out * attack.side_out_dim)


def qca_simulator(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
                  samples: int = 500, rng: np.random.Generator | None = None) -> SplitSimulator:
    """Accept/reject branches of the fixed-form simulator.

    ``acc(Z) = E <Phi| V^dag Lambda(Enc(phi+_{MM'} x Z)) V |Phi>`` with
    ``|Phi> = |phi+>_{MM'} |r> |psi_{k,r}>``; ``rej(Z)`` is the rest of the trace,
    ``E Tr_{CM'} Lambda(Enc(phi+ x Z)) - acc(Z)``.
    """
    _check_dims(scheme, attack)
    d_r, d_c = _ciphertext_dims(scheme)
    d_m = scheme.d_m
    d_b, d_bt = attack.side_in_dim, attack.side_out_dim
    # phi+_{MM'} x phi+_{BB'} is phi+ over (M B)(M' B'), so the attacked state is the
    # one used for the effective map; its order is (R, C, B~, M', B').
    acc = np.zeros((d_bt * d_b,) * 2, dtype=complex)
    total = np.zeros_like(acc)
    phi = np.eye(d_m, dtype=complex) / np.sqrt(d_m)                   # (M, M')
    for k, r, w in _key_r_pairs(scheme, mode, samples, rng):
        st = _attacked_state(scheme, attack, k, r, d_b)
        t = st.reshape((d_r, d_c, d_bt, d_m, d_b) * 2)
        total += w * np.einsum("rcxmyrcXmY->xyXY", t).reshape(acc.shape)
        rr = 0 if r is None else r
        blk = t[rr, :, :, :, :, rr]                     # (C, B~, M', B', C, B~, M', B')
        phi_mt = np.einsum("am,t->atm", phi, scheme.tag_state(k, r)).reshape(d_c, d_m)
        g = scheme.unitary(k, r) @ phi_mt               # V|Phi> over (C, M')
        acc += w * np.einsum("cm,cxmyCXMY,CM->xyXY", g.conj(), blk, g,
                             optimize=True).reshape(acc.shape)
    return SplitSimulator(acc, total - acc, d_b, d_bt)


def simulator_choi(scheme: NormalFormScheme, sim: SplitSimulator) -> np.ndarray:
    """Choi state of ``id_M x acc + |bot><bot| x rej`` on ``(M+bot, B~, M', B')``."""
    d_m, d_out = scheme.d_m, scheme.d_out
    phi = phi_plus_projector(d_m).reshape(d_m, d_m, d_m, d_m)          # (o, m', O, M')
    phi_e = np.zeros((d_out, d_m, d_out, d_m), dtype=complex)
    phi_e[:d_m, :, :d_m, :] = phi
    bot = np.zeros((d_out, d_m, d_out, d_m), dtype=complex)
    bot[d_m, :, d_m, :] = np.eye(d_m) / d_m
    d_bt, d_b = sim.side_out_dim, sim.side_in_dim
    a = sim.acc_choi.reshape(d_bt, d_b, d_bt, d_b)
    rj = sim.rej_choi.reshape(d_bt, d_b, d_bt, d_b)
    j = (np.einsum("omOM,xyXY->oxmyOXMY", phi_e, a)
         + np.einsum("omOM,xyXY->oxmyOXMY", bot, rj))
    side = d_out * d_bt * d_m * d_b
    return j.reshape(side, side)


def qca_distance(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
                 samples: int = 500, rng: np.random.Generator | None = None) -> float:
    """Trace distance between the normalized Choi states of the effective map and the
    fixed-form simulator.

    This lower-bounds half the diamond distance and is within a factor
    ``d_M * d_B`` of it.
    """
    return qca_report(scheme, attack, mode, samples, rng)["distance"]


def qca_report(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
               samples: int = 500, rng: np.random.Generator | None = None) -> dict:
    """Distance plus branch traces and the plaintext-marginal deviation."""
    rng = rng if rng is not None else np.random.default_rng(0)
    seed = int(rng.integers(2 ** 32))
    j_eff = effective_choi(scheme, attack, mode, samples, np.random.default_rng(seed))
    sim = qca_simulator(scheme, attack, mode, samples, np.random.default_rng(seed))
    j_sim = simulator_choi(scheme, sim)
    return {
        "scheme": scheme.name, "attack": attack.name, "mode": mode,
        "distance": trace_distance(j_eff, j_sim),
        "acc_trace": sim.acc_trace, "rej_trace": sim.rej_trace,
        "plaintext_marginal": plaintext_marginal_deviation(scheme, attack, j_eff),
    }


def dns_check(scheme: NormalFormScheme, attack: AttackMap, mode: str = "exact",
              samples: int = 500, rng: np.random.Generator | None = None) -> float:
    """Sufficient test for plaintext authentication: the QCA distance.  A value below
    tolerance certifies; a larger value is inconclusive (see
    :func:`plaintext_marginal_deviation` for a direct check)."""
    return qca_distance(scheme, attack, mode, samples, rng)


def plaintext_marginal_deviation(scheme: NormalFormScheme, attack: AttackMap,
                                 j_eff: np.ndarray | None = None, mode: str = "exact",
                                 samples: int = 500,
                                 rng: np.random.Generator | None = None) -> float:
    """How far the effective map is from ``id_M x A + |bot><bot| Tr_M x R`` for some
    side maps ``A``, ``R``.

    The accept block of the Choi state must factor as ``phi+_{MM'} x Y`` and the reject
    block as ``tau_{M'} x Y'``, with no coherence between them; returns the largest
    trace-norm deviation.
    """
    if j_eff is None:
        j_eff = effective_choi(scheme, attack, mode, samples, rng)
    d_m, d_out = scheme.d_m, scheme.d_out
    d_bt, d_b = attack.side_out_dim, attack.side_in_dim
    j = j_eff.reshape(d_out, d_bt, d_m, d_b, d_out, d_bt, d_m, d_b)
    acc = j[:d_m, :, :, :, :d_m]
    y = np.einsum("oxmyoXmY->xyXY", acc)
    phi = phi_plus_projector(d_m).reshape(d_m, d_m, d_m, d_m)
    acc_model = np.einsum("omOM,xyXY->oxmyOXMY", phi, y)
    rej = j[d_m, :, :, :, d_m]                                  # (B~, M', B', B~, M', B')
    y_rej = np.einsum("xmyXmY->xyXY", rej)
    rej_model = np.einsum("mM,xyXY->xmyXMY", np.eye(d_m) / d_m, y_rej)
    side_a = d_m * d_bt * d_m * d_b
    side_r = d_bt * d_m * d_b
    cross = j[:d_m, :, :, :, d_m]
    return max(trace_norm((acc - acc_model).reshape(side_a, side_a)),
               trace_norm((rej - rej_model).reshape(side_r, side_r)),
               2 * float(np.abs(cross).sum()))
