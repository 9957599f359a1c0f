"""Experiment runtime: one global density operator over all live registers.

Registers are integer ids owned either by the challenger or by the adversary.
Adversaries act only through :class:`AdversaryView`, which checks ownership and
liveness on every call, so using a register after handing it to an oracle (or after
discarding it) raises :class:`ProtocolViolation`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from ..linalg import (PROB_FLOOR, apply_kraus_array, apply_unitary_array, dagger,
                      partial_trace_array, proj, to_front_array)

CHALLENGER = "challenger"
ADVERSARY = "adversary"


class ProtocolViolation(RuntimeError):
    """An adversary touched a register it does not own or that no longer exists."""


class QueryBudgetExceeded(ProtocolViolation):
    pass


@dataclass(frozen=True)
class Ciphertext:
    """What an adversary holds after an encryption query: the classical part (an
    int or ``None``) and the id of the quantum register."""

    r: int | None
    reg: int


class Runtime:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.rho = np.ones((1, 1), dtype=complex)
        self.order: list[int] = []
        self.dims: dict[int, int] = {}
        self.owner: dict[int, str] = {}
        self._next = 0

    # bookkeeping -------------------------------------------------------------
    def _new_id(self, dim: int, owner: str) -> int:
        rid = self._next
        self._next += 1
        self.dims[rid] = dim
        self.owner[rid] = owner
        return rid

    def _forget(self, ids: Sequence[int]) -> None:
        for i in ids:
            del self.dims[i]
            del self.owner[i]

    def live(self, rid: int) -> bool:
        return rid in self.dims

    def check(self, ids: Sequence[int], owner: str) -> None:
        if len(set(ids)) != len(ids):
            raise ProtocolViolation(f"register listed twice in {list(ids)}")
        for i in ids:
            if i not in self.dims:
                raise ProtocolViolation(f"register {i} is consumed or was never allocated")
            if self.owner[i] != owner:
                raise ProtocolViolation(f"register {i} is owned by {self.owner[i]}, not {owner}")

    def transfer(self, ids: Sequence[int], owner: str) -> None:
        for i in ids:
            self.owner[i] = owner

    def dim_of(self, ids: Sequence[int]) -> int:
        return prod(self.dims[i] for i in ids)

    @property
    def _dim_list(self) -> list[int]:
        return [self.dims[i] for i in self.order]

    def _positions(self, ids: Sequence[int]) -> list[int]:
        return [self.order.index(i) for i in ids]

    # state operations --------------------------------------------------------
    def alloc(self, state: np.ndarray, owner: str) -> int:
        """Append a fresh register in ``state`` (vector or density matrix)."""
        s = np.asarray(state, dtype=complex)
        mat = proj(s) if s.ndim == 1 else s
        rid = self._new_id(mat.shape[0], owner)
        self.rho = np.kron(self.rho, mat)
        self.order.append(rid)
        return rid

    def apply_unitary(self, u: np.ndarray, ids: Sequence[int]) -> None:
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.dim_of(ids),) * 2:
            raise ValueError(f"operator of shape {u.shape} on registers of dim {self.dim_of(ids)}")
        self.rho = apply_unitary_array(self.rho, self._dim_list, self._positions(ids), u)

    def apply_channel(self, kraus_ops: Sequence[np.ndarray], ids: Sequence[int],
                      out_dims: Sequence[int] | None, owner: str) -> list[int]:
        """Apply a channel on ``ids``; they are consumed and fresh registers with
        ``out_dims`` are returned (one register if ``out_dims`` is None)."""
        ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
        d_out = ops[0].shape[0]
        out_dims = [d_out] if out_dims is None else list(out_dims)
        if prod(out_dims) != d_out:
            raise ValueError(f"out_dims {out_dims} do not multiply to {d_out}")
        gram = sum(dagger(k) @ k for k in ops)
        if np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-9:
            raise ValueError("Kraus operators are not trace preserving")
        self.rho, _ = apply_kraus_array(self.rho, self._dim_list, self._positions(ids), ops)
        self._replace_front(ids, out_dims, owner)
        return self.order[:len(out_dims)]

    def _replace_front(self, ids: Sequence[int], out_dims: Sequence[int], owner: str) -> None:
        rest = [i for i in self.order if i not in ids]
        self._forget(ids)
        new = [self._new_id(d, owner) for d in out_dims]
        self.order = new + rest

    def map_front(self, ids: Sequence[int], fn, out_dims: Sequence[int], owner: str) -> list[int]:
        """Bring ``ids`` to the front and replace them via ``fn(rho, d_rest)``, which
        must return the new matrix with the output subsystem first."""
        pos = self._positions(ids)
        d_in = self.dim_of(ids)
        front = to_front_array(self.rho, self._dim_list, pos)
        self.rho = fn(front, front.shape[0] // d_in)
        self._replace_front(ids, out_dims, owner)
        return self.order[:len(out_dims)]

    def measure(self, projector: np.ndarray, ids: Sequence[int]) -> int:
        """Two-outcome measurement ``{P, 1 - P}``; returns 0 for ``P``."""
        p = np.asarray(projector, dtype=complex)
        pos = self._positions(ids)
        dims = self._dim_list
        reduced = partial_trace_array(self.rho, dims, pos)
        if p.shape != reduced.shape:
            raise ValueError("projector does not match the measured registers")
        total = float(np.real(np.trace(self.rho)))
        p0 = float(np.clip(np.real(np.trace(p @ reduced)) / total, 0.0, 1.0))
        outcome = 0 if self.rng.random() < p0 else 1
        prob = p0 if outcome == 0 else 1.0 - p0
        if prob < PROB_FLOOR:          # guard against round-off selecting a null branch
            outcome, prob = 1 - outcome, 1.0 - prob
        branch = p if outcome == 0 else np.eye(p.shape[0]) - p
        self.rho = apply_unitary_array(self.rho, dims, pos, branch) / prob
        return outcome

    def measure_basis(self, ids: Sequence[int]) -> int:
        """Computational-basis measurement of the joint register; returns the index."""
        pos = self._positions(ids)
        dims = self._dim_list
        probs = np.clip(np.real(np.diag(partial_trace_array(self.rho, dims, pos))), 0, None)
        probs = probs / probs.sum()
        outcome = int(self.rng.choice(len(probs), p=probs))
        p = np.zeros((len(probs), len(probs)), dtype=complex)
        p[outcome, outcome] = 1.0
        self.rho = apply_unitary_array(self.rho, dims, pos, p) / probs[outcome]
        return outcome

    def discard(self, ids: Sequence[int]) -> None:
        if not ids:
            return
        keep = [j for j, i in enumerate(self.order) if i not in ids]
        dims = self._dim_list
        if keep:
            self.rho = partial_trace_array(self.rho, dims, keep)
        else:
            self.rho = np.ones((1, 1), dtype=complex) * np.trace(self.rho)
        self.order = [self.order[j] for j in keep]
        self._forget(ids)

    def split(self, rid: int, dims: Sequence[int]) -> list[int]:
        """Relabel one register as consecutive sub-registers (no change of state)."""
        if prod(dims) != self.dims[rid]:
            raise ValueError(f"cannot split dim {self.dims[rid]} into {list(dims)}")
        owner = self.owner[rid]
        at = self.order.index(rid)
        self._forget([rid])
        new = [self._new_id(d, owner) for d in dims]
        self.order[at:at + 1] = new
        return new

    def reduced_state(self, ids: Sequence[int]) -> np.ndarray:
        return partial_trace_array(self.rho, self._dim_list, self._positions(ids))

    @property
    def total_dim(self) -> int:
        return self.rho.shape[0]


class AdversaryView:
    """The only handle an adversary gets on the experiment.

    ``encrypt`` and ``decrypt`` are the game's oracles (possibly ``None`` when the
    game provides no such oracle).  ``scheme`` is public information.
    """

    def __init__(self, runtime: Runtime, scheme, rng: np.random.Generator,
                 encrypt=None, decrypt=None, max_queries: int | None = None):
        self._rt = runtime
        self.scheme = scheme
        self.rng = rng
        self._encrypt = encrypt
        self._decrypt = decrypt
        self.max_queries = max_queries
        self.enc_queries = 0
        self.dec_queries = 0
        # free-form adversary annotations copied into the trial record
        self.notes: dict = {}

    # local operations --------------------------------------------------------
    def prepare(self, state: np.ndarray) -> int:
        return self._rt.alloc(state, ADVERSARY)

    def prepare_pair(self, dim: int) -> tuple[int, int]:
        """Two registers of dimension ``dim`` in the maximally entangled state."""
        v = np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
        (reg,) = [self._rt.alloc(v, ADVERSARY)]
        a, b = self._rt.split(reg, [dim, dim])
        return a, b

    def apply(self, u: np.ndarray, regs: Sequence[int]) -> None:
        self._rt.check(regs, ADVERSARY)
        self._rt.apply_unitary(u, regs)

    def apply_channel(self, kraus_ops: Sequence[np.ndarray], regs: Sequence[int],
                      out_dims: Sequence[int] | None = None) -> list[int]:
        self._rt.check(regs, ADVERSARY)
        return self._rt.apply_channel(kraus_ops, regs, out_dims, ADVERSARY)

    def measure(self, projector: np.ndarray, regs: Sequence[int]) -> int:
        self._rt.check(regs, ADVERSARY)
        return self._rt.measure(projector, regs)

    def measure_basis(self, regs: Sequence[int]) -> int:
        self._rt.check(regs, ADVERSARY)
        return self._rt.measure_basis(regs)

    def discard(self, regs: Sequence[int]) -> None:
        self._rt.check(regs, ADVERSARY)
        self._rt.discard(regs)

    def split(self, reg: int, dims: Sequence[int]) -> list[int]:
        self._rt.check([reg], ADVERSARY)
        return self._rt.split(reg, dims)

    def dim(self, reg: int) -> int:
        self._rt.check([reg], ADVERSARY)
        return self._rt.dims[reg]

    # oracles -----------------------------------------------------------------
    def _count(self) -> None:
        if self.max_queries is not None and self.enc_queries + self.dec_queries >= self.max_queries:
            raise QueryBudgetExceeded(f"query budget of {self.max_queries} exhausted")

    def encrypt(self, reg: int) -> Ciphertext:
        if self._encrypt is None:
            raise ProtocolViolation("this game provides no encryption oracle")
        self._rt.check([reg], ADVERSARY)
        self._count()
        self.enc_queries += 1
        return self._encrypt(reg)

    def decrypt(self, ct: Ciphertext) -> int:
        if self._decrypt is None:
            raise ProtocolViolation("this game provides no decryption oracle")
        self._rt.check([ct.reg], ADVERSARY)
        self._count()
        self.dec_queries += 1
        return self._decrypt(ct)

    @property
    def queries(self) -> int:
        return self.enc_queries + self.dec_queries
