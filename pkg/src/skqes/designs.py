"""Keyed unitary families (Pauli one-design, Clifford two-design, seeded Haar) and
twirl checks against the Haar moment formulas."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from .linalg import dagger, kron_all

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

UNITARY_TOL = 1e-10


class NotEnumerable(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KeyedUnitaryFamily:
    """Family ``{U_k}`` of ``n_qubits``-qubit unitaries.

    Keys are integers in ``[0, 2**key_bits)``.  ``size`` is the number of distinct
    members; when it is not a power of two the key is reduced modulo ``size`` (the
    key bits then act as a random tape with bias at most ``size / 2**key_bits``).
    """

    name: str
    n_qubits: int
    key_bits: int
    size: int
    resolver: Callable[[int], np.ndarray] = field(repr=False)
    enumerable: bool = True

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def index(self, key: int) -> int:
        return int(key) % self.size

    def resolve(self, key: int) -> np.ndarray:
        return self.resolver(self.index(key))

    def sample_key(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, 2 ** self.key_bits, dtype=np.uint64))

    def keys(self) -> range:
        if not self.enumerable:
            raise NotEnumerable(f"{self.name} family on {self.n_qubits} qubits is not enumerable")
        return range(self.size)

    def stacked(self) -> np.ndarray:
        """All members as an array of shape ``(size, dim, dim)``."""
        return _stacked(self)


@lru_cache(maxsize=None)
def _stacked(family: KeyedUnitaryFamily) -> np.ndarray:
    return np.stack([family.resolver(k) for k in family.keys()])


# ---------------------------------------------------------------------------
# Pauli one-design
# ---------------------------------------------------------------------------

def pauli_from_bits(a: tuple[int, ...], b: tuple[int, ...]) -> np.ndarray:
    return kron_all(np.linalg.matrix_power(X, ai) @ np.linalg.matrix_power(Z, bi)
                    for ai, bi in zip(a, b))


def pauli_key_bits(key: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    bits = [(key >> (2 * n - 1 - i)) & 1 for i in range(2 * n)]
    return tuple(bits[:n]), tuple(bits[n:])


@lru_cache(maxsize=None)
def pauli_family(n: int) -> KeyedUnitaryFamily:
    """Key ``a||b`` (2n bits, ``a`` in the high bits) maps to ``X^a Z^b`` per qubit."""
    if n < 1:
        raise ValueError("n must be at least 1")

    def resolve(key: int) -> np.ndarray:
        return pauli_from_bits(*pauli_key_bits(key, n))

    return KeyedUnitaryFamily("pauli", n, 2 * n, 4 ** n, resolve)


# ---------------------------------------------------------------------------
# Clifford two-design
# ---------------------------------------------------------------------------

def _projective_key(u: np.ndarray) -> bytes:
    flat = u.ravel()
    lead = flat[np.argmax(np.abs(flat) > 1e-6)]
    v = np.round(flat * (abs(lead) / lead), 6) + (0.0 + 0.0j)
    return v.tobytes()


def clifford_generators(n: int) -> list[np.ndarray]:
    gens = []
    for q in range(n):
        for g in (H, S):
            gens.append(kron_all(g if i == q else I2 for i in range(n)))
    if n == 2:
        gens.append(CNOT)
    elif n > 2:
        raise ValueError("generator closure only used for n <= 2")
    return gens


@lru_cache(maxsize=None)
def enumerate_cliffords(n: int) -> tuple[np.ndarray, ...]:
    """Breadth-first closure of {H, S, CNOT} with global phase quotiented out."""
    gens = clifford_generators(n)
    start = np.eye(2 ** n, dtype=complex)
    seen = {_projective_key(start)}
    out = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for g in gens:
            v = g @ u
            key = _projective_key(v)
            if key not in seen:
                seen.add(key)
                out.append(v)
                queue.append(v)
    return tuple(out)


def symplectic_form(u: np.ndarray, v: np.ndarray) -> int:
    n = u.size // 2
    return int((u[:n] @ v[n:] + u[n:] @ v[:n]) % 2)


def pauli_from_vector(v: np.ndarray) -> np.ndarray:
    """Hermitian Pauli ``i^{x.z} X^x Z^z`` for the symplectic vector ``v = (x|z)``."""
    n = v.size // 2
    x, z = v[:n], v[n:]
    phase = 1j ** int(x @ z % 4)
    return phase * pauli_from_bits(tuple(int(a) for a in x), tuple(int(b) for b in z))


def random_symplectic_pairs(n: int, rng: np.random.Generator) -> list[tuple[np.ndarray, np.ndarray]]:
    """Uniformly random symplectic basis ``(v_1, w_1, ..., v_n, w_n)`` over GF(2).

    Each vector is drawn uniformly from the symplectic complement of the pairs
    chosen so far (projection of a uniform vector is uniform on the complement).
    """
    pairs: list[tuple[np.ndarray, np.ndarray]] = []

    def project(x: np.ndarray) -> np.ndarray:
        for v, w in pairs:
            x = (x + symplectic_form(x, w) * v + symplectic_form(x, v) * w) % 2
        return x

    for _ in range(n):
        while True:
            v = project(rng.integers(0, 2, 2 * n))
            if v.any():
                break
        while True:
            w = project(rng.integers(0, 2, 2 * n))
            if symplectic_form(v, w) == 1:
                break
        pairs.append((v, w))
    return pairs


def clifford_from_images(x_images: list[np.ndarray], z_images: list[np.ndarray]) -> np.ndarray:
    """Unitary ``U`` with ``U X_j U^dag = x_images[j]`` and ``U Z_j U^dag = z_images[j]``."""
    n = len(x_images)
    d = 2 ** n
    p = np.eye(d, dtype=complex)
    for zj in z_images:
        p = p @ (np.eye(d) + zj) / 2
    col = np.argmax(np.linalg.norm(p, axis=0))
    psi0 = p[:, col] / np.linalg.norm(p[:, col])
    u = np.empty((d, d), dtype=complex)
    for idx in range(d):
        v = psi0
        for j in range(n):
            if (idx >> (n - 1 - j)) & 1:
                v = x_images[j] @ v
        u[:, idx] = v
    return u


def sample_clifford(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform n-qubit Clifford (up to global phase)."""
    pairs = random_symplectic_pairs(n, rng)
    signs = rng.choice([-1, 1], size=2 * n)
    xs = [signs[j] * pauli_from_vector(v) for j, (v, _) in enumerate(pairs)]
    zs = [signs[n + j] * pauli_from_vector(w) for j, (_, w) in enumerate(pairs)]
    return clifford_from_images(xs, zs)


CLIFFORD_SIZES = {1: 24, 2: 11520, 3: 92897280}


@lru_cache(maxsize=None)
def clifford_family(n: int, key_bits: int = 32) -> KeyedUnitaryFamily:
    """Exact enumeration for ``n <= 2``; seeded uniform sampler for ``n == 3``."""
    if n in (1, 2):
        members = enumerate_cliffords(n)
        return KeyedUnitaryFamily("clifford", n, key_bits, len(members), lambda k: members[k])
    if n == 3:
        @lru_cache(maxsize=4096)
        def resolve(key: int) -> np.ndarray:
            return sample_clifford(3, np.random.default_rng([key, 3]))
        return KeyedUnitaryFamily("clifford", 3, key_bits, 2 ** key_bits, resolve,
                                  enumerable=False)
    raise ValueError(f"Clifford family supports n in {{1, 2, 3}}, got {n}")


@lru_cache(maxsize=None)
def haar_family(n: int, key_bits: int = 32) -> KeyedUnitaryFamily:
    """Seeded Haar-random unitaries: key ``k`` seeds the draw of ``U_k``."""
    dim = 2 ** n

    @lru_cache(maxsize=2048)
    def resolve(key: int) -> np.ndarray:
        return unitary_group.rvs(dim, random_state=np.random.default_rng([key, n, 0x4A]))

    return KeyedUnitaryFamily("haar", n, key_bits, 2 ** key_bits, resolve, enumerable=False)


def make_family(name: str, n: int, **kwargs) -> KeyedUnitaryFamily:
    if name == "pauli":
        return pauli_family(n)
    if name == "clifford":
        return clifford_family(n, **kwargs)
    if name == "haar":
        return haar_family(n, **kwargs)
    raise KeyError(f"unknown unitary family {name!r}")


def projectively_equal(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    d = u.shape[0]
    return abs(abs(np.trace(dagger(u) @ v)) - d) < tol


# ---------------------------------------------------------------------------
# twirls and Haar moments
# ---------------------------------------------------------------------------

def _tensor_power(us: np.ndarray, t: int) -> np.ndarray:
    if t == 1:
        return us
    k, d, _ = us.shape
    return np.einsum("kab,kcd->kacbd", us, us).reshape(k, d * d, d * d)


def _check_order(t: int) -> None:
    if t not in (1, 2):
        raise ValueError("design order must be 1 or 2")


def twirl(family: KeyedUnitaryFamily, t: int, x: np.ndarray, mode: str = "exact",
          trials: int = 10_000, rng: np.random.Generator | None = None,
          batch: int = 4096) -> np.ndarray:
    """Average of ``U^{(x)t} X U^{dag (x)t}`` over the family.

    ``mode="exact"`` averages over every member; ``mode="sampled"`` over ``trials``
    uniformly drawn keys.
    """
    _check_order(t)
    x = np.asarray(x, dtype=complex)
    side = family.dim ** t
    if x.shape != (side, side):
        raise ValueError(f"operator must have side {side}")
    if mode == "exact":
        us = family.stacked()
        return _average_conjugation(_tensor_power(us, t), x)
    if mode != "sampled":
        raise ValueError(f"unknown twirl mode {mode!r}")
    rng = rng if rng is not None else np.random.default_rng()
    total = np.zeros_like(x)
    remaining = trials
    while remaining:
        m = min(batch, remaining)
        us = np.stack([family.resolve(family.sample_key(rng)) for _ in range(m)])
        total += _average_conjugation(_tensor_power(us, t), x) * m
        remaining -= m
    return total / trials


def _average_conjugation(ws: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("kab,bc,kdc->ad", ws, x, ws.conj(), optimize=True) / ws.shape[0]


def swap_operator(d: int) -> np.ndarray:
    sw = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            sw[j * d + i, i * d + j] = 1
    return sw


def haar_moment(t: int, n: int, x: np.ndarray) -> np.ndarray:
    """Closed-form Haar average of ``U^{(x)t} X U^{dag (x)t}`` for ``t`` in {1, 2}.

    For ``t=2`` the result is ``Tr[X P_sym]/d_sym P_sym + Tr[X P_anti]/d_anti P_anti``.
    """
    _check_order(t)
    d = 2 ** n
    x = np.asarray(x, dtype=complex)
    if t == 1:
        return np.trace(x) / d * np.eye(d, dtype=complex)
    sw = swap_operator(d)
    eye = np.eye(d * d, dtype=complex)
    p_sym, p_anti = (eye + sw) / 2, (eye - sw) / 2
    d_sym, d_anti = d * (d + 1) / 2, d * (d - 1) / 2
    return (np.trace(x @ p_sym) / d_sym * p_sym + np.trace(x @ p_anti) / d_anti * p_anti)


def design_deviation(family: KeyedUnitaryFamily, t: int, x: np.ndarray, mode: str = "exact",
                     trials: int = 10_000, rng: np.random.Generator | None = None) -> float:
    """Max entrywise deviation between the family twirl and the Haar moment."""
    diff = twirl(family, t, x, mode, trials, rng) - haar_moment(t, family.n_qubits, x)
    return float(np.max(np.abs(diff)))
