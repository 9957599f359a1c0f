"""Dense linear algebra on small qubit registers.

States are carried as :class:`DensityOp` values (a matrix plus the ordered list of
subsystem dimensions).  The array-level helpers (``*_array``) do the actual work and
are reused by the experiment runtime, which manipulates bare arrays for speed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_TOL = 1e-9
TP_TOL = 1e-9
PROB_FLOOR = 1e-14


class DimensionError(ValueError):
    pass


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex).ravel()
    return np.outer(vec, vec.conj())


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != prod(self.dims):
            raise DimensionError(f"{amps.size} amplitudes for dims {self.dims}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError("state vector is not normalized")

    def density(self) -> "DensityOp":
        return DensityOp(self.dims, proj(self.amplitudes))


@dataclass(frozen=True)
class DensityOp:
    """Trace-one positive operator on a register with subsystem dimensions ``dims``."""

    dims: tuple[int, ...]
    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)
        side = prod(dims)
        if mat.shape != (side, side):
            raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        if self.check:
            validate_density(mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def validate_density(mat: np.ndarray) -> None:
    if np.max(np.abs(mat - dagger(mat)), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    if abs(np.trace(mat) - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {np.trace(mat).real:.3g} != 1")
    if np.linalg.eigvalsh((mat + dagger(mat)) / 2).min() < -EIGEN_TOL:
        raise ValueError("matrix has a negative eigenvalue")


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError("projector must be square")
        if np.max(np.abs(p @ p - p)) > 1e-10 or np.max(np.abs(p - dagger(p))) > 1e-10:
            raise ValueError("matrix is not an orthogonal projector")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausChannel:
    """CP map given by Kraus operators of shape ``(out_dim, in_dim)``.

    Trace preservation is enforced unless ``trace_nonincreasing`` is set, in which
    case only ``sum K^dag K <= 1`` is required.
    """

    in_dim: int
    out_dim: int
    kraus_ops: tuple[np.ndarray, ...]
    trace_nonincreasing: bool = False

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        object.__setattr__(self, "kraus_ops", ops)
        for k in ops:
            if k.shape != (self.out_dim, self.in_dim):
                raise DimensionError(
                    f"Kraus operator shape {k.shape}, expected {(self.out_dim, self.in_dim)}")
        gram = sum((dagger(k) @ k for k in ops), np.zeros((self.in_dim, self.in_dim), complex))
        if self.trace_nonincreasing:
            if np.linalg.eigvalsh(np.eye(self.in_dim) - gram).min() < -TP_TOL:
                raise ValueError("Kraus operators increase trace")
        elif np.max(np.abs(gram - np.eye(self.in_dim)), initial=0.0) > TP_TOL:
            raise ValueError("Kraus operators are not trace preserving")

    @classmethod
    def unitary(cls, u: np.ndarray) -> "KrausChannel":
        u = np.asarray(u, dtype=complex)
        return cls(u.shape[1], u.shape[0], (u,))

    @classmethod
    def identity(cls, dim: int) -> "KrausChannel":
        return cls(dim, dim, (np.eye(dim, dtype=complex),))

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Sequential composition: ``self`` first, then ``other``."""
        if other.in_dim != self.out_dim:
            raise DimensionError("cannot compose channels with mismatched dimensions")
        ops = tuple(b @ a for a in self.kraus_ops for b in other.kraus_ops)
        return KrausChannel(self.in_dim, other.out_dim, ops,
                            self.trace_nonincreasing or other.trace_nonincreasing)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        ops = tuple(np.kron(a, b) for a in self.kraus_ops for b in other.kraus_ops)
        return KrausChannel(self.in_dim * other.in_dim, self.out_dim * other.out_dim, ops,
                            self.trace_nonincreasing or other.trace_nonincreasing)

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        return sum((k @ rho @ dagger(k) for k in self.kraus_ops),
                   np.zeros((self.out_dim, self.out_dim), complex))


# ---------------------------------------------------------------------------
# array-level kernels
# ---------------------------------------------------------------------------

def _front_permutation(n: int, targets: Sequence[int]) -> list[int]:
    rest = [i for i in range(n) if i not in targets]
    return list(targets) + rest


def to_front_array(rho: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Reorder subsystems so that ``targets`` come first (in the given order)."""
    n = len(dims)
    perm = _front_permutation(n, targets)
    if perm == list(range(n)):
        return rho
    side = rho.shape[0]
    t = rho.reshape(tuple(dims) * 2)
    t = t.transpose(perm + [p + n for p in perm])
    return t.reshape(side, side)


def _conjugate_front(k: np.ndarray, r: np.ndarray, d_rest: int) -> np.ndarray:
    """``K rho K^dag`` for ``rho`` flattened as (d_in, rest*d_in*rest); result axes
    are (out, rest, rest, out)."""
    d_out, d_in = k.shape
    left = (k @ r).reshape(d_out, d_rest, d_in, d_rest).transpose(0, 1, 3, 2)
    right = left.reshape(-1, d_in) @ k.conj().T
    return right.reshape(d_out, d_rest, d_rest, d_out)


def apply_kraus_array(rho: np.ndarray, dims: Sequence[int], targets: Sequence[int],
                      kraus_ops: Sequence[np.ndarray]) -> tuple[np.ndarray, list[int]]:
    """Apply ``sum_i K_i rho K_i^dag`` on the ``targets`` subsystems.

    Returns the new matrix and its dims.  The output subsystem (one merged block of
    size ``K.shape[0]``) is placed first, followed by untouched subsystems in their
    original order.
    """
    targets = list(targets)
    d_in = prod(dims[t] for t in targets)
    d_rest = rho.shape[0] // d_in
    rest_dims = [d for i, d in enumerate(dims) if i not in targets]
    r = to_front_array(rho, dims, targets).reshape(d_in, d_rest * d_in * d_rest)
    d_out = kraus_ops[0].shape[0]
    out = np.zeros((d_out, d_rest, d_rest, d_out), dtype=complex)
    for k in kraus_ops:
        if k.shape[1] != d_in:
            raise DimensionError(f"operator acts on {k.shape[1]} dims, targets span {d_in}")
        out += _conjugate_front(k, r, d_rest)
    out = out.transpose(0, 1, 3, 2)
    side = d_out * d_rest
    return out.reshape(side, side), [d_out] + rest_dims


def apply_unitary_array(rho: np.ndarray, dims: Sequence[int], targets: Sequence[int],
                        u: np.ndarray) -> np.ndarray:
    """Conjugate by ``u`` on ``targets`` keeping the original subsystem order."""
    targets = list(targets)
    n = len(dims)
    d_in = prod(dims[t] for t in targets)
    d_rest = rho.shape[0] // d_in
    r = to_front_array(rho, dims, targets).reshape(d_in, d_rest * d_in * d_rest)
    r = _conjugate_front(u, r, d_rest).transpose(0, 1, 3, 2)
    front = [dims[t] for t in targets] + [d for i, d in enumerate(dims) if i not in targets]
    perm = _front_permutation(n, targets)
    inv = np.argsort(perm).tolist()
    side = rho.shape[0]
    t = r.reshape(tuple(front) * 2).transpose(inv + [p + n for p in inv])
    return t.reshape(side, side)


def partial_trace_array(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    keep = list(keep)
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    d_keep = prod(dims[i] for i in keep)
    d_drop = prod(dims[i] for i in drop)
    r = to_front_array(rho, dims, keep + drop).reshape(d_keep, d_drop, d_keep, d_drop)
    return np.einsum("axbx->ab", r)


def reduced_array(rho: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    return partial_trace_array(rho, dims, targets)


# ---------------------------------------------------------------------------
# DensityOp operations
# ---------------------------------------------------------------------------

def density(vec_or_mat, dims: Sequence[int] | None = None) -> DensityOp:
    """Build a DensityOp from a state vector or matrix (qubit dims by default)."""
    a = np.asarray(vec_or_mat, dtype=complex)
    mat = proj(a) if a.ndim == 1 else a
    if dims is None:
        n = int(round(np.log2(mat.shape[0])))
        dims = (2,) * n if 2 ** n == mat.shape[0] else (mat.shape[0],)
    return DensityOp(tuple(dims), mat)


def maximally_mixed(dims: Sequence[int]) -> DensityOp:
    d = prod(dims)
    return DensityOp(tuple(dims), np.eye(d, dtype=complex) / d)


def tensor(a: DensityOp, b: DensityOp) -> DensityOp:
    return DensityOp(a.dims + b.dims, np.kron(a.matrix, b.matrix), check=False)


def partial_trace(rho: DensityOp, keep: Iterable[int]) -> DensityOp:
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set is empty; use the full trace instead")
    if keep[0] < 0 or keep[-1] >= len(rho.dims):
        raise IndexError(f"subsystem index out of range for dims {rho.dims}")
    mat = partial_trace_array(rho.matrix, rho.dims, keep)
    return DensityOp(tuple(rho.dims[i] for i in keep), mat, check=False)


def apply_channel(channel: KrausChannel, rho: DensityOp, on: Sequence[int]) -> DensityOp:
    """Apply ``channel`` to the subsystems ``on``; the output replaces them in place
    when dimensions are unchanged, otherwise it becomes a single leading subsystem."""
    on = list(on)
    d_on = prod(rho.dims[i] for i in on)
    if channel.in_dim != d_on:
        raise DimensionError(f"channel input {channel.in_dim} != subsystem dim {d_on}")
    if len(channel.kraus_ops) == 1 and channel.in_dim == channel.out_dim:
        mat = apply_unitary_array(rho.matrix, rho.dims, on, channel.kraus_ops[0])
        return DensityOp(rho.dims, mat, check=False)
    mat, dims = apply_kraus_array(rho.matrix, rho.dims, on, channel.kraus_ops)
    if channel.in_dim == channel.out_dim:
        # restore original subsystem order
        n = len(rho.dims)
        front = [rho.dims[i] for i in on] + [d for i, d in enumerate(rho.dims) if i not in on]
        perm = _front_permutation(n, on)
        inv = np.argsort(perm).tolist()
        t = mat.reshape(tuple(front) * 2).transpose(inv + [p + n for p in inv])
        return DensityOp(rho.dims, t.reshape(mat.shape), check=False)
    return DensityOp(tuple(dims), mat, check=False)


def measure_binary(rho: DensityOp, projector: Projector | np.ndarray, on: Sequence[int],
                   rng: np.random.Generator | None = None,
                   outcome: int | None = None) -> tuple[int, DensityOp, float]:
    """Two-outcome measurement ``{P, 1 - P}`` on ``on``; outcome 0 is ``P``.

    Either samples from ``rng`` or forces ``outcome``; forcing a branch whose
    probability is below 1e-14 raises ``ValueError``.
    """
    p = projector.matrix if isinstance(projector, Projector) else np.asarray(projector, complex)
    on = list(on)
    reduced = partial_trace_array(rho.matrix, rho.dims, on)
    if p.shape[0] != reduced.shape[0]:
        raise DimensionError("projector dimension does not match measured subsystems")
    prob0 = float(np.clip(np.real(np.trace(p @ reduced)), 0.0, 1.0))
    if outcome is None:
        rng = rng if rng is not None else np.random.default_rng()
        outcome = 0 if rng.random() < prob0 else 1
    prob = prob0 if outcome == 0 else 1.0 - prob0
    if prob < PROB_FLOOR:
        raise ValueError(f"outcome {outcome} has probability {prob:.3g}")
    branch = p if outcome == 0 else np.eye(p.shape[0]) - p
    mat = apply_unitary_array(rho.matrix, rho.dims, on, branch) / prob
    return outcome, DensityOp(rho.dims, mat, check=False), prob0


def max_entangled(dim: int) -> PureState:
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    v = np.zeros(dim * dim, dtype=complex)
    v[[i * dim + i for i in range(dim)]] = 1 / np.sqrt(dim)
    return PureState((dim, dim), v)


def phi_plus_projector(dim: int) -> np.ndarray:
    return proj(max_entangled(dim).amplitudes)


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix."""
    h = (a + dagger(a)) / 2
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def trace_distance(rho, sigma) -> float:
    a = rho.matrix if isinstance(rho, DensityOp) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, DensityOp) else np.asarray(sigma)
    if a.shape != b.shape:
        raise DimensionError("states have different dimensions")
    return 0.5 * trace_norm(a - b)


def choi_state(channel: KrausChannel) -> np.ndarray:
    """Normalized Choi state ``(channel x id)(phi+)``, output system first."""
    d = channel.in_dim
    phi = phi_plus_projector(d)
    mat, _ = apply_kraus_array(phi, [d, d], [0], channel.kraus_ops)
    return mat


def choi_distance(phi: KrausChannel, psi: KrausChannel) -> float:
    """Trace distance of normalized Choi states.

    Sandwiches the diamond distance:
    ``choi_distance <= 1/2 ||phi - psi||_diamond <= in_dim * choi_distance``.
    """
    if (phi.in_dim, phi.out_dim) != (psi.in_dim, psi.out_dim):
        raise DimensionError("channels have different dimensions")
    return trace_distance(choi_state(phi), choi_state(psi))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def random_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
