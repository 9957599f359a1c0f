import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skqes.linalg import (DensityOp, DimensionError, KrausChannel, Projector, apply_channel,
                          apply_kraus_array, apply_unitary_array, choi_distance, choi_state,
                          dagger, density, ket, kron_all, max_entangled, maximally_mixed,
                          measure_binary, partial_trace, partial_trace_array,
                          phi_plus_projector, random_density, tensor, trace_distance,
                          trace_norm)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Hd = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def test_ket_and_kron():
    assert np.allclose(ket(2, 4), [0, 0, 1, 0])
    assert np.allclose(kron_all([ket(1, 2), ket(0, 2)]), ket(2, 4))


def test_density_validation():
    with pytest.raises(ValueError):
        DensityOp((2,), np.array([[1, 0], [0, 1]], dtype=complex))      # trace 2
    with pytest.raises(ValueError):
        DensityOp((2,), np.array([[0.5, 1], [0, 0.5]], dtype=complex))  # not Hermitian
    with pytest.raises(DimensionError):
        DensityOp((3,), np.eye(2) / 2)


def test_partial_trace_of_bell_state_is_mixed():
    phi = max_entangled(2).density()
    reduced = partial_trace(phi, [0])
    assert np.allclose(reduced.matrix, np.eye(2) / 2)


def test_partial_trace_product_state():
    rng = np.random.default_rng(0)
    a, b, c = (random_density(d, rng) for d in (2, 3, 2))
    rho = kron_all([a, b, c])
    assert np.allclose(partial_trace_array(rho, [2, 3, 2], [1]), b)
    assert np.allclose(partial_trace_array(rho, [2, 3, 2], [2, 0]), np.kron(c, a))


def test_apply_unitary_array_keeps_order():
    rho = kron_all([ket(0, 2)[:, None] * ket(0, 2), np.eye(3) / 3])
    out = apply_unitary_array(rho, [2, 3], [0], X)
    assert np.allclose(out, kron_all([np.diag([0, 1]), np.eye(3) / 3]))


def test_apply_kraus_array_puts_output_first():
    rho = np.kron(np.diag([1.0, 0]), np.diag([0, 0, 1.0])).astype(complex)
    # isometry from the second factor (dim 3) into dim 1: trace it out
    ops = [ket(i, 3)[None, :] for i in range(3)]
    out, dims = apply_kraus_array(rho, [2, 3], [1], ops)
    assert dims == [1, 2]
    assert np.allclose(out, np.diag([1.0, 0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_channels_preserve_trace_and_positivity(seed):
    rng = np.random.default_rng(seed)
    rho = density(random_density(4, rng), (2, 2))
    depolarize = KrausChannel(2, 2, tuple(np.sqrt(w) * p for w, p in
                                          [(0.7, np.eye(2)), (0.3, X)]))
    out = apply_channel(depolarize, rho, [1])
    assert abs(out.trace() - 1) < 1e-12
    assert np.min(np.linalg.eigvalsh(out.matrix)) > -1e-12


def test_kraus_channel_rejects_non_tp():
    with pytest.raises(ValueError):
        KrausChannel(2, 2, (2 * np.eye(2),))


def test_channel_composition_and_tensor():
    h = KrausChannel.unitary(Hd)
    hh = h.then(h)
    assert choi_distance(hh, KrausChannel.identity(2)) < 1e-12
    both = h.tensor(KrausChannel.identity(2))
    assert both.in_dim == 4


def test_measure_binary_collapses():
    rng = np.random.default_rng(1)
    plus = density(Hd @ ket(0, 2))
    outcomes = []
    for _ in range(200):
        outcome, post, p0 = measure_binary(plus, Projector(np.diag([1.0, 0]).astype(complex)), [0], rng)
        assert p0 == pytest.approx(0.5)
        outcomes.append(outcome)
        expected = np.diag([1.0, 0]) if outcome == 0 else np.diag([0, 1.0])
        assert np.allclose(post.matrix, expected)
    assert 60 < sum(outcomes) < 140


def test_trace_distance_oracles():
    assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)
    assert trace_distance(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(0.0)
    assert trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0)


def test_phi_plus_projector():
    p = phi_plus_projector(3)
    assert np.allclose(p @ p, p)
    assert np.trace(p).real == pytest.approx(1.0)


def test_choi_state_of_identity_is_phi_plus():
    j = choi_state(KrausChannel.identity(2))
    assert np.allclose(j, phi_plus_projector(2))


def test_maximally_mixed_and_tensor():
    t = tensor(maximally_mixed([2]), maximally_mixed([3]))
    assert t.dims == (2, 3)
    assert np.allclose(t.matrix, np.eye(6) / 6)
    assert np.allclose(dagger(np.array([[1j, 0], [0, 0]])), [[-1j, 0], [0, 0]])
