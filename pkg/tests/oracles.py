"""Independent reference computations shared by several test modules."""
import numpy as np

from skqes.linalg import apply_kraus_array, max_entangled


def brute_force_acc_overlap(scheme, attack):
    """Average over keys of <phi+| accept block |phi+> after Enc, attack and Dec,
    built from the scheme's own channels only."""
    d = scheme.d_m
    phi = max_entangled(d).density().matrix
    total = 0.0
    for k in scheme.keys():
        rho, dims = apply_kraus_array(phi, [d, d], [0], scheme.enc_channel(k).kraus_ops)
        rho, dims = apply_kraus_array(rho, dims, [0], attack.channel.kraus_ops)
        rho, dims = apply_kraus_array(rho, dims, [0], scheme.dec_channel(k).kraus_ops)
        acc = rho.reshape(d + 1, d, d + 1, d)[:d, :, :d, :].reshape(d * d, d * d)
        total += np.real(np.trace(phi @ acc))
    return total / scheme.key_size
