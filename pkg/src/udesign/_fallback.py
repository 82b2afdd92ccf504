"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when the
extension is unavailable or ``UDESIGN_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np

_BLOCK = 512


def pair_power_sum(vecs, t):
    """sum_{k,k'} |<v_k, v_k'>|^(2t) over the rows of ``vecs``."""
    vecs = np.ascontiguousarray(vecs, dtype=np.complex128)
    t = int(t)
    K = vecs.shape[0]
    partial = []
    for start in range(0, K, _BLOCK):
        gram = vecs[start:start + _BLOCK].conj() @ vecs.T
        partial.extend(np.sum((gram.real**2 + gram.imag**2) ** t, axis=1).tolist())
    return math.fsum(partial)


def power_sum(values, t):
    """sum_k |z_k|^(2t)."""
    z = np.asarray(values, dtype=np.complex128)
    return math.fsum(((z.real**2 + z.imag**2) ** int(t)).tolist())


def potential_and_gradient(mats, t):
    """Frame potential of order t and its Wirtinger gradient dP/d(conj U_k)."""
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    t = int(t)
    K, d, _ = mats.shape
    flat = mats.reshape(K, d * d)
    gram = flat.conj() @ flat.T  # gram[k, k'] = tr(U_k^dag U_k')
    abs2 = gram.real**2 + gram.imag**2
    value = math.fsum(np.sum(abs2**t, axis=1).tolist()) / K**2
    weights = (2.0 * t / K**2) * abs2 ** (t - 1) * gram.conj()
    grad = (weights @ flat).reshape(K, d, d)
    return value, grad


def monomial_traces(perms, phases, mat):
    """tr(W_v M) for monomial matrices W_v|x> = phases[v, x] |perms[v, x]>."""
    perms = np.asarray(perms, dtype=np.int64)
    phases = np.asarray(phases, dtype=np.complex128)
    mat = np.asarray(mat, dtype=np.complex128)
    rows = np.arange(mat.shape[0])
    return np.sum(phases * mat[rows[None, :], perms], axis=1)
