"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or disabled
with ``EPSENSE_PURE_PYTHON=1``. Signatures and outputs match the Cython
versions exactly.
"""
import numpy as np

_SINGLE = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli_word_matrix(codes, coefficient):
    """Kronecker product of single-qubit Paulis, leftmost factor first.

    ``codes`` holds one integer per qubit: 0=identity, 1=x, 2=y, 3=z.
    """
    out = np.array([[coefficient]], dtype=complex)
    for c in codes:
        out = np.kron(out, _SINGLE[c])
    return out


def faddeev_leverrier(a):
    """Faddeev-LeVerrier recursion on a square complex matrix.

    Returns ``(coeffs, mats)`` where ``coeffs[i]`` multiplies ``lam**i`` in
    ``det(lam*I - a)`` and ``mats[k]`` is the matrix multiplying
    ``lam**(N-1-k)`` in ``adj(lam*I - a)``.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    mats = np.empty((n, n, n), dtype=complex)
    m = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        mats[k - 1] = m
        am = a @ m
        c = -np.trace(am) / k
        coeffs[n - k] = c
        m = am
        m[np.diag_indices(n)] += c
    return coeffs, mats
