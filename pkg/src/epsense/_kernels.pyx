# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Pauli-word assembly and the Faddeev-LeVerrier recursion."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def pauli_word_matrix(codes, double complex coefficient):
    cdef Py_ssize_t n = len(codes)
    cdef Py_ssize_t dim = 1 << n
    cdef long xmask = 0
    cdef long zmask = 0
    cdef long ymask = 0
    cdef Py_ssize_t q, r, bit
    cdef int c
    for q in range(n):
        c = codes[q]
        bit = 1 << (n - 1 - q)
        if c == 1:
            xmask |= bit
        elif c == 2:
            xmask |= bit
            ymask |= bit
        elif c == 3:
            zmask |= bit
        elif c != 0:
            raise ValueError("Pauli code must be 0..3, got %d" % c)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex phase
    cdef long y_up, z_sign
    cdef int ny = 0
    for q in range(n):
        if (ymask >> q) & 1:
            ny += 1
    for r in range(dim):
        # Y|0> = i|1>, Y|1> = -i|0>: row bit 0 -> -i, row bit 1 -> +i
        y_up = _popcount(r & ymask)
        z_sign = _popcount(r & zmask)
        phase = coefficient
        phase *= _ipow(ny, y_up)
        if z_sign & 1:
            phase = -phase
        out[r, r ^ xmask] = phase
    return out


cdef inline long _popcount(long v):
    cdef long count = 0
    while v:
        v &= v - 1
        count += 1
    return count


cdef inline double complex _ipow(int ny, long n_one_bits):
    # product over y sites of (-i) for bit 0 and (+i) for bit 1
    cdef long k = (3 * (ny - n_one_bits) + n_one_bits) % 4
    if k == 0:
        return 1.0
    elif k == 1:
        return 1j
    elif k == 2:
        return -1.0
    return -1j


def faddeev_leverrier(a):
    a_arr = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = a_arr.shape[0]
    coeffs_arr = np.zeros(n + 1, dtype=np.complex128)
    mats_arr = np.zeros((n, n, n), dtype=np.complex128)
    # interleaved (re, im) float views; column j lives at 2j, 2j+1
    cdef double[:, ::1] A = a_arr.view(np.float64)
    cdef double[:, :, ::1] M = mats_arr.view(np.float64)
    cdef Py_ssize_t i, j, l, k
    cdef double ar, ai, br, bi, tr_r, tr_i
    cdef double complex c
    coeffs_arr[n] = 1.0
    for i in range(n):
        M[0, i, 2 * i] = 1.0
    for k in range(1, n):
        # M_k = A @ M_{k-1}, accumulated row by row in i-l-j order
        for i in range(n):
            for l in range(n):
                ar = A[i, 2 * l]
                ai = A[i, 2 * l + 1]
                if ar == 0 and ai == 0:
                    continue
                for j in range(n):
                    br = M[k - 1, l, 2 * j]
                    bi = M[k - 1, l, 2 * j + 1]
                    M[k, i, 2 * j] += ar * br - ai * bi
                    M[k, i, 2 * j + 1] += ar * bi + ai * br
        tr_r = 0
        tr_i = 0
        for i in range(n):
            tr_r += M[k, i, 2 * i]
            tr_i += M[k, i, 2 * i + 1]
        c = -(tr_r + 1j * tr_i) / k
        coeffs_arr[n - k] = c
        for i in range(n):
            M[k, i, 2 * i] += c.real
            M[k, i, 2 * i + 1] += c.imag
    # the last coefficient needs only the trace of A @ M_{n-1}
    tr_r = 0
    tr_i = 0
    for i in range(n):
        for l in range(n):
            ar = A[i, 2 * l]
            ai = A[i, 2 * l + 1]
            br = M[n - 1, l, 2 * i]
            bi = M[n - 1, l, 2 * i + 1]
            tr_r += ar * br - ai * bi
            tr_i += ar * bi + ai * br
    coeffs_arr[0] = -(tr_r + 1j * tr_i) / n
    return coeffs_arr, mats_arr
