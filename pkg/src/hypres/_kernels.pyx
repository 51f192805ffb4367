# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the batched kernels."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def boundary_batch(X, XI):
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] xi = np.ascontiguousarray(XI, dtype=np.float64)
    cdef Py_ssize_t M = x.shape[0], d = x.shape[1] - 1, j, k
    phi_m = np.empty(M)
    phi_p = np.empty(M)
    Bm = np.empty((M, d))
    Bp = np.empty((M, d))
    cdef double[::1] pm = phi_m, pp = phi_p
    cdef double[:, ::1] bm = Bm, bp = Bp
    for j in range(M):
        pm[j] = x[j, 0] - xi[j, 0]
        pp[j] = x[j, 0] + xi[j, 0]
        for k in range(d):
            bm[j, k] = (x[j, k + 1] - xi[j, k + 1]) / pm[j]
            bp[j, k] = (x[j, k + 1] + xi[j, k + 1]) / pp[j]
    return phi_m, phi_p, Bm, Bp


def poisson_transport(x_, F_, nodes_, int sign):
    cdef const double[::1] x = np.ascontiguousarray(x_, dtype=np.float64)
    cdef const double[:, ::1] F = np.ascontiguousarray(F_, dtype=np.float64)
    cdef const double[:, ::1] nodes = np.ascontiguousarray(nodes_, dtype=np.float64)
    cdef Py_ssize_t M = nodes.shape[0], d = nodes.shape[1], j, a, b
    P_ = np.empty(M)
    T_ = np.empty((M, d, d))
    cdef double[::1] P = P_
    cdef double[:, :, ::1] T = T_
    cdef double[::1] xi = np.empty(d + 1)
    cdef double p, c, pa0, s
    for j in range(M):
        s = x[0]
        for b in range(d):
            s -= x[b + 1] * nodes[j, b]
        p = 1.0 / s
        P[j] = p
        xi[0] = sign * (p - x[0])
        for b in range(d):
            xi[b + 1] = sign * (p * nodes[j, b] - x[b + 1])
        for a in range(d):
            c = F[0, a] * xi[0]
            for b in range(d):
                c -= F[b + 1, a] * xi[b + 1]
            pa0 = F[0, a] + c * xi[0]
            for b in range(d):
                T[j, a, b] = F[b + 1, a] + c * xi[b + 1] - pa0 * nodes[j, b]
    return P_, T_


def poisson_accumulate(kw_, T_, W_):
    W_ = np.asarray(W_, dtype=np.complex128)
    cdef int m = W_.ndim - 1
    cdef const double complex[::1] kw = np.ascontiguousarray(kw_, dtype=np.complex128)
    cdef const double[:, :, ::1] T = np.ascontiguousarray(T_, dtype=np.float64)
    cdef Py_ssize_t M = T.shape[0], d = T.shape[1], j, a, b, r, size = 1, rest
    cdef int step
    for step in range(m):
        size *= d
    cdef const double complex[:, ::1] W = np.ascontiguousarray(W_.reshape(M, size))
    out_ = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] out = out_
    cdef double complex[::1] old = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] new = np.empty(size, dtype=np.complex128)
    cdef double complex acc
    rest = size // d if m > 0 else 1
    for j in range(M):
        for r in range(size):
            old[r] = W[j, r]
        for step in range(m):
            # new[r, a] = sum_b T[a, b] old[b, r]
            for r in range(rest):
                for a in range(d):
                    acc = 0
                    for b in range(d):
                        acc = acc + T[j, a, b] * old[b * rest + r]
                    new[r * d + a] = acc
            old, new = new, old
        for r in range(size):
            out[r] = out[r] + kw[j] * old[r]
    if m == 0:
        return out_.reshape(())
    return out_.reshape((d,) * m)
