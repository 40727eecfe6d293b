# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the fuzzy conjunction/disjunction layers.

Hot path of training: called once per gradient step for every action
network.  Semantics match ``numpy_backend`` exactly, including the
zero-term handling in the product gradients.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conj_forward(double[:, ::1] x, double[:, ::1] m):
    cdef Py_ssize_t b = x.shape[0], n_in = x.shape[1], n_out = m.shape[0]
    out_arr = np.empty((b, n_out), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, p, j
    cdef double acc
    for i in range(b):
        for p in range(n_out):
            acc = 1.0
            for j in range(n_in):
                acc *= 1.0 - m[p, j] * (1.0 - x[i, j])
            out[i, p] = acc
    return out_arr


def conj_backward(double[:, ::1] x, double[:, ::1] m,
                  double[:, ::1] out, double[:, ::1] grad_out):
    cdef Py_ssize_t b = x.shape[0], n_in = x.shape[1], n_out = m.shape[0]
    gx_arr = np.zeros((b, n_in), dtype=np.float64)
    gm_arr = np.zeros((n_out, n_in), dtype=np.float64)
    cdef double[:, ::1] gx = gx_arr
    cdef double[:, ::1] gm = gm_arr
    cdef Py_ssize_t i, p, j, n_zero
    cdef double prod_nz, term, g, gt
    for i in range(b):
        for p in range(n_out):
            g = grad_out[i, p]
            if g == 0.0:
                continue
            prod_nz = 1.0
            n_zero = 0
            for j in range(n_in):
                term = 1.0 - m[p, j] * (1.0 - x[i, j])
                if term == 0.0:
                    n_zero += 1
                else:
                    prod_nz *= term
            if n_zero >= 2:
                continue
            for j in range(n_in):
                term = 1.0 - m[p, j] * (1.0 - x[i, j])
                if n_zero == 0:
                    gt = g * prod_nz / term
                elif term == 0.0:
                    gt = g * prod_nz
                else:
                    gt = 0.0
                gx[i, j] += gt * m[p, j]
                gm[p, j] -= gt * (1.0 - x[i, j])
    return gx_arr, gm_arr


def disj_forward(double[:, ::1] x, double[::1] m):
    cdef Py_ssize_t b = x.shape[0], n_in = x.shape[1]
    out_arr = np.empty(b, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(b):
        acc = 1.0
        for j in range(n_in):
            acc *= 1.0 - m[j] * x[i, j]
        out[i] = 1.0 - acc
    return out_arr


def disj_backward(double[:, ::1] x, double[::1] m,
                  double[::1] out, double[::1] grad_out):
    cdef Py_ssize_t b = x.shape[0], n_in = x.shape[1]
    gx_arr = np.zeros((b, n_in), dtype=np.float64)
    gm_arr = np.zeros(n_in, dtype=np.float64)
    cdef double[:, ::1] gx = gx_arr
    cdef double[::1] gm = gm_arr
    cdef Py_ssize_t i, j, n_zero
    cdef double prod_nz, term, g, gt
    for i in range(b):
        g = grad_out[i]
        if g == 0.0:
            continue
        prod_nz = 1.0
        n_zero = 0
        for j in range(n_in):
            term = 1.0 - m[j] * x[i, j]
            if term == 0.0:
                n_zero += 1
            else:
                prod_nz *= term
        if n_zero >= 2:
            continue
        # out = 1 - prod(q) with q = 1 - m*x: the inner minus signs cancel
        for j in range(n_in):
            term = 1.0 - m[j] * x[i, j]
            if n_zero == 0:
                gt = g * prod_nz / term
            elif term == 0.0:
                gt = g * prod_nz
            else:
                gt = 0.0
            gx[i, j] += gt * m[j]
            gm[j] += gt * x[i, j]
    return gx_arr, gm_arr
