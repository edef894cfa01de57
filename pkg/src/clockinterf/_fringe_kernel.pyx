# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fringe-model kernels; same contract as ``_fringe_py``.

The normal-equation pass is fused: residual, Jacobian row and the
accumulation into J^T J / J^T r happen per sample without temporaries.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sin, cos

cnp.import_array()


def fringe_model(const double[::1] u, p):
    cdef double A = p[0], uc = p[1], s = p[2], V = p[3]
    cdef double kappa = p[4], chi = p[5], b = p[6]
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double inv2s2 = 1.0 / (2.0 * s * s), du
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        du = u[i] - uc
        o[i] = A * exp(-du * du * inv2s2) * (1.0 + V * sin(kappa * u[i] + chi)) + b
    return out


def fringe_cost(const double[::1] u, const double[::1] y, p):
    cdef double A = p[0], uc = p[1], s = p[2], V = p[3]
    cdef double kappa = p[4], chi = p[5], b = p[6]
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double inv2s2 = 1.0 / (2.0 * s * s), du, r, acc = 0.0
    for i in range(n):
        du = u[i] - uc
        r = A * exp(-du * du * inv2s2) * (1.0 + V * sin(kappa * u[i] + chi)) + b - y[i]
        acc += r * r
    return 0.5 * acc


def fringe_normal_equations(const double[::1] u, const double[::1] y, p):
    cdef double A = p[0], uc = p[1], s = p[2], V = p[3]
    cdef double kappa = p[4], chi = p[5], b = p[6]
    cdef Py_ssize_t i, j, k, n = u.shape[0]
    cdef double inv2s2 = 1.0 / (2.0 * s * s), inv_s2 = 1.0 / (s * s), inv_s3 = inv_s2 / s
    cdef double du, g, sn, cs, mod, agm, agvc, r, acc = 0.0
    cdef double jrow[7]
    cdef double jtj[7][7]
    cdef double jtr[7]
    for j in range(7):
        jtr[j] = 0.0
        for k in range(7):
            jtj[j][k] = 0.0
    for i in range(n):
        du = u[i] - uc
        g = exp(-du * du * inv2s2)
        sn = sin(kappa * u[i] + chi)
        cs = cos(kappa * u[i] + chi)
        mod = 1.0 + V * sn
        agm = A * g * mod
        r = agm + b - y[i]
        agvc = A * g * V * cs
        jrow[0] = g * mod
        jrow[1] = agm * du * inv_s2
        jrow[2] = agm * du * du * inv_s3
        jrow[3] = A * g * sn
        jrow[4] = agvc * u[i]
        jrow[5] = agvc
        jrow[6] = 1.0
        acc += r * r
        for j in range(7):
            jtr[j] += jrow[j] * r
            for k in range(j, 7):
                jtj[j][k] += jrow[j] * jrow[k]
    JtJ = np.empty((7, 7))
    Jtr = np.empty(7)
    cdef double[:, ::1] m = JtJ
    cdef double[::1] v = Jtr
    for j in range(7):
        v[j] = jtr[j]
        for k in range(j, 7):
            m[j, k] = jtj[j][k]
            m[k, j] = jtj[j][k]
    return 0.5 * acc, JtJ, Jtr
