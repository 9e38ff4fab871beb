# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the pieces numpy handles badly: the fused Adam
update, the sequential GAE scan, and the pairwise overlap test. Affine
layers stay on BLAS and activations on numpy's SIMD loops in both backends
(a hand-compiled version of either only loses; the activation kernels here
exist so the benchmark can show that).

Loop ordering is fixed, so each kernel is bit-deterministic for fixed
inputs; the libm tanh may differ from numpy's in the last ulps, which is
why reproducibility guarantees hold per backend.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, tanh

cnp.import_array()

ACT_IDENTITY = 0
ACT_RELU = 1
ACT_TANH = 2


def act_forward(int code, object z):
    shape = np.shape(z)
    cdef double[::1] flat = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(flat.shape[0], dtype=np.float64)
    cdef Py_ssize_t i, n = flat.shape[0]
    if code == 0:
        for i in range(n):
            out[i] = flat[i]
    elif code == 1:
        for i in range(n):
            out[i] = flat[i] if flat[i] > 0.0 else 0.0
    elif code == 2:
        for i in range(n):
            out[i] = tanh(flat[i])
    else:
        raise ValueError(f"unknown activation code {code}")
    return out.reshape(shape)


def act_backward(int code, object z, object ga):
    shape = np.shape(z)
    cdef double[::1] zf = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    cdef double[::1] gf = np.ascontiguousarray(ga, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(zf.shape[0], dtype=np.float64)
    cdef Py_ssize_t i, n = zf.shape[0]
    cdef double t
    if code == 0:
        for i in range(n):
            out[i] = gf[i]
    elif code == 1:
        for i in range(n):
            out[i] = gf[i] if zf[i] > 0.0 else 0.0
    elif code == 2:
        for i in range(n):
            t = tanh(zf[i])
            out[i] = gf[i] * (1.0 - t * t)
    else:
        raise ValueError(f"unknown activation code {code}")
    return out.reshape(shape)


def adam_update(object p, object g, object m, object v,
                long t, double lr, double beta1, double beta2, double eps):
    cdef double[::1] pf = p.reshape(-1)
    cdef double[::1] gf = np.ascontiguousarray(g).reshape(-1)
    cdef double[::1] mf = m.reshape(-1)
    cdef double[::1] vf = v.reshape(-1)
    cdef Py_ssize_t i, n = pf.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double mhat, vhat
    for i in range(n):
        mf[i] = beta1 * mf[i] + (1.0 - beta1) * gf[i]
        vf[i] = beta2 * vf[i] + (1.0 - beta2) * gf[i] * gf[i]
        mhat = mf[i] / c1
        vhat = vf[i] / c2
        pf[i] -= lr * mhat / (sqrt(vhat) + eps)


def gae_scan(double[:, ::1] rewards, double[:, ::1] values, double[:, ::1] dones,
             double[::1] last_values, double gamma, double lam):
    cdef Py_ssize_t T = rewards.shape[0], B = rewards.shape[1]
    cdef cnp.ndarray[double, ndim=2] adv = np.zeros((T, B), dtype=np.float64)
    cdef double[:, ::1] a = adv
    cdef Py_ssize_t t, j
    cdef double nonterm, nxt, delta, gae
    for j in range(B):
        gae = 0.0
        for t in range(T - 1, -1, -1):
            nonterm = 1.0 - dones[t, j]
            nxt = last_values[j] if t == T - 1 else values[t + 1, j]
            delta = rewards[t, j] + gamma * nxt * nonterm - values[t, j]
            gae = delta + gamma * lam * nonterm * gae
            a[t, j] = gae
    return adv


def overlap_pairs(double[:, ::1] pos, double[::1] radii, cnp.uint8_t[::1] active):
    cdef Py_ssize_t n = pos.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] buf = np.empty((n * (n - 1) // 2 if n > 1 else 0, 2),
                                                         dtype=np.int64)
    cdef cnp.int64_t[:, ::1] bv = buf
    cdef Py_ssize_t i, j, k = 0
    cdef double dx, dy, r
    for i in range(n):
        if not active[i]:
            continue
        for j in range(i + 1, n):
            if not active[j]:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            r = radii[i] + radii[j]
            if dx * dx + dy * dy < r * r:
                bv[k, 0] = i
                bv[k, 1] = j
                k += 1
    return buf[:k].copy()
