# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled convolution/pooling kernels (NHWC float64, stride 1).

Semantics mirror seizdet.nn._kernels_np: cross-correlation with symmetric
zero padding (odd kernels), 2x2 max pooling with floor semantics and
first-index tie breaks. Loops keep the output-channel axis innermost so the
C compiler can vectorize the accumulation.
"""

import numpy as np


def conv2d_forward(double[:, :, :, ::1] x, double[:, :, :, ::1] w, double[::1] b):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], wd = x.shape[2], ci = x.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], co = w.shape[3]
    if w.shape[2] != ci:
        raise ValueError(f"input has {ci} channels, filters expect {w.shape[2]}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("same-padding convolution requires odd kernel sizes")
    cdef Py_ssize_t ph = kh // 2, pw = kw // 2
    out = np.empty((n, h, wd, co), dtype=np.float64)
    cdef double[:, :, :, ::1] y = out
    cdef Py_ssize_t s, oh, ow, a, c, f, g, ih, iw
    cdef double xv
    for s in range(n):
        for oh in range(h):
            for ow in range(wd):
                for g in range(co):
                    y[s, oh, ow, g] = b[g]
                for a in range(kh):
                    ih = oh + a - ph
                    if ih < 0 or ih >= h:
                        continue
                    for c in range(kw):
                        iw = ow + c - pw
                        if iw < 0 or iw >= wd:
                            continue
                        for f in range(ci):
                            xv = x[s, ih, iw, f]
                            for g in range(co):
                                y[s, oh, ow, g] += xv * w[a, c, f, g]
    return out


def conv2d_backward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                    double[:, :, :, ::1] gy):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], wd = x.shape[2], ci = x.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], co = w.shape[3]
    cdef Py_ssize_t ph = kh // 2, pw = kw // 2
    gx_arr = np.zeros((n, h, wd, ci), dtype=np.float64)
    gw_arr = np.zeros((kh, kw, ci, co), dtype=np.float64)
    gb_arr = np.zeros(co, dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef double[:, :, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t s, oh, ow, a, c, f, g, ih, iw
    cdef double gv, xv, acc
    for s in range(n):
        for oh in range(h):
            for ow in range(wd):
                for g in range(co):
                    gb[g] += gy[s, oh, ow, g]
                for a in range(kh):
                    ih = oh + a - ph
                    if ih < 0 or ih >= h:
                        continue
                    for c in range(kw):
                        iw = ow + c - pw
                        if iw < 0 or iw >= wd:
                            continue
                        for f in range(ci):
                            xv = x[s, ih, iw, f]
                            acc = 0.0
                            for g in range(co):
                                gv = gy[s, oh, ow, g]
                                gw[a, c, f, g] += xv * gv
                                acc += w[a, c, f, g] * gv
                            gx[s, ih, iw, f] += acc
    return gx_arr, gw_arr, gb_arr


def maxpool2_forward(double[:, :, :, ::1] x):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], wd = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t h2 = h // 2, w2 = wd // 2
    out = np.empty((n, h2, w2, c), dtype=np.float64)
    idx_arr = np.empty((n, h2, w2, c), dtype=np.uint8)
    cdef double[:, :, :, ::1] y = out
    cdef unsigned char[:, :, :, ::1] idx = idx_arr
    cdef Py_ssize_t s, i, j, f, dr, dc, k
    cdef double best, v
    cdef unsigned char argk
    for s in range(n):
        for i in range(h2):
            for j in range(w2):
                for f in range(c):
                    best = x[s, 2 * i, 2 * j, f]
                    argk = 0
                    k = 0
                    for dr in range(2):
                        for dc in range(2):
                            v = x[s, 2 * i + dr, 2 * j + dc, f]
                            if v > best:
                                best = v
                                argk = <unsigned char> k
                            k += 1
                    y[s, i, j, f] = best
                    idx[s, i, j, f] = argk
    return out, idx_arr


def maxpool2_backward(double[:, :, :, ::1] gy, unsigned char[:, :, :, ::1] idx,
                      Py_ssize_t h, Py_ssize_t wd):
    cdef Py_ssize_t n = gy.shape[0], h2 = gy.shape[1], w2 = gy.shape[2], c = gy.shape[3]
    gx_arr = np.zeros((n, h, wd, c), dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef Py_ssize_t s, i, j, f, k
    for s in range(n):
        for i in range(h2):
            for j in range(w2):
                for f in range(c):
                    k = idx[s, i, j, f]
                    gx[s, 2 * i + (k >> 1), 2 * j + (k & 1), f] += gy[s, i, j, f]
    return gx_arr
