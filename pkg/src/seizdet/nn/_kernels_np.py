"""NumPy reference implementation of the convolution/pooling kernels.

Shares the exact contract of the compiled extension: NHWC float64 arrays,
stride-1 cross-correlation with symmetric zero padding (odd kernels only),
2x2/stride-2 max pooling with floor semantics and first-index tie breaks.
"""

from __future__ import annotations

import numpy as np


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, h, wd, ci = x.shape
    kh, kw, ci_w, co = w.shape
    if ci != ci_w:
        raise ValueError(f"input has {ci} channels, filters expect {ci_w}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("same-padding convolution requires odd kernel sizes")
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw), (0, 0)))
    y = np.broadcast_to(b, (n, h, wd, co)).copy()
    for a in range(kh):
        for c in range(kw):
            y += xp[:, a : a + h, c : c + wd, :] @ w[a, c]
    return y


def conv2d_backward(
    x: np.ndarray, w: np.ndarray, gy: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, h, wd, ci = x.shape
    kh, kw, _, co = w.shape
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x, ((0, 0), (ph, ph), (pw, pw), (0, 0)))
    gxp = np.zeros_like(xp)
    gw = np.empty_like(w)
    for a in range(kh):
        for c in range(kw):
            patch = xp[:, a : a + h, c : c + wd, :]
            gw[a, c] = np.einsum("nhwi,nhwo->io", patch, gy)
            gxp[:, a : a + h, c : c + wd, :] += gy @ w[a, c].T
    gx = gxp[:, ph : ph + h, pw : pw + wd, :]
    gb = gy.sum(axis=(0, 1, 2))
    return gx, gw, gb


def maxpool2_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n, h, wd, c = x.shape
    h2, w2 = h // 2, wd // 2
    win = (
        x[:, : 2 * h2, : 2 * w2, :]
        .reshape(n, h2, 2, w2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(n, h2, w2, 4, c)
    )
    idx = win.argmax(axis=3).astype(np.uint8)
    y = np.take_along_axis(win, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return y, idx


def maxpool2_backward(gy: np.ndarray, idx: np.ndarray, h: int, wd: int) -> np.ndarray:
    n, h2, w2, c = gy.shape
    gwin = np.zeros((n, h2, w2, 4, c))
    np.put_along_axis(gwin, idx[:, :, :, None, :].astype(np.int64), gy[:, :, :, None, :], axis=3)
    gx = np.zeros((n, h, wd, c))
    gx[:, : 2 * h2, : 2 * w2, :] = (
        gwin.reshape(n, h2, w2, 2, 2, c).transpose(0, 1, 3, 2, 4, 5).reshape(n, 2 * h2, 2 * w2, c)
    )
    return gx
