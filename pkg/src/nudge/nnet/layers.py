"""Network layers with explicit forward/backward passes (numpy, float64).

All layers operate on batches: conv/pool on (B, C, H, W), dense on (B, N).
Each layer caches what its backward pass needs; instances are single-owner
during training.
"""

import numpy as np


class Conv2D:
    """3x3 convolution, stride 1, zero padding 1 (same spatial size)."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int = 3, pad: int = 1):
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.kernel = kernel
        self.pad = pad
        self.w = np.zeros((out_ch, in_ch, kernel, kernel))
        self.b = np.zeros(out_ch)
        self._cache = None

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def set_param(self, name, value):
        setattr(self, name, value)

    def _im2col(self, x):
        b, c, h, w = x.shape
        k, p = self.kernel, self.pad
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        oh, ow = h + 2 * p - k + 1, w + 2 * p - k + 1
        cols = np.empty((b, c, k, k, oh, ow))
        for i in range(k):
            for j in range(k):
                cols[:, :, i, j] = xp[:, :, i:i + oh, j:j + ow]
        return cols.reshape(b, c * k * k, oh * ow), oh, ow

    def forward(self, x):
        cols, oh, ow = self._im2col(x)
        wm = self.w.reshape(self.out_ch, -1)
        out = np.einsum("of,bfp->bop", wm, cols) + self.b[None, :, None]
        self._cache = (x.shape, cols)
        return out.reshape(x.shape[0], self.out_ch, oh, ow)

    def backward(self, grad):
        x_shape, cols = self._cache
        b, c, h, w = x_shape
        k, p = self.kernel, self.pad
        g = grad.reshape(b, self.out_ch, -1)
        self.gw = np.einsum("bop,bfp->of", g, cols).reshape(self.w.shape)
        self.gb = g.sum(axis=(0, 2))
        wm = self.w.reshape(self.out_ch, -1)
        gcols = np.einsum("of,bop->bfp", wm, g).reshape(b, c, k, k, h, w)
        gx = np.zeros((b, c, h + 2 * p, w + 2 * p))
        for i in range(k):
            for j in range(k):
                gx[:, :, i:i + h, j:j + w] += gcols[:, :, i, j]
        return gx[:, :, p:p + h, p:p + w]


class ReLU:
    def params(self):
        return []

    def forward(self, x):
        self._mask = x > 0
        return x * self._mask

    def backward(self, grad):
        return grad * self._mask


class MaxPool2x2:
    """2x2 max pooling, stride 2; odd trailing rows/cols are dropped."""

    def params(self):
        return []

    def forward(self, x):
        b, c, h, w = x.shape
        oh, ow = h // 2, w // 2
        xt = x[:, :, :oh * 2, :ow * 2].reshape(b, c, oh, 2, ow, 2)
        win = xt.transpose(0, 1, 2, 4, 3, 5).reshape(b, c, oh, ow, 4)
        self._argmax = win.argmax(axis=-1)
        self._in_shape = x.shape
        return win.max(axis=-1)

    def backward(self, grad):
        b, c, h, w = self._in_shape
        oh, ow = h // 2, w // 2
        gwin = np.zeros((b, c, oh, ow, 4))
        np.put_along_axis(gwin, self._argmax[..., None], grad[..., None], axis=-1)
        gx = np.zeros((b, c, h, w))
        gx[:, :, :oh * 2, :ow * 2] = (
            gwin.reshape(b, c, oh, ow, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, oh * 2, ow * 2)
        )
        return gx


class Flatten:
    def params(self):
        return []

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)


class Dense:
    def __init__(self, n_in: int, n_out: int):
        self.n_in = n_in
        self.n_out = n_out
        self.w = np.zeros((n_out, n_in))
        self.b = np.zeros(n_out)

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def set_param(self, name, value):
        setattr(self, name, value)

    def forward(self, x):
        self._x = x
        return x @ self.w.T + self.b

    def backward(self, grad):
        self.gw = grad.T @ self._x
        self.gb = grad.sum(axis=0)
        return grad @ self.w


def softmax(logits):
    """Row-wise softmax, numerically shifted."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)
