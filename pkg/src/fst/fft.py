"""Arbitrary-length FFT along the last axis.

Power-of-two lengths use a vectorized radix-2 decimation-in-time transform;
every other length goes through Bluestein's chirp-z algorithm, which embeds
the length-n DFT in a power-of-two circular convolution.
"""

from __future__ import annotations

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _radix2(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    lead = x.shape[:-1]
    # rows index the already-transformed sub-DFT bins, columns the interleaved sub-sequences
    X = x.reshape(lead + (1, n))
    while X.shape[-2] < n:
        half = X.shape[-1] // 2
        even = X[..., :half]
        odd = X[..., half:]
        m = X.shape[-2]
        tw = np.exp(-1j * np.pi * np.arange(m) / m)[:, None]
        X = np.concatenate([even + tw * odd, even - tw * odd], axis=-2)
    return X.reshape(lead + (n,))


def _chirp(n: int) -> np.ndarray:
    k = np.arange(n, dtype=np.int64)
    # reduce k^2 mod 2n before scaling so the phase stays exact for large k
    return np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)


def _bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    m = 1 << (2 * n - 2).bit_length()
    w = _chirp(n)
    a = np.zeros(x.shape[:-1] + (m,), dtype=np.complex128)
    a[..., :n] = x * w
    b = np.zeros(m, dtype=np.complex128)
    b[:n] = np.conj(w)
    b[m - n + 1:] = np.conj(w[1:][::-1])
    conv = _ifft_pow2(_radix2(a) * _radix2(b))
    return conv[..., :n] * w


def _ifft_pow2(X: np.ndarray) -> np.ndarray:
    return np.conj(_radix2(np.conj(X))) / X.shape[-1]


def fft(x, inverse: bool = False) -> np.ndarray:
    """DFT (or inverse DFT, scaled by 1/n) of `x` along its last axis."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if inverse:
        return np.conj(fft(np.conj(x))) / n
    if n == 1:
        return x.copy()
    if _is_pow2(n):
        return _radix2(x)
    return _bluestein(x)


def fft2(x, inverse: bool = False) -> np.ndarray:
    """2-D transform over the last two axes."""
    y = fft(x, inverse=inverse)
    y = np.swapaxes(y, -1, -2)
    y = fft(y, inverse=inverse)
    return np.ascontiguousarray(np.swapaxes(y, -1, -2))


def dft_matrix(n: int) -> np.ndarray:
    k = np.arange(n, dtype=np.int64)
    return np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)


def naive_dft2(x) -> np.ndarray:
    """O((HW)^2) direct summation, kept as a reference oracle."""
    x = np.asarray(x, dtype=np.complex128)
    h, w = x.shape[-2:]
    eh, ew = dft_matrix(h), dft_matrix(w)
    return eh @ x @ ew.T
