"""Channel statistics and spatial-domain losses on C x H x W feature maps.

Feature maps are plain float64 numpy arrays of shape (C, H, W).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fst.errors import ChannelMismatch, ShapeMismatch


def as_fmap(f) -> np.ndarray:
    """Validate and coerce to a contiguous float64 (C, H, W) array."""
    a = np.ascontiguousarray(f, dtype=np.float64)
    if a.ndim != 3 or min(a.shape) < 1:
        raise ShapeMismatch(f"expected a non-empty C x H x W tensor, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("feature map contains non-finite values")
    return a


@dataclass(frozen=True)
class ChannelStats:
    mean: np.ndarray  # (C,)
    cov: np.ndarray  # (C, C), population-normalized

    @property
    def channels(self) -> int:
        return self.mean.shape[0]


def channel_stats(f) -> ChannelStats:
    f = as_fmap(f)
    c = f.shape[0]
    x = f.reshape(c, -1)
    n = x.shape[1]
    mean = x.sum(axis=1) / n
    xc = x - mean[:, None]
    cov = (xc @ xc.T) / n
    cov = 0.5 * (cov + cov.T)
    return ChannelStats(mean=mean, cov=cov)


def gram_matrix(f) -> np.ndarray:
    """Uncentered, un-normalized Gram matrix F F^T over flattened pixels."""
    f = as_fmap(f)
    x = f.reshape(f.shape[0], -1)
    g = x @ x.T
    return 0.5 * (g + g.T)


def content_loss(a, b) -> float:
    a, b = as_fmap(a), as_fmap(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sum(d * d))


def gram_loss(a, b) -> float:
    a, b = as_fmap(a), as_fmap(b)
    if a.shape[0] != b.shape[0]:
        raise ChannelMismatch(f"channel counts differ: {a.shape[0]} vs {b.shape[0]}")
    d = gram_matrix(a) - gram_matrix(b)
    return float(np.sum(d * d))
