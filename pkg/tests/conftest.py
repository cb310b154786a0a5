import numpy as np
import pytest


def mixed_map(rng, c, h, w, offset=True):
    """Random map with cross-channel correlation (non-diagonal covariance)."""
    mix = rng.standard_normal((c, c)) + 0.5 * np.eye(c)
    f = np.tensordot(mix, rng.standard_normal((c, h, w)), axes=1)
    if offset:
        f = f + rng.standard_normal((c, 1, 1))
    return f


def direct_dft2(x):
    """Literal double sum, one output bin at a time.  Only for tiny inputs."""
    c, h, w = x.shape
    out = np.zeros((c, h, w), dtype=complex)
    for k in range(c):
        for u in range(h):
            for v in range(w):
                acc = 0j
                for hh in range(h):
                    for ww in range(w):
                        acc += x[k, hh, ww] * np.exp(-2j * np.pi * (u * hh / h + v * ww / w))
                out[k, u, v] = acc
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
