"""Procedural raw-pixel desk corpus: 20 content/style RGB pairs.

Content images are scenes of flat-shaded shapes over smooth gradients, so
they carry edges and layout.  Style images are colour-correlated textures
(oriented sinusoids plus smoothed noise) with a palette unrelated to the
content.  Everything derives from one seed, so the corpus is reproducible
without shipping image files.
"""

from __future__ import annotations

import numpy as np

CORPUS_SEED = 20240
CORPUS_SIZE = 20
SIDE = 64


def _smooth_noise(rng, h, w, passes=3) -> np.ndarray:
    x = rng.standard_normal((h, w))
    for _ in range(passes):
        x = (x + np.roll(x, 1, 0) + np.roll(x, -1, 0) + np.roll(x, 1, 1) + np.roll(x, -1, 1)) / 5
    return x / (x.std() + 1e-12)


def content_image(rng, h=SIDE, w=SIDE, chroma=0.25) -> np.ndarray:
    """Luminance-driven scene with a modest per-region colour tint.

    Structure lives in a shared luminance layer, so RGB channels are strongly
    positively correlated (about 0.9), as in natural photographs.
    """
    yy, xx = np.mgrid[0:h, 0:w] / np.array([h, w])[:, None, None]
    angle = rng.uniform(0, 2 * np.pi)
    ramp = np.cos(angle) * xx + np.sin(angle) * yy
    lum = rng.uniform(40, 120) + rng.uniform(-60, 60) * ramp
    tint = np.zeros((3, h, w)) + 0.3 * rng.uniform(-1, 1, 3)[:, None, None]
    for _ in range(rng.integers(3, 7)):
        cy, cx = rng.uniform(0.15, 0.85, 2)
        if rng.random() < 0.5:
            r = rng.uniform(0.08, 0.25)
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 < r ** 2
        else:
            hy, hx = rng.uniform(0.05, 0.25, 2)
            mask = (np.abs(yy - cy) < hy) & (np.abs(xx - cx) < hx)
        lum = np.where(mask, rng.uniform(20, 235), lum)
        tint[:, mask] = rng.uniform(-1, 1, 3)[:, None]
    img = lum[None] * (1 + chroma * tint)
    img += 4.0 * rng.standard_normal(img.shape)
    return np.clip(img, 0, 255)


def style_image(rng, h=SIDE, w=SIDE) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w] / np.array([h, w])[:, None, None]
    fields = []
    for _ in range(3):
        k = rng.uniform(4, 14)
        theta = rng.uniform(0, np.pi)
        wave = np.sin(2 * np.pi * k * (np.cos(theta) * xx + np.sin(theta) * yy) + rng.uniform(0, 6.3))
        fields.append(0.6 * wave + _smooth_noise(rng, h, w))
    fields = np.stack(fields)
    mix = rng.standard_normal((3, 3))
    tex = np.tensordot(mix, fields, axes=1)
    tex /= np.abs(tex).max() + 1e-12
    center = rng.uniform(60, 195, 3)[:, None, None]
    spread = rng.uniform(30, 60)
    return np.clip(center + spread * tex, 0, 255)


def desk_corpus(n: int = CORPUS_SIZE, seed: int = CORPUS_SEED) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    return [(content_image(rng), style_image(rng)) for _ in range(n)]
