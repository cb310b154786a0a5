"""Per-channel 2-D DFT, polar decomposition, centering shift, and the
Parseval-based spectral forms of the content loss and the Gram matrix."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from fst.errors import CenteredLayout, LayoutMismatch, NonRealResult, ShapeMismatch
from fst.fft import fft2
from fst.tensor import as_fmap

ZERO_AMPLITUDE = 1e-12
IMAG_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    data: np.ndarray  # complex128, (C, H, W)
    centered: bool = False

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def channels(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class PolarSpectrum:
    amplitude: np.ndarray
    phase: np.ndarray  # in [-pi, pi)
    centered: bool = False


def worker_count() -> int:
    """Thread cap from FST_THREADS (default 1)."""
    raw = os.environ.get("FST_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FST_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"FST_THREADS must be a positive integer, got {raw!r}")
    return n


def _per_channel(fn, x: np.ndarray) -> np.ndarray:
    workers = min(worker_count(), x.shape[0])
    if workers <= 1:
        return fn(x)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, [x[k:k + 1] for k in range(x.shape[0])]))
    return np.concatenate(parts, axis=0)


def dft(f) -> Spectrum:
    f = as_fmap(f)
    return Spectrum(_per_channel(fft2, f.astype(np.complex128)), centered=False)


def idft(s: Spectrum) -> np.ndarray:
    if s.centered:
        raise CenteredLayout("idft needs a natural-layout spectrum; call inverse_shift first")
    z = _per_channel(lambda x: fft2(x, inverse=True), s.data)
    residue = float(np.max(np.abs(z.imag))) if z.size else 0.0
    if residue >= IMAG_RESIDUE_TOL:
        raise NonRealResult(f"inverse transform has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(z.real)


def canonical_phase(z: np.ndarray) -> np.ndarray:
    """atan2 phase mapped into [-pi, pi); zero for zero-amplitude entries."""
    phase = np.arctan2(z.imag, z.real)
    phase = np.where(phase >= np.pi, phase - 2 * np.pi, phase)
    return np.where(z == 0, 0.0, phase)


def decompose(s: Spectrum) -> PolarSpectrum:
    return PolarSpectrum(np.abs(s.data), canonical_phase(s.data), s.centered)


def recompose(p: PolarSpectrum) -> Spectrum:
    a = p.amplitude
    data = a * np.cos(p.phase) + 1j * (a * np.sin(p.phase))
    return Spectrum(data, p.centered)


def phase_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Wrapped angular distance in [0, pi]."""
    d = np.mod(p - q + np.pi, 2 * np.pi) - np.pi
    return np.abs(d)


def _shift(s: Spectrum, direction: int) -> np.ndarray:
    h, w = s.shape[1:]
    # forward moves bin 0 to (h//2, w//2)
    return np.roll(s.data, (direction * (h // 2), direction * (w // 2)), axis=(1, 2))


def center_shift(s: Spectrum) -> Spectrum:
    if s.centered:
        raise LayoutMismatch("spectrum is already centered")
    return Spectrum(_shift(s, 1), centered=True)


def inverse_shift(s: Spectrum) -> Spectrum:
    if not s.centered:
        raise LayoutMismatch("spectrum is not centered")
    return Spectrum(_shift(s, -1), centered=False)


def _check_pair(a: Spectrum, b: Spectrum) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"spectrum shapes differ: {a.shape} vs {b.shape}")
    if a.centered != b.centered:
        raise LayoutMismatch("spectra use different layouts")


def spectral_content_loss(a: Spectrum, b: Spectrum) -> float:
    """Content loss from amplitudes and phase differences via Parseval."""
    _check_pair(a, b)
    pa, pb = decompose(a), decompose(b)
    _, h, w = a.shape
    terms = (pa.amplitude ** 2 + pb.amplitude ** 2
             - 2 * pa.amplitude * pb.amplitude * np.cos(pa.phase - pb.phase))
    return max(float(np.sum(terms)) / (h * w), 0.0)


def spectral_gram(s: Spectrum) -> np.ndarray:
    """Gram matrix of the underlying real map, from amplitude and phase."""
    if s.centered:
        raise CenteredLayout("spectral_gram expects natural layout")
    p = decompose(s)
    c, h, w = s.shape
    amp = p.amplitude.reshape(c, -1)
    ph = p.phase.reshape(c, -1)
    g = np.empty((c, c))
    for i in range(c):
        for j in range(i, c):
            g[i, j] = g[j, i] = np.sum(amp[i] * amp[j] * np.cos(ph[i] - ph[j])) / (h * w)
    return g


def swap_component(a, b, take: str) -> np.ndarray:
    """Rebuild `a` with either the phase or the amplitude of `b`.

    take="phase": |A| with angle(B).  take="amplitude": |B| with angle(A).
    """
    a, b = as_fmap(a), as_fmap(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    pa, pb = decompose(dft(a)), decompose(dft(b))
    if take == "phase":
        mixed = PolarSpectrum(pa.amplitude, pb.phase)
    elif take == "amplitude":
        mixed = PolarSpectrum(pb.amplitude, pa.phase)
    else:
        raise ValueError(f"take must be 'phase' or 'amplitude', got {take!r}")
    return idft(recompose(mixed))


def amplitude_view(f) -> np.ndarray:
    """log(1 + |S|), centered, scaled to [0, 255] per channel."""
    v = np.log1p(np.abs(center_shift(dft(f)).data))
    top = v.reshape(v.shape[0], -1).max(axis=1)[:, None, None]
    scaled = np.where(top > 0, 255.0 * v / np.where(top > 0, top, 1.0), 0.0)
    return np.clip(scaled, 0.0, 255.0)


def phase_view(f) -> np.ndarray:
    """Centered phase mapped linearly from [-pi, pi) to [0, 255)."""
    ph = canonical_phase(center_shift(dft(f)).data)
    return 255.0 * (ph + np.pi) / (2 * np.pi)
