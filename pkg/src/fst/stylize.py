"""Transformation matrices for AdaIN, WCT, OptimalWCT and a Gram-loss
optimizer, the shared affine framework in both domains, and the phase
replacement / frequency combination manipulations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fst import linalg
from fst.errors import ChannelMismatch, DegenerateChannel, LayoutMismatch, ShapeMismatch
from fst.metrics import Check
from fst.spectral import (
    ZERO_AMPLITUDE,
    Spectrum,
    canonical_phase,
    center_shift,
    decompose,
    dft,
    idft,
    inverse_shift,
    phase_distance,
)
from fst.tensor import ChannelStats, as_fmap, channel_stats

METHODS = ("adain", "wct", "optimal", "gram-opt")
METHOD_TAGS = {"adain": "AdaIN", "wct": "WCT", "optimal": "OptimalWCT", "gram-opt": "GramOpt"}


@dataclass(frozen=True)
class StyleTransform:
    t: np.ndarray
    mu_c: np.ndarray
    mu_s: np.ndarray
    method: str
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.mu_c))
                and np.all(np.isfinite(self.mu_s))):
            raise ValueError("style transform has non-finite entries")

    @property
    def channels(self) -> int:
        return self.t.shape[0]

    def is_positive_diagonal(self) -> bool:
        off = self.t - np.diag(np.diag(self.t))
        return bool(np.all(off == 0) and np.all(np.diag(self.t) > 0))


def _check_channels(a: ChannelStats, b: ChannelStats) -> None:
    if a.channels != b.channels:
        raise ChannelMismatch(f"channel counts differ: {a.channels} vs {b.channels}")


def build_adain(stats_c: ChannelStats, stats_s: ChannelStats) -> StyleTransform:
    _check_channels(stats_c, stats_s)
    var_c = np.diag(stats_c.cov)
    var_s = np.diag(stats_s.cov)
    bad = np.flatnonzero(var_c <= 1e-12)
    if bad.size:
        raise DegenerateChannel(f"content channel(s) {bad.tolist()} have (near) zero variance")
    # standard-deviation ratio: matches per-channel variance, not just scale
    t = np.diag(np.sqrt(var_s / var_c))
    return StyleTransform(t, stats_c.mean, stats_s.mean, "AdaIN")


def build_wct(stats_c: ChannelStats, stats_s: ChannelStats,
              rel_cutoff: float = linalg.DEFAULT_CUTOFF) -> StyleTransform:
    _check_channels(stats_c, stats_s)
    t = linalg.sqrt_psd(stats_s.cov) @ linalg.inv_sqrt_psd(stats_c.cov, rel_cutoff)
    rank = linalg.effective_rank(stats_c.cov, rel_cutoff)
    return StyleTransform(t, stats_c.mean, stats_s.mean, "WCT", {"rank": rank})


def build_optimal_wct(stats_c: ChannelStats, stats_s: ChannelStats,
                      rel_cutoff: float = linalg.DEFAULT_CUTOFF) -> StyleTransform:
    _check_channels(stats_c, stats_s)
    rank = linalg.effective_rank(stats_c.cov, rel_cutoff)
    if rank < stats_c.channels:
        warnings.warn(f"content covariance truncated to rank {rank} of {stats_c.channels}",
                      RuntimeWarning, stacklevel=2)
    root_c = linalg.sqrt_psd(stats_c.cov, rel_cutoff)
    inv_root_c = linalg.inv_sqrt_psd(stats_c.cov, rel_cutoff)
    middle = linalg.sqrt_psd(linalg.symmetrize(root_c @ stats_s.cov @ root_c))
    t = linalg.symmetrize(inv_root_c @ middle @ inv_root_c)
    return StyleTransform(t, stats_c.mean, stats_s.mean, "OptimalWCT", {"rank": rank})


def gram_objective(t: np.ndarray, cov_c: np.ndarray, cov_s: np.ndarray) -> float:
    r = t @ cov_c @ t.T - cov_s
    return float(np.sum(r * r))


def build_gram_opt(f_c, f_s, max_iters: int = 5000, tol: float = 1e-10) -> StyleTransform:
    """Gradient descent on ||T Sc T^T - Ss||_F^2 from T = I with Armijo backtracking.

    Stops once the objective drops below tol * ||Ss||_F^2.  A stalled line
    search is not an error: the best iterate is returned with
    info["no_descent"] set.
    """
    stats_c, stats_s = channel_stats(f_c), channel_stats(f_s)
    _check_channels(stats_c, stats_s)
    cov_c, cov_s = stats_c.cov, stats_s.cov
    c = cov_c.shape[0]
    t = np.eye(c)
    r = t @ cov_c @ t.T - cov_s
    g = float(np.sum(r * r))
    scale = float(np.linalg.norm(cov_s))
    target = tol * scale ** 2
    step = None
    stalled = False
    it = 0
    while g >= target and it < max_iters:
        grad = 4.0 * r @ t @ cov_c
        gnorm2 = float(np.sum(grad * grad))
        if gnorm2 == 0.0:
            stalled = True
            break
        if step is None:
            base = scale if scale > 0 else float(np.linalg.norm(cov_c))
            step = 1e-2 * base / np.sqrt(gnorm2)
        else:
            step *= 2.0
        for _ in range(61):
            cand = t - step * grad
            r_new = cand @ cov_c @ cand.T - cov_s
            g_new = float(np.sum(r_new * r_new))
            if g_new <= g - 1e-4 * step * gnorm2:
                break
            step *= 0.5
        else:
            stalled = True
            break
        t, r, g = cand, r_new, g_new
        it += 1
    info = {
        "iterations": it,
        "objective": g,
        "target": target,
        "converged": g < target,
        "no_descent": stalled,
    }
    return StyleTransform(t, stats_c.mean, stats_s.mean, "GramOpt", info)


def build_transform(method: str, f_c, f_s, rel_cutoff: float = linalg.DEFAULT_CUTOFF,
                    max_iters: int = 5000, tol: float = 1e-10) -> StyleTransform:
    if method == "gram-opt":
        return build_gram_opt(f_c, f_s, max_iters=max_iters, tol=tol)
    stats_c, stats_s = channel_stats(f_c), channel_stats(f_s)
    if method == "adain":
        return build_adain(stats_c, stats_s)
    if method == "wct":
        return build_wct(stats_c, stats_s, rel_cutoff)
    if method == "optimal":
        return build_optimal_wct(stats_c, stats_s, rel_cutoff)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def apply_spatial(f_c, xf: StyleTransform) -> np.ndarray:
    f_c = as_fmap(f_c)
    c = f_c.shape[0]
    if c != xf.channels:
        raise ChannelMismatch(f"map has {c} channels, transform expects {xf.channels}")
    x = f_c.reshape(c, -1) - xf.mu_c[:, None]
    out = xf.t @ x + xf.mu_s[:, None]
    return out.reshape(f_c.shape)


def apply_frequency(spec_c: Spectrum, spec_s: Spectrum, xf: StyleTransform) -> Spectrum:
    """Apply T to every non-zero frequency of the content spectrum and take the
    zero-frequency bin from the style spectrum, rescaled to the content size."""
    if spec_c.centered or spec_s.centered:
        raise LayoutMismatch("apply_frequency expects natural-layout spectra")
    c, hc, wc = spec_c.shape
    cs, hs, ws = spec_s.shape
    if c != cs or c != xf.channels:
        raise ChannelMismatch(f"channel counts differ: content {c}, style {cs}, T {xf.channels}")
    out = np.tensordot(xf.t, spec_c.data, axes=1)
    out[:, 0, 0] = (hc * wc) / (hs * ws) * spec_s.data[:, 0, 0]
    return Spectrum(out, centered=False)


def phase_replace(target: Spectrum, phase_source: Spectrum) -> Spectrum:
    """Keep the amplitude of `target`, take the phase of `phase_source`."""
    if target.shape != phase_source.shape:
        raise ShapeMismatch(f"spectrum shapes differ: {target.shape} vs {phase_source.shape}")
    if target.centered != phase_source.centered:
        raise LayoutMismatch("spectra use different layouts")
    amp = np.abs(target.data)
    phase = canonical_phase(phase_source.data)
    out = amp * np.cos(phase) + 1j * (amp * np.sin(phase))
    out = np.where(amp > ZERO_AMPLITUDE, out, target.data)
    return Spectrum(out, target.centered)


@dataclass(frozen=True)
class FrequencyWeight:
    """Gaussian weight exp(-d^2 / sigma) around the centered zero frequency,
    or a constant scalar blend when `constant` is given.

    Offsets are normalized by the grid size unless `raw_index` is set.
    """

    sigma: float | None = None
    constant: float | None = None
    raw_index: bool = False

    def __post_init__(self):
        if (self.sigma is None) == (self.constant is None):
            raise ValueError("give exactly one of sigma or constant")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.constant is not None and not 0.0 <= self.constant <= 1.0:
            raise ValueError(f"constant weight must lie in [0, 1], got {self.constant}")

    def grid(self, h: int, w: int) -> np.ndarray:
        if self.constant is not None:
            return np.full((h, w), float(self.constant))
        du = np.arange(h) - h // 2
        dv = np.arange(w) - w // 2
        if not self.raw_index:
            du = du / h
            dv = dv / w
        d2 = du[:, None] ** 2 + dv[None, :] ** 2
        return np.exp(-d2 / self.sigma)


def frequency_combine(spec_cs: Spectrum, spec_c: Spectrum, w: FrequencyWeight) -> Spectrum:
    if spec_cs.shape != spec_c.shape:
        raise ShapeMismatch(f"spectrum shapes differ: {spec_cs.shape} vs {spec_c.shape}")
    if not (spec_cs.centered and spec_c.centered):
        raise LayoutMismatch("frequency_combine expects centered spectra")
    alpha = w.grid(*spec_cs.shape[1:])
    return Spectrum(alpha * spec_cs.data + (1.0 - alpha) * spec_c.data, centered=True)


def phase_deviation(xf: StyleTransform, spec_c: Spectrum, min_amplitude: float = 1e-9):
    """Max and mean wrapped phase change T introduces at non-zero frequencies."""
    if spec_c.centered:
        raise LayoutMismatch("phase_deviation expects a natural-layout spectrum")
    out = np.tensordot(xf.t, spec_c.data, axes=1)
    mask = np.abs(spec_c.data) > min_amplitude
    mask[:, 0, 0] = False
    if not mask.any():
        return 0.0, 0.0
    d = phase_distance(canonical_phase(out), canonical_phase(spec_c.data))[mask]
    return float(d.max()), float(d.mean())


def verify_phase_preservation(xf: StyleTransform, spec_c: Spectrum) -> Check:
    worst, mean = phase_deviation(xf, spec_c)
    detail = f"max={worst:.3e} mean={mean:.3e}"
    if xf.is_positive_diagonal():
        return Check("phase_preservation", worst, 1e-9, detail)
    # mixing transforms are expected to disturb phase: report the shortfall below 1e-3
    return Check("phase_disturbance", max(0.0, 1e-3 - worst), 0.0, detail)


@dataclass
class PipelineResult:
    output: np.ndarray
    transform: StyleTransform
    stylized: np.ndarray  # before any phase / frequency manipulation
    spectrum: Spectrum | None = None


def run_pipeline(f_c, f_s, method: str = "wct", domain: str = "frequency",
                 phase_replacement: bool = False, weight: FrequencyWeight | None = None,
                 rel_cutoff: float = linalg.DEFAULT_CUTOFF, max_iters: int = 5000,
                 tol: float = 1e-10, xf: StyleTransform | None = None) -> PipelineResult:
    """Stylize, then optionally phase-replace and frequency-combine.

    Order: stylize -> phase replacement -> center shift -> combine ->
    inverse shift -> inverse DFT.
    """
    f_c, f_s = as_fmap(f_c), as_fmap(f_s)
    if domain not in ("spatial", "frequency"):
        raise ValueError(f"unknown domain {domain!r}")
    if xf is None:
        xf = build_transform(method, f_c, f_s, rel_cutoff, max_iters, tol)
    needs_freq = domain == "frequency" or phase_replacement or (
        weight is not None and weight.constant is None)
    if not needs_freq:
        out = stylized = apply_spatial(f_c, xf)
        if weight is not None:
            out = linear_blend(stylized, f_c, weight.constant)
        return PipelineResult(out, xf, stylized)

    spec_c = dft(f_c)
    if domain == "frequency":
        spec_cs = apply_frequency(spec_c, dft(f_s), xf)
        stylized = idft(spec_cs)
    else:
        stylized = apply_spatial(f_c, xf)
        spec_cs = dft(stylized)
    if phase_replacement:
        spec_cs = phase_replace(spec_cs, spec_c)
    if weight is not None:
        spec_cs = inverse_shift(frequency_combine(center_shift(spec_cs), center_shift(spec_c), weight))
    return PipelineResult(idft(spec_cs), xf, stylized, spec_cs)


def linear_blend(f_cs, f_c, alpha: float) -> np.ndarray:
    return alpha * as_fmap(f_cs) + (1.0 - alpha) * as_fmap(f_c)
