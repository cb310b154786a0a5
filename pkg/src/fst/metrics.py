"""SSIM, verification-report records and stage timing."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from fst.errors import ShapeMismatch
from fst.tensor import as_fmap

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])
REPORT_VERSION = 1


class TooSmall(ShapeMismatch):
    pass


@dataclass(frozen=True)
class SsimConfig:
    window: int = 11
    stddev: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float | None = 255.0  # None: max - min over both inputs
    luma: bool = True

    def kernel(self) -> np.ndarray:
        x = np.arange(self.window) - (self.window - 1) / 2
        g = np.exp(-(x ** 2) / (2 * self.stddev ** 2))
        g /= g.sum()
        return g


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    k = g.shape[0]
    rows = sliding_window_view(x, k, axis=0) @ g
    return sliding_window_view(rows, k, axis=1) @ g


def ssim_components(a: np.ndarray, b: np.ndarray, cfg: SsimConfig,
                    dynamic_range: float) -> tuple[np.ndarray, np.ndarray]:
    """Luminance and contrast-structure factors of local SSIM (valid windows only)."""
    g = cfg.kernel()
    c1 = (cfg.k1 * dynamic_range) ** 2
    c2 = (cfg.k2 * dynamic_range) ** 2
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    # centre before the second moments so a common offset cancels exactly
    a0 = a - a.mean()
    b0 = b - b.mean()
    ma0, mb0 = _filter_valid(a0, g), _filter_valid(b0, g)
    var_a = _filter_valid(a0 * a0, g) - ma0 ** 2
    var_b = _filter_valid(b0 * b0, g) - mb0 ** 2
    cov = _filter_valid(a0 * b0, g) - ma0 * mb0
    lum = (2 * mu_a * mu_b + c1) / (mu_a ** 2 + mu_b ** 2 + c1)
    cs = (2 * cov + c2) / (var_a + var_b + c2)
    return lum, cs


def ssim_map(a: np.ndarray, b: np.ndarray, cfg: SsimConfig, dynamic_range: float) -> np.ndarray:
    """Local SSIM over valid (unpadded) window positions of two 2-D arrays."""
    lum, cs = ssim_components(a, b, cfg, dynamic_range)
    return lum * cs


def to_luma(f: np.ndarray) -> np.ndarray:
    return np.tensordot(LUMA_WEIGHTS, f, axes=1)


def ssim(a, b, cfg: SsimConfig = SsimConfig()) -> float:
    a, b = as_fmap(a), as_fmap(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    c, h, w = a.shape
    if h < cfg.window or w < cfg.window:
        raise TooSmall(f"SSIM needs at least {cfg.window}x{cfg.window} pixels, got {h}x{w}")
    if cfg.luma:
        if c not in (1, 3):
            raise ShapeMismatch(f"luma SSIM supports 1 or 3 channels, got {c}")
        planes = [(to_luma(a), to_luma(b))] if c == 3 else [(a[0], b[0])]
    else:
        planes = list(zip(a, b))
    if cfg.dynamic_range is None:
        lo = min(a.min(), b.min())
        hi = max(a.max(), b.max())
        rng = hi - lo if hi > lo else 1.0
    else:
        rng = cfg.dynamic_range
    return float(np.mean([ssim_map(pa, pb, cfg, rng).mean() for pa, pb in planes]))


def _finite(x: float) -> float:
    return x if math.isfinite(x) else 1e308


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    detail: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "residual", _finite(float(self.residual)))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "passed", bool(self.residual <= self.tolerance))

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    seed: int = 0
    entries: list[Check] = field(default_factory=list)
    timings: list[tuple[str, float]] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.entries.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[Check]:
        return [e for e in self.entries if not e.passed]

    def timing_map(self) -> dict[str, float]:
        # repeated stages keep every measurement: stage, stage#2, stage#3, ...
        out: dict[str, float] = {}
        seen: dict[str, int] = {}
        for stage, secs in self.timings:
            seen[stage] = seen.get(stage, 0) + 1
            key = stage if seen[stage] == 1 else f"{stage}#{seen[stage]}"
            out[key] = secs
        return out

    def as_dict(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "seed": self.seed,
            "checks": [e.as_dict() for e in self.entries],
            "timings": self.timing_map(),
        }


def timing_probe(stage: str, thunk: Callable[[], Any],
                 report: VerificationReport | None = None) -> tuple[float, Any]:
    t0 = time.perf_counter()
    result = thunk()
    elapsed = time.perf_counter() - t0
    if report is not None:
        report.timings.append((stage, elapsed))
    return elapsed, result
