"""Symmetric eigendecomposition and PSD matrix roots with eigen-truncation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fst.errors import NoConvergence, NotPSD, ZeroMatrix

PSD_TOL = 1e-9
DEFAULT_CUTOFF = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray  # descending
    vectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def symmetrize(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return 0.5 * (m + m.T)


def eig_sym(m) -> EigenDecomposition:
    """Eigenpairs in descending order with a fixed sign convention: the
    largest-magnitude entry of every eigenvector is positive."""
    m = symmetrize(m)
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    vals, vecs = vals[::-1], vecs[:, ::-1]
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return EigenDecomposition(vals.copy(), np.ascontiguousarray(vecs * signs))


def _psd_eig(m) -> EigenDecomposition:
    e = eig_sym(m)
    top = e.values[0] if e.values.size else 0.0
    low = e.values[-1] if e.values.size else 0.0
    if low < -PSD_TOL * max(top, 0.0) or (top <= 0 and low < 0):
        raise NotPSD(f"smallest eigenvalue {low:.3e} vs largest {top:.3e}")
    return e


def _from_eig(e: EigenDecomposition, vals: np.ndarray) -> np.ndarray:
    return symmetrize((e.vectors * vals) @ e.vectors.T)


def sqrt_psd(m, rel_cutoff: float | None = None) -> np.ndarray:
    """PSD square root.  With `rel_cutoff`, eigenvalues dropped by
    inv_sqrt_psd are zeroed here too, so both roots share one eigenspace."""
    e = _psd_eig(m)
    vals = np.sqrt(np.maximum(e.values, 0.0))
    if rel_cutoff is not None:
        vals[~retained_mask(e.values, rel_cutoff)] = 0.0
    return _from_eig(e, vals)


def retained_mask(values: np.ndarray, rel_cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    top = values[0]
    if top < 1e-300:
        raise ZeroMatrix(f"largest eigenvalue {top:.3e} is numerically zero")
    return values >= rel_cutoff * top


def inv_sqrt_psd(m, rel_cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Pseudo-inverse square root; eigenvalues below rel_cutoff * max are dropped."""
    e = _psd_eig(m)
    keep = retained_mask(e.values, rel_cutoff)
    inv = np.zeros_like(e.values)
    inv[keep] = 1.0 / np.sqrt(e.values[keep])
    return _from_eig(e, inv)


def retained_projector(m, rel_cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Orthogonal projector onto the eigenspace kept by inv_sqrt_psd."""
    e = _psd_eig(m)
    keep = retained_mask(e.values, rel_cutoff)
    v = e.vectors[:, keep]
    return symmetrize(v @ v.T)


def effective_rank(m, rel_cutoff: float = DEFAULT_CUTOFF) -> int:
    e = _psd_eig(m)
    return int(np.count_nonzero(retained_mask(e.values, rel_cutoff)))
