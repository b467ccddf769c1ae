"""Graph operators and affinities built from reconstruction coefficients."""

from __future__ import annotations

import numpy as np


def _square(C) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"expected a square coefficient matrix, got shape {C.shape}")
    return C


def gco_from_coefficients(C) -> np.ndarray:
    """Graph convolutional operator S = (C + I)/2.

    For coefficients that are symmetric, nonnegative, zero-diagonal, and
    row-stochastic, this equals the degree-normalized self-loop-augmented
    adjacency, and rows of S sum to 1.
    """
    C = _square(C)
    return (C + np.eye(C.shape[0])) / 2.0


def aggregate_features(S, X) -> np.ndarray:
    """Aggregated sample features S @ X."""
    S = _square(S)
    Xv = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if Xv.ndim != 2 or Xv.shape[0] != S.shape[1]:
        raise ValueError(f"operator {S.shape} and data {Xv.shape} are incompatible")
    return S @ Xv


def affinity_from_coefficients(C) -> np.ndarray:
    """Symmetric nonnegative affinity A = (|C| + |C^T|)/2.

    Fixed point for coefficients that are already symmetric and
    nonnegative: A = C exactly.
    """
    C = _square(C)
    return (np.abs(C) + np.abs(C.T)) / 2.0


def threshold_m_largest(C, m: int) -> np.ndarray:
    """Keep the m largest-magnitude entries of each column, zero the rest.

    Kept entries are preserved bit-exactly; ties at the cutoff keep the
    lower row index. Columns with at most m entries pass unchanged.
    """
    C = _square(C)
    if m < 1:
        raise ValueError("threshold m must be at least 1")
    n = C.shape[0]
    if m >= n:
        return C.copy()
    # stable sort keeps the lower row index first among equal magnitudes
    order = np.argsort(-np.abs(C), axis=0, kind="stable")
    keep = order[:m, :]
    out = np.zeros_like(C)
    cols = np.arange(n)
    out[keep, cols] = C[keep, cols]
    return out


def off_block_energy_fraction(A, labels) -> float:
    """Fraction of affinity mass between samples with different labels.

    Zero for a perfectly block-diagonal affinity under class ordering.
    """
    A = _square(A)
    labels = np.asarray(labels)
    if labels.shape != (A.shape[0],):
        raise ValueError(f"labels shape {labels.shape} does not match affinity {A.shape}")
    total = float(A.sum())
    if total == 0.0:
        return 0.0
    off = labels[:, None] != labels[None, :]
    return float(A[off].sum()) / total
