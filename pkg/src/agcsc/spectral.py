"""Normalized-cuts-style spectral clustering on affinity matrices.

Embeds samples with the leading eigenvectors of the symmetrically
degree-normalized affinity D^{-1/2} A D^{-1/2}, row-normalizes, and
clusters the embedding with a deterministic k-means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

_ZERO_ROW_ATOL = 1e-12


@dataclass(frozen=True)
class SpectralEmbedding:
    """Row-normalized leading eigenvectors of the normalized affinity.

    vectors is n-by-k with unit-norm rows except the flagged zero_rows,
    which were numerically zero before normalization and are left as
    zeros; eigenvalues are the k largest, in descending order.
    """

    vectors: np.ndarray
    eigenvalues: np.ndarray
    zero_rows: np.ndarray


def ncuts_embedding(A, k: int) -> SpectralEmbedding:
    """Spectral embedding of a symmetric nonnegative affinity.

    Computes N = D^{-1/2} A D^{-1/2} with D = diag(A1) (zero degrees are
    treated as 1 so isolated vertices embed to zero rows), takes the k
    eigenvectors of largest eigenvalue, and row-normalizes.

    Raises
    ------
    ValueError
        If k is outside [1, n], or A is asymmetric beyond 1e-12
        (rejected rather than silently symmetrized).
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square affinity, got shape {A.shape}")
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cluster count k={k} must lie in [1, {n}]")
    skew = float(np.max(np.abs(A - A.T))) if n else 0.0
    if skew > 1e-12:
        raise ValueError(f"affinity must be symmetric: max |A - A^T| = {skew:.3e}")
    degrees = A.sum(axis=1)
    degrees = np.where(degrees > 0.0, degrees, 1.0)
    dinv = 1.0 / np.sqrt(degrees)
    N = dinv[:, None] * A * dinv[None, :]
    eigvals, eigvecs = scipy.linalg.eigh(N, subset_by_index=[n - k, n - 1])
    eigvals = eigvals[::-1]
    vectors = eigvecs[:, ::-1].copy()
    norms = np.linalg.norm(vectors, axis=1)
    zero_rows = np.flatnonzero(norms <= _ZERO_ROW_ATOL)
    safe = np.where(norms > _ZERO_ROW_ATOL, norms, 1.0)
    vectors /= safe[:, None]
    vectors[zero_rows] = 0.0
    return SpectralEmbedding(vectors=vectors, eigenvalues=eigvals, zero_rows=zero_rows)


def _restart_rng(seed, restart: int) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        entropy = [int(seed), restart]
    else:
        entropy = [*(int(s) for s in seed), restart]
    return np.random.default_rng(entropy)


def _pairwise_sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(points * points, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _seed_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-weighted seeding: each new center is drawn with probability
    proportional to the squared distance from the nearest chosen center."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = points[idx]
        np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1), out=d2)
    return centers


def _lloyd_once(points, k, rng, max_iter, tol):
    """One seeded Lloyd run; returns (labels, objective, per-iteration objectives)."""
    n = points.shape[0]
    centers = _seed_centers(points, k, rng)
    history = []
    prev = np.inf
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _pairwise_sq_dists(points, centers)
        labels = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(n), labels].sum())
        history.append(inertia)
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = points[mask].mean(axis=0)
            else:
                # re-seed an emptied cluster at the worst-assigned point
                centers[j] = points[int(np.argmax(d2[np.arange(n), labels]))]
        if prev - inertia <= tol * max(abs(prev), 1.0) and np.isfinite(prev):
            break
        prev = inertia
    d2 = _pairwise_sq_dists(points, centers)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return labels, inertia, history


def kmeans(points, k: int, seed, restarts: int = 20, max_iter: int = 300, tol: float = 1e-9) -> np.ndarray:
    """Deterministic k-means: best of ``restarts`` seeded Lloyd runs.

    The winner is the run with the smallest within-cluster sum of
    squares; ties go to the lowest restart index. Fully determined by
    ``seed``.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError(f"expected 2-d points, got shape {points.shape}")
    if not 1 <= k <= points.shape[0]:
        raise ValueError(f"cluster count k={k} must lie in [1, {points.shape[0]}]")
    if restarts < 1:
        raise ValueError("need at least one restart")
    best_labels, best_inertia = None, np.inf
    for restart in range(restarts):
        labels, inertia, _ = _lloyd_once(points, k, _restart_rng(seed, restart), max_iter, tol)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def cluster_affinity(A, k: int, seed, restarts: int = 20) -> np.ndarray:
    """Cluster an affinity matrix: spectral embedding followed by k-means."""
    embedding = ncuts_embedding(A, k)
    return kmeans(embedding.vectors, k, seed, restarts=restarts)
