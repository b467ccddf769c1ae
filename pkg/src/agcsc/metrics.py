"""Clustering evaluation: accuracy under optimal label alignment and NMI."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def _paired(labels_pred, labels_true):
    pred = np.asarray(labels_pred).ravel()
    true = np.asarray(labels_true).ravel()
    if pred.shape != true.shape:
        raise ValueError(f"label lengths differ: {pred.shape[0]} vs {true.shape[0]}")
    if pred.size == 0:
        raise ValueError("labels must be nonempty")
    return pred, true


def contingency_table(labels_pred, labels_true):
    """Count matrix over (predicted cluster, true cluster) pairs.

    Returns (counts, pred_ids, true_ids) with counts[i, j] the number of
    samples in predicted cluster pred_ids[i] and true cluster true_ids[j].
    """
    pred, true = _paired(labels_pred, labels_true)
    pred_ids, pred_idx = np.unique(pred, return_inverse=True)
    true_ids, true_idx = np.unique(true, return_inverse=True)
    counts = np.zeros((pred_ids.size, true_ids.size), dtype=np.int64)
    np.add.at(counts, (pred_idx, true_idx), 1)
    return counts, pred_ids, true_ids


def _max_matches(counts: np.ndarray) -> int:
    if counts.size == 0:
        return 0
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return int(counts[rows, cols].sum())


def optimal_label_map(labels_pred, labels_true) -> dict:
    """Injective map from predicted to true ids maximizing matched samples.

    Computed by optimal assignment on the contingency table. Among
    maximizing assignments, returns the lexicographically smallest one
    (predicted ids in ascending order, each preferring the smallest
    feasible true id, and a real assignment over none). Predicted ids
    left unmatched (possible when there are more predicted than true
    clusters) are absent from the map.
    """
    counts, pred_ids, true_ids = contingency_table(labels_pred, labels_true)
    mapping = {}
    avail = list(range(true_ids.size))
    remaining = _max_matches(counts)
    for i in range(pred_ids.size):
        lower = counts[i + 1 :, avail]
        chosen = None
        for pos, j in enumerate(avail):
            rest = np.delete(lower, pos, axis=1)
            if int(counts[i, j]) + _max_matches(rest) == remaining:
                chosen = pos
                break
        if chosen is not None:
            j = avail.pop(chosen)
            remaining -= int(counts[i, j])
            mapping[int(pred_ids[i])] = int(true_ids[j])
        # else: row i stays unmatched, which is required for optimality
    return mapping


def accuracy(labels_pred, labels_true) -> float:
    """Fraction of samples matched under the optimal label alignment."""
    counts, _, _ = contingency_table(labels_pred, labels_true)
    n = int(counts.sum())
    return _max_matches(counts) / n


def nmi(labels_pred, labels_true) -> float:
    """Mutual information normalized by the geometric mean of entropies.

    Natural logarithms (the base cancels in the ratio). If either
    labeling has zero entropy the ratio is undefined; by convention the
    result is 1.0 when the two partitions are identical and 0.0
    otherwise.
    """
    counts, _, _ = contingency_table(labels_pred, labels_true)
    identical = (np.count_nonzero(counts, axis=0) == 1).all() and (
        np.count_nonzero(counts, axis=1) == 1
    ).all()
    if identical:
        return 1.0
    n = counts.sum()
    p_joint = counts / n
    # marginals from the integer counts so one-cluster sides are exactly 1
    p_pred = counts.sum(axis=1) / n
    p_true = counts.sum(axis=0) / n
    h_pred = -np.sum(p_pred * np.log(p_pred))
    h_true = -np.sum(p_true * np.log(p_true))
    if h_pred <= 0.0 or h_true <= 0.0:
        return 0.0
    nz = p_joint > 0
    outer = np.outer(p_pred, p_true)
    mi = np.sum(p_joint[nz] * np.log(p_joint[nz] / outer[nz]))
    value = mi / np.sqrt(h_pred * h_true)
    return float(min(1.0, max(0.0, value)))
