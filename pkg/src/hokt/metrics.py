"""Partition quality measures: modularity, NMI, weighted multi-snapshot NMI,
pair-counting F1 and the rank-sum significance test.

The ``*_many`` kernels evaluate a whole population at once. They take a
``(P, n)`` matrix of local community labels (values in ``0..n-1``), which
is what :func:`hokt.engine.decode_many` produces. The scalar functions are
thin wrappers over the same kernels so both paths share one formula.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import ConfigError, InputError, MetricError
from .graph import Partition, SnapshotGraph


class ObjectiveVector(NamedTuple):
    q: float
    smooth: float


class ConfusionMatrix(NamedTuple):
    counts: np.ndarray
    row_labels: np.ndarray
    col_labels: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def modularity_many(graph: SnapshotGraph, labels: np.ndarray) -> np.ndarray:
    """Modularity of each row of ``labels`` (local label matrix, shape ``(P, n)``)."""
    labels = np.atleast_2d(labels)
    m = graph.m
    if m == 0:
        raise MetricError("modularity is undefined for a graph with no edges")
    P, n = labels.shape
    eu, ev = graph.local_edges[:, 0], graph.local_edges[:, 1]
    inside = (labels[:, eu] == labels[:, ev]).sum(axis=1)
    keys = labels + (np.arange(P, dtype=np.int64) * n)[:, None]
    dsum = np.bincount(keys.ravel(), weights=np.tile(graph.degree.astype(np.float64), P), minlength=P * n)
    dsum = dsum.reshape(P, n)
    return inside / m - (dsum * dsum).sum(axis=1) / (4.0 * m * m)


def _dense_codes(labels: np.ndarray) -> np.ndarray:
    return np.unique(labels, return_inverse=True)[1].reshape(-1)


def modularity(graph: SnapshotGraph, part: Partition) -> float:
    codes = _dense_codes(part.labels_for(graph.nodes))
    return float(modularity_many(graph, codes[None, :])[0])


def confusion(a: Partition, b: Partition, nodes: Sequence[int] | np.ndarray) -> ConfusionMatrix:
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size == 0:
        raise InputError("confusion matrix needs a nonempty node set")
    la, lb = a.labels_for(nodes), b.labels_for(nodes)
    ra, ia = np.unique(la, return_inverse=True)
    rb, ib = np.unique(lb, return_inverse=True)
    counts = np.zeros((ra.size, rb.size), dtype=np.int64)
    np.add.at(counts, (ia.reshape(-1), ib.reshape(-1)), 1)
    return ConfusionMatrix(counts, ra, rb)


def nmi_many(labels: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """NMI of every row of ``labels`` against one reference labeling.

    ``labels`` has shape ``(P, k)`` with non-negative integer labels,
    ``reference`` has shape ``(k,)``. Uses natural logs and 0 log 0 = 0.
    When both labelings are a single community the ratio is 0/0 and the
    result is defined as 1.
    """
    labels = np.atleast_2d(np.asarray(labels, dtype=np.int64))
    P, k = labels.shape
    if k == 0:
        raise InputError("NMI needs a nonempty node set")
    ref = _dense_codes(np.asarray(reference))
    c = int(ref.max()) + 1
    N = float(k)
    col = np.bincount(ref, minlength=c).astype(np.float64)
    span = int(labels.max()) + 1 if labels.size else 1
    row_key = labels + (np.arange(P, dtype=np.int64) * span)[:, None]
    rkeys, rcounts = np.unique(row_key, return_counts=True)
    cell_key = row_key * c + ref[None, :]
    ckeys, ccounts = np.unique(cell_key, return_counts=True)
    cell_row = np.searchsorted(rkeys, ckeys // c)
    ci = rcounts[cell_row].astype(np.float64)
    cj = col[ckeys % c]
    cij = ccounts.astype(np.float64)
    owner_cell = ckeys // c // span
    owner_row = rkeys // span
    numer = -2.0 * np.bincount(owner_cell, weights=cij * np.log(cij * N / (ci * cj)), minlength=P)
    rc = rcounts.astype(np.float64)
    denom = np.bincount(owner_row, weights=rc * np.log(rc / N), minlength=P) + float(np.sum(col * np.log(col / N)))
    out = np.ones(P)
    nz = denom != 0.0
    out[nz] = numer[nz] / denom[nz]
    return np.clip(out, 0.0, 1.0)


def nmi(a: Partition, b: Partition, nodes: Sequence[int] | np.ndarray | None = None) -> float:
    if nodes is None:
        nodes = np.intersect1d(a.nodes, b.nodes)
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size == 0:
        raise InputError("NMI needs a nonempty node set")
    la = _dense_codes(a.labels_for(nodes))
    return float(nmi_many(la[None, :], b.labels_for(nodes))[0])


def check_weights(weights: Sequence[float]) -> None:
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise ConfigError("weight vector is empty")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ConfigError(f"weights must be finite and non-negative: {list(weights)}")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise ConfigError(f"weights must sum to 1, got {float(w.sum())!r}")


def honmi(
    current: Partition,
    history: Sequence[Partition],
    weights: Sequence[float],
    node_sets: Sequence[np.ndarray] | None = None,
) -> float:
    """Weighted NMI of ``current`` against past partitions, most recent first.

    ``node_sets[j]`` defaults to the nodes shared by ``current`` and
    ``history[j]``.
    """
    if len(history) == 0:
        raise ConfigError("history is empty")
    if len(weights) != len(history):
        raise ConfigError(f"{len(weights)} weights for {len(history)} past partitions")
    check_weights(weights)
    total = 0.0
    for j, (past, w) in enumerate(zip(history, weights)):
        nodes = None if node_sets is None else node_sets[j]
        total += float(w) * nmi(current, past, nodes)
    return total


def f1_score(pred: Partition, truth: Partition, nodes: Sequence[int] | np.ndarray | None = None) -> float:
    """Pair-counting F1: harmonic mean of pair precision and pair recall."""
    if nodes is None:
        nodes = truth.nodes
    cm = confusion(pred, truth, nodes).counts.astype(np.float64)

    def pairs(x):
        return float(np.sum(x * (x - 1) / 2.0))

    tp = pairs(cm)
    pred_pairs = pairs(cm.sum(axis=1))
    truth_pairs = pairs(cm.sum(axis=0))
    fp, fn = pred_pairs - tp, truth_pairs - tp
    if pred_pairs == 0 and truth_pairs == 0:
        return 1.0
    return 2.0 * tp / (2.0 * tp + fp + fn)


def rank_sum_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, float]:
    """Two-sided rank-sum test, normal approximation with tie and continuity correction.

    Returns ``(U, p)`` where ``U`` is the Mann-Whitney statistic of ``sample_a``.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 5 or b.size < 5:
        raise InputError(f"rank-sum test needs at least 5 values per sample, got {a.size} and {b.size}")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return float(a.size * b.size / 2.0), 1.0
    res = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
    return float(res.statistic), float(min(1.0, res.pvalue))
