"""Snapshot and dynamic-network data model.

Node ids are dense non-negative integers shared by every snapshot of a
network. A snapshot may contain only a subset of them (node churn), so each
``SnapshotGraph`` keeps its own sorted ``nodes`` array and a local CSR
adjacency indexed by position in that array. Genotypes and the batched
metric kernels work in this local index space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import InputError


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Partition:
    """Disjoint node -> community-label assignment.

    Labels are arbitrary integers; two partitions compare equal when they
    cover the same nodes with the same labels (use :meth:`canonical` to
    compare up to relabeling).
    """

    __slots__ = ("nodes", "labels")

    def __init__(self, nodes: Iterable[int], labels: Iterable[int]):
        nodes = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64)
        labels = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels, dtype=np.int64)
        if nodes.shape != labels.shape or nodes.ndim != 1:
            raise InputError("nodes and labels must be 1-d arrays of equal length")
        order = np.argsort(nodes, kind="stable")
        nodes, labels = nodes[order], labels[order]
        if nodes.size and np.any(np.diff(nodes) == 0):
            raise InputError("a node appears more than once in partition")
        self.nodes = _frozen(nodes.copy())
        self.labels = _frozen(labels.copy())

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "Partition":
        items = sorted(mapping.items())
        return cls([k for k, _ in items], [v for _, v in items])

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]]) -> "Partition":
        nodes, labels = [], []
        for label, members in enumerate(communities):
            for v in members:
                nodes.append(v)
                labels.append(label)
        return cls(nodes, labels)

    def __len__(self) -> int:
        return int(self.nodes.size)

    def __contains__(self, node: int) -> bool:
        i = np.searchsorted(self.nodes, node)
        return bool(i < self.nodes.size and self.nodes[i] == node)

    def __getitem__(self, node: int) -> int:
        return int(self.labels_for([node])[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes) and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.nodes.tobytes(), self.labels.tobytes()))

    def __repr__(self) -> str:
        return f"Partition(n={len(self)}, communities={self.n_communities})"

    @property
    def n_communities(self) -> int:
        return int(np.unique(self.labels).size)

    def labels_for(self, nodes: Sequence[int] | np.ndarray) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        idx = np.searchsorted(self.nodes, nodes)
        ok = idx < self.nodes.size
        ok[ok] = self.nodes[idx[ok]] == nodes[ok]
        if not ok.all():
            missing = nodes[~ok][:5].tolist()
            raise InputError(f"partition does not cover node(s) {missing}")
        return self.labels[idx]

    def restrict(self, nodes: Sequence[int] | np.ndarray) -> "Partition":
        nodes = np.asarray(nodes, dtype=np.int64)
        return Partition(nodes, self.labels_for(nodes))

    def canonical(self) -> "Partition":
        """Relabel every community by its smallest member id."""
        uniq, inv = np.unique(self.labels, return_inverse=True)
        first = np.full(uniq.size, np.iinfo(np.int64).max)
        np.minimum.at(first, inv, self.nodes)
        return Partition(self.nodes, first[inv])

    def communities(self) -> list[list[int]]:
        canon = self.canonical()
        out: dict[int, list[int]] = {}
        for v, c in zip(canon.nodes.tolist(), canon.labels.tolist()):
            out.setdefault(c, []).append(v)
        return [out[k] for k in sorted(out)]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.nodes.tolist(), self.labels.tolist()))


class SnapshotGraph:
    """Undirected simple graph of one timestep. Immutable after construction.

    ``edges`` holds global node ids with ``u < v``, sorted lexicographically.
    ``indptr``/``indices`` form a CSR adjacency over local indices
    (positions in ``nodes``); neighbor lists are sorted.
    """

    __slots__ = ("nodes", "edges", "local_edges", "indptr", "indices", "degree")

    def __init__(self, nodes: Iterable[int], edges: Iterable[tuple[int, int]] | np.ndarray = ()):
        nodes = np.unique(np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64))
        if nodes.size and nodes[0] < 0:
            raise InputError("node ids must be non-negative")
        e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        if e.size == 0:
            e = np.zeros((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise InputError("edge list must be a sequence of (u, v) pairs")
        if np.any(e[:, 0] == e[:, 1]):
            u = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise InputError(f"self-loop on node {u}")
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        local = np.searchsorted(nodes, e)
        inside = local < nodes.size
        inside[inside] = nodes[local[inside]] == e[inside]
        if not inside.all():
            bad = e[~inside.all(axis=1)][0].tolist()
            raise InputError(f"edge {tuple(bad)} has an endpoint outside the node set")
        n = nodes.size
        src = np.concatenate([local[:, 0], local[:, 1]])
        dst = np.concatenate([local[:, 1], local[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        degree = np.bincount(src, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degree, out=indptr[1:])
        self.nodes = _frozen(nodes)
        self.edges = _frozen(e)
        self.local_edges = _frozen(local)
        self.indptr = _frozen(indptr)
        self.indices = _frozen(dst.astype(np.int64))
        self.degree = _frozen(degree)

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def __repr__(self) -> str:
        return f"SnapshotGraph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SnapshotGraph):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes) and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.nodes.tobytes(), self.edges.tobytes()))

    def index_of(self, ids: Sequence[int] | np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        idx = np.searchsorted(self.nodes, ids)
        ok = idx < self.nodes.size
        ok[ok] = self.nodes[idx[ok]] == ids[ok]
        if not ok.all():
            raise InputError(f"unknown node(s) {ids[~ok][:5].tolist()}")
        return idx

    def neighbors(self, node: int) -> np.ndarray:
        i = int(self.index_of([node])[0])
        return self.nodes[self.indices[self.indptr[i]:self.indptr[i + 1]]]

    def local_neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edge_set(self) -> set[tuple[int, int]]:
        return set(map(tuple, self.edges.tolist()))


def build_snapshot(node_count: int, edge_list: Iterable[tuple[int, int]]) -> SnapshotGraph:
    """Graph on nodes ``0..node_count-1``; duplicate and reversed edges collapse."""
    e = np.asarray(list(edge_list), dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= node_count):
        bad = e[(e < 0).any(axis=1) | (e >= node_count).any(axis=1)][0].tolist()
        raise InputError(f"edge {tuple(bad)} has endpoint outside 0..{node_count - 1}")
    return SnapshotGraph(np.arange(node_count), e)


@dataclass(frozen=True)
class DynamicNetwork:
    snapshots: tuple[SnapshotGraph, ...]
    truth: tuple[Partition, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(self.snapshots) < 1:
            raise InputError("a dynamic network needs at least one snapshot")
        if self.truth is not None:
            truth = tuple(self.truth)
            object.__setattr__(self, "truth", truth)
            if len(truth) != len(self.snapshots):
                raise InputError("ground truth must have one partition per snapshot")
            for t, (g, p) in enumerate(zip(self.snapshots, truth), start=1):
                if not np.array_equal(g.nodes, p.nodes):
                    raise InputError(f"ground truth at t={t} does not cover exactly the snapshot's nodes")

    @property
    def T(self) -> int:
        return len(self.snapshots)

    def __len__(self) -> int:
        return self.T


def _components(n: int, local_edges: np.ndarray) -> np.ndarray:
    """Canonical component labels (smallest local index per component)."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    a = coo_matrix((np.ones(len(local_edges), dtype=np.int8), (local_edges[:, 0], local_edges[:, 1])), shape=(n, n))
    _, lab = _cc(a, directed=False)
    _, first = np.unique(lab, return_index=True)
    return first[lab].astype(np.int64)


def connected_components(graph: SnapshotGraph, extra_edges: Iterable[tuple[int, int]] | None = None) -> Partition:
    """Label each node by the smallest node id in its component.

    With ``extra_edges`` the graph's own edges are ignored and only the given
    edge set (e.g. the locus links of a genotype) is used.
    """
    if extra_edges is None:
        local = graph.local_edges
    else:
        e = np.asarray(list(extra_edges) if not isinstance(extra_edges, np.ndarray) else extra_edges, dtype=np.int64)
        local = graph.index_of(e.reshape(-1)).reshape(-1, 2) if e.size else np.zeros((0, 2), dtype=np.int64)
    lab = _components(graph.n, local)
    return Partition(graph.nodes, graph.nodes[lab])


def shared_nodes(a: SnapshotGraph, b: SnapshotGraph) -> np.ndarray:
    return np.intersect1d(a.nodes, b.nodes)
