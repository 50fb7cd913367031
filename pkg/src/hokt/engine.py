"""Locus-based genetic representation and a two-objective NSGA-II optimizer.

A genotype is an int array ``g`` of length ``graph.n`` in local index space:
``g[i]`` is a neighbor of node ``i`` (or ``i`` itself for an isolated node).
Communities are the connected components of the links ``(i, g[i])``, so the
number of communities is never a parameter.

Both objectives are maximized. Operators are written over whole populations
(2-d arrays); the single-genotype functions wrap them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import ConfigError
from .graph import Partition, SnapshotGraph
from .metrics import ObjectiveVector


@dataclass(frozen=True)
class EvoConfig:
    pop_size: int = 200
    generations: int = 100
    p_crossover: float = 0.8
    p_mutation: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 4 or self.pop_size % 2:
            raise ConfigError(f"pop_size must be an even integer >= 4, got {self.pop_size}")
        if self.generations < 0:
            raise ConfigError("generations must be >= 0")
        for name in ("p_crossover", "p_mutation"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")


@dataclass
class Individual:
    genotype: np.ndarray
    phenotype: Partition
    objectives: ObjectiveVector
    rank: int = 0
    crowding: float = 0.0


def decode_many(graph: SnapshotGraph, genes: np.ndarray) -> np.ndarray:
    """Component labels for each genotype row; label = smallest local index in the component.

    The whole population is decoded in one sparse connected-components call
    over a block-diagonal graph.
    """
    genes = np.atleast_2d(np.asarray(genes, dtype=np.int64))
    P, n = genes.shape
    if n == 0:
        return np.zeros((P, 0), dtype=np.int64)
    base = (np.arange(P, dtype=np.int64) * n)[:, None]
    src = (np.arange(n, dtype=np.int64)[None, :] + base).ravel()
    dst = (genes + base).ravel()
    a = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(P * n, P * n))
    _, lab = _cc(a, directed=False)
    _, first = np.unique(lab, return_index=True)
    return (first[lab] - base.repeat(n)).reshape(P, n)


def decode(graph: SnapshotGraph, genotype: np.ndarray) -> Partition:
    lab = decode_many(graph, genotype)[0]
    return Partition(graph.nodes, graph.nodes[lab])


def is_valid_genotype(graph: SnapshotGraph, genotype: np.ndarray) -> bool:
    g = np.asarray(genotype)
    if g.shape != (graph.n,):
        return False
    for i in range(graph.n):
        nb = graph.local_neighbors(i)
        if nb.size == 0:
            if g[i] != i:
                return False
        elif g[i] not in nb:
            return False
    return True


def init_population(graph: SnapshotGraph, cfg: EvoConfig, rng: np.random.Generator) -> np.ndarray:
    """``cfg.pop_size`` genotypes, each gene a uniformly drawn neighbor."""
    n = graph.n
    deg = graph.degree
    pick = np.floor(rng.random((cfg.pop_size, n)) * deg[None, :]).astype(np.int64)
    if graph.indices.size == 0:
        return np.tile(np.arange(n), (cfg.pop_size, 1))
    pos = np.minimum(graph.indptr[:-1][None, :] + pick, graph.indices.size - 1)
    return np.where(deg[None, :] > 0, graph.indices[pos], np.arange(n)[None, :])


def uniform_crossover(
    p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator | None = None, mask: np.ndarray | None = None
) -> np.ndarray:
    """Child takes parent 2's gene where the mask is 1, parent 1's gene where it is 0."""
    p1, p2 = np.asarray(p1), np.asarray(p2)
    if p1.shape != p2.shape:
        raise ValueError(f"parent length mismatch: {p1.shape} vs {p2.shape}")
    if mask is None:
        mask = rng.random(p1.shape) < 0.5
    return np.where(np.asarray(mask, dtype=bool), p2, p1)


def mutate_many(genes: np.ndarray, graph: SnapshotGraph, p_mutation: float, rng: np.random.Generator) -> np.ndarray:
    """Mutate each row with probability ``p_mutation`` by re-linking one random locus.

    The new allele is drawn uniformly from the node's neighbors other than
    the current one, so a mutation always changes the gene. Nodes of degree
    below 2 have no alternative and are left alone.
    """
    genes = np.array(genes, dtype=np.int64, copy=True)
    P, n = genes.shape
    hit = rng.random(P) < p_mutation
    cols = rng.integers(0, max(n, 1), size=P)
    draw = rng.random(P)
    if n == 0:
        return genes
    d = graph.degree[cols]
    rows = np.flatnonzero(hit & (d >= 2))
    cols, draw, d = cols[rows], draw[rows], d[rows]
    start = graph.indptr[cols]
    cand = graph.indices[start + np.floor(draw * (d - 1)).astype(np.int64)]
    cand = np.where(cand == genes[rows, cols], graph.indices[start + d - 1], cand)
    genes[rows, cols] = cand
    return genes


def mutate(genotype: np.ndarray, graph: SnapshotGraph, p_mutation: float, rng: np.random.Generator) -> np.ndarray:
    return mutate_many(np.asarray(genotype)[None, :], graph, p_mutation, rng)[0]


def _as_array(objs) -> np.ndarray:
    a = np.asarray([tuple(o) for o in objs] if not isinstance(objs, np.ndarray) else objs, dtype=np.float64)
    return a.reshape(-1, 2) if a.size else np.zeros((0, 2))


def nondominated_ranks(objs: np.ndarray) -> np.ndarray:
    """Non-domination rank per row (0 = best), maximizing every column."""
    F = _as_array(objs)
    p = F.shape[0]
    ge = (F[:, None, :] >= F[None, :, :]).all(axis=2)
    gt = (F[:, None, :] > F[None, :, :]).any(axis=2)
    dom = ge & gt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    rank = np.full(p, -1, dtype=np.int64)
    level = 0
    remaining = np.ones(p, dtype=bool)
    while remaining.any():
        front = remaining & (count == 0)
        rank[front] = level
        remaining &= ~front
        count = count - dom[front].sum(axis=0)
        level += 1
    return rank


def fast_nondominated_sort(objs: Sequence[ObjectiveVector] | np.ndarray) -> list[list[int]]:
    rank = nondominated_ranks(objs)
    if rank.size == 0:
        return []
    return [np.flatnonzero(rank == r).tolist() for r in range(int(rank.max()) + 1)]


def crowding_distance(front_objs: Sequence[ObjectiveVector] | np.ndarray) -> np.ndarray:
    F = _as_array(front_objs)
    k = F.shape[0]
    if k <= 2:
        return np.full(k, np.inf)
    dist = np.zeros(k)
    for col in range(F.shape[1]):
        f = F[:, col]
        order = np.argsort(f, kind="stable")
        lo, hi = f[order[0]], f[order[-1]]
        if hi == lo:
            continue
        dist[order[0]] = dist[order[-1]] = np.inf
        dist[order[1:-1]] += (f[order[2:]] - f[order[:-2]]) / (hi - lo)
    return dist


def rank_and_crowd(objs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    F = _as_array(objs)
    rank = nondominated_ranks(F)
    crowd = np.zeros(F.shape[0])
    for r in np.unique(rank):
        idx = np.flatnonzero(rank == r)
        crowd[idx] = crowding_distance(F[idx])
    return rank, crowd


def _better(rank_a, crowd_a, rank_b, crowd_b):
    """True where candidate a beats b; ties go to a."""
    return (rank_a < rank_b) | ((rank_a == rank_b) & (crowd_a >= crowd_b))


def tournament_indices(rank: np.ndarray, crowd: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    picks = rng.integers(0, rank.size, size=(k, 2))
    a, b = picks[:, 0], picks[:, 1]
    return np.where(_better(rank[a], crowd[a], rank[b], crowd[b]), a, b)


def binary_tournament(pop: Sequence[Individual], rng: np.random.Generator) -> Individual:
    if len(pop) == 0:
        raise ValueError("tournament on an empty population")
    rank = np.array([ind.rank for ind in pop])
    crowd = np.array([ind.crowding for ind in pop], dtype=np.float64)
    return pop[int(tournament_indices(rank, crowd, 1, rng)[0])]


def _survival_keys(pool: np.ndarray, pool_objs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # repeated genotypes are ranked after every distinct one; without this the
    # elitist pool fills with clones of the incumbent and the search stalls
    _, first = np.unique(pool, axis=0, return_index=True)
    distinct = np.zeros(pool.shape[0], dtype=bool)
    distinct[first] = True
    rank = np.full(pool.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    crowd = np.zeros(pool.shape[0])
    rank[distinct], crowd[distinct] = rank_and_crowd(pool_objs[distinct])
    return rank, crowd


Evaluator = Callable[[np.ndarray], np.ndarray]


def _evaluate(objective_eval, genes: np.ndarray, batched: bool) -> np.ndarray:
    if batched:
        out = np.asarray(objective_eval(genes), dtype=np.float64)
    else:
        out = np.array([tuple(objective_eval(g)) for g in genes], dtype=np.float64)
    return out.reshape(genes.shape[0], 2)


def run_nsga2(
    graph: SnapshotGraph,
    objective_eval,
    cfg: EvoConfig,
    rng: np.random.Generator | None = None,
    *,
    batched: bool = False,
    on_generation: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> list[Individual]:
    """Elitist (mu + lambda) NSGA-II; returns the final non-dominated set.

    Survivors are taken by non-domination rank, then crowding distance, over
    the merged parents and offspring, with duplicate genotypes kept only as
    a last resort.

    ``objective_eval`` maps one genotype to a ``(q, smooth)`` pair, or, with
    ``batched=True``, a ``(k, n)`` genotype matrix to a ``(k, 2)`` array.
    ``on_generation(gen, genes, objs)`` is called after each survivor step.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    P, n = cfg.pop_size, graph.n
    genes = init_population(graph, cfg, rng)
    objs = _evaluate(objective_eval, genes, batched)
    rank, crowd = rank_and_crowd(objs)
    for gen in range(cfg.generations):
        i1 = tournament_indices(rank, crowd, P, rng)
        i2 = tournament_indices(rank, crowd, P, rng)
        cross = rng.random(P) < cfg.p_crossover
        mask = rng.random((P, n)) < 0.5
        children = np.where(cross[:, None] & mask, genes[i2], genes[i1])
        children = mutate_many(children, graph, cfg.p_mutation, rng)
        child_objs = _evaluate(objective_eval, children, batched)
        pool = np.concatenate([genes, children])
        pool_objs = np.concatenate([objs, child_objs])
        pool_rank, pool_crowd = _survival_keys(pool, pool_objs)
        keep = np.lexsort((-pool_crowd, pool_rank))[:P]
        genes, objs, rank, crowd = pool[keep], pool_objs[keep], pool_rank[keep], pool_crowd[keep]
        if on_generation is not None:
            on_generation(gen, genes, objs)
    final_rank, final_crowd = rank_and_crowd(objs)
    front = np.flatnonzero(final_rank == 0)
    labels = decode_many(graph, genes[front])
    return [
        Individual(
            genotype=genes[i].copy(),
            phenotype=Partition(graph.nodes, graph.nodes[lab]),
            objectives=ObjectiveVector(float(objs[i, 0]), float(objs[i, 1])),
            rank=0,
            crowding=float(final_crowd[i]),
        )
        for i, lab in zip(front, labels)
    ]


def pick_solution(front: Sequence[Individual]) -> Individual:
    """Highest modularity; ties by higher smoothness, then lowest canonical label sequence."""
    if len(front) == 0:
        raise ValueError("cannot pick from an empty front")
    return min(
        front,
        key=lambda ind: (-ind.objectives.q, -ind.objectives.smooth, tuple(ind.phenotype.canonical().labels.tolist())),
    )
