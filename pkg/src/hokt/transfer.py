"""Knowledge transfer across snapshots.

At each timestep the optimizer maximizes modularity against a smoothness
objective: a weighted NMI between the candidate partition and the
partitions chosen at earlier timesteps. How many earlier timesteps are used
(the transfer order) depends on how much of the current snapshot's edge set
survives from the previous one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .engine import EvoConfig, decode_many, pick_solution, run_nsga2
from .errors import ConfigError, HoktError, MetricError
from .graph import DynamicNetwork, Partition, SnapshotGraph
from .metrics import check_weights, f1_score, honmi, modularity, modularity_many, nmi, nmi_many

POLICIES = ("similarity", "fixed")
MODES = ("hokt", "first_order", "static")


@dataclass(frozen=True)
class TransferPlan:
    order: int
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.order < 0 or len(self.weights) != self.order:
            raise ConfigError(f"plan order {self.order} does not match {len(self.weights)} weights")
        if self.order:
            check_weights(self.weights)


@dataclass(frozen=True)
class HoktConfig:
    """``policy='similarity'`` derives weights from overlap ratios over at most
    ``max_order`` past snapshots; ``policy='fixed'`` reads them from
    ``schedule`` (timestep -> weights, most recent first)."""

    evo: EvoConfig = field(default_factory=EvoConfig)
    sigma: float = 0.8
    policy: str = "similarity"
    max_order: int = 3
    schedule: Mapping[int, Sequence[float]] | None = None

    def __post_init__(self):
        if not 0.0 <= self.sigma <= 1.0:
            raise ConfigError(f"sigma must lie in [0, 1], got {self.sigma}")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown weight policy {self.policy!r}; expected one of {POLICIES}")
        if self.max_order < 1:
            raise ConfigError("max_order must be >= 1")
        if self.policy == "fixed" and self.schedule is None:
            raise ConfigError("fixed weight policy needs a schedule")


@dataclass(frozen=True)
class TimestepResult:
    t: int
    partition: Partition
    q: float
    honmi: float
    plan: TransferPlan
    overlap_prev: float | None = None
    nmi_vs_truth: float | None = None
    f1_vs_truth: float | None = None
    wall_time_ms: float = field(default=0.0, compare=False)

    def row(self) -> dict:
        """Flat record of the deterministic fields (no timing)."""
        return {
            "t": self.t,
            "q": self.q,
            "honmi": self.honmi,
            "nmi_vs_truth": self.nmi_vs_truth,
            "f1_vs_truth": self.f1_vs_truth,
            "order": self.plan.order,
            "weights": list(self.plan.weights),
            "overlap_prev": self.overlap_prev,
            "communities": self.partition.n_communities,
        }


def overlap_ratio(current: SnapshotGraph, previous: SnapshotGraph) -> float:
    """Fraction of the current snapshot's edges that also exist in the previous one."""
    if current.m == 0:
        raise MetricError("overlap ratio is undefined for an edgeless current snapshot")
    cur = current.edges[:, 0] * (1 << 32) + current.edges[:, 1]
    prev = previous.edges[:, 0] * (1 << 32) + previous.edges[:, 1]
    common = np.intersect1d(cur, prev, assume_unique=True).size
    return common / current.m


def similarity_matrix(net: DynamicNetwork) -> np.ndarray:
    """``S[i, j]`` = overlap ratio of snapshot ``j`` (current) against snapshot ``i``."""
    T = net.T
    S = np.eye(T)
    for i in range(T):
        for j in range(T):
            if i != j:
                S[i, j] = overlap_ratio(net.snapshots[j], net.snapshots[i])
    return S


def plan_transfer(t: int, sim: np.ndarray, cfg: HoktConfig) -> TransferPlan:
    """Transfer order and weights for 1-based timestep ``t``."""
    if t < 1:
        raise ConfigError(f"timesteps are 1-based, got t={t}")
    if t == 1:
        return TransferPlan(0)
    if cfg.policy == "fixed":
        if t not in cfg.schedule:
            raise ConfigError(f"weight schedule has no entry for t={t}")
        w = tuple(cfg.schedule[t])
        if len(w) > t - 1:
            raise ConfigError(f"schedule for t={t} uses {len(w)} past snapshots but only {t - 1} exist")
        return TransferPlan(len(w), w)
    if sim[t - 2, t - 1] >= cfg.sigma:
        return TransferPlan(1, (1.0,))
    order = min(cfg.max_order, t - 1)
    ratios = np.array([sim[t - 2 - j, t - 1] for j in range(order)], dtype=np.float64)
    total = ratios.sum()
    w = ratios / total if total > 0 else np.full(order, 1.0 / order)
    w[-1] = 1.0 - w[:-1].sum()
    return TransferPlan(order, tuple(w.tolist()))


class _Objective:
    """Batched (modularity, weighted NMI) evaluator for one timestep."""

    def __init__(self, graph: SnapshotGraph, history: Sequence[Partition], weights: Sequence[float]):
        self.graph = graph
        self.weights = tuple(weights)
        self.refs = []
        for past in history:
            shared = np.intersect1d(graph.nodes, past.nodes)
            self.refs.append((graph.index_of(shared), past.labels_for(shared)))

    def __call__(self, genes: np.ndarray) -> np.ndarray:
        labels = decode_many(self.graph, genes)
        q = modularity_many(self.graph, labels)
        smooth = np.zeros_like(q)
        for w, (idx, ref) in zip(self.weights, self.refs):
            if idx.size:
                smooth += w * nmi_many(labels[:, idx], ref)
        return np.column_stack([q, smooth])


Planner = Callable[[int], TransferPlan]


def _drive(net: DynamicNetwork, cfg: HoktConfig, planner: Planner, sim: np.ndarray) -> list[TimestepResult]:
    rng = np.random.default_rng(cfg.evo.seed)
    chosen: list[Partition] = []
    results: list[TimestepResult] = []
    for t in range(1, net.T + 1):
        start = time.perf_counter()
        graph = net.snapshots[t - 1]
        try:
            plan = planner(t)
            history = [chosen[t - 2 - j] for j in range(plan.order)]
            front = run_nsga2(graph, _Objective(graph, history, plan.weights), cfg.evo, rng, batched=True)
        except HoktError as exc:
            raise type(exc)(f"t={t}: {exc}") from exc
        best = pick_solution(front).phenotype
        chosen.append(best)
        truth = net.truth[t - 1] if net.truth is not None else None
        results.append(
            TimestepResult(
                t=t,
                partition=best,
                q=modularity(graph, best),
                honmi=honmi(best, history, plan.weights) if plan.order else 0.0,
                plan=plan,
                overlap_prev=float(sim[t - 2, t - 1]) if t > 1 else None,
                nmi_vs_truth=nmi(best, truth, graph.nodes) if truth is not None else None,
                f1_vs_truth=f1_score(best, truth, graph.nodes) if truth is not None else None,
                wall_time_ms=(time.perf_counter() - start) * 1e3,
            )
        )
    return results


def run_hokt(net: DynamicNetwork, cfg: HoktConfig) -> list[TimestepResult]:
    sim = similarity_matrix(net)
    return _drive(net, cfg, lambda t: plan_transfer(t, sim, cfg), sim)


def baseline_mode(net: DynamicNetwork, cfg: HoktConfig, mode: str) -> list[TimestepResult]:
    """``static``: no history at any step. ``first_order``: always the previous step only."""
    mode = mode.replace("-", "_")
    sim = similarity_matrix(net)
    if mode == "static":
        return _drive(net, cfg, lambda t: TransferPlan(0), sim)
    if mode == "first_order":
        return _drive(net, cfg, lambda t: TransferPlan(1, (1.0,)) if t > 1 else TransferPlan(0), sim)
    raise ConfigError(f"unknown baseline mode {mode!r}")


def run_algorithm(net: DynamicNetwork, cfg: HoktConfig, algorithm: str) -> list[TimestepResult]:
    algorithm = algorithm.replace("-", "_")
    if algorithm == "hokt":
        return run_hokt(net, cfg)
    if algorithm in ("first_order", "static"):
        return baseline_mode(net, cfg, algorithm)
    raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {MODES}")
