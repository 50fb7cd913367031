"""Synthetic dynamic networks with planted ground truth.

* ``gen_synfix``: four fixed-size communities, fixed per-node degree with a
  set number of external links; a few nodes change community every step.
* ``gen_events``: a planted-partition graph of about 40 communities that
  undergoes one of four event types (birth/death, expansion/contraction,
  intermittent communities, merging/splitting).
* ``great_change_subsample``: keep every ``stride``-th snapshot.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import GenerationError
from .graph import DynamicNetwork, Partition, SnapshotGraph

EVENT_KINDS = ("birth_death", "expand_contract", "intermittent", "merge_split")


@dataclass(frozen=True)
class SynfixSpec:
    z_out: int = 5
    timesteps: int = 10
    seed: int = 0
    communities: int = 4
    community_size: int = 32
    node_degree: int = 16
    moves_per_community: int = 3

    def __post_init__(self):
        if not 0 <= self.z_out < self.node_degree:
            raise GenerationError(f"z_out must be in [0, node_degree), got {self.z_out}")
        if self.node_degree - self.z_out > self.community_size - 1:
            raise GenerationError("internal degree exceeds community size")
        if self.timesteps < 1 or self.communities < 2:
            raise GenerationError("need at least one timestep and two communities")
        if self.moves_per_community * self.communities > self.communities * self.community_size:
            raise GenerationError("too many moves per step")


@dataclass(frozen=True)
class EventSpec:
    kind: str = "birth_death"
    nodes: int = 1000
    mean_degree: float = 15.0
    timesteps: int = 5
    affected_fraction: float = 0.10
    resize_fraction: float = 0.25
    seed: int = 0
    communities: int = 40
    mixing: float = 0.2

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise GenerationError(f"unknown event kind {self.kind!r}; expected one of {EVENT_KINDS}")
        for name in ("affected_fraction", "resize_fraction", "mixing"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise GenerationError(f"{name} must lie in (0, 1), got {v}")
        if not 0 < self.mean_degree < self.nodes:
            raise GenerationError("mean_degree must be positive and below the node count")
        if self.communities < 2 or self.nodes < 2 * self.communities:
            raise GenerationError("need at least two communities of at least two nodes")
        if self.timesteps < 1:
            raise GenerationError("need at least one timestep")


# --- SYNFIX -------------------------------------------------------------


def _match(stubs: np.ndarray, forbidden, rng: np.random.Generator, rounds: int = 20) -> list[tuple[int, int]]:
    """Pair up stubs at random, rejecting pairs for which ``forbidden(u, v)`` holds.

    Rejected stubs are reshuffled for a few rounds; anything still unmatched
    is dropped, leaving those nodes a degree short.
    """
    out: list[tuple[int, int]] = []
    pending = stubs.copy()
    for _ in range(rounds):
        if pending.size < 2:
            break
        pending = rng.permutation(pending)
        left = []
        for k in range(0, pending.size - 1, 2):
            u, v = int(pending[k]), int(pending[k + 1])
            if u == v or forbidden(u, v):
                left.extend((u, v))
            else:
                out.append((u, v) if u < v else (v, u))
                forbidden.add(u, v)
        if pending.size % 2:
            left.append(int(pending[-1]))
        if len(left) == pending.size:
            break
        pending = np.asarray(left, dtype=np.int64)
    return out


class _EdgeSet:
    def __init__(self, edges=()):
        self.s = set(edges)

    def __call__(self, u, v):
        return (min(u, v), max(u, v)) in self.s

    def add(self, u, v):
        self.s.add((min(u, v), max(u, v)))


def _fill_quotas(edges: set, member: np.ndarray, k_in: int, k_out: int, rng: np.random.Generator) -> set:
    """Add edges so each node approaches ``k_in`` internal and ``k_out`` external links."""
    n = member.size
    inner = np.zeros(n, dtype=np.int64)
    outer = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        if member[u] == member[v]:
            inner[u] += 1
            inner[v] += 1
        else:
            outer[u] += 1
            outer[v] += 1
    taken = _EdgeSet(edges)
    for c in np.unique(member):
        nodes = np.flatnonzero(member == c)
        need = np.clip(k_in - inner[nodes], 0, None)
        stubs = np.repeat(nodes, need)
        for e in _match(stubs, taken, rng):
            edges.add(e)
    need = np.clip(k_out - outer, 0, None)
    stubs = np.repeat(np.arange(n), need)

    class _Cross:
        def __call__(self, u, v):
            return member[u] == member[v] or taken(u, v)

        def add(self, u, v):
            taken.add(u, v)

    for e in _match(stubs, _Cross(), rng):
        edges.add(e)
    return edges


def gen_synfix(spec: SynfixSpec) -> DynamicNetwork:
    rng = np.random.default_rng(spec.seed)
    n = spec.communities * spec.community_size
    k_out = spec.z_out
    k_in = spec.node_degree - spec.z_out
    member = np.repeat(np.arange(spec.communities), spec.community_size)
    edges = _fill_quotas(set(), member, k_in, k_out, rng)
    snaps = [SnapshotGraph(np.arange(n), sorted(edges))]
    truth = [Partition(np.arange(n), member)]
    for _ in range(1, spec.timesteps):
        moved = []
        for c in range(spec.communities):
            members = np.flatnonzero(member == c)
            moved.extend(rng.choice(members, size=spec.moves_per_community, replace=False).tolist())
        member = member.copy()
        for v in moved:
            others = [c for c in range(spec.communities) if c != member[v]]
            member[v] = others[int(rng.integers(len(others)))]
        moved_set = set(moved)
        edges = {e for e in edges if e[0] not in moved_set and e[1] not in moved_set}
        edges = _fill_quotas(edges, member, k_in, k_out, rng)
        snaps.append(SnapshotGraph(np.arange(n), sorted(edges)))
        truth.append(Partition(np.arange(n), member))
    return DynamicNetwork(snaps, truth, meta={"generator": "synfix", "spec": asdict(spec)})


# --- Four events ---------------------------------------------------------


@dataclass
class _World:
    """Planted-partition state: membership, visibility and a persistent adjacency matrix."""

    member: np.ndarray
    visible: np.ndarray
    adj: np.ndarray
    p_in: float
    p_out: float
    rng: np.random.Generator
    next_label: int = 0
    events: list = field(default_factory=list)

    def resample(self, old_member: np.ndarray) -> None:
        # only pairs whose same/different-community relation flipped are redrawn,
        # so the graph stays a planted-partition sample and overlap stays high
        same_old = old_member[:, None] == old_member[None, :]
        same_new = self.member[:, None] == self.member[None, :]
        iu = np.triu_indices(self.member.size, k=1)
        flip = same_old[iu] != same_new[iu]
        rows, cols = iu[0][flip], iu[1][flip]
        p = np.where(same_new[rows, cols], self.p_in, self.p_out)
        val = self.rng.random(rows.size) < p
        self.adj[rows, cols] = val
        self.adj[cols, rows] = val

    def snapshot(self) -> tuple[SnapshotGraph, Partition]:
        vis = np.flatnonzero(self.visible)
        sub = self.adj[np.ix_(vis, vis)]
        r, c = np.nonzero(np.triu(sub, k=1))
        edges = np.column_stack([vis[r], vis[c]])
        return SnapshotGraph(vis, edges), Partition(vis, self.member[vis])

    def labels(self, visible_only: bool = True) -> np.ndarray:
        m = self.member[self.visible] if visible_only else self.member
        return np.unique(m)

    def sizes(self) -> dict[int, int]:
        u, c = np.unique(self.member, return_counts=True)
        return dict(zip(u.tolist(), c.tolist()))

    def fresh_label(self) -> int:
        self.next_label += 1
        return self.next_label - 1


def _initial_world(spec: EventSpec, rng: np.random.Generator) -> _World:
    n, k = spec.nodes, spec.communities
    member = rng.permutation(np.arange(n) % k)
    avg = n / k
    p_in = (1.0 - spec.mixing) * spec.mean_degree / (avg - 1.0)
    p_out = spec.mixing * spec.mean_degree / (n - avg)
    if not (0.0 < p_in <= 1.0 and 0.0 < p_out <= 1.0):
        raise GenerationError(f"infeasible planted partition: p_in={p_in:.3f}, p_out={p_out:.5f}")
    adj = np.zeros((n, n), dtype=bool)
    w = _World(member, np.ones(n, dtype=bool), adj, p_in, p_out, rng, next_label=k)
    same = member[:, None] == member[None, :]
    iu = np.triu_indices(n, k=1)
    draw = rng.random(iu[0].size) < np.where(same[iu], p_in, p_out)
    adj[iu] = draw
    adj[(iu[1], iu[0])] = draw
    return w


def _n_affected(spec: EventSpec, count: int) -> int:
    return max(1, math.ceil(spec.affected_fraction * count))


def _donors(w: _World, exclude: set, keep_min: int = 3) -> np.ndarray:
    sizes = w.sizes()
    ok = [c for c, s in sizes.items() if c not in exclude and s > keep_min]
    return np.flatnonzero(np.isin(w.member, ok) & w.visible)


def _scatter(w: _World, nodes: np.ndarray, targets: list[int]) -> None:
    if not targets:
        raise GenerationError("no community left to receive nodes")
    w.member[nodes] = np.asarray(targets)[w.rng.integers(0, len(targets), size=nodes.size)]


def _birth_death(w: _World, spec: EventSpec) -> None:
    labels = w.labels().tolist()
    k = _n_affected(spec, len(labels))
    dying = w.rng.choice(labels, size=k, replace=False).tolist()
    sizes = w.sizes()
    survivors = [c for c in labels if c not in dying]
    for c in dying:
        _scatter(w, np.flatnonzero(w.member == c), survivors)
    for c in dying:
        size = sizes[c]
        pool = _donors(w, exclude=set(dying))
        if pool.size < size:
            raise GenerationError("not enough donor nodes for a new community")
        born = w.rng.choice(pool, size=size, replace=False)
        label = w.fresh_label()
        w.member[born] = label
        w.events.append({"event": "birth", "label": label, "size": int(size), "replaces": int(c)})
        w.events.append({"event": "death", "label": int(c)})


def _expand_contract(w: _World, spec: EventSpec) -> None:
    labels = w.labels().tolist()
    k = _n_affected(spec, len(labels))
    chosen = w.rng.choice(labels, size=k, replace=False).tolist()
    grow = w.rng.random(k) < 0.5
    sizes = w.sizes()
    untouched = [c for c in labels if c not in chosen]
    for c, g in zip(chosen, grow):
        delta = math.ceil(spec.resize_fraction * sizes[c])
        if g:
            pool = _donors(w, exclude=set(chosen))
            if pool.size < delta:
                raise GenerationError("not enough donor nodes to expand a community")
            w.member[w.rng.choice(pool, size=delta, replace=False)] = c
            w.events.append({"event": "expand", "label": int(c), "before": int(sizes[c]), "after": int(sizes[c] + delta)})
        else:
            members = np.flatnonzero(w.member == c)
            delta = min(delta, members.size - 2)
            _scatter(w, w.rng.choice(members, size=delta, replace=False), untouched)
            w.events.append({"event": "contract", "label": int(c), "before": int(sizes[c]), "after": int(sizes[c] - delta)})


def _intermittent(w: _World, spec: EventSpec) -> None:
    hidden_now = np.unique(w.member[~w.visible]).tolist()
    w.visible[:] = True
    if hidden_now:
        w.events.append({"event": "reappear", "labels": [int(c) for c in hidden_now]})
    candidates = [c for c in w.labels().tolist() if c not in hidden_now]
    k = _n_affected(spec, len(w.labels()))
    hide = w.rng.choice(candidates, size=k, replace=False).tolist()
    w.visible[np.isin(w.member, hide)] = False
    w.events.append({"event": "hide", "labels": [int(c) for c in hide]})


def _merge_split(w: _World, spec: EventSpec) -> None:
    labels = w.labels().tolist()
    k = max(2, _n_affected(spec, len(labels)))
    k -= k % 2
    chosen = w.rng.choice(labels, size=k, replace=False).tolist()
    for a, b in zip(chosen[0::2], chosen[1::2]):
        w.member[w.member == b] = a
        w.events.append({"event": "merge", "into": int(a), "from": int(b)})
    sizes = w.sizes()
    rest = sorted((c for c in sizes if c not in chosen), key=lambda c: (-sizes[c], c))
    for c in rest[: k // 2]:
        members = w.rng.permutation(np.flatnonzero(w.member == c))
        label = w.fresh_label()
        w.member[members[: members.size // 2]] = label
        w.events.append({"event": "split", "from": int(c), "into": label})


_EVENTS = {
    "birth_death": _birth_death,
    "expand_contract": _expand_contract,
    "intermittent": _intermittent,
    "merge_split": _merge_split,
}


def gen_events(spec: EventSpec) -> DynamicNetwork:
    """Planted-partition network evolving under one event family.

    Edge probabilities are fixed so the expected degree is ``mean_degree``
    with a fraction ``mixing`` of it between communities. When membership
    changes, only node pairs whose same-community status flipped are
    redrawn. Intermittent communities are removed from the snapshot they are
    hidden in and restored, with their labels, one step later.
    """
    rng = np.random.default_rng(spec.seed)
    w = _initial_world(spec, rng)
    snaps, truth, log = [], [], []
    g, p = w.snapshot()
    snaps.append(g)
    truth.append(p)
    log.append([])
    for _ in range(1, spec.timesteps):
        old = w.member.copy()
        w.events = []
        _EVENTS[spec.kind](w, spec)
        w.resample(old)
        g, p = w.snapshot()
        snaps.append(g)
        truth.append(p)
        log.append(w.events)
    meta = {"generator": "events", "spec": asdict(spec), "events": log}
    return DynamicNetwork(snaps, truth, meta=meta)


def great_change_subsample(net: DynamicNetwork, stride: int = 2) -> DynamicNetwork:
    """Keep snapshots 1, 1+stride, 1+2*stride, ... (1-based)."""
    if stride < 1:
        raise GenerationError(f"stride must be >= 1, got {stride}")
    keep = list(range(0, net.T, stride))
    truth = None if net.truth is None else [net.truth[i] for i in keep]
    meta = dict(net.meta)
    meta["subsample"] = {"stride": stride, "kept": [i + 1 for i in keep]}
    return DynamicNetwork([net.snapshots[i] for i in keep], truth, meta=meta)
