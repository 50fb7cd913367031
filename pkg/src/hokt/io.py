"""Dataset directories.

A dataset is a directory holding ``t1.edges`` .. ``tT.edges`` (one
whitespace-separated ``u v`` pair per line, ``#`` starts a comment) and,
optionally, ``t<k>.labels`` files with one ``node label`` pair per line and
a ``meta.json`` written by the generators.

External node ids may be arbitrary tokens. The loader maps them to dense
integers ``0..N-1`` (numeric order when every id is an integer, otherwise
lexicographic) and keeps the original tokens in ``net.meta["node_ids"]``.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import DynamicNetwork, Partition, SnapshotGraph
from .transfer import similarity_matrix

_STEP = re.compile(r"^t(\d+)\.edges$")


def _read_pairs(path: Path) -> list[tuple[str, str, int]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise InputError(f"{path.name}:{lineno}: expected two fields, got {len(tokens)}")
            pairs.append((tokens[0], tokens[1], lineno))
    return pairs


def _sort_ids(tokens: set[str]) -> list[str]:
    try:
        return sorted(tokens, key=int)
    except ValueError:
        return sorted(tokens)


def _label_codes(labels: list[str]) -> list[int]:
    try:
        return [int(x) for x in labels]
    except ValueError:
        code = {tok: i for i, tok in enumerate(sorted(set(labels)))}
        return [code[x] for x in labels]


def load_network(directory: str | Path) -> DynamicNetwork:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"dataset directory {directory} does not exist")
    steps = sorted(int(m.group(1)) for p in directory.iterdir() if (m := _STEP.match(p.name)))
    if not steps:
        raise InputError(f"no t<k>.edges files in {directory}")
    for expected in range(1, steps[-1] + 1):
        if expected not in steps:
            raise InputError(f"timestep t{expected} is missing (t{expected}.edges not found)")
    T = steps[-1]

    edge_rows = [_read_pairs(directory / f"t{t}.edges") for t in range(1, T + 1)]
    label_paths = [directory / f"t{t}.labels" for t in range(1, T + 1)]
    have_labels = [p.exists() for p in label_paths]
    if any(have_labels) and not all(have_labels):
        missing = [f"t{t}.labels" for t, ok in enumerate(have_labels, start=1) if not ok]
        raise InputError(f"ground truth incomplete: missing {', '.join(missing)}")
    label_rows = [_read_pairs(p) for p in label_paths] if all(have_labels) else None

    tokens: set[str] = set()
    for rows in edge_rows:
        for u, v, _ in rows:
            tokens.update((u, v))
    if label_rows:
        for rows in label_rows:
            tokens.update(u for u, _, _ in rows)
    ids = _sort_ids(tokens)
    index = {tok: i for i, tok in enumerate(ids)}

    snapshots, truth = [], []
    for t in range(1, T + 1):
        rows = edge_rows[t - 1]
        for u, v, lineno in rows:
            if u == v:
                raise InputError(f"t{t}.edges:{lineno}: self-loop on node {u}")
        nodes = {index[u] for u, _, _ in rows} | {index[v] for _, v, _ in rows}
        if label_rows:
            lab_nodes = [index[u] for u, _, _ in label_rows[t - 1]]
            if len(set(lab_nodes)) != len(lab_nodes):
                raise InputError(f"t{t}.labels: a node is labeled twice")
            missing = nodes - set(lab_nodes)
            if missing:
                raise InputError(f"t{t}.labels: no label for node(s) {[ids[i] for i in sorted(missing)][:5]}")
            nodes |= set(lab_nodes)
            truth.append(Partition(lab_nodes, _label_codes([lab for _, lab, _ in label_rows[t - 1]])))
        edges = np.array([(index[u], index[v]) for u, v, _ in rows], dtype=np.int64).reshape(-1, 2)
        snapshots.append(SnapshotGraph(sorted(nodes), edges))

    meta: dict = {}
    meta_path = directory / "meta.json"
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    meta["node_ids"] = ids
    meta["source"] = str(directory)
    return DynamicNetwork(snapshots, truth if label_rows else None, meta=meta)


def write_network(net: DynamicNetwork, directory: str | Path) -> Path:
    """Write ``net`` in the dataset layout; node ids are written as dense integers."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for t, g in enumerate(net.snapshots, start=1):
        with open(directory / f"t{t}.edges", "w", encoding="utf-8") as fh:
            fh.write(f"# t={t} n={g.n} m={g.m}\n")
            fh.writelines(f"{u} {v}\n" for u, v in g.edges.tolist())
        if net.truth is not None:
            p = net.truth[t - 1]
            with open(directory / f"t{t}.labels", "w", encoding="utf-8") as fh:
                fh.writelines(f"{u} {c}\n" for u, c in zip(p.nodes.tolist(), p.labels.tolist()))
    meta = {k: v for k, v in net.meta.items() if k not in ("node_ids", "source")}
    (directory / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return directory


def emit_similarity(net: DynamicNetwork, out: str | Path) -> Path:
    """Overlap-ratio matrix as CSV; rows are the previous snapshot, columns the current one."""
    S = similarity_matrix(net)
    out = Path(out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [str(t) for t in range(1, net.T + 1)])
        for i in range(net.T):
            w.writerow([str(i + 1)] + [f"{x:.4f}" for x in S[i]])
    return out
