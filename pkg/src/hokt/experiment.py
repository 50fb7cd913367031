"""Batch experiments: one dataset, several algorithms, many seeded runs.

Configuration is an INI file::

    [experiment]
    algorithms = hokt, first_order
    runs = 30
    base_seed = 0
    output_dir = results/synfix
    workers = 1

    [dataset]
    generator = synfix        ; or: path = data/enron
    z_out = 5
    timesteps = 10
    seed = 0
    stride = 1                ; 2 keeps snapshots 1, 3, 5, ...

    [hokt]
    sigma = 0.8
    max_order = 3
    ; weights = 2:1; 3:0.8,0.2   (fixed schedule, most recent first)

    [evo]
    pop_size = 200
    generations = 100
    p_crossover = 0.8
    p_mutation = 0.2

Run ``r`` of every algorithm uses seed ``base_seed + r``. Outputs:
``results.csv`` (one row per algorithm, run and timestep), ``summary.json``
(per-timestep mean and standard deviation, rank-sum p-values and
win/tie/loss counts against the first listed algorithm) and
``timings.csv`` (wall-clock per step). The first two are byte-identical
across re-runs of the same configuration.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from .benchgen import EventSpec, SynfixSpec, gen_events, gen_synfix, great_change_subsample
from .engine import EvoConfig
from .errors import ConfigError, HoktError, InputError
from .graph import DynamicNetwork
from .io import load_network
from .metrics import rank_sum_test
from .transfer import MODES, HoktConfig, run_algorithm

ALPHA = 0.05
COLUMNS = (
    "algorithm", "run", "seed", "t", "q", "nmi_vs_truth", "f1_vs_truth", "honmi",
    "order", "weights", "overlap_prev", "communities",
)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | dict
    algorithms: tuple[str, ...] = ("hokt", "first_order")
    runs: int = 30
    base_seed: int = 0
    hokt: HoktConfig = field(default_factory=HoktConfig)
    output_dir: str = "results"
    workers: int = 1
    stride: int = 1

    def __post_init__(self):
        algos = tuple(a.strip().replace("-", "_") for a in self.algorithms)
        object.__setattr__(self, "algorithms", algos)
        if not algos:
            raise ConfigError("at least one algorithm is required")
        unknown = [a for a in algos if a not in MODES]
        if unknown:
            raise ConfigError(f"unknown algorithm(s) {unknown}; expected a subset of {MODES}")
        if len(set(algos)) != len(algos):
            raise ConfigError("algorithm listed twice")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")


def parse_schedule(text: str) -> dict[int, tuple[float, ...]]:
    """Parse ``"2:1; 3:0.8,0.2"`` into ``{2: (1.0,), 3: (0.8, 0.2)}``."""
    out: dict[int, tuple[float, ...]] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            step, ws = chunk.split(":", 1)
            out[int(step)] = tuple(float(w) for w in ws.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad weight schedule entry {chunk!r}; expected t:w1,w2,...") from exc
    if not out:
        raise ConfigError("empty weight schedule")
    return out


def _typed(section, key, cast, default):
    if section is None or key not in section:
        return default
    raw = section[key]
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a valid {cast.__name__}") from exc


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read an INI experiment file; ``overrides`` (CLI flags) win over file values."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}".replace("\n", " ")) from exc
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    exp = cp["experiment"] if cp.has_section("experiment") else None
    ds = cp["dataset"] if cp.has_section("dataset") else None
    hk = cp["hokt"] if cp.has_section("hokt") else None
    ev = cp["evo"] if cp.has_section("evo") else None

    if "dataset" in ov:
        dataset: str | dict = ov["dataset"]
    elif ds is not None and "path" in ds:
        dataset = ds["path"]
    elif ds is not None and "generator" in ds:
        dataset = {k: v for k, v in ds.items() if k not in ("stride",)}
    else:
        raise ConfigError("no dataset: give [dataset] path/generator or --dataset")

    evo = EvoConfig(
        pop_size=_typed(ev, "pop_size", int, 200),
        generations=_typed(ev, "generations", int, 100),
        p_crossover=_typed(ev, "p_crossover", float, 0.8),
        p_mutation=_typed(ev, "p_mutation", float, 0.2),
    )
    weights = ov.get("weights", hk.get("weights") if hk is not None else None)
    schedule = parse_schedule(weights) if weights else None
    hokt = HoktConfig(
        evo=evo,
        sigma=float(ov.get("sigma", _typed(hk, "sigma", float, 0.8))),
        policy="fixed" if schedule else "similarity",
        max_order=int(ov.get("order", _typed(hk, "max_order", int, 3))),
        schedule=schedule,
    )
    algorithms = _typed(exp, "algorithms", str, "hokt, first_order")
    return ExperimentConfig(
        dataset=dataset,
        algorithms=tuple(a for a in algorithms.split(",") if a.strip()),
        runs=int(ov.get("runs", _typed(exp, "runs", int, 30))),
        base_seed=int(ov.get("seed", _typed(exp, "base_seed", int, 0))),
        hokt=hokt,
        output_dir=str(ov.get("out", _typed(exp, "output_dir", str, "results"))),
        workers=int(ov.get("workers", _typed(exp, "workers", int, 1))),
        stride=int(ov.get("stride", _typed(ds, "stride", int, 1))),
    )


def _spec_kwargs(cls, params: dict) -> dict:
    known = {f.name: f.type for f in fields(cls)}
    out = {}
    for k, v in params.items():
        if k not in known:
            raise ConfigError(f"unknown {cls.__name__} parameter {k!r}")
        if k == "kind":
            out[k] = v
        elif k in ("mean_degree", "affected_fraction", "resize_fraction", "mixing"):
            out[k] = float(v)
        else:
            out[k] = int(v)
    return out


def build_dataset(dataset: str | dict, stride: int = 1) -> DynamicNetwork:
    if isinstance(dataset, dict):
        params = dict(dataset)
        kind = params.pop("generator", None)
        try:
            if kind == "synfix":
                net = gen_synfix(SynfixSpec(**_spec_kwargs(SynfixSpec, params)))
            elif kind == "events":
                net = gen_events(EventSpec(**_spec_kwargs(EventSpec, params)))
            else:
                raise ConfigError(f"unknown generator {kind!r}; expected 'synfix' or 'events'")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, HoktError):
                raise
            raise ConfigError(f"bad generator parameters: {exc}") from exc
    else:
        net = load_network(dataset)
    return great_change_subsample(net, stride) if stride > 1 else net


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return " ".join(repr(float(w)) for w in x)
    return str(x)


def _one_run(job: tuple) -> list[dict]:
    net, hokt, algorithm, run, seed = job
    cfg = replace(hokt, evo=replace(hokt.evo, seed=seed))
    try:
        results = run_algorithm(net, cfg, algorithm)
    except HoktError as exc:
        raise type(exc)(f"algorithm={algorithm} run={run}: {exc}") from exc
    rows = []
    for r in results:
        row = {"algorithm": algorithm, "run": run, "seed": seed}
        row.update(r.row())
        row["wall_time_ms"] = r.wall_time_ms
        rows.append(row)
    return rows


class ResultsTable:
    """Grid of per-(algorithm, run, timestep) records."""

    def __init__(self, rows: list[dict], algorithms: tuple[str, ...] | None = None):
        if algorithms is None:
            algorithms = tuple(dict.fromkeys(r["algorithm"] for r in rows))
        self.algorithms = tuple(algorithms)
        pos = {a: i for i, a in enumerate(self.algorithms)}
        self.rows = sorted(rows, key=lambda r: (pos[r["algorithm"]], r["run"], r["t"]))

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.get(c)) for c in COLUMNS])
        return buf.getvalue()

    def timings_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm", "run", "t", "wall_time_ms"])
        for r in self.rows:
            w.writerow([r["algorithm"], r["run"], r["t"], f"{r.get('wall_time_ms', 0.0):.3f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path: str | Path) -> "ResultsTable":
        path = Path(path)
        if not path.exists():
            raise InputError(f"{path} not found")
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(COLUMNS) - set(reader.fieldnames):
                raise InputError(f"{path}: not a results table (missing columns)")
            for lineno, rec in enumerate(reader, start=2):
                try:
                    rows.append({
                        "algorithm": rec["algorithm"],
                        "run": int(rec["run"]),
                        "seed": int(rec["seed"]),
                        "t": int(rec["t"]),
                        "q": float(rec["q"]),
                        "nmi_vs_truth": float(rec["nmi_vs_truth"]) if rec["nmi_vs_truth"] else None,
                        "f1_vs_truth": float(rec["f1_vs_truth"]) if rec["f1_vs_truth"] else None,
                        "honmi": float(rec["honmi"]),
                        "order": int(rec["order"]),
                        "weights": [float(x) for x in rec["weights"].split()],
                        "overlap_prev": float(rec["overlap_prev"]) if rec["overlap_prev"] else None,
                        "communities": int(rec["communities"]),
                    })
                except (TypeError, ValueError) as exc:
                    raise InputError(f"{path.name}:{lineno}: malformed row ({exc})") from exc
        return cls(rows)

    def values(self, algorithm: str, t: int, metric: str) -> list[float]:
        return [r[metric] for r in self.rows if r["algorithm"] == algorithm and r["t"] == t and r[metric] is not None]

    def timesteps(self) -> list[int]:
        return sorted({r["t"] for r in self.rows})

    def summary(self) -> dict:
        has_truth = any(r["nmi_vs_truth"] is not None for r in self.rows)
        metrics = ("nmi_vs_truth", "f1_vs_truth", "q") if has_truth else ("q",)
        steps = self.timesteps()
        per = {}
        for a in self.algorithms:
            entries = []
            for t in steps:
                e = {"t": t}
                for m in metrics + ("honmi",):
                    v = np.asarray(self.values(a, t, m), dtype=np.float64)
                    e[f"{m}_mean"] = float(v.mean()) if v.size else None
                    e[f"{m}_std"] = float(v.std(ddof=1)) if v.size > 1 else 0.0
                orders = sorted({r["order"] for r in self.rows if r["algorithm"] == a and r["t"] == t})
                e["orders"] = orders
                entries.append(e)
            per[a] = entries
        comparisons = []
        ref = self.algorithms[0]
        for other in self.algorithms[1:]:
            for m in metrics[:2] if has_truth else metrics:
                comparisons.append(_compare(self, ref, other, m, steps))
        return {
            "algorithms": list(self.algorithms),
            "runs": len({(r["run"]) for r in self.rows}),
            "timesteps": steps,
            "alpha": ALPHA,
            "per_timestep": per,
            "comparisons": comparisons,
        }


def _compare(table: ResultsTable, ref: str, other: str, metric: str, steps: list[int]) -> dict:
    """Win/tie/loss of ``other`` against ``ref`` per timestep, as in the usual results tables.

    A timestep is a win (loss) for ``other`` when the rank-sum p-value is
    below ``ALPHA`` and its mean is higher (lower). Too few runs for the
    test count as ties.
    """
    detail = []
    tally = {"win": 0, "tie": 0, "loss": 0}
    for t in steps:
        a = table.values(ref, t, metric)
        b = table.values(other, t, metric)
        p = None
        outcome = "tie"
        if len(a) >= 5 and len(b) >= 5:
            _, p = rank_sum_test(b, a)
            if p < ALPHA:
                outcome = "win" if np.mean(b) > np.mean(a) else "loss"
        tally[outcome] += 1
        detail.append({"t": t, "p_value": p, "outcome": outcome,
                       "mean_diff": float(np.mean(b) - np.mean(a)) if a and b else None})
    return {"reference": ref, "other": other, "metric": metric, **tally, "per_timestep": detail}


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ResultsTable:
    net = build_dataset(cfg.dataset, cfg.stride)
    jobs = [
        (net, cfg.hokt, algorithm, run, cfg.base_seed + run)
        for algorithm in cfg.algorithms
        for run in range(cfg.runs)
    ]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_one_run, jobs))
    else:
        chunks = [_one_run(job) for job in jobs]
    table = ResultsTable([row for chunk in chunks for row in chunk], cfg.algorithms)
    expected = len(cfg.algorithms) * cfg.runs * net.T
    if len(table) != expected:
        raise InputError(f"results grid incomplete: {len(table)} of {expected} cells")
    if write:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(table.to_csv(), encoding="utf-8")
        (out / "summary.json").write_text(json.dumps(table.summary(), indent=2) + "\n", encoding="utf-8")
        (out / "timings.csv").write_text(table.timings_csv(), encoding="utf-8")
        ids = net.meta.get("node_ids")
        if ids is not None:
            (out / "node_ids.csv").write_text(
                "node,external_id\n" + "".join(f"{i},{tok}\n" for i, tok in enumerate(ids)), encoding="utf-8"
            )
    return table


def format_report(summary: dict) -> str:
    """Plain-text tables: mean ± std per timestep, p-values and win/tie/loss."""
    algos = summary["algorithms"]
    lines = []
    metrics = [k[: -len("_mean")] for k in summary["per_timestep"][algos[0]][0] if k.endswith("_mean") and k != "honmi_mean"]
    for m in metrics:
        lines.append(f"== {m} (mean ± std over {summary['runs']} runs) ==")
        header = ["t"] + algos
        rows = []
        for i, t in enumerate(summary["timesteps"]):
            row = [str(t)]
            for a in algos:
                e = summary["per_timestep"][a][i]
                mean = e[f"{m}_mean"]
                row.append("-" if mean is None else f"{mean:.4f}±{e[f'{m}_std']:.2f}")
            rows.append(row)
        comps = [c for c in summary["comparisons"] if c["metric"] == m]
        for c in comps:
            header.append(f"p({c['other']} vs {c['reference']})")
            for row, d in zip(rows, c["per_timestep"]):
                row.append("-" if d["p_value"] is None else f"{d['p_value']:.3g} {d['outcome']}")
        widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for r in rows:
            lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)))
        for c in comps:
            lines.append(f"win/tie/loss {c['other']} vs {c['reference']}: {c['win']}/{c['tie']}/{c['loss']}")
        lines.append("")
    return "\n".join(lines)


def load_summary(results_dir: str | Path) -> dict:
    results_dir = Path(results_dir)
    return ResultsTable.from_csv(results_dir / "results.csv" if results_dir.is_dir() else results_dir).summary()
