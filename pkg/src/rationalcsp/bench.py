"""Benchmark runs, aggregation, and gamma sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .csp import Instance
from .search import RunConfig, StatsRecord, search

CSV_COLUMNS = [f.name for f in fields(StatsRecord)]
METRICS = ("search_time", "heuristic_time", "backtracks", "nodes", "constraint_checks", "sc_estimations")


def _run_one(job: Tuple[str, Instance, RunConfig, int]) -> StatsRecord:
    instance_id, instance, config, rep = job
    _, stats = search(instance, replace(config, seed=config.seed + rep), instance_id=instance_id)
    stats.repeat = rep
    return stats


def run_records(
    instances: Sequence[Tuple[str, Instance]], configs: Sequence[RunConfig], jobs: int = 1
) -> List[StatsRecord]:
    """One record per (instance, config, repeat), in that nesting order.

    Repeat ``r`` runs with seed ``config.seed + r``.  With ``jobs > 1`` runs
    go to a process pool; output order does not depend on completion order.
    """
    work = [(iid, inst, cfg, rep) for iid, inst in instances for cfg in configs for rep in range(cfg.repeat)]
    if jobs <= 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


def _describe(values: List[float]) -> Dict[str, float]:
    return {
        "mean": statistics.fmean(values),
        "median": statistics.median(values),
        "sd": statistics.stdev(values) if len(values) > 1 else 0.0,
        "min": min(values),
        "max": max(values),
    }


def summarize(records: Iterable[StatsRecord]) -> Dict[str, Dict]:
    """Per config label: count, solved/timed-out tallies, and stats of every metric."""
    groups: Dict[str, List[StatsRecord]] = defaultdict(list)
    for r in records:
        groups[r.config].append(r)
    out = {}
    for label, rows in groups.items():
        entry = {
            "runs": len(rows),
            "solved": sum(r.solved for r in rows),
            "timed_out": sum(r.timed_out for r in rows),
        }
        for m in METRICS:
            entry[m] = _describe([float(getattr(r, m)) for r in rows])
        out[label] = entry
    return out


def per_instance_means(records: Iterable[StatsRecord], metric: str) -> Dict[str, Dict[str, float]]:
    """``{config: {instance: mean metric over repeats}}``."""
    acc: Dict[str, Dict[str, List[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        acc[r.config][r.instance].append(float(getattr(r, metric)))
    return {c: {i: statistics.fmean(v) for i, v in per.items()} for c, per in acc.items()}


def ratio_table(records: Sequence[StatsRecord], metric: str = "search_time") -> Dict[Tuple[str, str], Dict[str, float]]:
    """For every ordered pair of configs ``(a, b)``: mean and median over instances of
    ``metric_a / metric_b``, and the ratio of the overall means.

    Instances where the denominator is zero are left out of the per-instance ratios.
    """
    means = per_instance_means(records, metric)
    table = {}
    for a in means:
        for b in means:
            if a == b:
                continue
            common = sorted(set(means[a]) & set(means[b]))
            ratios = [means[a][i] / means[b][i] for i in common if means[b][i] != 0]
            total_b = sum(means[b][i] for i in common)
            table[(a, b)] = {
                "mean_ratio": statistics.fmean(ratios) if ratios else math.nan,
                "median_ratio": statistics.median(ratios) if ratios else math.nan,
                "ratio_of_means": sum(means[a][i] for i in common) / total_b if total_b else math.nan,
                "instances": len(ratios),
            }
    return table


@dataclass
class BenchmarkResult:
    records: List[StatsRecord]
    summary: Dict[str, Dict]
    ratios: Dict[Tuple[str, str], Dict[str, float]]


def run_benchmark(
    instances: Sequence[Tuple[str, Instance]], configs: Sequence[RunConfig], jobs: int = 1
) -> BenchmarkResult:
    records = run_records(instances, configs, jobs)
    return BenchmarkResult(records, summarize(records), ratio_table(records))


SWEEP_COLUMNS = [
    "gamma",
    "time_ratio_mean",
    "time_ratio_median",
    "backtrack_ratio_mean",
    "estimation_ratio_mean",
    "estimation_ratio_median",
    "mean_search_time",
    "mean_estimations",
]


def sweep_gamma(
    instances: Sequence[Tuple[str, Instance]],
    gammas: Sequence[float],
    base: Optional[RunConfig] = None,
    jobs: int = 1,
) -> Tuple[List[Dict[str, float]], List[StatsRecord]]:
    """VSC at each gamma against the exhaustive SC baseline.

    Returns one row per gamma with per-instance ratios to SC averaged over
    instances (time, backtracks, estimation count), plus the raw records.
    """
    if not gammas:
        raise ValueError("need at least one gamma")
    base = base or RunConfig()
    configs = [replace(base, heuristic="sc", gamma=0.0)]
    configs += [replace(base, heuristic="vsc", gamma=g) for g in gammas]
    records = run_records(instances, configs, jobs)
    time_ratios = ratio_table(records, "search_time")
    bt_ratios = ratio_table(records, "backtracks")
    est_ratios = ratio_table(records, "sc_estimations")
    times = per_instance_means(records, "search_time")
    ests = per_instance_means(records, "sc_estimations")
    rows = []
    for g, cfg in zip(gammas, configs[1:]):
        label = cfg.label
        key = (label, "sc")
        rows.append(
            {
                "gamma": g,
                "time_ratio_mean": time_ratios[key]["mean_ratio"],
                "time_ratio_median": time_ratios[key]["median_ratio"],
                "backtrack_ratio_mean": bt_ratios[key]["mean_ratio"],
                "estimation_ratio_mean": est_ratios[key]["mean_ratio"],
                "estimation_ratio_median": est_ratios[key]["median_ratio"],
                "mean_search_time": statistics.fmean(times[label].values()),
                "mean_estimations": statistics.fmean(ests[label].values()),
            }
        )
    return rows, records


def records_to_csv(records: Iterable[StatsRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.as_dict())
    return buf.getvalue()


def records_from_csv(text: str) -> List[StatsRecord]:
    types = {f.name: f.type for f in fields(StatsRecord)}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for k, v in row.items():
            t = types[k]
            if t in ("bool", bool):
                kw[k] = v == "True"
            elif t in ("int", int):
                kw[k] = int(v)
            elif t in ("float", float):
                kw[k] = float(v)
            else:
                kw[k] = v
        out.append(StatsRecord(**kw))
    return out


def records_to_jsonl(records: Iterable[StatsRecord]) -> str:
    return "".join(json.dumps(r.as_dict()) + "\n" for r in records)


def rows_to_csv(rows: Sequence[Dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
