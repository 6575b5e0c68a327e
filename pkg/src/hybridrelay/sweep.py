"""Parameter sweeps producing one analytic (optionally simulated) row per point."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .channel import region_probabilities
from .config import RunConfig, params_from_values
from .policy import (
    BaselineKind,
    StatCase,
    baseline_policy,
    classify_case,
    closed_form_throughput,
    optimal_policy,
)
from .simulator import SimConfig, run

__all__ = ["SweepRow", "CSV_COLUMNS", "evaluate_point", "run_sweep", "write_csv", "read_csv", "write_json", "policy_for"]


@dataclass(frozen=True)
class SweepRow:
    """One sweep point.

    Throughputs are in bits/slot. ``series_var``/``series_value`` are empty
    when the sweep has no series, ``sim_*`` when it was not simulated.
    """

    series_var: Optional[str]
    series_value: Optional[float]
    axis_var: str
    axis_value: float
    p_r1: float
    p_r2: float
    p_r3: float
    p_r4: float
    p_r5: float
    p_r6: float
    case: str
    thr_optimal: float
    thr_hd_optimal: float
    thr_fd_always: float
    thr_fd_preferred: float
    sim_policy: Optional[str] = None
    sim_throughput: Optional[float] = None
    sim_stderr: Optional[float] = None


CSV_COLUMNS = tuple(f.name for f in fields(SweepRow))
_FLOAT_COLUMNS = {f.name for f in fields(SweepRow)} - {"series_var", "axis_var", "case", "sim_policy"}


def policy_for(kind: str, rp, r0: float):
    """``(policy, analytic throughput)`` for a config policy kind."""
    if kind == "optimal":
        return optimal_policy(rp), closed_form_throughput(rp, r0).throughput
    return baseline_policy(kind, rp, r0)


def evaluate_point(task) -> SweepRow:
    """Evaluate one ``(values, series_var, series_value, axis_var, axis_value, sim)`` task.

    ``sim`` is None or ``(policy_kind, horizon, seed, buffer, warmup)``.
    """
    values, series_var, series_value, axis_var, axis_value, sim = task
    params = params_from_values(values)
    rp = region_probabilities(params)
    r0 = params.r0
    thr = {"optimal": closed_form_throughput(rp, r0).throughput}
    for kind in BaselineKind:
        thr[kind.value] = float(baseline_policy(kind, rp, r0)[1])
    sim_fields = {}
    if sim is not None:
        kind, horizon, seed, buffer, warmup = sim
        policy, _ = policy_for(kind, rp, r0)
        report = run(SimConfig(params, policy, horizon=horizon, seed=seed, buffer=buffer, warmup=warmup))
        sim_fields = dict(sim_policy=kind, sim_throughput=report.est_throughput, sim_stderr=report.throughput_stderr)
    return SweepRow(
        series_var=series_var,
        series_value=series_value,
        axis_var=axis_var,
        axis_value=axis_value,
        **{f"p_r{k + 1}": float(rp.p[k]) for k in range(6)},
        case=StatCase(classify_case(rp)).label,
        thr_optimal=float(thr["optimal"]),
        thr_hd_optimal=thr["hd-optimal"],
        thr_fd_always=thr["fd-always"],
        thr_fd_preferred=thr["fd-preferred"],
        **sim_fields,
    )


def _tasks(cfg: RunConfig):
    axis_var = cfg.get("sweep_var")
    simulate = cfg.get("simulate", False)
    for i, (series_var, series_value) in enumerate(cfg.series()):
        for j, x in enumerate(cfg.sweep_values()):
            sim = None
            if simulate:
                # per-point seed so results do not depend on evaluation order
                seed = int(np.random.SeedSequence([cfg.get("seed", 0), i, j]).generate_state(1)[0])
                sim = (cfg.policy_kind, cfg.get("horizon"), seed, cfg.get("buffer", "ideal"), cfg.get("warmup"))
            yield (cfg.point_values(series_var, series_value, x), series_var, series_value, axis_var, x, sim)


def run_sweep(cfg: RunConfig, jobs: Optional[int] = None) -> list:
    tasks = list(_tasks(cfg))
    jobs = jobs if jobs is not None else cfg.get("jobs", 1)
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(evaluate_point, tasks))
    else:
        rows = [evaluate_point(t) for t in tasks]
    order = {v: i for i, (_, v) in enumerate(cfg.series())}
    return sorted(rows, key=lambda r: (order[r.series_value], r.axis_value))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, fh=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, c)) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        kw = {}
        for k, v in rec.items():
            if v == "":
                kw[k] = None
            elif k in _FLOAT_COLUMNS:
                kw[k] = float(v)
            else:
                kw[k] = v
        rows.append(SweepRow(**kw))
    return rows


def write_json(rows, fh=None, meta: Optional[dict] = None) -> str:
    doc = {"meta": meta or {}, "columns": list(CSV_COLUMNS), "rows": [asdict(r) for r in rows]}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fh is not None:
        fh.write(text)
    return text
