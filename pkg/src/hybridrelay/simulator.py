"""Slotted Monte Carlo simulation of the buffer-aided relay.

Every slot draws fresh Rayleigh gains, classifies them into a region,
samples a mode from the policy row of that region and updates the relay
queue. The whole horizon is generated with vectorized numpy operations;
the queue recursion is solved in closed form (see ``_queue_path``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import VIABILITY, SystemParams, classify_array, sample_gains, thresholds
from .policy import Policy

__all__ = [
    "BufferMode",
    "SimConfig",
    "SlotTrace",
    "SimReport",
    "GrowthProbe",
    "simulate_trace",
    "estimate_rates",
    "run",
    "merge_reports",
    "queue_growth_probe",
]

DEFAULT_WARMUP = 10_000
MAX_QUEUE_SAMPLES = 10_000


class BufferMode(str, enum.Enum):
    IDEAL = "ideal"
    STRICT = "strict"


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``warmup`` slots are simulated but excluded from the estimates. When
    left as None it defaults to ``min(10_000, horizon // 10)``.
    Under ``IDEAL`` buffering the relay always delivers when it transmits
    successfully; under ``STRICT`` it only delivers with at least ``r0``
    bits queued before the slot.
    """

    params: SystemParams
    policy: Policy
    horizon: int
    seed: int = 0
    buffer: BufferMode = BufferMode.IDEAL
    warmup: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "buffer", BufferMode(self.buffer))
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        object.__setattr__(self, "horizon", int(self.horizon))
        if self.warmup is None:
            object.__setattr__(self, "warmup", min(DEFAULT_WARMUP, self.horizon // 10))
        if not 0 <= self.warmup < self.horizon:
            raise ValueError(f"warmup must be in [0, horizon), got {self.warmup!r}")


@dataclass
class SlotTrace:
    """Per-slot record of a run. Queue and rate quantities are in units of r0."""

    region: np.ndarray
    mode: np.ndarray
    arrive: np.ndarray
    depart: np.ndarray
    delivered: np.ndarray
    queue: np.ndarray
    r0: float


def _sample_modes(policy: Policy, region: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(policy.prob, axis=1)
    mode = np.empty(region.shape, dtype=np.int8)
    for k in range(6):
        idx = region == k + 1
        mode[idx] = np.searchsorted(cum[k], u[idx], side="right")
    np.minimum(mode, 3, out=mode)
    return mode + 1


def _queue_path(arrive: np.ndarray, depart: np.ndarray, strict: bool) -> np.ndarray:
    """Queue length after each slot, starting from an empty buffer.

    Ideal buffering is the Lindley recursion ``q' = max(q + a - d, 0)``;
    strict buffering is ``q' = max(q + a - d, a)``. Both have the form
    ``q' = max(q + x, y)``, whose n-fold composition from ``q = 0`` is
    ``S_n + max(0, max_{k<=n} (y_k - S_k))`` with ``S`` the prefix sum of x.
    """
    x = arrive.astype(np.int64) - depart.astype(np.int64)
    s = np.cumsum(x)
    floor = arrive.astype(np.int64) if strict else np.zeros_like(s)
    return s + np.maximum(np.maximum.accumulate(floor - s), 0)


def _simulate(params: SystemParams, policy: Policy, n: int, rng: np.random.Generator, strict: bool) -> SlotTrace:
    g1, g2 = sample_gains(params, rng, n)
    region = classify_array(thresholds(params), g1, g2)
    mode = _sample_modes(policy, region, rng.random(n))
    ok = VIABILITY[region - 1, mode - 1].astype(bool)
    arrive = ok & ((mode == 1) | (mode == 3))
    depart = ok & ((mode == 2) | (mode == 3))
    queue = _queue_path(arrive, depart, strict)
    if strict:
        prev = np.concatenate(([0], queue[:-1]))
        delivered = (arrive.astype(np.int64) - (queue - prev)).astype(bool)
    else:
        delivered = depart
    return SlotTrace(region, mode, arrive, depart, delivered, queue, params.r0)


def simulate_trace(cfg: SimConfig) -> SlotTrace:
    rng = np.random.default_rng(cfg.seed)
    return _simulate(cfg.params, cfg.policy, cfg.horizon, rng, cfg.buffer is BufferMode.STRICT)


def estimate_rates(trace: SlotTrace, warmup: int = 0):
    """Empirical ``(R1, R2)`` in bits/slot over the slots after ``warmup``."""
    a = trace.arrive[warmup:]
    d = trace.depart[warmup:]
    return float(a.mean() * trace.r0), float(d.mean() * trace.r0)


@dataclass
class SimReport:
    horizon: int
    warmup: int
    seed: int
    buffer: str
    r0: float
    slots: int
    est_r1: float
    est_r2: float
    est_throughput: float
    throughput_stderr: float
    mode_counts: list
    region_counts: list
    final_queue: float
    peak_queue: float
    growth_exponent: Optional[float]
    queue_stride: int
    queue_samples: list = field(repr=False)

    def to_dict(self) -> dict:
        return asdict(self)


def _block_growth_exponent(queue: np.ndarray) -> Optional[float]:
    # mean queue over dyadic blocks (2^(j-1), 2^j], fitted on a log-log scale
    ends = [2 ** j for j in range(10, 64) if 2 ** j <= queue.size]
    if len(ends) < 3:
        return None
    means = np.array([queue[e // 2:e].mean() for e in ends])
    if np.any(means <= 0):
        return None
    return float(np.polyfit(np.log(ends), np.log(means), 1)[0])


def _summarize(cfg: SimConfig, trace: SlotTrace) -> SimReport:
    w = cfg.warmup
    n = cfg.horizon - w
    r0 = cfg.params.r0
    est_r1, est_r2 = estimate_rates(trace, w)
    delivered = trace.delivered[w:]
    thr = float(delivered.mean() * r0)
    stderr = float(delivered.std(ddof=1) * r0 / math.sqrt(n)) if n > 1 else float("nan")
    region = trace.region[w:].astype(np.int64)
    mode = trace.mode[w:].astype(np.int64)
    counts = np.bincount((region - 1) * 4 + (mode - 1), minlength=24).reshape(6, 4)
    stride = max(1, math.ceil(cfg.horizon / MAX_QUEUE_SAMPLES))
    q = trace.queue
    return SimReport(
        horizon=cfg.horizon,
        warmup=w,
        seed=cfg.seed,
        buffer=cfg.buffer.value,
        r0=r0,
        slots=n,
        est_r1=est_r1,
        est_r2=est_r2,
        est_throughput=thr,
        throughput_stderr=stderr,
        mode_counts=counts.tolist(),
        region_counts=counts.sum(axis=1).tolist(),
        final_queue=float(q[-1] * r0),
        peak_queue=float(q.max() * r0),
        growth_exponent=_block_growth_exponent(q),
        queue_stride=stride,
        queue_samples=(q[stride - 1::stride] * r0).tolist(),
    )


def run(cfg: SimConfig) -> SimReport:
    """Simulate ``cfg.horizon`` slots; deterministic given ``cfg.seed``."""
    return _summarize(cfg, simulate_trace(cfg))


def merge_reports(reports: Sequence[SimReport]) -> dict:
    """Pool independent shards by slot-weighted averaging."""
    if not reports:
        raise ValueError("nothing to merge")
    slots = np.array([r.slots for r in reports], dtype=float)
    weights = slots / slots.sum()

    def avg(name):
        return float(sum(w * getattr(r, name) for w, r in zip(weights, reports)))

    var = sum(w ** 2 * r.throughput_stderr ** 2 for w, r in zip(weights, reports))
    return {
        "shards": len(reports),
        "slots": int(slots.sum()),
        "est_r1": avg("est_r1"),
        "est_r2": avg("est_r2"),
        "est_throughput": avg("est_throughput"),
        "throughput_stderr": float(math.sqrt(var)),
        "mode_counts": np.sum([r.mode_counts for r in reports], axis=0).tolist(),
        "region_counts": np.sum([r.region_counts for r in reports], axis=0).tolist(),
    }


@dataclass
class GrowthProbe:
    exponent: Optional[float]
    horizons: list
    mean_queue: list
    seeds: int

    @property
    def degenerate(self) -> bool:
        return self.exponent is None


def queue_growth_probe(cfg: SimConfig, seeds: int = 100, horizons=None) -> GrowthProbe:
    """Fit ``log E[Q(N)]`` against ``log N`` over dyadic horizons.

    A balanced policy leaves the queue a driftless reflected random walk
    (exponent near 1/2); a policy with more arrivals than departures makes
    it grow linearly (exponent near 1). An all-silent policy never queues
    anything and is reported as degenerate.
    """
    if horizons is None:
        horizons = [2 ** j for j in range(14, 21)]
    horizons = sorted(int(h) for h in horizons)
    n = horizons[-1]
    idx = np.array(horizons) - 1
    strict = cfg.buffer is BufferMode.STRICT
    total = np.zeros(len(horizons))
    for child in np.random.SeedSequence(cfg.seed).spawn(seeds):
        trace = _simulate(cfg.params, cfg.policy, n, np.random.default_rng(child), strict)
        total += trace.queue[idx] * cfg.params.r0
    mean_q = total / seeds
    if np.any(mean_q <= 0):
        exponent = None
    else:
        exponent = float(np.polyfit(np.log(horizons), np.log(mean_q), 1)[0])
    return GrowthProbe(exponent=exponent, horizons=horizons, mean_queue=mean_q.tolist(), seeds=seeds)
