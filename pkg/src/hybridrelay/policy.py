"""Optimal hybrid FD/HD mode selection and its closed-form throughput.

A policy is a 6x4 row-stochastic matrix: entry ``[k, j]`` is the probability
of picking mode ``M(j+1)`` in a slot whose channel gains fall in region
``R(k+1)``. Which policy is optimal depends only on how the region
probabilities compare (five statistical cases).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import VIABILITY, RegionProbabilities

__all__ = [
    "StatCase",
    "Policy",
    "ThroughputReport",
    "BaselineKind",
    "classify_case",
    "optimal_policy",
    "closed_form_throughput",
    "link_rates",
    "policy_throughput",
    "hd_optimal_throughput",
    "baseline_policy",
]

_CLAMP_TOL = 1e-12


class StatCase(enum.IntEnum):
    PSI1 = 1
    PSI2 = 2
    PSI3 = 3
    PSI4 = 4
    PSI5 = 5

    @property
    def label(self) -> str:
        return f"Psi{self.value}"


class BaselineKind(str, enum.Enum):
    HD_OPTIMAL = "hd-optimal"
    FD_ALWAYS = "fd-always"
    FD_PREFERRED = "fd-preferred"


@dataclass(frozen=True, eq=False)
class Policy:
    """Per-region mode-selection probabilities.

    ``flagged`` lists regions (1-based) whose row could not be computed
    because the region has zero probability; those rows are all-silent.
    """

    prob: np.ndarray
    flagged: tuple = ()

    def __post_init__(self):
        prob = np.array(self.prob, dtype=float)
        if prob.shape != (6, 4):
            raise ValueError(f"policy must be 6x4, got {prob.shape}")
        if np.any(prob < 0) or np.any(prob > 1):
            raise ValueError("policy entries must lie in [0, 1]")
        if np.any(np.abs(prob.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError(f"policy rows must sum to 1, got {prob.sum(axis=1).tolist()}")
        prob.setflags(write=False)
        object.__setattr__(self, "prob", prob)

    @classmethod
    def deterministic(cls, modes) -> "Policy":
        """Policy picking ``modes[k]`` (1..4) in region ``k + 1``."""
        prob = np.zeros((6, 4))
        prob[np.arange(6), np.asarray(modes) - 1] = 1.0
        return cls(prob)

    def __eq__(self, other):
        return isinstance(other, Policy) and np.array_equal(self.prob, other.prob)

    def __hash__(self):
        return hash(self.prob.tobytes())

    def format(self) -> str:
        lines = ["region      M1       M2       M3       M4"]
        for k, row in enumerate(self.prob, start=1):
            lines.append(f"R{k}    " + " ".join(f"{v:8.6f}" for v in row))
        return "\n".join(lines)


@dataclass(frozen=True)
class ThroughputReport:
    throughput: float
    case: StatCase
    arrival_rate: float
    departure_rate: float


def classify_case(rp: RegionProbabilities) -> StatCase:
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    p1, p2, p3 = rp[1], rp[2], rp[3]
    s = rp.fd_strip
    if p3 <= s - p1 - p2:
        return StatCase.PSI1
    if p3 <= s - p2:
        return StatCase.PSI2
    if p3 <= s + p2:
        return StatCase.PSI3
    if p3 <= s + p2 + p1:
        return StatCase.PSI4
    return StatCase.PSI5


def _fraction(num: float, den: float) -> Optional[float]:
    if den <= 0.0:
        return None
    x = num / den
    if x < -_CLAMP_TOL or x > 1.0 + _CLAMP_TOL:
        raise ArithmeticError(f"selection probability {x!r} outside [0, 1]")
    return min(1.0, max(0.0, x))


def optimal_policy(rp: RegionProbabilities) -> Policy:
    """Throughput-optimal randomized mode selection for ``rp``."""
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    case = classify_case(rp)
    p1, p2, p3 = rp[1], rp[2], rp[3]
    s = rp.fd_strip
    prob = np.zeros((6, 4))
    flagged = []

    def split(region, mode_a, frac, mode_b):
        if frac is None:
            prob[region - 1, 3] = 1.0
            flagged.append(region)
        else:
            prob[region - 1, mode_a - 1] = frac
            prob[region - 1, mode_b - 1] += 1.0 - frac

    def pick(region, mode):
        prob[region - 1, mode - 1] = 1.0

    if case is StatCase.PSI1:
        pick(1, 2)
        pick(2, 2)
        pick(3, 2)
        frac = _fraction(p1 + p2 + p3, s)
        split(4, 1, frac, 4)
        split(5, 1, frac, 4)
    elif case is StatCase.PSI2:
        split(1, 2, _fraction(s - p2 - p3, p1), 3)
        pick(2, 2)
        pick(3, 2)
        pick(4, 1)
        pick(5, 1)
    elif case is StatCase.PSI3:
        pick(1, 3)
        split(2, 2, _fraction(p2 + s - p3, 2.0 * p2), 1)
        pick(3, 2)
        pick(4, 1)
        pick(5, 1)
    elif case is StatCase.PSI4:
        split(1, 1, _fraction(p3 - p2 - s, p1), 3)
        pick(2, 1)
        pick(3, 2)
        pick(4, 1)
        pick(5, 1)
    else:
        pick(1, 1)
        pick(2, 1)
        split(3, 2, _fraction(p1 + p2 + s, p3), 4)
        pick(4, 1)
        pick(5, 1)
    pick(6, 4)
    # regions that never occur are reported silent
    prob[rp.p == 0.0] = (0.0, 0.0, 0.0, 1.0)
    return Policy(prob, tuple(flagged))


def link_rates(policy: Policy, rp: RegionProbabilities, r0: float = 1.0):
    """Long-run ``(arrival_rate, departure_rate)`` at the relay buffer.

    Arrivals count successful M1 and M3 slots, departures successful M2
    and M3 slots.
    """
    w = rp.p[:, None] * policy.prob * VIABILITY
    arrival = (w[:, 0].sum() + w[:, 2].sum()) * r0
    departure = (w[:, 1].sum() + w[:, 2].sum()) * r0
    return float(arrival), float(departure)


def policy_throughput(policy: Policy, rp: RegionProbabilities, r0: float = 1.0) -> float:
    """Throughput a policy sustains with a stable buffer, ``min(R1, R2)``."""
    return min(link_rates(policy, rp, r0))


def closed_form_throughput(rp: RegionProbabilities, r0: float = 1.0) -> ThroughputReport:
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    case = classify_case(rp)
    p1, p2, p3 = rp[1], rp[2], rp[3]
    s = rp.fd_strip
    if case in (StatCase.PSI1, StatCase.PSI2):
        t = p1 + p2 + p3
    elif case is StatCase.PSI3:
        t = p1 + (p2 + p3 + s) / 2.0
    else:
        t = p1 + p2 + s
    arrival, departure = link_rates(optimal_policy(rp), rp, r0)
    return ThroughputReport(throughput=t * r0, case=case, arrival_rate=arrival, departure_rate=departure)


def _hd_split(rp: RegionProbabilities):
    fd_strip = rp.fd_strip
    r3 = rp[3]
    both = rp[1] + rp[2]
    return fd_strip, r3, both


def hd_optimal_throughput(rp: RegionProbabilities, r0: float = 1.0) -> float:
    """Best throughput when the FD mode is never used.

    With ``A = P_R4 + P_R5``, ``B = P_R3`` and ``C = P_R1 + P_R2`` the
    slots in C can serve either hop, so the balanced optimum is
    ``min((A + B + C) / 2, A + C, B + C)``.
    """
    a, b, c = _hd_split(rp)
    return min((a + b + c) / 2.0, a + c, b + c) * r0


def _hd_optimal_policy(rp: RegionProbabilities) -> Policy:
    a, b, c = _hd_split(rp)
    prob = np.zeros((6, 4))
    flagged = []
    prob[5, 3] = 1.0
    if b >= a + c:
        # relay-destination hop is plentiful: throttle it in R3
        prob[[0, 1, 3, 4], 0] = 1.0
        frac = _fraction(a + c, b)
        if frac is None:
            prob[2, 3] = 1.0
            flagged.append(3)
        else:
            prob[2, 1] = frac
            prob[2, 3] = 1.0 - frac
    elif a >= b + c:
        prob[[0, 1, 2], 1] = 1.0
        frac = _fraction(b + c, a)
        if frac is None:
            prob[[3, 4], 3] = 1.0
            flagged.extend([4, 5])
        else:
            prob[[3, 4], 0] = frac
            prob[[3, 4], 3] = 1.0 - frac
    else:
        prob[[3, 4], 0] = 1.0
        prob[2, 1] = 1.0
        frac = _fraction(a + c - b, 2.0 * c)
        if frac is None:
            prob[[0, 1], 3] = 1.0
            flagged.extend([1, 2])
        else:
            prob[[0, 1], 1] = frac
            prob[[0, 1], 0] = 1.0 - frac
    return Policy(prob, tuple(flagged))


def baseline_policy(kind, rp: RegionProbabilities, r0: float = 1.0):
    """Comparator policies and their throughput.

    ``hd-optimal`` never uses FD. ``fd-always`` transmits only in FD-viable
    slots. ``fd-preferred`` forces FD whenever it is viable and balances
    the remaining regions optimally (solved with the LP oracle).

    Returns ``(policy, throughput)``.
    """
    kind = BaselineKind(kind)
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    if kind is BaselineKind.HD_OPTIMAL:
        return _hd_optimal_policy(rp), hd_optimal_throughput(rp, r0)
    if kind is BaselineKind.FD_ALWAYS:
        return Policy.deterministic([3, 4, 4, 4, 4, 4]), rp[1] * r0
    # deferred import: the oracle depends on this module
    from .oracle import solve_lp, policy_from_solution

    forbidden = np.zeros((6, 4), dtype=bool)
    forbidden[0, [0, 1, 3]] = True
    value, x = solve_lp(rp, r0=r0, forbidden=forbidden)
    return policy_from_solution(x), value
