"""Independent optimality checks for the closed-form policy.

Two routes that share nothing with the closed form:

* the relaxed slot-allocation problem solved as a 24-variable LP over
  region-aggregated mode fractions, and
* the KKT selection-function certificate: in each region every mode used
  with positive probability must maximize ``V_j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import VIABILITY, RegionProbabilities
from .policy import (
    Policy,
    StatCase,
    classify_case,
    closed_form_throughput,
    link_rates,
    optimal_policy,
)
from .simplex import simplex_max

__all__ = [
    "CERT_TOL",
    "CASE_ALPHA0",
    "KktCertificate",
    "Certification",
    "OracleComparison",
    "build_allocation_lp",
    "solve_lp",
    "policy_from_solution",
    "selection_functions",
    "certify",
    "oracle_vs_analytic",
    "TYPOS",
    "inject_typo",
    "random_probabilities",
    "case_boundary_vectors",
]

CERT_TOL = 1e-9

# Multiplier of the rate-balance constraint that certifies each case.
# Case 5 needs alpha0 = 1: its policy mixes M2 and M4 in R3, which is a tie
# only when (1 - alpha0) * R0 == 0.
CASE_ALPHA0 = {
    StatCase.PSI1: 0.0,
    StatCase.PSI2: 0.0,
    StatCase.PSI3: 0.5,
    StatCase.PSI4: 1.0,
    StatCase.PSI5: 1.0,
}


def build_allocation_lp(rp: RegionProbabilities, r0: float = 1.0, viability=VIABILITY):
    """Equality-form LP data ``(c, A, b)`` over ``x[k, j]`` flattened row-major.

    Row 0 is the rate balance (arrivals minus departures), rows 1..6 make
    each region's fractions sum to one.
    """
    o = np.asarray(viability, dtype=float)
    p = rp.p
    c = np.zeros((6, 4))
    c[:, 1] = p * o[:, 1] * r0
    c[:, 2] = p * o[:, 2] * r0
    bal = np.zeros((6, 4))
    bal[:, 0] = p * o[:, 0]
    bal[:, 1] = -p * o[:, 1]
    # column M3 stays zero: an FD slot enqueues and forwards R0 at once
    A = np.zeros((7, 24))
    A[0] = bal.ravel()
    for k in range(6):
        A[1 + k, 4 * k:4 * k + 4] = 1.0
    b = np.zeros(7)
    b[1:] = 1.0
    return c.ravel(), A, b


def solve_lp(rp: RegionProbabilities, viability=VIABILITY, r0: float = 1.0, forbidden=None):
    """Maximum long-run throughput over all stationary allocations.

    ``forbidden`` is an optional 6x4 boolean mask of (region, mode) pairs
    that may not be used. Returns ``(value, x)`` with ``x`` a 6x4 array of
    mode fractions. Modes that neither carry data nor touch the buffer are
    reported as silent (M4) when M4 is allowed.
    """
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    c, A, b = build_allocation_lp(rp, r0, viability)
    allowed = np.ones(24, dtype=bool)
    if forbidden is not None:
        allowed = ~np.asarray(forbidden, dtype=bool).ravel()
    cols = np.flatnonzero(allowed)
    res = simplex_max(c[cols], A[:, cols], b)
    x = np.zeros(24)
    x[cols] = res.x
    x = x.reshape(6, 4)

    inert = (c.reshape(6, 4) == 0) & (A[0].reshape(6, 4) == 0)
    inert[:, 3] = False
    for k in range(6):
        if allowed[4 * k + 3]:
            moved = x[k, inert[k]].sum()
            x[k, inert[k]] = 0.0
            x[k, 3] += moved
    return res.value, x


def policy_from_solution(x) -> Policy:
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    x = x / x.sum(axis=1, keepdims=True)
    return Policy(x)


@dataclass(frozen=True)
class KktCertificate:
    alpha0: float
    v: np.ndarray


def selection_functions(alpha0: float, r0: float = 1.0, viability=VIABILITY) -> KktCertificate:
    """Per-region selection functions ``V_j`` for a given balance multiplier."""
    o = np.asarray(viability, dtype=float)
    v = np.zeros((6, 4))
    v[:, 0] = alpha0 * o[:, 0] * r0
    v[:, 1] = (1.0 - alpha0) * o[:, 1] * r0
    v[:, 2] = o[:, 2] * r0
    return KktCertificate(alpha0=float(alpha0), v=v)


@dataclass
class Certification:
    certified: bool
    alpha0: float
    violations: list = field(default_factory=list)


def certify(policy: Policy, rp: RegionProbabilities, alpha0: float, r0: float = 1.0,
            tol: float = CERT_TOL) -> Certification:
    """Check that every mode the policy uses is an argmax of ``V_j``.

    Regions with zero probability never occur and are skipped. Each
    violation is ``(region, mode, gap)`` with ``gap`` how far the mode's
    selection function falls short of the regional maximum.
    """
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    v = selection_functions(alpha0, r0).v
    best = v.max(axis=1)
    violations = []
    for k in range(6):
        if rp.p[k] <= 0:
            continue
        for j in range(4):
            if policy.prob[k, j] > 0 and v[k, j] < best[k] - tol:
                violations.append((k + 1, j + 1, float(best[k] - v[k, j])))
    return Certification(certified=not violations, alpha0=float(alpha0), violations=violations)


@dataclass(frozen=True)
class OracleComparison:
    case: StatCase
    lp_value: float
    closed_form: float
    gap: float
    policy_value: float
    policy_gap: float
    balance_gap: float

    def ok(self, tol: float = CERT_TOL) -> bool:
        return self.gap < tol and self.policy_gap < tol and self.balance_gap < tol


def oracle_vs_analytic(rp: RegionProbabilities, r0: float = 1.0) -> OracleComparison:
    """Compare the LP optimum with the closed form and the closed-form policy."""
    if not isinstance(rp, RegionProbabilities):
        rp = RegionProbabilities(rp)
    lp_value, _ = solve_lp(rp, r0=r0)
    report = closed_form_throughput(rp, r0)
    arrival, departure = link_rates(optimal_policy(rp), rp, r0)
    return OracleComparison(
        case=classify_case(rp),
        lp_value=lp_value,
        closed_form=report.throughput,
        gap=abs(lp_value - report.throughput),
        policy_value=departure,
        policy_gap=abs(lp_value - departure),
        balance_gap=abs(arrival - departure),
    )


TYPOS = ("r2-m3", "r3-m1")


def inject_typo(policy: Policy, which: str) -> Policy:
    """Reinstate a misprinted entry of the published policy table.

    ``r2-m3`` moves R2's M1 mass onto M3 (infeasible there); ``r3-m1``
    moves R3's M2 mass onto M1 (also infeasible). Used as negative controls.
    """
    prob = policy.prob.copy()
    if which == "r2-m3":
        prob[1, 2] += prob[1, 0]
        prob[1, 0] = 0.0
    elif which == "r3-m1":
        prob[2, 0] += prob[2, 1]
        prob[2, 1] = 0.0
    else:
        raise ValueError(f"unknown typo {which!r}; choose from {TYPOS}")
    return Policy(prob)


def random_probabilities(rng: np.random.Generator, count: int) -> list:
    """``count`` region-probability vectors drawn from a flat Dirichlet."""
    return [RegionProbabilities(p) for p in rng.dirichlet(np.ones(6), size=count)]


def case_boundary_vectors(rng: np.random.Generator, per_boundary: int = 25) -> list:
    """Vectors sitting exactly on each of the four case boundaries.

    P_R3 is set to the boundary value computed from the other regions and
    P_R6 absorbs the remainder.
    """
    out = []
    for boundary in range(4):
        made = 0
        while made < per_boundary:
            q = rng.dirichlet(np.ones(6)) * rng.uniform(0.2, 1.0)
            p1, p2, p4, p5 = q[0], q[1], q[3], q[4]
            s = p4 + p5
            p3 = (s - p1 - p2, s - p2, s + p2, s + p2 + p1)[boundary]
            if p3 < 0:
                continue
            rest = p1 + p2 + p3 + p4 + p5
            if rest > 1:
                continue
            out.append(RegionProbabilities([p1, p2, p3, p4, p5, 1.0 - rest]))
            made += 1
    return out
