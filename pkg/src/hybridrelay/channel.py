"""Channel model of the three-node decode-and-forward relay link.

Only the channel gains g1 = |h1|^2 (source-relay) and g2 = |h2|^2
(relay-destination) matter. Each slot's gain pair falls into one of six
regions of the (g1, g2) plane, and the region alone fixes which
transmission modes can succeed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Union

import numpy as np

__all__ = [
    "Region",
    "Mode",
    "VIABILITY",
    "RsiCoefficient",
    "RsiFixed",
    "SystemParams",
    "OutageThresholds",
    "RegionProbabilities",
    "db_to_linear",
    "linear_to_db",
    "sinr",
    "thresholds",
    "classify",
    "classify_array",
    "viability",
    "sample_gains",
    "region_probabilities",
]


class Region(IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4
    R5 = 5
    R6 = 6


class Mode(IntEnum):
    """Transmission modes.

    M1: source sends, relay receives (HD). M2: relay forwards from its
    buffer (HD). M3: both at once (FD). M4: everybody silent.
    """
    M1 = 1
    M2 = 2
    M3 = 3
    M4 = 4


# Success indicators O_j per region (rows R1..R6, columns M1..M4).
VIABILITY = np.array(
    [
        [1, 1, 1, 0],
        [1, 1, 0, 0],
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 0],
    ],
    dtype=np.int64,
)
VIABILITY.setflags(write=False)


def db_to_linear(db):
    if np.ndim(db):
        return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class RsiCoefficient:
    """Residual self-interference proportional to the relay power, I_R = k_r * P2."""
    k_r: float

    def level(self, p2: float) -> float:
        return self.k_r * p2


@dataclass(frozen=True)
class RsiFixed:
    """Residual self-interference with a fixed power I_R = i_r."""
    i_r: float

    def level(self, p2: float) -> float:
        return self.i_r


Rsi = Union[RsiCoefficient, RsiFixed]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the relay link, all in linear units.

    Parameters
    ----------
    p1, p2 : float
        Transmit powers of the source and the relay.
    sigma2_r, sigma2_d : float
        Noise variances at the relay and at the destination.
    rsi : RsiCoefficient or RsiFixed
        Residual self-interference model for FD operation.
    omega1, omega2 : float
        Means of the exponentially distributed gains g1 and g2.
    r0 : float
        Fixed transmission rate in bits/slot.
    gamma0_override : float, optional
        Explicit SINR outage threshold. When omitted the Shannon threshold
        ``2**r0 - 1`` is used.
    """

    p1: float
    p2: float
    sigma2_r: float = 1.0
    sigma2_d: float = 1.0
    rsi: Rsi = field(default_factory=lambda: RsiFixed(0.0))
    omega1: float = 1.0
    omega2: float = 1.0
    r0: float = 1.0
    gamma0_override: Optional[float] = None

    def __post_init__(self):
        for name in ("p1", "p2", "sigma2_r", "sigma2_d", "omega1", "omega2", "r0"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")
        if not isinstance(self.rsi, (RsiCoefficient, RsiFixed)):
            raise TypeError(f"rsi must be RsiCoefficient or RsiFixed, got {type(self.rsi).__name__}")
        if not (math.isfinite(self.i_r) and self.i_r >= 0):
            raise ValueError(f"residual self-interference must be >= 0, got {self.i_r!r}")
        if self.gamma0_override is not None and not (self.gamma0_override > 0 and math.isfinite(self.gamma0_override)):
            raise ValueError(f"gamma0_override must be positive, got {self.gamma0_override!r}")

    @classmethod
    def from_db(cls, p1_db: float, p2_db: float, **kwargs) -> "SystemParams":
        return cls(p1=db_to_linear(p1_db), p2=db_to_linear(p2_db), **kwargs)

    @property
    def i_r(self) -> float:
        """Effective residual self-interference power I_R."""
        return float(self.rsi.level(self.p2))

    @property
    def gamma0(self) -> float:
        if self.gamma0_override is not None:
            return float(self.gamma0_override)
        return 2.0 ** self.r0 - 1.0


@dataclass(frozen=True)
class OutageThresholds:
    """Gain thresholds separating outage from success on each link."""
    g1_hd: float
    g1_fd: float
    g2_hd: float


def sinr(params: SystemParams, g1, g2):
    """Return ``(gamma1_fd, gamma1_hd, gamma2)`` for the given gains.

    Works elementwise on arrays.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    gamma1_fd = params.p1 * g1 / (params.i_r + params.sigma2_r)
    gamma1_hd = params.p1 * g1 / params.sigma2_r
    gamma2 = params.p2 * g2 / params.sigma2_d
    if gamma1_fd.ndim == 0:
        return float(gamma1_fd), float(gamma1_hd), float(gamma2)
    return gamma1_fd, gamma1_hd, gamma2


def thresholds(params: SystemParams) -> OutageThresholds:
    g0 = params.gamma0
    return OutageThresholds(
        g1_hd=g0 * params.sigma2_r / params.p1,
        g1_fd=g0 * (params.i_r + params.sigma2_r) / params.p1,
        g2_hd=g0 * params.sigma2_d / params.p2,
    )


# Region number indexed by [g2 above threshold][g1 strip], strips being
# 0: below HD threshold, 1: between HD and FD thresholds, 2: above FD threshold.
_REGION_GRID = np.array([[6, 4, 5], [3, 2, 1]], dtype=np.int8)


def classify_array(th: OutageThresholds, g1, g2) -> np.ndarray:
    """Vectorized region classification, returning region numbers 1..6.

    A gain sitting exactly on a threshold counts as a success.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    strip = (g1 >= th.g1_hd).astype(np.int8) + (g1 >= th.g1_fd).astype(np.int8)
    top = (g2 >= th.g2_hd).astype(np.int8)
    return _REGION_GRID[top, strip]


def classify(th: OutageThresholds, g1: float, g2: float) -> Region:
    return Region(int(classify_array(th, g1, g2)))


def viability(region) -> np.ndarray:
    """Success indicators (o1, o2, o3, o4) of each mode in ``region``."""
    return VIABILITY[np.asarray(region) - 1]


def sample_gains(params: SystemParams, rng: np.random.Generator, size=None):
    """Draw Rayleigh-fading power gains ``(g1, g2)``.

    Both gains are exponential with means ``omega1`` and ``omega2`` and are
    independent of each other and across slots.
    """
    g1 = rng.exponential(params.omega1, size)
    g2 = rng.exponential(params.omega2, size)
    return g1, g2


class RegionProbabilities:
    """Probabilities of the six channel-gain regions.

    Stored 0-based: ``rp.p[0]`` is the probability of R1.
    """

    __slots__ = ("p",)
    SUM_TOL = 1e-12

    def __init__(self, p):
        arr = np.array(p, dtype=float).reshape(-1)
        if arr.shape != (6,):
            raise ValueError(f"expected 6 region probabilities, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("region probabilities must be finite")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError(f"region probabilities must lie in [0, 1]: {arr.tolist()}")
        if abs(arr.sum() - 1.0) > self.SUM_TOL:
            raise ValueError(f"region probabilities must sum to 1, got {arr.sum()!r}")
        arr.setflags(write=False)
        self.p = arr

    def __getitem__(self, region) -> float:
        """Probability of a region, indexed by its 1-based number."""
        return float(self.p[int(region) - 1])

    def __iter__(self):
        return iter(self.p.tolist())

    def __eq__(self, other):
        return isinstance(other, RegionProbabilities) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash(self.p.tobytes())

    def __repr__(self):
        return f"RegionProbabilities({self.p.tolist()!r})"

    @property
    def fd_strip(self) -> float:
        """P_R4 + P_R5, the mass where only the source-relay hop succeeds."""
        return float(self.p[3] + self.p[4])


def region_probabilities(params: SystemParams) -> RegionProbabilities:
    th = thresholds(params)
    a = math.exp(-th.g1_hd / params.omega1)
    b = math.exp(-th.g1_fd / params.omega1)
    c = math.exp(-th.g2_hd / params.omega2)
    p = [b * c, (a - b) * c, (1 - a) * c, (a - b) * (1 - c), b * (1 - c), (1 - a) * (1 - c)]
    return RegionProbabilities(p)
