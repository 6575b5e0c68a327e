"""Throughput-optimal hybrid full-duplex/half-duplex mode selection for a
buffer-aided decode-and-forward relay, with an LP oracle and a slotted
Monte Carlo simulator."""

from .channel import (
    Mode,
    Region,
    RegionProbabilities,
    RsiCoefficient,
    RsiFixed,
    SystemParams,
    classify,
    region_probabilities,
    sample_gains,
    sinr,
    thresholds,
)
from .oracle import certify, oracle_vs_analytic, solve_lp
from .policy import (
    Policy,
    StatCase,
    baseline_policy,
    classify_case,
    closed_form_throughput,
    optimal_policy,
)
from .simulator import BufferMode, SimConfig, queue_growth_probe, run

__version__ = "0.1.0"
