"""
Slot-level simulation
=====================

Simulating a million slots reproduces the analytic throughput, and the
relay queue shows whether a policy keeps the buffer balanced.
"""

# %%
from hybridrelay import Policy, SimConfig, closed_form_throughput, optimal_policy, region_probabilities, run
from hybridrelay.config import load_config
from hybridrelay.simulator import queue_growth_probe

params = load_config("fig4", overrides=["r0=2"]).params
rp = region_probabilities(params)
policy = optimal_policy(rp)

# %%
for buffer in ("ideal", "strict"):
    rep = run(SimConfig(params, policy, horizon=10 ** 6, seed=1, buffer=buffer))
    print(f"{buffer:>6}: {rep.est_throughput:.4f} +/- {rep.throughput_stderr:.4f} "
          f"(R1 {rep.est_r1:.4f}, R2 {rep.est_r2:.4f}, peak queue {rep.peak_queue:g})")
print(f"analytic: {closed_form_throughput(rp, params.r0).throughput:.4f}")

# %%
# A balanced queue grows like sqrt(N); one fed faster than it drains grows
# linearly.
for name, pol in [("optimal", policy), ("arrival-biased", Policy.deterministic([1, 1, 4, 1, 1, 4]))]:
    probe = queue_growth_probe(SimConfig(params, pol, horizon=1, seed=2), seeds=20)
    print(f"{name}: growth exponent {probe.exponent:.3f}")
