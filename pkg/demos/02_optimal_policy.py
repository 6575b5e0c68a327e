"""
Optimal mode selection
======================

The optimal randomized policy depends only on how the six region
probabilities compare. Here we walk through one vector per case.
"""

# %%
from hybridrelay import RegionProbabilities, classify_case, closed_form_throughput, optimal_policy
from hybridrelay.policy import baseline_policy, link_rates

examples = [
    (0.05, 0.05, 0.05, 0.3, 0.3, 0.25),
    (0.3, 0.1, 0.05, 0.15, 0.1, 0.3),
    (0.2, 0.2, 0.15, 0.1, 0.05, 0.3),
    (0.2, 0.05, 0.3, 0.05, 0.05, 0.35),
    (0.1, 0.05, 0.5, 0.05, 0.05, 0.25),
]

# %%
for p in examples:
    rp = RegionProbabilities(p)
    pol = optimal_policy(rp)
    arrival, departure = link_rates(pol, rp)
    print(f"{classify_case(rp).label}: throughput {closed_form_throughput(rp).throughput:.4f} "
          f"(arrivals {arrival:.4f}, departures {departure:.4f})")
    print(pol.format())
    print()

# %%
# Comparators: never FD, FD only, and FD whenever possible.
rp = RegionProbabilities(examples[2])
for kind in ("hd-optimal", "fd-always", "fd-preferred"):
    _, thr = baseline_policy(kind, rp)
    print(f"{kind:>12}: {thr:.4f}")
print(f"{'optimal':>12}: {closed_form_throughput(rp).throughput:.4f}")
