"""
Checking the closed form with a linear program
==============================================

The allocation problem relaxes to a 24-variable LP. Solving it with the
bundled simplex gives an optimum that owes nothing to the closed form.
"""

# %%
import numpy as np

from hybridrelay import RegionProbabilities, closed_form_throughput, optimal_policy, solve_lp
from hybridrelay.oracle import CASE_ALPHA0, certify, inject_typo, random_probabilities
from hybridrelay.policy import classify_case

rp = RegionProbabilities([0.3, 0.1, 0.05, 0.15, 0.1, 0.3])
value, x = solve_lp(rp)
print(f"LP optimum {value:.6f}, closed form {closed_form_throughput(rp).throughput:.6f}")
print(np.round(x, 4))

# %%
# Many random vectors at once.
gaps = [abs(solve_lp(v)[0] - closed_form_throughput(v).throughput)
        for v in random_probabilities(np.random.default_rng(1), 500)]
print(f"max gap over 500 vectors: {max(gaps):.1e}")

# %%
# The KKT certificate: every mode in use must maximize the selection
# function for the case's balance multiplier.
rp = RegionProbabilities([0.2, 0.2, 0.15, 0.1, 0.05, 0.3])
case = classify_case(rp)
print(case.label, certify(optimal_policy(rp), rp, CASE_ALPHA0[case]))
print("with the R3/M1 misprint:", certify(inject_typo(optimal_policy(rp), "r3-m1"), rp, CASE_ALPHA0[case]))
