"""
Outage regions of the two-hop channel
=====================================

Each slot's pair of fading gains falls in one of six regions; the region
decides which transmission modes can succeed.
"""

# %%
import numpy as np

from hybridrelay import RsiFixed, SystemParams, region_probabilities, thresholds
from hybridrelay.channel import VIABILITY, classify_array, sample_gains

params = SystemParams.from_db(25, 25, rsi=RsiFixed(5.0), omega1=0.8, omega2=0.6, r0=2.0)
th = thresholds(params)
print(f"gamma0 = {params.gamma0:g}")
print(f"g1 thresholds: HD {th.g1_hd:.4g}, FD {th.g1_fd:.4g}; g2 threshold {th.g2_hd:.4g}")

# %%
# Which modes succeed in each region (columns M1..M4).
for k, row in enumerate(VIABILITY, start=1):
    print(f"R{k}: {row.tolist()}")

# %%
# Closed-form region probabilities against a million sampled slots.
rp = region_probabilities(params)
g1, g2 = sample_gains(params, np.random.default_rng(0), 10 ** 6)
freq = np.bincount(classify_array(th, g1, g2), minlength=7)[1:] / g1.size
for k in range(6):
    print(f"P_R{k + 1}: closed form {rp.p[k]:.5f}, sampled {freq[k]:.5f}")

# %%
# More residual self-interference only moves mass from R1 to R2 (and from
# R5 to R4); the column sums are unchanged.
for i_r in (0.0, 5.0, 50.0):
    p = region_probabilities(SystemParams.from_db(25, 25, rsi=RsiFixed(i_r), omega1=0.8, omega2=0.6, r0=2.0)).p
    print(f"I_R={i_r:5g}  P_R1={p[0]:.4f}  P_R2={p[1]:.4f}  P_R1+P_R2={p[0] + p[1]:.4f}")
