"""
Throughput sweeps from the figure presets
=========================================

The presets reproduce the throughput-vs-rate and throughput-vs-power
curves. The same tables come out of ``hybridrelay sweep --preset NAME``.
"""

# %%
from hybridrelay.config import load_config
from hybridrelay.sweep import run_sweep

# %%
# Throughput against the fixed rate for three RSI levels.
rows = run_sweep(load_config("fig4"))
for r in rows:
    if r.axis_value in (1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0):
        print(f"I_r={r.series_value:4g} R0={r.axis_value:4g} {r.case}  hybrid {r.thr_optimal:.4f}  "
              f"HD {r.thr_hd_optimal:.4f}")

# %%
# Raising the source power moves the system from one case to another.
for r in run_sweep(load_config("fig5"))[::4]:
    print(f"P1={r.axis_value:5g} dB {r.case}  {r.thr_optimal:.4f}")

# %%
# With RSI tied to the relay power, throughput peaks and then settles.
rows = [r for r in run_sweep(load_config("fig6")) if r.series_value == 1.0]
best = max(rows, key=lambda r: r.thr_optimal)
print(f"peak {best.thr_optimal:.4f} at P2 = {best.axis_value:g} dB; at 60 dB {rows[-1].thr_optimal:.4f}")
