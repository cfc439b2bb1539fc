"""Rates, powers, and the concave logarithm bound.

Evaluates every model quantity at a hand-built operating point, then shows the
surrogate rate touching the true rate exactly at the matched multiplier.
"""

from irsmec import (SystemConfig, dinkelbach_update, energy_efficiency,
                    generate_channels, initialize, local_rate, offload_rate,
                    sic_order, sinr, sum_power, sum_rate, surrogate_rate,
                    total_power)

cfg = SystemConfig().validate()
real = generate_channels(cfg, 7)
alloc, aux = initialize(real, cfg)

print("operating point (the optimizer's cold start):")
print(f"  p = {alloc.p} W, f = {alloc.f} Hz")

for k in sic_order(real):
    print(f"UE{k}: sinr {sinr(real, alloc, cfg, k):9.3f}  "
          f"offload {offload_rate(real, alloc, cfg, k)/1e6:6.3f} Mb/s  "
          f"local {local_rate(alloc, cfg, k)/1e6:6.3f} Mb/s  "
          f"power {total_power(alloc, cfg, k):.4f} W")

print(f"sum rate  {sum_rate(real, alloc, cfg)/1e6:.4f} Mb/s")
print(f"sum power {sum_power(alloc, cfg):.4f} W")
print(f"EE        {energy_efficiency(real, alloc, cfg):.4e} bits/J")

# the bound -t*x + ln t + 1 >= -ln x is tight at t = 1/x; initialize() hands
# back multipliers already matched to the cold start's interference
print(f"\nmatched multipliers t = {aux.t}")
for k in range(2):
    exact = offload_rate(real, alloc, cfg, k)
    tight = surrogate_rate(real, alloc, cfg, aux, k)
    print(f"UE{k}: surrogate - exact = {tight - exact:+.3e} bits/s")

# away from the matched point the surrogate only under-estimates; the outer
# loop re-tightens it each iteration with dinkelbach_update
probe = alloc.copy()
probe.p = alloc.p * 1.8
for k in range(2):
    gap = (surrogate_rate(real, probe, cfg, aux, k)
           - offload_rate(real, probe, cfg, k))
    print(f"UE{k} at 1.8x power: surrogate gap {gap:+.3e} bits/s (<= 0)")
refreshed = dinkelbach_update(real, probe, cfg)
gap = (surrogate_rate(real, probe, cfg, refreshed, 0)
       - offload_rate(real, probe, cfg, 0))
print(f"UE0 after refresh: surrogate gap {gap:+.3e} bits/s (tight again)")
