"""One full alternating run at the default configuration.

Prints the per-iteration trace: the ratio parameter entering each pass, the
efficiency achieved by its end, and the subproblem objectives along the way.
The ratio of the next row always equals the efficiency of the previous one.
"""

from irsmec import SystemConfig, alternate, generate_channels

cfg = SystemConfig().validate()
real = generate_channels(cfg, 7)
alloc, trace = alternate(real, cfg, streams=7)

print(f"{'it':>3} {'eta entering':>14} {'EE achieved':>14} "
      f"{'rate Mb/s':>10} {'power W':>8} {'feasible':>8}")
for r in trace.records:
    print(f"{r.iteration:3d} {r.eta1:14.6e} {r.ee:14.6e} "
          f"{r.rate_bits/1e6:10.4f} {r.power_w:8.4f} {str(r.rate_feasible):>8}")

print(f"\nconverged: {trace.converged} after {trace.iterations} iterations")
print(f"best iterate: #{trace.best_iteration}, "
      f"EE {trace.records[trace.best_iteration].ee:.6e} bits/J")
print(f"final powers {alloc.p} W, frequencies {alloc.f} Hz")
