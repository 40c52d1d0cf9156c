# The relay term and sliding on gamma = 0.
#
# With a relay gain the switching variable is driven to zero in finite time
# and then held there by the equivalent control. The integrator locates the
# surface hit with a root finder and switches to the constrained field.

# %%
import math

import numpy as np

from pendsim import load_scenario, run_scenario

cfg = load_scenario("relay")
traj, report, summary = run_scenario(cfg)
print("events:")
for ev in traj.events:
    print(f"  {ev.t:9.5f}  {ev.kind}")

# %%
# Before the hit gamma' = -a*gamma - A*PiBar, which integrates in closed form:
# gamma(t) = (gamma0 + A/a)*exp(-a t) - A/a.
a, A, g0 = cfg.ctrl.a, cfg.ctrl.A_gain, cfg.y0[1]
t_hit = math.log((g0 + A / a) / (A / a)) / a
print("predicted hit:", t_hit, " located:", summary.sliding_intervals[0][0])

# %%
sliding = np.array(traj.mode) == "sliding"
print("records in sliding mode:", sliding.sum())
print("max |gamma| while sliding:", np.abs(traj.y[sliding, 1]).max())
print("relay value while sliding (equivalent control):",
      np.unique(np.round(traj.delta_u[sliding], 12)) + 0.0)

# %%
# The relay makes s settle much earlier, but the angle has a late excursion,
# so by the sup-norm measure this run settles after the free decay.
free = run_scenario(load_scenario("free_decay"))[2]
print("settling: relay", summary.settling_time, " free decay", free.settling_time)
