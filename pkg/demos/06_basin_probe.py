# Grid probe of the attraction domain of the observer loop.
#
# Each grid point is a plant state with observers started from zero; it
# counts as converged if the six-state vector is below 1e-3 at t_end. The
# reported radius is the largest composite level below the first failure.

# %%
import os

from pendsim import basin_probe, load_scenario

# one worker keeps the output order identical on any machine
os.environ.setdefault("PENDSIM_THREADS", "1")

cfg = load_scenario("observer")
for mu in (0.1, 0.03, 0.01):
    res = basin_probe(cfg, "omega=-3:3:5,omega_dot=-3:3:5", t_end=20.0, mu=mu)
    print(f"mu = {mu:<5} converged {res.n_converged}/{len(res.converged)}  radius {res.radius:.1f}")
