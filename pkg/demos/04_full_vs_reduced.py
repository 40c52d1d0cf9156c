# Cross-check: physical plant under the stabilizing law vs the reduced loop.
#
# The plant is integrated in (r, rdot, beta, betadot) and mapped into the
# reduced chart; the reduced loop starts from the image of the same state.

# %%
from dataclasses import replace

from pendsim import compare_models, load_scenario

cfg = load_scenario("full_plant")
rep = compare_models(cfg)
print("sup deviation:", rep.deviation)
print("max |gamma' + a*gamma| on the plant:", rep.gamma_residual)

# %%
# The deviation is integration error, so it follows the tolerance.
for rtol in (1e-6, 1e-8, 1e-10):
    c = replace(cfg, solver=replace(cfg.solver, rtol=rtol, atol=rtol * 1e-2))
    print(f"rtol {rtol:.0e}: deviation {compare_models(c).deviation:.3e}")
