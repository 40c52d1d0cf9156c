# Lyapunov functions by themselves.

# %%
import numpy as np

from pendsim import derive_constants
from pendsim.lyapunov import W, W_z, observer_weight_matrix
from pendsim.model import default_controller_params, default_physical_params

consts = derive_constants(default_physical_params(), default_controller_params())
print("q =", consts.q, " r =", consts.r_const)

# %%
# W is positive away from the origin and grows like cosh(Omega)**(q-1).
O, Od = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-3, 3, 7))
print(np.round(W(O, Od, consts.q, consts.r_const), 2))

# %%
# Observer weight: solves Gamma.T B + B Gamma = I.
print(observer_weight_matrix())

# %%
# On the boundary layer z' = -z/mu, W_z decays at rate -|z|^2/mu.
z, mu, h = np.array([0.4, -0.3]), 0.05, 1e-8
zdot = -z / mu
fd = (W_z(*(z + h * zdot)) - W_z(*(z - h * zdot))) / (2 * h)
print("finite difference", fd, " exact", -z @ z / mu)
