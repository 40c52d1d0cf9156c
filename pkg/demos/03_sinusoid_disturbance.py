# A sinusoidal cart force D(t) = sin t, without and with the relay.

# %%
from pendsim import load_scenario, run_scenario

open_loop = run_scenario(load_scenario("sinusoid"))[2]
relay = run_scenario(load_scenario("sinusoid_relay"))[2]

# Late-time amplitude: max |component| for t >= 15, per component.
print("no relay  :", open_loop.steady_amplitude.round(4))
print("with relay:", relay.steady_amplitude.round(4))

# %%
# The relay absorbs the disturbance as long as B*|D|/A stays inside the relay
# amplitude; here B = A, so the equivalent control is -sin t and sliding
# persists once it starts.
print("sliding intervals:", [(round(a, 3), round(b, 3)) for a, b in relay.sliding_intervals])
