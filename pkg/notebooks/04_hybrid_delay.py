# %% [markdown]
# # Timing a quantum-dot photon against an ion photon
#
# The quantum-dot photon is 0.3 ns long and the Yb+ photon 37.7 ns.  A
# narrow filter stretches the dot photon, but its filtered envelope rises
# slowly while the ion photon switches on abruptly.  The best overlap
# therefore comes from sending the dot photon slightly early.  Here a
# positive dt delays photon 1, the dot.

# %%
import numpy as np

from photon_sim import interfere, preset

system = preset("QD_YB")
print("dt (ns)  fidelity")
for dt in np.linspace(-1.5, 1.5, 13):
    res = interfere(system.with_params(dt=dt).pair(), system.window)
    print(f"{dt:6.2f}   {res.fidelity:.5f}")

# %%
dts = np.linspace(-1.5, 1.5, 301)
fid = [interfere(system.with_params(dt=d).pair(), system.window).fidelity for d in dts]
print(f"best dt {dts[int(np.argmax(fid))]:.2f} ns, F = {max(fid):.5f}")
