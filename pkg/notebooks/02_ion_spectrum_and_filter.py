# %% [markdown]
# # A two-channel ion photon and its filter
#
# A Ba+ photon decays into two distinguishable hyperfine branches.  The
# weaker branch sits 0.335 GHz below the main line and carries "which-path"
# information.  A narrow Lorentzian filter removes most of it.

# %%
import math

import numpy as np

from photon_sim import FilterSpec, apply_filter, figure_to_angular, spectral_profile, temporal_profile, two_channel_envelope
from photon_sim.sources import filter_transmission

ion = two_channel_envelope(8.0, 0.0, 0.625, 2 * math.pi * -0.335)
filt = FilterSpec(figure_to_angular(0.05))  # same reading as the Ba+ preset
filtered = apply_filter(ion, filt)
print(f"norm before {ion.norm():.4f}, after {filtered.norm():.4f}")

# %%
nu = np.linspace(-0.6, 0.2, 17)  # GHz, ordinary
omega = 2 * math.pi * nu
raw = spectral_profile(ion, omega)
print("nu'(GHz)  unfiltered  filtered")
for v, s, t in zip(nu, raw, raw * filter_transmission(filt, omega)):
    print(f"{v:8.3f}  {s:10.4f}  {t:8.4f}")

# %% [markdown]
# In time, filtering turns the sharp turn-on into a smooth rise and
# stretches the tail.

# %%
t = np.array([0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0])
for ti, a, b in zip(t, temporal_profile(ion, t), temporal_profile(filtered, t)):
    print(f"t={ti:5.1f} ns  raw {a:.4f}  filtered {b:.4f}")
