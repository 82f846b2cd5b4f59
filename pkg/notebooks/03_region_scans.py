# %% [markdown]
# # Where is remote entanglement good enough?
#
# For each preset system we sweep the free parameters and mark the points
# where fidelity and entanglement rate clear their thresholds.  The grids
# here are coarse so the script runs in seconds; the JSON files in
# `configs/` hold the full-resolution versions.

# %%
from photon_sim import Axis, GridSpec, Thresholds, entanglement_rate, preset, run_scan

for name in ("BA_BA", "NV_NV", "QD_YB"):
    system = preset(name)
    print(f"{name}: rate at defaults {entanglement_rate(system):.4g} Hz")

# %% [markdown]
# Ba+ pair: detuning against the filter width of the first ion.

# %%
spec = GridSpec(
    "BA_BA",
    (Axis("delta_omega", -0.015, 0.015, 13), Axis("kappa1", 0.02, 0.08, 13)),
    Thresholds(fidelity_min=0.99, rate_min_hz=0.1),
    fixed={"kappa2": 0.05, "window": 45.0},
)
res = run_scan(spec)
print(res.marginal_bounds, f"feasible {res.feasible_fraction:.2f}")
for row, k in zip(res.feasible.T[::-1], res.coords[1][::-1]):
    print(f"{k:5.3f} " + "".join("#" if f else "." for f in row))

# %% [markdown]
# NV pair: the cavity quality factor trades lifetime, and thus rate,
# against spectral overlap with the fixed second cavity.

# %%
spec = GridSpec(
    "NV_NV",
    (Axis("q1", 200, 1200, 11), Axis("window", 5.0, 60.0, 12)),
    Thresholds(fidelity_min=0.99, rate_min_hz=25.0),
    fixed={"q2": 500},
)
res = run_scan(spec)
print(res.marginal_bounds)
