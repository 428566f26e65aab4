# %% [markdown]
# # Speeds near the overlap
#
# Fifteen paths start on the 1.5-width contour of the upper slit.  In the
# packet frame their speed stays at ``gamma r0`` until the two packets meet,
# then jumps briefly while the path kinks into a band.

# %%
import numpy as np

from bohmspin.analysis import overlap_coefficient, speed_ratio_study
from bohmspin.scenarios import preset, run_scenario

cfg = preset("fig8-speed-ratio")
result = run_scenario(cfg)
model = cfg.build_model()
study = speed_ratio_study(model, result.trajectories)
for key, value in study.items():
    print(f"{key:24s} {value}")

# %%
onset = next(t for t in np.arange(0, 12, 0.01) if overlap_coefficient(model, t) > 1e-6)
print(f"overlap epoch starts at t = {onset:.2f}; first spike at t = {study['first_spike_time']}")
