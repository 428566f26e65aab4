# %% [markdown]
# # Two slits with and without the spin term
#
# Two packets 20 widths apart move along x at 200 w.  Canonical rings of
# starting points (85 per slit) are integrated in both guidance modes.  Only
# the spin-extended flow lets a path cross the symmetry axis.  Figures go to
# ``demo_out/``.

# %%
from pathlib import Path

import numpy as np

from bohmspin.analysis import fringe_profile
from bohmspin.cli import emit_svg
from bohmspin.ensemble import sample_density
from bohmspin.integrator import IntegratorConfig, advect
from bohmspin.scenarios import preset, run_scenario

out = Path("demo_out")
for name in ("fig6-two-slit-nospin", "fig7-two-slit-spin"):
    result = run_scenario(preset(name))
    crossings = sum(len(tr.crossings("x")) for tr in result.trajectories)
    print(f"{name}: {len(result.trajectories)} paths, {crossings} axis crossings")
    emit_svg(result, out, {"contours": True})

# %% [markdown]
# The bands form because the flow carries ``|psi|^2``.  Draw starting points
# from the density, push them to the end time, and compare the histogram with
# the exact marginal.

# %%
cfg = preset("fig7-two-slit-spin")
model = cfg.build_model()
end, aborted = advect(model, cfg.spin, cfg.mode, sample_density(model, 10_000, seed=8),
                      IntegratorConfig(cfg.t_span))
rep = fringe_profile(end[~aborted], cfg.t_span[1], bins=40, model=model)
print(f"chi-square {rep.test_statistic:.1f} on {rep.details['bins_used']} bins, p = {rep.p_value:.3f}")
peak = np.argmax(rep.counts)
print("fullest bin:", rep.bin_edges[peak].round(2), "to", rep.bin_edges[peak + 1].round(2))
