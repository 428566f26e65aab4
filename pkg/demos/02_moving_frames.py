# %% [markdown]
# # The same orbits seen from moving frames
#
# Boosting the packet adds ``u t`` to every trajectory.  The straight lines
# stay straight but turn towards the direction of motion, by an angle that
# approaches the rest-frame angle ``beta`` once ``u`` dwarfs ``gamma r0``.

# %%
import numpy as np

from bohmspin.guidance import SPIN_ON, SpinVector
from bohmspin.integrator import (IntegratorConfig, boost_trajectory, integrate_trajectory,
                                 rotation_angle_alpha)
from bohmspin.wavefunction import WaveModel

spin = SpinVector.up()
cfg = IntegratorConfig((0.0, 4.0), rel_tol=1e-11, abs_tol=1e-12, dense_output_stride=0.1)
w = WaveModel.gaussian(1.0).constants.characteristic_speed(1.0)

# %%
print("  u/w   beta   alpha(integrated)   alpha(vector sum)")
for ratio in (0.8, 2.0, 5.0, 100.0):
    u = ratio * w
    for beta_deg in (30.0, 90.0, 150.0):
        beta = np.radians(beta_deg)
        x0 = (np.sin(beta), -np.cos(beta))
        lab = integrate_trajectory(WaveModel.gaussian(1.0, velocity=(u, 0.0)), spin, SPIN_ON, x0, cfg)
        d = lab.x[-1] - lab.x[0]
        b = np.array([np.cos(beta), np.sin(beta)])
        alpha = np.degrees(np.arccos(b @ d / np.linalg.norm(d)))
        print(f"{ratio:6.1f} {beta_deg:6.0f} {alpha:15.6f} {np.degrees(rotation_angle_alpha(1.0, beta, u)):18.6f}")

# %% [markdown]
# Integrating in the boosted model and boosting a rest-frame path are the
# same operation.

# %%
rest = integrate_trajectory(WaveModel.gaussian(1.0), spin, SPIN_ON, (1.0, 0.0), cfg)
lab = integrate_trajectory(WaveModel.gaussian(1.0, velocity=(2 * w, 0.0)), spin, SPIN_ON, (1.0, 0.0), cfg)
print("max difference:", np.abs(lab.x - boost_trajectory(rest, (2 * w, 0.0)).x).max())
