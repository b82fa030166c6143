"""Escape speed and how far a slower launch can get.

Runs a handful of launches from the Earth's surface and compares the
farthest point reached with the closed-form confinement radius.
"""
# %%
import numpy as np

from newton_horizon import (IntegrationOptions, State, UniformBall, confinement_radius_spherical,
                            escape_speed_spherical, integrate)

M, R = 5.972e24, 6.371e6
earth = UniformBall([0, 0, 0], R, M)
v_esc = escape_speed_spherical(M, R)
print(f"escape speed: {v_esc:.1f} m/s")

# %% [markdown]
# Launch straight up at a fraction of the escape speed. The bound grows
# without limit as the fraction approaches one.

# %%
for frac in (0.3, 0.6, 0.9, 0.99):
    v = frac * v_esc
    start = State.at([R * (1 + 1e-9), 0, 0], [v, 0, 0])
    tr = integrate(earth, start, IntegrationOptions(t_end=1e7))
    bound = confinement_radius_spherical(M, R, v).radius_bound
    reached = np.linalg.norm(tr.u, axis=1).max()   # over the step samples only
    print(f"{frac:4.2f} v_esc: reached {reached / R:9.4f} R, bound {bound / R:9.4f} R, "
          f"{tr.termination.value}")

# %%
# a sideways launch never gets as high as the radial one
v0 = np.array([0.5, 0.7, 0.0]) * v_esc
tr = integrate(earth, State.at([R * 1.0001, 0, 0], v0), IntegrationOptions(t_end=1e6))
bound = confinement_radius_spherical(M, R * 1.0001, np.linalg.norm(v0)).radius_bound
print(f"oblique launch, max radius / bound: {np.linalg.norm(tr.u, axis=1).max() / bound:.4f}")
