"""Five sufficient conditions for a body to trap light, side by side.

The same uniform ball is weighed against each criterion while its mass
is scaled up.
"""
# %%
import numpy as np

from newton_horizon import SI, Criterion, UniformBall, classify_black_hole

R = 3.0e3                                   # metres
B = (np.zeros(3), R)
m_ref = SI.c**2 * 2 * R / (2 * SI.G)        # diameter criterion sits on its threshold here

# %%
print(f"{'M / m_ref':>10}  " + "  ".join(f"{c.value:>18}" for c in Criterion))
for scale in (0.4, 0.5, 0.75, 1.0, 1.01, 2.0):
    body = UniformBall([0, 0, 0], R, scale * m_ref)
    cells = []
    for crit in Criterion:
        v = classify_black_hole(body, B, crit)
        cells.append(f"{'yes' if v.is_black_hole else 'no':>3} ({v.margin:8.4f})")
    print(f"{scale:10.2f}  " + "  ".join(f"{c:>18}" for c in cells))

# %% [markdown]
# For a ball the symmetric density test is the sharpest; it already
# passes at half the mass the others need. The asymmetric one asks for
# twice its density.

# %%
v = classify_black_hole(UniformBall([0, 0, 0], R, 1.1 * m_ref), B, Criterion.DIAMETER)
print(f"photon confinement radius at margin 1.1: {v.photon_confinement_radius / (2 * R):.1f} diameters")
