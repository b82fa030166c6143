"""Bounds for bodies that are not spheres.

For a two-ball union and a lumpy voxel grid the distance to the body
stays below ``GM / eta`` where ``eta = U(u0) - |v0|^2 / 2``.
"""
# %%
import numpy as np

from newton_horizon import (AtOrAboveEscape, BallUnion, IntegrationOptions, PhysicalConstants, State, UniformBall,
                            VoxelGrid, confinement_distance_from_extent,
                            confinement_distance_general, integrate, potential)

unit = PhysicalConstants(G=1.0, c=1.0)
rng = np.random.default_rng(1)

dumbbell = BallUnion([UniformBall([0, 0, 0], 1.0, 1.0), UniformBall([4, 0, 0], 1.0, 1.0)])
rho = rng.uniform(0.2, 1.0, (4, 4, 4))
rho[1:3, 1:3, 3] = 0.0           # carve a notch out of the top
blob = VoxelGrid([-2, -2, -2], 1.0, rho)

# %%
for name, body in [("dumbbell", dumbbell), ("voxel blob", blob)]:
    c, r = body.bounding_ball()
    print(f"{name}: mass {body.total_mass():.3f}, bounding radius {r:.3f}")
    for _ in range(5):
        d = rng.normal(size=3)
        u0 = c + 2 * r * d / np.linalg.norm(d)
        v_esc = np.sqrt(2 * potential(body, u0, unit))
        v0 = 0.8 * v_esc * np.array([0.0, 0.0, 1.0])
        tr = integrate(body, State.at(u0, v0), IntegrationOptions(t_end=200.0), unit)
        tight = confinement_distance_general(body, u0, v0, unit).radius_bound
        try:
            loose = f"{confinement_distance_from_extent(body, u0, v0, unit).radius_bound:7.3f}"
        except AtOrAboveEscape:
            loose = "    n/a"   # the cruder bound needs a slower launch
        far = body.distance(tr.u).max()
        print(f"   reached {far:7.3f}  bound {tight:7.3f}  extent bound {loose}  {tr.termination.value}")
