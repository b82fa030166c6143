"""Newtonian dark bodies: escape speeds, confinement bounds and trajectories
around arbitrary bounded mass distributions."""
from .constants import SI, PhysicalConstants
from .distributions import (BallUnion, MassDistribution, PointMass, RadialProfile,
                            UniformBall, VoxelGrid, average_density, bounding_ball,
                            dist_to_closure, max_dist_over_closure, total_mass, vec3)
from .dynamics import (IntegrationOptions, State, Termination, Trajectory, energy,
                       energy_drift, initial_speed_decreasing, integrate, speed_rate)
from .errors import (AtOrAboveEscape, BadParameters, DegenerateSupport, DomainExceeded,
                     InsideBody, InvalidDistribution, NewtonHorizonError, NotContaining,
                     ToleranceNotMet, WrongShape)
from .potential import QuadratureOptions, field, potential, potential_bounds
from .theorems import (BlackHoleVerdict, BoundFrame, ConfinementBound, CosmologyReport,
                       Criterion, classify_black_hole, collapse_time,
                       confinement_distance_from_extent, confinement_distance_general,
                       confinement_radius_spherical, cosmology_K, cosmology_report,
                       escape_speed_lower_bound, escape_speed_spherical,
                       parabolic_radial, radial_apex)

__version__ = "0.1.0"
