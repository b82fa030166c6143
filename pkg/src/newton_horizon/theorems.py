"""Closed-form escape speeds, confinement bounds and black-hole criteria.

Energy conservation drives everything here. A sub-escape launch from ``u0``
has energy ``-eta < 0``. Then ``U(u(t)) >= eta`` for all later times, so the
particle can never get farther than ``GM / eta`` from the center of a
spherical body. For a general body the same quantity bounds the distance to
the body's closure.
"""
from dataclasses import dataclass
import enum
import math
from typing import Optional, Tuple

import numpy as np

from .constants import SI, PhysicalConstants
from .distributions import MassDistribution, average_density, vec3
from .errors import (AtOrAboveEscape, BadParameters, DomainExceeded, InsideBody,
                     NotContaining, WrongShape)
from .potential import DEFAULT_QUADRATURE, QuadratureOptions, potential

#: relative width of the band treated as exact equality in threshold tests
BOUNDARY_RTOL = 1e-12


class BoundFrame(enum.Enum):
    SPHERICAL_FROM_CENTER = "SphericalFromCenter"
    GENERAL_FROM_CLOSURE = "GeneralFromClosure"


@dataclass(frozen=True)
class ConfinementBound:
    """Energy defect ``eta`` [J/kg] and the resulting bound [m].

    With ``SPHERICAL_FROM_CENTER`` the bound limits ``|u(t) - center|``; with
    ``GENERAL_FROM_CLOSURE`` it limits the distance to the body's closure.
    """

    eta: float
    radius_bound: float
    frame: BoundFrame


class Criterion(enum.Enum):
    MAX_PAIR_DISTANCE = "max_pair_distance"
    DIAMETER = "diameter"
    DENSITY_BALL = "density_ball"
    DENSITY_SYMMETRIC = "density_symmetric"
    DENSITY_ASYMMETRIC = "density_asymmetric"


@dataclass(frozen=True)
class BlackHoleVerdict:
    criterion: Criterion
    is_black_hole: bool
    margin: float
    photon_confinement_radius: Optional[float] = None
    attained: float = math.nan
    required: float = math.nan


@dataclass(frozen=True)
class CosmologyReport:
    K: float
    threshold: float
    ratio: float
    verdict: bool


# -- spherical bodies ---------------------------------------------------------

def escape_speed_spherical(M: float, R: float, consts: PhysicalConstants = SI) -> float:
    """Escape speed ``sqrt(2GM/R)`` at distance ``R`` from a spherical body."""
    if not (M > 0 and R > 0):
        raise BadParameters(f"need M > 0 and R > 0, got M={M}, R={R}")
    return math.sqrt(2.0 * consts.G * M / R)


def confinement_radius_spherical(M: float, R: float, v0_speed: float,
                                 consts: PhysicalConstants = SI) -> ConfinementBound:
    """Largest distance from the center reachable after a launch at radius
    ``R`` with speed ``v0_speed``: ``R / (1 - R v0^2 / (2GM))``.

    Raises
    ------
    AtOrAboveEscape
        Unless ``v0_speed**2 < 2GM/R``.
    """
    if not (M > 0 and R > 0 and v0_speed >= 0):
        raise BadParameters(f"need M > 0, R > 0, v0 >= 0; got {M}, {R}, {v0_speed}")
    gm = consts.G * M
    if not v0_speed**2 < 2.0 * gm / R:
        raise AtOrAboveEscape(f"|v0|^2 = {v0_speed**2:g} is not below 2GM/R = {2 * gm / R:g}")
    eta = gm / R - 0.5 * v0_speed**2
    return ConfinementBound(eta, gm / eta, BoundFrame.SPHERICAL_FROM_CENTER)


def collapse_time(R: float, gamma: float, r: float = 0.0) -> float:
    """Time for the inward parabolic radial solution to fall from ``R`` to ``r``."""
    if not (R > 0 and gamma > 0 and 0 <= r <= R):
        raise BadParameters(f"need R > 0, gamma > 0, 0 <= r <= R; got {R}, {gamma}, {r}")
    return (2.0 / 3.0) * (R**1.5 - r**1.5) / math.sqrt(gamma)


def parabolic_radial(R: float, gamma: float, sign: int, t, r: float = 0.0):
    """Zero-energy radial solution ``(R^{3/2} +/- 1.5 sqrt(gamma) t)^{2/3}``.

    ``gamma`` is ``2GM``. ``sign=+1`` is the unbounded outgoing branch,
    ``sign=-1`` the infall, valid until it reaches radius ``r`` (the body
    surface, or the center when ``r=0``).
    """
    if sign not in (1, -1):
        raise BadParameters(f"sign must be +1 or -1, got {sign}")
    if not (R > 0 and gamma > 0):
        raise BadParameters(f"need R > 0 and gamma > 0, got R={R}, gamma={gamma}")
    t = np.asarray(t, dtype=float)
    if sign < 0 and np.any(t > collapse_time(R, gamma, r)):
        raise DomainExceeded("infall branch evaluated after collapse")
    y = (R**1.5 + sign * 1.5 * math.sqrt(gamma) * t) ** (2.0 / 3.0)
    return float(y) if y.ndim == 0 else y


def radial_apex(R: float, gamma: float, eta: float) -> float:
    """Turning radius ``gamma / (2 eta)`` of the bound outward radial launch.

    ``gamma / R - 2 eta`` is the squared launch speed and must be non-negative.
    """
    if not (R > 0 and gamma > 0 and eta > 0):
        raise BadParameters(f"need R, gamma, eta > 0; got {R}, {gamma}, {eta}")
    if gamma / R - 2.0 * eta < 0:
        raise BadParameters("eta too large: the launch speed squared would be negative")
    return gamma / (2.0 * eta)


# -- arbitrary bodies -----------------------------------------------------------

def confinement_distance_general(dist: MassDistribution, u0, v0,
                                 consts: PhysicalConstants = SI,
                                 opts: QuadratureOptions = DEFAULT_QUADRATURE) -> ConfinementBound:
    """Bound on the distance to the closure for a launch below the local
    escape speed ``sqrt(2 U(u0))``."""
    u0, v0 = vec3(u0), vec3(v0)
    U0 = potential(dist, u0, consts, opts)
    v2 = float(v0 @ v0)
    if not v2 < 2.0 * U0:
        raise AtOrAboveEscape(f"|v0|^2 = {v2:g} is not below 2U(u0) = {2 * U0:g}")
    eta = U0 - 0.5 * v2
    return ConfinementBound(eta, consts.G * dist.total_mass() / eta,
                            BoundFrame.GENERAL_FROM_CLOSURE)


def confinement_distance_from_extent(dist: MassDistribution, u0, v0,
                                     consts: PhysicalConstants = SI) -> ConfinementBound:
    """Looser bound using only the farthest body point from ``u0``:
    ``D / (1 - |v0|^2 D / (2GM))`` with ``D = max_dist_over_closure(u0)``.

    Needs no quadrature, and its hypothesis ``D |v0|^2 < 2GM`` is stronger.
    """
    u0, v0 = vec3(u0), vec3(v0)
    if dist.distance(u0) <= 0:
        raise InsideBody("launch point lies in the closed support of the body")
    gm = consts.G * dist.total_mass()
    far = float(dist.max_distance(u0))
    v2 = float(v0 @ v0)
    if not far * v2 < 2.0 * gm:
        raise AtOrAboveEscape(f"D |v0|^2 = {far * v2:g} is not below 2GM = {2 * gm:g}")
    eta = gm / far - 0.5 * v2
    return ConfinementBound(eta, gm / eta, BoundFrame.GENERAL_FROM_CLOSURE)


def escape_speed_lower_bound(dist: MassDistribution, u0, consts: PhysicalConstants = SI,
                             via_density: bool = False) -> float:
    """Lower bound ``sqrt(2GM / D)`` on the escape speed at ``u0``, where ``D``
    is the distance to the farthest body point.

    With ``via_density=True`` the mass is written as average density times
    support volume (undefined for a point mass).
    """
    far = float(dist.max_distance(vec3(u0)))
    if via_density:
        vol = dist.volume()
        return math.sqrt(vol * 2.0 * consts.G * average_density(dist) / far)
    return math.sqrt(2.0 * consts.G * dist.total_mass() / far)


# -- black-hole criteria ------------------------------------------------------

def _compare(attained, required):
    margin = attained / required
    if abs(margin - 1.0) <= BOUNDARY_RTOL:
        return False, 1.0
    return attained > required, margin


def _ball(B) -> Tuple[np.ndarray, float]:
    center, radius = B
    center = vec3(center)
    if not radius > 0:
        raise BadParameters(f"ball radius must be positive, got {radius}")
    return center, float(radius)


def classify_black_hole(dist: MassDistribution, B, criterion: Criterion,
                        consts: PhysicalConstants = SI) -> BlackHoleVerdict:
    """Test whether the closed ball ``B = (center, radius)`` traps light.

    All criteria are strict; a quantity exactly at its threshold (to
    ``BOUNDARY_RTOL``) gives ``is_black_hole=False`` with ``margin=1``.
    ``photon_confinement_radius`` is the largest distance from the body's
    closure that a photon entering ``B`` can reach.
    """
    criterion = Criterion(criterion)
    center, radius = _ball(B)
    far_from_center = float(dist.max_distance(center))
    if far_from_center > radius * (1.0 + BOUNDARY_RTOL):
        raise NotContaining(
            f"ball of radius {radius:g} misses body points up to {far_from_center:g} from its center")
    G, c2 = consts.G, consts.c**2
    two_gm = 2.0 * G * dist.total_mass()
    diam = 2.0 * radius

    def trapped_within(extent):
        return extent / (1.0 - c2 * extent / two_gm)

    if criterion is Criterion.MAX_PAIR_DISTANCE:
        pair = far_from_center + radius
        hole, margin = _compare(two_gm, c2 * pair)
        return BlackHoleVerdict(criterion, hole, margin,
                                trapped_within(pair) if hole else None, two_gm, c2 * pair)

    if criterion is Criterion.DIAMETER:
        hole, margin = _compare(two_gm, c2 * diam)
        return BlackHoleVerdict(criterion, hole, margin,
                                trapped_within(diam) if hole else None, two_gm, c2 * diam)

    if criterion is Criterion.DENSITY_BALL:
        d = average_density(dist)
        required = c2 * diam / (2.0 * G * dist.volume())
        hole, margin = _compare(d, required)
        return BlackHoleVerdict(criterion, hole, margin,
                                trapped_within(diam) if hole else None, d, required)

    if criterion is Criterion.DENSITY_SYMMETRIC:
        if not dist.spherical:
            raise WrongShape(f"{type(dist).__name__} is not spherically symmetric")
        r = dist.radius
        if not (np.allclose(center, dist.center, rtol=0, atol=BOUNDARY_RTOL * radius)
                and math.isclose(radius, r, rel_tol=BOUNDARY_RTOL)):
            raise WrongShape("the symmetric density criterion needs B equal to the body's closure")
        d = average_density(dist)
        required = 3.0 / (8.0 * math.pi) * c2 / (G * r**2)
        hole, margin = _compare(d, required)
        photon = None
        if hole:
            # launch at speed c from the surface; bound is measured from the center
            photon = confinement_radius_spherical(dist.total_mass(), r, consts.c, consts).radius_bound - r
        return BlackHoleVerdict(criterion, hole, margin, photon, d, required)

    # DENSITY_ASYMMETRIC: the mass averaged over B against K / r^2, r = radius of B;
    # for B equal to a ball-shaped body this is the body's own average density
    d = dist.total_mass() / (4.0 / 3.0 * math.pi * radius**3)
    required = cosmology_K(consts) / radius**2
    hole, margin = _compare(d, required)
    return BlackHoleVerdict(criterion, hole, margin,
                            trapped_within(diam) if hole else None, d, required)


def cosmology_K(consts: PhysicalConstants = SI) -> float:
    """``K = 3 c^2 / (4 pi G)`` [kg/m]; ``K / r^2`` is the density that turns a
    ball of radius ``r`` into a black hole whatever its mass distribution."""
    return 3.0 / (4.0 * math.pi) * consts.c**2 / consts.G


def cosmology_report(r_universe: float, density: float,
                     consts: PhysicalConstants = SI) -> CosmologyReport:
    if not r_universe > 0:
        raise BadParameters(f"radius must be positive, got {r_universe}")
    if not density >= 0:
        raise BadParameters(f"density must be non-negative, got {density}")
    K = cosmology_K(consts)
    threshold = K / r_universe**2
    ratio = density / threshold
    return CosmologyReport(K, threshold, ratio, ratio > 1.0)
