"""Bounded mass distributions and the geometric queries the bounds consume.

Every distribution describes a bounded open set (the body) together with a
non-negative density on it. The queries work on the closure of the support:

* ``dist_to_closure(dist, u)``  -- Euclidean distance from ``u`` to the body
* ``max_dist_over_closure(dist, u)`` -- distance from ``u`` to the farthest body point
* ``bounding_ball(dist, padding)`` -- a closed ball containing the body

Points are plain ``numpy`` arrays with a trailing axis of length 3; the
queries broadcast over any leading axes.
"""
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import DegenerateSupport, InvalidDistribution

FOUR_THIRDS_PI = 4.0 * np.pi / 3.0


def vec3(v) -> np.ndarray:
    """Return ``v`` as a finite float array of shape (3,)."""
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"vector components must be finite, got {a}")
    return a


def _points(u) -> np.ndarray:
    a = np.asarray(u, dtype=float)
    if a.shape[-1:] != (3,):
        raise ValueError(f"points need a trailing axis of length 3, got shape {a.shape}")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class MassDistribution:
    """Common interface of the distribution variants."""

    #: True when the density depends only on the distance to ``center``
    spherical = False

    def total_mass(self) -> float:
        raise NotImplementedError

    def volume(self) -> float:
        """Support volume used for the average density."""
        raise NotImplementedError

    def distance(self, u) -> np.ndarray:
        return np.maximum(self.signed_distance(u), 0.0)

    def signed_distance(self, u) -> np.ndarray:
        """Distance to the closure, negative inside (exact outside only)."""
        raise NotImplementedError

    def max_distance(self, u) -> np.ndarray:
        raise NotImplementedError

    def bounding_ball(self, padding: float = 0.0) -> Tuple[np.ndarray, float]:
        raise NotImplementedError

    def translated(self, shift) -> "MassDistribution":
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PointMass(MassDistribution):
    """Idealised body of zero radius."""

    center: np.ndarray
    mass: float
    spherical = True

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(vec3(self.center)))
        if not self.mass > 0:
            raise InvalidDistribution(f"mass must be positive, got {self.mass}")

    @property
    def radius(self) -> float:
        return 0.0

    def total_mass(self):
        return float(self.mass)

    def volume(self):
        return 0.0

    def signed_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1)

    def max_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1)

    def bounding_ball(self, padding=0.0):
        return self.center.copy(), float(padding)

    def translated(self, shift):
        return PointMass(self.center + vec3(shift), self.mass)


@dataclass(frozen=True, eq=False)
class UniformBall(MassDistribution):
    center: np.ndarray
    radius: float
    mass: float
    spherical = True

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(vec3(self.center)))
        if not self.radius > 0:
            raise InvalidDistribution(f"radius must be positive, got {self.radius}")
        if not self.mass > 0:
            raise InvalidDistribution(f"mass must be positive, got {self.mass}")

    @classmethod
    def from_density(cls, center, radius, density):
        return cls(center, radius, density * FOUR_THIRDS_PI * radius**3)

    @property
    def density(self) -> float:
        return self.mass / self.volume()

    def total_mass(self):
        return float(self.mass)

    def volume(self):
        return FOUR_THIRDS_PI * self.radius**3

    def signed_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1) - self.radius

    def max_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1) + self.radius

    def bounding_ball(self, padding=0.0):
        return self.center.copy(), self.radius + padding

    def translated(self, shift):
        return UniformBall(self.center + vec3(shift), self.radius, self.mass)


@dataclass(frozen=True, eq=False)
class RadialProfile(MassDistribution):
    """Piecewise-constant density in concentric shells.

    ``shells`` holds ``(outer_radius, density)`` pairs with strictly
    increasing radii; shell ``i`` covers ``[r_{i-1}, r_i)`` with ``r_{-1} = 0``.
    The body is the full ball of radius ``shells[-1][0]`` even where the
    density vanishes.
    """

    center: np.ndarray
    shells: Sequence[Tuple[float, float]]
    radius: float = None
    spherical = True

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(vec3(self.center)))
        sh = np.asarray(self.shells, dtype=float)
        if sh.ndim != 2 or sh.shape[1] != 2 or len(sh) == 0:
            raise InvalidDistribution("shells must be a non-empty list of (outer_radius, density)")
        radii, dens = sh[:, 0], sh[:, 1]
        if not (radii[0] > 0 and np.all(np.diff(radii) > 0)):
            raise InvalidDistribution("shell radii must be positive and strictly increasing")
        if np.any(dens < 0) or not np.all(np.isfinite(sh)):
            raise InvalidDistribution("shell densities must be finite and non-negative")
        if self.radius is None:
            object.__setattr__(self, "radius", float(radii[-1]))
        elif not np.isclose(self.radius, radii[-1], rtol=1e-12, atol=0):
            raise InvalidDistribution("last shell radius must equal the body radius")
        object.__setattr__(self, "shells", tuple(map(tuple, sh.tolist())))
        if not self.total_mass() > 0:
            raise InvalidDistribution("total mass must be positive")

    def total_mass(self):
        sh = np.asarray(self.shells)
        outer = sh[:, 0]
        inner = np.concatenate([[0.0], outer[:-1]])
        return float(FOUR_THIRDS_PI * np.sum(sh[:, 1] * (outer**3 - inner**3)))

    def density_at(self, s):
        """Density at distance ``s`` from the center (0 outside)."""
        sh = np.asarray(self.shells)
        idx = np.searchsorted(sh[:, 0], s, side="right")
        padded = np.concatenate([sh[:, 1], [0.0]])
        return padded[idx]

    def volume(self):
        return FOUR_THIRDS_PI * self.radius**3

    def signed_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1) - self.radius

    def max_distance(self, u):
        return np.linalg.norm(_points(u) - self.center, axis=-1) + self.radius

    def bounding_ball(self, padding=0.0):
        return self.center.copy(), self.radius + padding

    def translated(self, shift):
        return RadialProfile(self.center + vec3(shift), self.shells)


@dataclass(frozen=True, eq=False)
class BallUnion(MassDistribution):
    """Superposition of uniform balls.

    Overlaps are allowed; densities add there, so the total mass and the
    potential are the sums over members. The support volume is likewise the
    sum of member volumes.
    """

    balls: Sequence[UniformBall]
    _centers: np.ndarray = field(init=False, repr=False)
    _radii: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        balls = tuple(self.balls)
        if not balls or not all(isinstance(b, UniformBall) for b in balls):
            raise InvalidDistribution("BallUnion needs at least one UniformBall")
        object.__setattr__(self, "balls", balls)
        object.__setattr__(self, "_centers", _frozen([b.center for b in balls]))
        object.__setattr__(self, "_radii", _frozen([b.radius for b in balls]))

    def total_mass(self):
        return float(sum(b.mass for b in self.balls))

    def volume(self):
        return float(sum(b.volume() for b in self.balls))

    def _member_norms(self, u):
        return np.linalg.norm(_points(u)[..., None, :] - self._centers, axis=-1)

    def signed_distance(self, u):
        return np.min(self._member_norms(u) - self._radii, axis=-1)

    def max_distance(self, u):
        return np.max(self._member_norms(u) + self._radii, axis=-1)

    def bounding_ball(self, padding=0.0):
        lo = np.min(self._centers - self._radii[:, None], axis=0)
        hi = np.max(self._centers + self._radii[:, None], axis=0)
        center = 0.5 * (lo + hi)
        return center, float(np.max(self._member_norms(center) + self._radii)) + padding

    def translated(self, shift):
        return BallUnion([b.translated(shift) for b in self.balls])


@dataclass(frozen=True, eq=False)
class VoxelGrid(MassDistribution):
    """Piecewise-constant density on a regular grid of cubic cells.

    Cell ``(i, j, k)`` spans ``origin + cell_size * ([i, i+1] x [j, j+1] x [k, k+1])``.
    The body is the union of the closed cells with positive density.
    """

    origin: np.ndarray
    cell_size: float
    densities: np.ndarray
    _lo: np.ndarray = field(init=False, repr=False)
    _rho: np.ndarray = field(init=False, repr=False)
    _corners: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "origin", _frozen(vec3(self.origin)))
        if not self.cell_size > 0:
            raise InvalidDistribution(f"cell_size must be positive, got {self.cell_size}")
        rho = np.array(self.densities, dtype=float)
        if rho.ndim != 3 or min(rho.shape) < 1:
            raise InvalidDistribution(f"densities must be a 3-d array, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)) or np.any(rho < 0):
            raise InvalidDistribution("densities must be finite and non-negative")
        if not rho.sum() > 0:
            raise InvalidDistribution("total mass must be positive")
        object.__setattr__(self, "densities", _frozen(rho))
        idx = np.argwhere(rho > 0)
        object.__setattr__(self, "_lo", _frozen(self.origin + self.cell_size * idx))
        object.__setattr__(self, "_rho", _frozen(rho[rho > 0]))
        offsets = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)])
        corners = np.unique((idx[:, None, :] + offsets).reshape(-1, 3), axis=0)
        object.__setattr__(self, "_corners", _frozen(self.origin + self.cell_size * corners))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.densities.shape

    @property
    def cells(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower corners and densities of the occupied cells."""
        return self._lo, self._rho

    def total_mass(self):
        return float(self._rho.sum() * self.cell_size**3)

    def volume(self):
        return len(self._rho) * self.cell_size**3

    def signed_distance(self, u):
        p = _points(u)[..., None, :]
        q = np.maximum(self._lo - p, p - (self._lo + self.cell_size))
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return np.min(outside + inside, axis=-1)

    def max_distance(self, u):
        return np.max(np.linalg.norm(_points(u)[..., None, :] - self._corners, axis=-1), axis=-1)

    def bounding_ball(self, padding=0.0):
        center = 0.5 * (self._corners.min(axis=0) + self._corners.max(axis=0))
        return center, float(self.max_distance(center)) + padding

    def translated(self, shift):
        return VoxelGrid(self.origin + vec3(shift), self.cell_size, self.densities)


def total_mass(dist: MassDistribution) -> float:
    return dist.total_mass()


def dist_to_closure(dist: MassDistribution, u):
    """Distance from ``u`` to the closed support; zero on or inside the body."""
    d = dist.distance(u)
    return float(d) if np.ndim(d) == 0 else d


def max_dist_over_closure(dist: MassDistribution, u):
    d = dist.max_distance(u)
    return float(d) if np.ndim(d) == 0 else d


def bounding_ball(dist: MassDistribution, padding: float = 0.0):
    """Closed ball ``(center, radius)`` containing the body.

    The center is the middle of the axis-aligned bounding box, so the radius
    is at most sqrt(3) times the minimal enclosing radius.
    """
    if padding < 0:
        raise ValueError(f"padding must be non-negative, got {padding}")
    return dist.bounding_ball(padding)


def average_density(dist: MassDistribution) -> float:
    vol = dist.volume()
    if vol <= 0:
        raise DegenerateSupport(f"{type(dist).__name__} has no volume")
    return dist.total_mass() / vol
