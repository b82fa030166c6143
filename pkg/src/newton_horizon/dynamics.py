"""Test-particle trajectories in the exterior field of a mass distribution.

The first-order system ``u' = v, v' = a(u)`` is advanced with scipy's
Dormand-Prince 8(5,3) stepper. After every accepted step the collapse and
far-field escape events are checked for a sign change and, when one occurs,
located on the step's dense output with Brent's method.
"""
from dataclasses import dataclass, field as dc_field
import enum
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import DOP853, OdeSolution
from scipy.optimize import brentq

from .constants import SI, PhysicalConstants
from .distributions import MassDistribution, vec3
from .potential import (DEFAULT_QUADRATURE, QuadratureOptions, field_unchecked,
                        potential, potential_unchecked)
from .errors import InsideBody


class State(NamedTuple):
    """Time, position and velocity of the test particle (SI units)."""

    t: float
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def at(cls, u, v, t=0.0):
        return cls(float(t), vec3(u), vec3(v))


class Termination(enum.Enum):
    REACHED_T_END = "ReachedTEnd"
    COLLAPSED = "CollapsedIntoBody"
    ESCAPED = "EscapedFarField"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class IntegrationOptions:
    """Controls for :func:`integrate`.

    ``escape_radius_factor`` is measured in units of the bounding-ball radius.
    """

    t_end: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    escape_radius_factor: float = 1e3
    max_steps: int = 1_000_000
    dense_output: bool = False
    quadrature: QuadratureOptions = DEFAULT_QUADRATURE

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not self.escape_radius_factor > 1:
            raise ValueError("escape_radius_factor must exceed 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class Trajectory:
    """Sampled path, one sample per accepted step plus the event point.

    ``t_event`` is the collapse or exit time for the corresponding
    terminations and ``None`` otherwise. ``sol`` is a dense interpolant
    over ``[t[0], t[-1]]`` when requested.
    """

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    termination: Termination
    t_event: Optional[float] = None
    sol: Optional[OdeSolution] = dc_field(default=None, repr=False)

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> State:
        return State(float(self.t[i]), self.u[i], self.v[i])

    @property
    def initial(self) -> State:
        return self.state(0)

    @property
    def final(self) -> State:
        return self.state(-1)

    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.v, axis=-1)


def energy(dist: MassDistribution, state: State, consts: PhysicalConstants = SI,
           opts: QuadratureOptions = DEFAULT_QUADRATURE) -> float:
    """Specific mechanical energy ``|v|^2 / 2 - U(u)`` [J/kg]."""
    v = np.asarray(state.v, dtype=float)
    return 0.5 * float(v @ v) - potential(dist, state.u, consts, opts)


def trajectory_energies(dist, traj: Trajectory, consts=SI, opts=DEFAULT_QUADRATURE):
    """Energy at every sample; the final collapse sample sits on the boundary,
    where the exterior expression is still the right one."""
    kinetic = 0.5 * np.sum(traj.v**2, axis=-1)
    return kinetic - np.asarray(potential_unchecked(dist, traj.u, consts, opts))


def energy_drift(dist: MassDistribution, traj: Trajectory,
                 consts: PhysicalConstants = SI,
                 opts: QuadratureOptions = DEFAULT_QUADRATURE) -> float:
    """Largest energy deviation from the start, scaled by
    ``max(|E0|, |v0|^2 / 2)``; zero for a single sample."""
    if len(traj) < 2:
        return 0.0
    e = trajectory_energies(dist, traj, consts, opts)
    scale = max(abs(e[0]), 0.5 * float(traj.v[0] @ traj.v[0]))
    if scale == 0.0:
        scale = abs(float(potential_unchecked(dist, traj.u[0], consts, opts)))
    return float(np.max(np.abs(e - e[0])) / scale)


def speed_rate(dist: MassDistribution, state: State, consts: PhysicalConstants = SI) -> float:
    """Time derivative of the speed, ``v . a / |v|``, at an exterior state."""
    v = np.asarray(state.v, dtype=float)
    a = np.asarray(field_unchecked(dist, state.u, consts))
    if dist.distance(state.u) <= 0:
        raise InsideBody("state lies in the closed support of the body")
    return float(v @ a) / float(np.linalg.norm(v))


def initial_speed_decreasing(dist: MassDistribution, initial: State,
                             consts: PhysicalConstants = SI) -> bool:
    """True iff gravity is slowing the particle down at the initial state."""
    return speed_rate(dist, initial, consts) < 0.0


def integrate(dist: MassDistribution, initial: State, opts: IntegrationOptions,
              consts: PhysicalConstants = SI) -> Trajectory:
    """Integrate a test-particle trajectory from an exterior initial state.

    Stops at ``initial.t + opts.t_end``, at first contact with the body's
    closure, at far-field escape (beyond ``escape_radius_factor`` bounding
    radii from the bounding center with non-negative energy), or after
    ``max_steps`` accepted steps.
    """
    u0, v0 = vec3(initial.u), vec3(initial.v)
    if dist.distance(u0) <= 0:
        raise InsideBody("initial position lies in the closed support of the body")
    t0 = float(initial.t)
    quad = opts.quadrature

    def rhs(t, y):
        return np.concatenate([y[3:], field_unchecked(dist, y[:3], consts, quad)])

    center, radius = dist.bounding_ball()
    escape_radius = opts.escape_radius_factor * radius
    events = [lambda y: float(dist.signed_distance(y[:3]))]
    kinds = [Termination.COLLAPSED]
    if energy(dist, State(t0, u0, v0), consts, quad) >= 0.0:
        # bound orbits never qualify, however wide they swing
        events.append(lambda y: escape_radius - float(np.linalg.norm(y[:3] - center)))
        kinds.append(Termination.ESCAPED)

    t_bound = t0 + opts.t_end
    solver = DOP853(rhs, t0, np.concatenate([u0, v0]), t_bound,
                    rtol=opts.rel_tol, atol=opts.abs_tol)
    ts, ys = [t0], [solver.y.copy()]
    interpolants = []
    g_prev = [g(solver.y) for g in events]
    termination, t_event = Termination.REACHED_T_END, None
    steps = 0
    while solver.status == "running":
        if steps >= opts.max_steps:
            termination = Termination.STEP_LIMIT
            break
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise RuntimeError(f"integration failed at t={solver.t}: {msg}")
        g_new = [g(solver.y) for g in events]
        crossed = [k for k, (a, b) in enumerate(zip(g_prev, g_new)) if a > 0.0 >= b]
        dense = solver.dense_output()
        if crossed:
            hits = []
            for k in crossed:
                fn = (lambda t, g=events[k]: g(dense(t)))
                if g_new[k] == 0.0:
                    hits.append((solver.t, k))
                else:
                    tol = 4 * np.finfo(float).eps * max(abs(solver.t), abs(solver.t_old))
                    hits.append((brentq(fn, solver.t_old, solver.t, xtol=tol,
                                        rtol=4 * np.finfo(float).eps), k))
            t_hit, k = min(hits)
            ts.append(t_hit)
            ys.append(dense(t_hit))
            interpolants.append(dense)
            termination, t_event = kinds[k], t_hit
            break
        ts.append(solver.t)
        ys.append(solver.y.copy())
        interpolants.append(dense)
        g_prev = g_new

    y = np.array(ys)
    sol = None
    if opts.dense_output and interpolants:
        sol = OdeSolution(np.array(ts), interpolants)
    return Trajectory(np.array(ts), y[:, :3], y[:, 3:], termination, t_event, sol)
