"""Specific gravitational potential and acceleration of a mass distribution.

The potential is the positive quantity

    U(u) = integral over the body of G mu(x) / |u - x| dx

and the acceleration of a test particle is its gradient,
``a(u) = -integral G mu(x) (u - x) / |u - x|^3 dx``.

Spherically symmetric bodies use the point-mass closed form at exterior
points; a ball union is the sum of its members. Voxel grids are evaluated
cell by cell with the closed-form potential of a homogeneous cube (far cells
use a 4-point Gauss-Legendre product rule, which is exact to rounding there).
The adaptive octree quadrature is available through
``QuadratureOptions(method="adaptive")``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .constants import SI, PhysicalConstants
from .distributions import BallUnion, MassDistribution, VoxelGrid, _points
from .errors import InsideBody, ToleranceNotMet

#: cells farther than this many cell sizes use the Gauss rule
FAR_RATIO = 10.0

_GL4_NODES, _GL4_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL2_NODE = 1.0 / math.sqrt(3.0)
_CORNER_SIGNS = np.array(
    [(-1) ** (i + j + k + 1) for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float
).reshape(2, 2, 2)
_OCTANTS = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)


@dataclass(frozen=True)
class QuadratureOptions:
    """Accuracy controls for voxel-grid evaluation.

    ``method="closed_form"`` (default) sums exact per-cell expressions;
    ``"adaptive"`` refines a 2-point Gauss product rule on an octree until
    every cell's estimated error is below ``rel_tol`` times the running total.
    """

    rel_tol: float = 1e-8
    max_subdivisions: int = 12
    method: str = "closed_form"

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.method not in ("closed_form", "adaptive"):
            raise ValueError(f"unknown quadrature method {self.method!r}")


DEFAULT_QUADRATURE = QuadratureOptions()


# -- homogeneous cube, closed form ------------------------------------------

def _corner_coords(p, lo, h):
    """Corner coordinates relative to the field points, shape (..., 2, 2, 2)."""
    a = lo - p[..., None, :]
    ends = np.stack([a, a + h], axis=-2)  # (..., cells, 2, 3)
    x = ends[..., :, 0][..., :, None, None]
    y = ends[..., :, 1][..., None, :, None]
    z = ends[..., :, 2][..., None, None, :]
    return np.broadcast_arrays(x, y, z)


def _ratio(num, den):
    # num / den with 0 where den == 0; every caller multiplies the result by
    # a factor that vanishes there
    return np.divide(num, den, out=np.zeros(np.shape(num)), where=den != 0.0)


def _xy_asinh(a, b, c):
    # a * b * asinh(c / hypot(a, b)); the dropped a*b*log(hypot(a, b)) cancels
    # between the two corners that differ only in c
    return a * b * np.arcsinh(_ratio(c, np.hypot(a, b)))


def _sq_atan(a, b, c, r):
    return 0.5 * a * a * np.arctan(_ratio(b * c, a * r))


def _safe_asinh(num, den):
    return np.arcsinh(_ratio(num, den))


def _safe_atan(b, c, a, r):
    return np.arctan(_ratio(b * c, a * r))


def _cube_potential(p, lo, h):
    """Integral of 1/|p - x| over each cube ``[lo, lo + h]^3``; shape (..., cells)."""
    x, y, z = _corner_coords(p, lo, h)
    r = np.sqrt(x * x + y * y + z * z)
    val = (_xy_asinh(x, y, z) + _xy_asinh(y, z, x) + _xy_asinh(z, x, y)
           - _sq_atan(x, y, z, r) - _sq_atan(y, z, x, r) - _sq_atan(z, x, y, r))
    return np.sum(val * _CORNER_SIGNS, axis=(-3, -2, -1))


def _cube_field(p, lo, h):
    """Gradient (in p) of ``_cube_potential``; shape (..., cells, 3).

    The ``log(hypot)`` parts of the logarithmic terms cancel pairwise across
    corners, leaving the asinh form used here.
    """
    x, y, z = _corner_coords(p, lo, h)
    r = np.sqrt(x * x + y * y + z * z)
    lx = _safe_asinh(x, np.hypot(y, z))
    ly = _safe_asinh(y, np.hypot(x, z))
    lz = _safe_asinh(z, np.hypot(x, y))
    gx = y * lz + z * ly - x * _safe_atan(y, z, x, r)
    gy = z * lx + x * lz - y * _safe_atan(z, x, y, r)
    gz = x * ly + y * lx - z * _safe_atan(x, y, z, r)
    g = np.stack([gx, gy, gz], axis=-1)
    return -np.einsum("...ijkd,ijk->...d", g, _CORNER_SIGNS)


def _gauss_nodes(lo, h, nodes, weights):
    """Product-rule nodes (cells, n^3, 3) and weights (n^3,) for cubes at ``lo``."""
    g = 0.5 * h * (1.0 + nodes)
    grid = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
    w = (0.5 * h) ** 3 * np.einsum("i,j,k->ijk", weights, weights, weights).ravel()
    return lo[:, None, :] + grid, w


def _voxel_closed_form(p, lo, rho, h, want_field):
    """Sum of cell contributions at points ``p`` (n, 3) per unit G."""
    kernel = _cube_field if want_field else _cube_potential
    out = np.zeros((len(p), 3) if want_field else len(p))
    centers = lo + 0.5 * h
    chunk = max(1, 20000 // len(lo))
    for s in range(0, len(p), chunk):
        pp = p[s:s + chunk]
        far = np.linalg.norm(pp[:, None, :] - centers, axis=-1) > FAR_RATIO * h
        if not far.any():
            out[s:s + chunk] = np.einsum("pc...,c->p...", kernel(pp, lo, h), rho)
            continue
        part = np.zeros(out[s:s + chunk].shape)
        ip, ic = np.nonzero(~far)
        if len(ip):
            vals = kernel(pp[ip], lo[ic][:, None, :], h)[:, 0]
            np.add.at(part, ip, vals * (rho[ic, None] if want_field else rho[ic]))
        jp, jc = np.nonzero(far)
        nodes, w = _gauss_nodes(lo[jc], h, _GL4_NODES, _GL4_WEIGHTS)
        d = pp[jp][:, None, :] - nodes
        r = np.linalg.norm(d, axis=-1)
        if want_field:
            vals = -np.einsum("k,pkd->pd", w, d / r[..., None] ** 3) * rho[jc, None]
        else:
            vals = (w / r).sum(axis=-1) * rho[jc]
        np.add.at(part, jp, vals)
        out[s:s + chunk] = part
    return out


# -- adaptive octree quadrature ---------------------------------------------

def _gauss2(p, lo, h, want_field):
    nodes, _ = _gauss_nodes(lo, h, np.array([-_GL2_NODE, _GL2_NODE]), np.ones(2))
    d = p - nodes
    r = np.linalg.norm(d, axis=-1)
    vol = h**3 / 8.0
    if want_field:
        return -vol * np.sum(d / r[..., None] ** 3, axis=1)
    return vol * np.sum(1.0 / r, axis=1)


def _voxel_adaptive(p, lo, rho, h, opts, want_field):
    """Adaptive 2-point Gauss quadrature at one point ``p`` per unit G."""
    cells, dens, size = lo, rho, h
    coarse = _gauss2(p, cells, size, want_field) * (dens[:, None] if want_field else dens)
    accepted = []
    for _ in range(opts.max_subdivisions):
        half = 0.5 * size
        kids = (cells[:, None, :] + half * _OCTANTS).reshape(-1, 3)
        kid_dens = np.repeat(dens, 8)
        kq = _gauss2(p, kids, half, want_field)
        kq = kq * (kid_dens[:, None] if want_field else kid_dens)
        fine = kq.reshape(len(cells), 8, *kq.shape[1:]).sum(axis=1)
        diff = fine - coarse
        err = np.linalg.norm(diff, axis=-1) if want_field else np.abs(diff)
        acc_sum = sum(a.sum(axis=0) for _, a in accepted) if accepted else 0.0
        estimate = np.linalg.norm(acc_sum + fine.sum(axis=0))
        ok = err <= opts.rel_tol * estimate
        # nearest cells first, so the summation order is fixed by geometry
        dist = np.linalg.norm(cells[ok] + 0.5 * size - p, axis=-1)
        accepted.append((dist, fine[ok]))
        if ok.all():
            break
        refine = np.repeat(~ok, 8)
        cells, dens, size = kids[refine], kid_dens[refine], half
        coarse = kq[refine]
    else:
        raise ToleranceNotMet(
            f"{len(cells)} cells above tolerance after {opts.max_subdivisions} subdivisions"
        )
    dist = np.concatenate([d for d, _ in accepted])
    vals = np.concatenate([a for _, a in accepted])
    vals = vals[np.argsort(dist, kind="stable")]
    if want_field:
        return np.array([math.fsum(vals[:, k]) for k in range(3)])
    return math.fsum(vals)


# -- dispatch -----------------------------------------------------------------

def _evaluate(dist, u, G, opts, want_field):
    p = _points(u)
    flat = p.reshape(-1, 3)
    if isinstance(dist, VoxelGrid):
        lo, rho = dist.cells
        if opts.method == "adaptive":
            res = np.array([_voxel_adaptive(q, lo, rho, dist.cell_size, opts, want_field)
                            for q in flat])
        else:
            res = _voxel_closed_form(flat, lo, rho, dist.cell_size, want_field)
        res = G * res
    else:
        if isinstance(dist, BallUnion):
            centers = np.array([b.center for b in dist.balls])
            masses = np.array([b.mass for b in dist.balls])
        else:
            centers = dist.center[None, :]
            masses = np.array([dist.total_mass()])
        d = flat[:, None, :] - centers
        r = np.linalg.norm(d, axis=-1)
        if want_field:
            res = -G * np.einsum("m,pmd->pd", masses, d / r[..., None] ** 3)
        else:
            res = G * (masses / r).sum(axis=-1)
    return res.reshape(p.shape if want_field else p.shape[:-1])


def _require_exterior(dist, u):
    if np.any(dist.distance(u) <= 0.0):
        raise InsideBody("point lies in the closed support of the body")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def potential_unchecked(dist, u, consts=SI, opts=DEFAULT_QUADRATURE):
    """``potential`` without the exterior check (boundary and interior use the
    same exterior expression)."""
    return _scalar(_evaluate(dist, u, consts.G, opts, False))


def field_unchecked(dist, u, consts=SI, opts=DEFAULT_QUADRATURE):
    return _evaluate(dist, u, consts.G, opts, True)


def potential(dist: MassDistribution, u, consts: PhysicalConstants = SI,
              opts: QuadratureOptions = DEFAULT_QUADRATURE):
    """Specific potential U(u) > 0 [J/kg] at exterior point(s) ``u``.

    Raises
    ------
    InsideBody
        If any point lies in the closed support.
    ToleranceNotMet
        If adaptive quadrature runs out of subdivision levels.
    """
    _require_exterior(dist, u)
    return potential_unchecked(dist, u, consts, opts)


def field(dist: MassDistribution, u, consts: PhysicalConstants = SI,
          opts: QuadratureOptions = DEFAULT_QUADRATURE) -> np.ndarray:
    """Gravitational acceleration [m/s^2] at exterior point(s) ``u``."""
    _require_exterior(dist, u)
    return field_unchecked(dist, u, consts, opts)


def potential_bounds(dist: MassDistribution, u, consts: PhysicalConstants = SI):
    """Bracket ``(GM / max_dist, GM / dist)`` around the potential at ``u``.

    Every body point is no closer than the closure distance and no farther
    than the farthest body point, which gives the two bounds.
    """
    _require_exterior(dist, u)
    gm = consts.G * dist.total_mass()
    return _scalar(gm / dist.max_distance(u)), _scalar(gm / dist.distance(u))
