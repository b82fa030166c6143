"""Command-line front end: ``newton-horizon {simulate,classify,cosmology,verify}``.

Scenarios are YAML files (JSON also parses)::

    constants: {G: 1.0, c: 1.0}          # optional, SI values otherwise
    body:
      type: uniform_ball                 # point_mass | uniform_ball | radial_profile
      center: [0, 0, 0]                  #   | ball_union | voxel_grid
      radius: 0.25
      mass: 0.5
    launches:
      - {u0: [1, 0, 0], v0: [-1, 0, 0]}
      - {u0: [2, 0, 0], speed: 0.3, direction: [0, 1, 0]}
      - {u0: [2, 0, 0], v0: photon_radial}
    integration: {t_end: 10.0, rel_tol: 1.0e-10}
    outputs: {csv_path: out/traj.csv, report_path: out/report.txt}

Reports are plain ``key: value`` lines. Exit codes: 0 success (for
``verify``: every bound held), 1 a bound was violated, 2 configuration
error, 3 geometry error, 4 criterion misuse.
"""
import argparse
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
import sys
import tempfile
from typing import List, Optional

import numpy as np
import yaml

from .constants import PhysicalConstants
from .distributions import (BallUnion, MassDistribution, PointMass, RadialProfile,
                            UniformBall, VoxelGrid, vec3)
from .dynamics import (IntegrationOptions, State, Trajectory, energy_drift, integrate,
                       trajectory_energies)
from .potential import potential
from .errors import (AtOrAboveEscape, BadParameters, DegenerateSupport, InsideBody,
                     InvalidDistribution, NotContaining, WrongShape)
from .theorems import (Criterion, classify_black_hole, confinement_distance_general,
                       confinement_radius_spherical, cosmology_report)

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_CRITERION = 0, 1, 2, 3, 4
CSV_COLUMNS = ("t", "ux", "uy", "uz", "vx", "vy", "vz", "energy", "dist_to_closure")
THREADS_ENV = "NEWTON_HORIZON_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class Launch:
    u0: np.ndarray
    v0: np.ndarray
    label: str = ""


@dataclass
class ScenarioConfig:
    consts: PhysicalConstants
    body: MassDistribution
    launches: List[Launch]
    integration: Optional[IntegrationOptions]
    csv_path: Optional[str] = None
    report_path: Optional[str] = None
    extra: dict = dc_field(default_factory=dict)


# -- parsing ---------------------------------------------------------------

def _vector(raw, what):
    try:
        return vec3(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: {exc}") from None


def _number(raw, what):
    # YAML 1.1 reads "1e-10" (no dot) as a string
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ConfigError(f"{what} must be a number, got {raw!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{what} must be a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{what} must be finite, got {raw!r}")
    return value


def parse_body(raw) -> MassDistribution:
    if not isinstance(raw, dict) or "type" not in raw:
        raise ConfigError("body must be a mapping with a 'type' key")
    kind = raw["type"]
    try:
        if kind == "point_mass":
            return PointMass(_vector(raw["center"], "body.center"), _number(raw["mass"], "body.mass"))
        if kind == "uniform_ball":
            center = _vector(raw.get("center", [0, 0, 0]), "body.center")
            radius = _number(raw["radius"], "body.radius")
            if "density" in raw:
                return UniformBall.from_density(center, radius, _number(raw["density"], "body.density"))
            return UniformBall(center, radius, _number(raw["mass"], "body.mass"))
        if kind == "radial_profile":
            return RadialProfile(_vector(raw.get("center", [0, 0, 0]), "body.center"),
                                 [tuple(s) for s in raw["shells"]])
        if kind == "ball_union":
            return BallUnion([parse_body(dict(b, type="uniform_ball")) for b in raw["balls"]])
        if kind == "voxel_grid":
            dens = np.asarray(raw["densities"], dtype=float)
            if "dims" in raw:
                dens = dens.reshape(tuple(int(n) for n in raw["dims"]))
            return VoxelGrid(_vector(raw["origin"], "body.origin"),
                             _number(raw["cell_size"], "body.cell_size"), dens)
    except KeyError as exc:
        raise ConfigError(f"body of type {kind!r} is missing {exc}") from None
    except (InvalidDistribution, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid body: {exc}") from None
    raise ConfigError(f"unknown body type {kind!r}")


def parse_launch(raw, i, body, consts) -> Launch:
    if not isinstance(raw, dict) or "u0" not in raw:
        raise ConfigError(f"launch {i} must be a mapping with 'u0'")
    u0 = _vector(raw["u0"], f"launch {i} u0")
    if raw.get("v0") == "photon_radial":
        center, _ = body.bounding_ball()
        out = u0 - center
        if not np.linalg.norm(out) > 0:
            raise ConfigError(f"launch {i}: photon_radial needs u0 away from the body center")
        v0 = consts.c * out / np.linalg.norm(out)
    elif "v0" in raw:
        v0 = _vector(raw["v0"], f"launch {i} v0")
    elif "speed" in raw and "direction" in raw:
        d = _vector(raw["direction"], f"launch {i} direction")
        if not np.linalg.norm(d) > 0:
            raise ConfigError(f"launch {i}: direction must be non-zero")
        v0 = _number(raw["speed"], f"launch {i} speed") * d / np.linalg.norm(d)
    else:
        raise ConfigError(f"launch {i} needs v0, speed+direction, or v0: photon_radial")
    return Launch(u0, v0, str(raw.get("label", i)))


def parse_integration(raw) -> Optional[IntegrationOptions]:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("integration must be a mapping")
    allowed = {"t_end", "rel_tol", "abs_tol", "escape_radius_factor", "max_steps"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown integration keys: {sorted(unknown)}")
    if "t_end" not in raw:
        raise ConfigError("integration.t_end is required")
    kwargs = {k: _number(v, f"integration.{k}") for k, v in raw.items()}
    if "max_steps" in kwargs:
        kwargs["max_steps"] = int(kwargs["max_steps"])
    try:
        return IntegrationOptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid integration options: {exc}") from None


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    c_raw = raw.get("constants") or {}
    try:
        consts = PhysicalConstants(**{k: _number(v, f"constants.{k}") for k, v in c_raw.items()})
    except TypeError as exc:
        raise ConfigError(f"invalid constants: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "body" not in raw:
        raise ConfigError("config needs a body")
    body = parse_body(raw["body"])
    launches = raw.get("launches") or []
    if not isinstance(launches, list):
        raise ConfigError("launches must be a list")
    outputs = raw.get("outputs") or {}
    extra = {k: v for k, v in raw.items()
             if k not in ("constants", "body", "launches", "integration", "outputs")}
    return ScenarioConfig(consts, body,
                          [parse_launch(l, i, body, consts) for i, l in enumerate(launches)],
                          parse_integration(raw.get("integration")),
                          outputs.get("csv_path"), outputs.get("report_path"), extra)


# -- output helpers ---------------------------------------------------------------

def _g(x) -> str:
    # shortest repr that reads back to the same double
    return repr(float(x))


def _csv(x) -> str:
    return f"{x:.17g}"


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def trajectory_csv(body, traj: Trajectory, consts) -> str:
    e = trajectory_energies(body, traj, consts)
    d = body.distance(traj.u)
    rows = [",".join(CSV_COLUMNS)]
    for i in range(len(traj)):
        vals = (traj.t[i], *traj.u[i], *traj.v[i], e[i], d[i])
        rows.append(",".join(_csv(v) for v in vals))
    return "\n".join(rows) + "\n"


def read_trajectory_csv(path) -> np.ndarray:
    """Load a trajectory CSV into an (n, 9) array in ``CSV_COLUMNS`` order."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def csv_path_for(template, i, n) -> Path:
    if "{i}" in template:
        return Path(template.format(i=i))
    p = Path(template)
    return p if n == 1 else p.with_name(f"{p.stem}_{i}{p.suffix}")


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_all(body, launches, opts, consts) -> List[Trajectory]:
    jobs = [(body, State.at(l.u0, l.v0), opts, consts) for l in launches]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(lambda a: integrate(*a), jobs))


def applicable_bound(body, u0, v0, consts):
    """The confinement bound that applies to the launch, or None when the
    launch is at or above the escape threshold."""
    try:
        if body.spherical:
            R = float(np.linalg.norm(u0 - body.center))
            return confinement_radius_spherical(body.total_mass(), R,
                                                float(np.linalg.norm(v0)), consts)
        return confinement_distance_general(body, u0, v0, consts)
    except AtOrAboveEscape:
        return None


def attained_extent(body, traj):
    if body.spherical:
        return float(np.max(np.linalg.norm(traj.u - body.center, axis=-1)))
    return float(np.max(body.distance(traj.u)))


def _check_exterior(body, launches):
    for l in launches:
        if body.distance(l.u0) <= 0:
            raise InsideBody(f"launch {l.label} starts in the closed support of the body")


def _header(command, cfg_consts, body):
    return [f"command: {command}", f"G: {_g(cfg_consts.G)}", f"c: {_g(cfg_consts.c)}",
            f"body: {type(body).__name__}", f"total mass: {_g(body.total_mass())}"]


# -- subcommands --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not cfg.launches:
        raise ConfigError("simulate needs at least one launch")
    if cfg.integration is None:
        raise ConfigError("simulate needs an integration section with t_end")
    _check_exterior(cfg.body, cfg.launches)
    trajs = _run_all(cfg.body, cfg.launches, cfg.integration, cfg.consts)

    lines = _header("simulate", cfg.consts, cfg.body)
    lines.append(f"launches: {len(trajs)}")
    outputs = []
    for i, (l, tr) in enumerate(zip(cfg.launches, trajs)):
        key = f"launch {l.label}"
        lines.append(f"{key} termination: {tr.termination.value}")
        if tr.t_event is not None:
            lines.append(f"{key} event time: {_g(tr.t_event)}")
        lines.append(f"{key} final time: {_g(tr.t[-1])}")
        lines.append(f"{key} samples: {len(tr)}")
        lines.append(f"{key} energy drift: {energy_drift(cfg.body, tr, cfg.consts):.3e}")
        bound = applicable_bound(cfg.body, l.u0, l.v0, cfg.consts)
        if bound is None:
            lines.append(f"{key} bound held: n/a (launch at or above escape speed)")
        else:
            ratio = attained_extent(cfg.body, tr) / bound.radius_bound
            held = "yes" if ratio <= 1.0 else "NO"
            rel = "<" if ratio < 1 else ("=" if ratio == 1 else ">")
            lines.append(f"{key} bound: {_g(bound.radius_bound)} ({bound.frame.value})")
            lines.append(f"{key} bound held: {held} (max attained / bound = {ratio:.6f} {rel} 1)")
        if cfg.csv_path:
            path = csv_path_for(cfg.csv_path, i, len(trajs))
            outputs.append((path, trajectory_csv(cfg.body, tr, cfg.consts)))
            lines.append(f"{key} csv: {path}")
    for path, text in outputs:
        _write_atomic(path, text)
    return _emit(lines, cfg.report_path)


def _emit(lines, report_path, code=EXIT_OK):
    text = "\n".join(lines) + "\n"
    if report_path:
        _write_atomic(report_path, text)
    sys.stdout.write(text)
    return code


def _parse_ball(args, cfg):
    if args.radius is not None:
        center = args.center if args.center is not None else cfg.body.bounding_ball()[0]
        return vec3(center), args.radius
    raw = (cfg.extra.get("classify") or {}).get("ball")
    if raw is not None:
        return _vector(raw.get("center"), "classify.ball.center"), _number(raw.get("radius"), "classify.ball.radius")
    return cfg.body.bounding_ball()


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    criterion = args.criterion or (cfg.extra.get("classify") or {}).get("criterion", "diameter")
    try:
        criterion = Criterion(criterion)
    except ValueError:
        raise ConfigError(f"unknown criterion {criterion!r}; choose from "
                          f"{[c.value for c in Criterion]}") from None
    ball = _parse_ball(args, cfg)
    verdict = classify_black_hole(cfg.body, ball, criterion, cfg.consts)
    lines = _header("classify", cfg.consts, cfg.body)
    lines += [f"ball center: {' '.join(_g(x) for x in ball[0])}",
              f"ball radius: {_g(ball[1])}",
              f"criterion: {criterion.value}",
              f"attained: {_g(verdict.attained)}",
              f"required: {_g(verdict.required)}",
              f"margin: {_g(verdict.margin)}"]
    label = "BLACK HOLE" if verdict.is_black_hole else "not a black hole"
    lines.append(f"verdict: {label} (margin {verdict.margin:.2f})")
    pcr = verdict.photon_confinement_radius
    lines.append(f"photon confinement radius: {'none' if pcr is None else _g(pcr)}")
    return _emit(lines, cfg.report_path)


def cmd_cosmology(args) -> int:
    consts = PhysicalConstants(**{k: v for k, v in (("G", args.G), ("c", args.c)) if v is not None})
    rep = cosmology_report(args.radius, args.density, consts)
    lines = ["command: cosmology", f"G: {_g(consts.G)}", f"c: {_g(consts.c)}",
             f"radius: {_g(args.radius)}", f"density: {_g(args.density)}",
             f"K: {_g(rep.K)}", f"threshold: {_g(rep.threshold)}",
             f"ratio: {_g(rep.ratio)}", f"verdict: {'black hole' if rep.verdict else 'not a black hole'}"]
    return _emit(lines, None)


def random_launches(body, consts, n, seed, distance_factor=2.0) -> List[Launch]:
    """Sub-escape launches from a sphere around the body: uniform directions
    for position and velocity, speeds uniform in (0, 0.99 * escape)."""
    rng = np.random.default_rng(seed)
    center, radius = body.bounding_ball()
    out = []
    for k in range(n):
        pos_dir = rng.normal(size=3)
        vel_dir = rng.normal(size=3)
        u0 = center + distance_factor * radius * pos_dir / np.linalg.norm(pos_dir)
        if body.spherical:
            esc = math.sqrt(2 * consts.G * body.total_mass() / np.linalg.norm(u0 - body.center))
        else:
            esc = math.sqrt(2 * potential(body, u0, consts))
        speed = rng.uniform(0.0, 0.99 * esc)
        out.append(Launch(u0, speed * vel_dir / np.linalg.norm(vel_dir), f"random {k}"))
    return out


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.sweeps < 1:
        raise ConfigError("--sweeps must be >= 1")
    if cfg.integration is None:
        raise ConfigError("verify needs an integration section with t_end")
    vcfg = cfg.extra.get("verify") or {}
    factor = _number(vcfg.get("launch_distance_factor", 2.0), "verify.launch_distance_factor")
    if factor <= 1:
        raise ConfigError("verify.launch_distance_factor must exceed 1")
    _check_exterior(cfg.body, cfg.launches)
    launches = list(cfg.launches) + random_launches(cfg.body, cfg.consts, args.sweeps, args.seed, factor)
    bounds = [applicable_bound(cfg.body, l.u0, l.v0, cfg.consts) for l in launches]
    trajs = _run_all(cfg.body, launches, cfg.integration, cfg.consts)
    slack = 1e-6 if cfg.body.spherical else 1e-5
    lines = _header("verify", cfg.consts, cfg.body)
    lines += [f"seed: {args.seed}", f"sweeps: {args.sweeps}", f"launches: {len(launches)}",
              f"tolerance: {slack:g}"]
    violations = skipped = 0
    for l, b, tr in zip(launches, bounds, trajs):
        if b is None:
            skipped += 1
            lines.append(f"launch {l.label}: out of hypothesis (at or above escape speed)")
            continue
        ratio = attained_extent(cfg.body, tr) / b.radius_bound
        ok = ratio <= 1.0 + slack
        violations += not ok
        lines.append(f"launch {l.label}: {'held' if ok else 'VIOLATED'} "
                     f"(ratio {ratio:.9f}, {tr.termination.value})")
    lines += [f"checked: {len(launches) - skipped}", f"out of hypothesis: {skipped}",
              f"violations: {violations}", f"all bounds held: {'yes' if not violations else 'no'}"]
    return _emit(lines, cfg.report_path, EXIT_OK if not violations else EXIT_VIOLATION)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newton-horizon",
                                     description="Newtonian dark-body simulation and checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate every launch of a scenario")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", help="apply a black-hole criterion to the body")
    p.add_argument("config")
    p.add_argument("--criterion", choices=[c.value for c in Criterion])
    p.add_argument("--center", type=float, nargs=3, metavar=("X", "Y", "Z"))
    p.add_argument("--radius", type=float, help="radius of the candidate ball")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cosmology", help="density threshold for a ball of given radius")
    p.add_argument("--radius", type=float, default=4e26, help="radius [m] (default 4e26)")
    p.add_argument("--density", type=float, default=1e-23, help="average density [kg/m^3]")
    p.add_argument("--G", type=float)
    p.add_argument("--c", type=float)
    p.set_defaults(func=cmd_cosmology)

    p = sub.add_parser("verify", help="randomised confinement-bound sweep")
    p.add_argument("config")
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, BadParameters) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InsideBody, NotContaining) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (WrongShape, DegenerateSupport) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CRITERION


if __name__ == "__main__":
    sys.exit(main())
