"""Command-line front end: JSON configs in, JSON reports out, CSV trajectories.

Exit codes: 0 success, 2 config parse/schema error, 3 domain or
admissibility error, 4 internal inconsistency (closed form vs oracle).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__, numerics, spacecraft, underwater
from .errors import (
    AdmissibilityError,
    ChartDomainError,
    DegenerateEquilibrium,
    InternalInconsistency,
    NonFiniteState,
)
from .prng import unit_direction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4

FD_CHECK_TOLERANCE = 1e-5

_DOMAIN_ERRORS = (AdmissibilityError, ChartDomainError, DegenerateEquilibrium,
                  NonFiniteState)

SPACECRAFT_COLUMNS = ("Pi1", "Pi2", "Pi3", "alpha1", "alpha2", "alpha3",
                      "beta1", "beta2", "beta3", "gamma1", "gamma2", "gamma3")
UNDERWATER_COLUMNS = ("Pi1", "Pi2", "Pi3", "Q1", "Q2", "Q3",
                      "Gamma1", "Gamma2", "Gamma3")


class ConfigError(Exception):
    """Configuration unreadable or schema-invalid; message carries a diagnostic."""


class DomainError(Exception):
    """Valid config describing an unanalyzable case (e.g. no feasible orbit)."""


_validator_cache: Draft202012Validator | None = None


def _validator() -> Draft202012Validator:
    global _validator_cache
    if _validator_cache is None:
        schema = json.loads(
            resources.files("leafstab.schemas").joinpath("config.schema.json")
            .read_text(encoding="utf-8"))
        _validator_cache = Draft202012Validator(schema)
    return _validator_cache


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    errors = sorted(_validator().iter_errors(doc),
                    key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise ConfigError(f"{path}: at {pointer}: {err.message}")
    return doc


# --- config resolution ---

def resolve_spacecraft(block: dict) -> tuple[spacecraft.SpacecraftParams, dict | None]:
    """Build SpacecraftParams from a config block.

    Returns the params plus, when an asteroid model was given, an orbit
    payload listing every stationary-orbit root with its feasibility flag
    and derived coefficients.
    """
    inertia = [float(v) for v in block["inertia"]]
    if "asteroid" not in block:
        params = spacecraft.SpacecraftParams(
            i1=inertia[0], i2=inertia[1], i3=inertia[2],
            omega_t=float(block["omega_t"]),
            k1=float(block["k1"]), k2=float(block["k2"]), k3=float(block["k3"]))
        return params, None

    asteroid = spacecraft.AsteroidParams(**block["asteroid"])
    radii = spacecraft.stationary_orbit_radii(asteroid)
    payload_radii = []
    for root in radii:
        k1, k2, k3 = spacecraft.gravity_coefficients(asteroid, root.radius)
        payload_radii.append({"radius": root.radius, "feasible": root.feasible,
                              "k1": k1, "k2": k2, "k3": k3})
    if "orbit_radius" in block:
        analysis_radius = float(block["orbit_radius"])
    else:
        feasible = [r.radius for r in radii if r.feasible]
        if not feasible:
            raise DomainError("no feasible stationary orbit (all roots inside the "
                              "mean radius); give orbit_radius explicitly")
        analysis_radius = max(feasible)
    params = spacecraft.SpacecraftParams.from_asteroid(asteroid, inertia,
                                                       analysis_radius)
    return params, {"radii": payload_radii, "analysis_radius": analysis_radius}


def resolve_underwater(block: dict) -> tuple[underwater.VehicleParams, float]:
    fields = {k: float(v) for k, v in block.items() if k != "q2e"}
    return underwater.VehicleParams(**fields), float(block["q2e"])


# --- serialization helpers ---

def _definiteness_dict(d: numerics.Definiteness) -> dict:
    return {"class": d.classification.value,
            "min_eigenvalue": d.min_eigenvalue,
            "max_eigenvalue": d.max_eigenvalue}


def _matrix(m: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in m]


def _vector(v: np.ndarray) -> list[float]:
    return [float(x) for x in v]


def _envelope(command: str, config: dict | None) -> dict:
    doc = {"command": command,
           "tool": {"name": "leafstab", "version": __version__}}
    if config is not None:
        doc["config"] = config
    return doc


def _spacecraft_stability_payload(params: spacecraft.SpacecraftParams) -> dict:
    report = spacecraft.stability_analysis(params)
    eigs = numerics.sym_eigenvalues(report.hessian)
    return {
        "verdict": report.verdict.value,
        "regime": report.regime,
        "conditions": {"condition1": report.condition1,
                       "condition2": report.condition2,
                       "condition3": report.condition3},
        "critical_residual": report.critical_residual,
        "equilibrium": _vector(report.equilibrium),
        "hessian": _matrix(report.hessian),
        "eigenvalues": _vector(eigs),
        "definiteness": _definiteness_dict(report.definiteness),
    }


def _underwater_stability_payload(q2e: float, params: underwater.VehicleParams) -> dict:
    report = underwater.stability_analysis(q2e, params)
    eigs = numerics.sym_eigenvalues(report.hessian)
    return {
        "verdict": report.verdict.value,
        "conditions": {"nonzero_q2": report.condition_nonzero_q2,
                       "bottom_heavy": report.condition_bottom_heavy,
                       "mgl_margin": report.condition_mgl_margin,
                       "mass_order": report.condition_mass_order},
        "determinant_closed_form": report.determinant_closed_form,
        "critical_residual": report.critical_residual,
        "equilibrium": _vector(report.equilibrium),
        "hessian": _matrix(report.hessian),
        "eigenvalues": _vector(eigs),
        "definiteness": _definiteness_dict(report.definiteness),
    }


def _admissibility_dict(rep: underwater.AdmissibilityReport) -> dict:
    keys = ("m1_positive", "m2_positive", "m3_positive", "i11_positive",
            "i22_positive", "planar_det_positive", "i3_positive",
            "m1_i22_exceeds_ml2", "m2_i11_exceeds_ml2", "k_positive")
    out = {k: getattr(rep, k) for k in keys}
    out["physical_ok"] = rep.physical_ok
    out["block_ok"] = rep.block_ok
    out["admissible"] = rep.admissible
    return out


# --- subcommands ---

def run_spacecraft_stability(config_path: str) -> dict:
    config = load_config(config_path)
    _require_system(config, "spacecraft")
    t0 = time.perf_counter()
    params, orbit = resolve_spacecraft(config["spacecraft"])
    doc = _envelope("spacecraft-stability", config)
    doc["resolved_params"] = {"i1": params.i1, "i2": params.i2, "i3": params.i3,
                              "omega_t": params.omega_t, "k1": params.k1,
                              "k2": params.k2, "k3": params.k3}
    if orbit is not None:
        doc["orbit"] = orbit
    doc["stability"] = _spacecraft_stability_payload(params)
    doc["timing_s"] = time.perf_counter() - t0
    return doc


def run_underwater_stability(config_path: str) -> dict:
    config = load_config(config_path)
    _require_system(config, "underwater")
    t0 = time.perf_counter()
    params, q2e = resolve_underwater(config["underwater"])
    doc = _envelope("underwater-stability", config)
    doc["resolved_params"] = dict(config["underwater"])
    doc["admissibility"] = _admissibility_dict(underwater.admissibility(params))
    underwater.require_admissible(params)
    doc["stability"] = _underwater_stability_payload(q2e, params)
    doc["timing_s"] = time.perf_counter() - t0
    return doc


def run_simulate(config_path: str, out_path: str) -> dict:
    config = load_config(config_path)
    if "simulation" not in config:
        raise ConfigError(f"{config_path}: simulate requires a simulation block")
    sim = config["simulation"]
    dt = float(sim["dt"])
    steps = int(sim["steps"])
    perturbation = float(sim.get("perturbation", 0.0))
    seed = int(sim.get("seed", 0))

    t0 = time.perf_counter()
    if config["system"] == "spacecraft":
        params, _ = resolve_spacecraft(config["spacecraft"])
        x_eq = spacecraft.equilibrium(params)
        x0 = x_eq + perturbation * unit_direction(seed, x_eq.size)
        traj = spacecraft.simulate(params, x0, dt, steps)
        names = spacecraft.INVARIANT_NAMES
        columns = SPACECRAFT_COLUMNS
    else:
        params, q2e = resolve_underwater(config["underwater"])
        x_eq = underwater.equilibrium(q2e, params)
        x0 = x_eq + perturbation * unit_direction(seed, x_eq.size)
        traj = underwater.simulate(params, x0, dt, steps)
        names = underwater.INVARIANT_NAMES
        columns = UNDERWATER_COLUMNS

    write_trajectory_csv(out_path, traj, columns, names, params)
    distance = float(np.max(np.sqrt(np.sum((traj.states - x_eq) ** 2, axis=1))))
    doc = _envelope("simulate", config)
    doc["simulation"] = {"dt": dt, "steps": steps,
                         "perturbation": perturbation, "seed": seed}
    doc["out"] = str(out_path)
    doc["drifts"] = dict(zip(names, traj.drifts))
    doc["max_distance_from_equilibrium"] = distance
    doc["timing_s"] = time.perf_counter() - t0
    return doc


def write_trajectory_csv(path, traj: numerics.Trajectory, columns, invariant_names,
                         params) -> None:
    """CSV layout: t, state components in canonical order, one column per
    invariant; full double precision."""
    if len(columns) == 12:
        series = spacecraft.invariant_series(traj.states, params)
    else:
        series = underwater.invariant_series(traj.states, params)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(("t",) + tuple(columns) + tuple(invariant_names)) + "\n")
        for i in range(traj.states.shape[0]):
            row = [traj.times[i], *traj.states[i], *series[i]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def run_hessian(config_path: str, check_fd: bool) -> tuple[dict, int]:
    config = load_config(config_path)
    t0 = time.perf_counter()
    if config["system"] == "spacecraft":
        params, _ = resolve_spacecraft(config["spacecraft"])
        hess = spacecraft.reduced_hessian(params)
        x_eq = spacecraft.equilibrium(params)[spacecraft.PI]

        def reduced(x):
            return spacecraft.reduced_hamiltonian(x[:3], x[3:], params)
    else:
        params, q2e = resolve_underwater(config["underwater"])
        hess = underwater.reduced_hessian(q2e, params)
        x_eq = underwater.equilibrium(q2e, params)[underwater.PI]

        def reduced(x):
            return underwater.reduced_hamiltonian(x[:3], x[3:], q2e, params)

    doc = _envelope("hessian", config)
    doc["hessian"] = _matrix(hess)
    doc["eigenvalues"] = _vector(numerics.sym_eigenvalues(hess))
    doc["definiteness"] = _definiteness_dict(numerics.classify_definiteness(hess))
    exit_code = EXIT_OK
    if check_fd:
        fd = numerics.fd_hessian(reduced, np.concatenate([x_eq, np.zeros(3)]))
        deviation = float(np.linalg.norm(fd - hess) / np.linalg.norm(hess))
        passed = deviation <= FD_CHECK_TOLERANCE
        doc["fd_check"] = {"max_relative_deviation": deviation,
                           "tolerance": FD_CHECK_TOLERANCE, "passed": passed}
        if not passed:
            exit_code = EXIT_INTERNAL
    doc["timing_s"] = time.perf_counter() - t0
    return doc, exit_code


def run_castalia() -> dict:
    t0 = time.perf_counter()
    asteroid = spacecraft.castalia_preset()
    radii = spacecraft.stationary_orbit_radii(asteroid)
    feasible = [r for r in radii if r.feasible]
    doc = _envelope("castalia", None)
    doc["asteroid"] = {
        "mass": asteroid.mass, "mean_radius": asteroid.mean_radius,
        "omega_t": asteroid.omega_t, "c20": asteroid.c20, "c22": asteroid.c22,
        "gravitational_constant": asteroid.gravitational_constant}
    doc["stationary_orbits"] = [{"radius": r.radius, "feasible": r.feasible}
                                for r in radii]
    if feasible:
        radius = max(r.radius for r in feasible)
        k1, k2, k3 = spacecraft.gravity_coefficients(asteroid, radius)
        doc["coefficients_at_feasible_radius"] = {
            "radius": radius, "k1": k1, "k2": k2, "k3": k3}
        doc["inequalities"] = {
            "k1_less_than_k3": k1 < k3,
            "omega_t_sq_greater_than_2_k2_minus_k1": asteroid.omega_t ** 2 > 2.0 * (k2 - k1),
        }
        doc["conclusion"] = (
            "At the feasible stationary orbit the coefficients satisfy k1 < k3 and "
            "omega_t^2 > 2(k2 - k1); any spacecraft whose principal inertia moments "
            "satisfy I2 > I1 > I3 therefore meets the sufficient condition and its "
            "equilibrium attitude is Lyapunov stable.")
    doc["timing_s"] = time.perf_counter() - t0
    return doc


def _require_system(config: dict, system: str) -> None:
    if config["system"] != system:
        raise ConfigError(f"config declares system '{config['system']}', "
                          f"this command requires '{system}'")


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _run_many(paths: list[str], jobs: int, runner) -> int:
    """Run one config per path, merging reports in input order."""
    if len(paths) == 1:
        _emit(runner(paths[0]))
        return EXIT_OK
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(runner, p) for p in paths]
        docs = [f.result() for f in futures]
    _emit(docs)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafstab",
        description="Lyapunov stability of rigid-body relative equilibria "
                    "(asteroid-orbiting spacecraft / submerged vehicle) via the "
                    "energy method on the symplectic leaf.")
    parser.add_argument("--version", action="version", version=f"leafstab {__version__}")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker threads when several --config files are given "
                             "(results merge in input order)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name, help_text in (("spacecraft-stability",
                             "stability report for the spacecraft equilibrium"),
                            ("underwater-stability",
                             "stability report for the underwater-vehicle equilibrium")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, action="append", metavar="PATH",
                         help="JSON config (repeatable; reports merge in input order)")

    sim = sub.add_parser("simulate", help="integrate a perturbed equilibrium, "
                                          "write a CSV trajectory, print drifts")
    sim.add_argument("--config", required=True, metavar="PATH")
    sim.add_argument("--out", required=True, metavar="PATH", help="trajectory CSV path")

    hess = sub.add_parser("hessian", help="print the reduced 6x6 Hessian, its "
                                          "eigenvalues and definiteness")
    hess.add_argument("--config", required=True, metavar="PATH")
    hess.add_argument("--check-fd", action="store_true",
                      help="compare against the finite-difference oracle; "
                           "exit nonzero on deviation > 1e-5")

    sub.add_parser("castalia", help="end-to-end case study for asteroid 4769 Castalia")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "spacecraft-stability":
            return _run_many(args.config, args.jobs, run_spacecraft_stability)
        if args.subcommand == "underwater-stability":
            return _run_many(args.config, args.jobs, run_underwater_stability)
        if args.subcommand == "simulate":
            _emit(run_simulate(args.config, args.out))
            return EXIT_OK
        if args.subcommand == "hessian":
            doc, code = run_hessian(args.config, args.check_fd)
            _emit(doc)
            return code
        if args.subcommand == "castalia":
            _emit(run_castalia())
            return EXIT_OK
        raise AssertionError(f"unhandled subcommand {args.subcommand!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteState as exc:
        print(f"domain error: integration diverged, {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, *_DOMAIN_ERRORS) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InternalInconsistency,) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        # parameter validation raised while building domain objects
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
