"""
Scenario orchestration behind the CLI. Each handler computes, writes its artifacts and returns the report
body; `run` adds the effective settings, writes the JSON report and maps failures to exit codes.
"""

import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from core.config import get_settings, thread_cap
from core.errors import ConfigError, IsoflowError
from core.lib.logger import RunLogger
from core.lib.utils.formatting import dumps_report, to_plain
from app.cli.config import (
    NonexistParams,
    OneWellParams,
    PlotdataParams,
    RunConfig,
    SeriesParams,
    SpectrumParams,
    TwoWellParams,
    WaveParams,
)
from app.cli.plotdata import emit_plotdata
from app.curves import energy, momentum, read_csv, speed_defect, write_csv
from app.onewell import (
    area_preserving_perturbation,
    calibration_certificate,
    closed_form_energy,
    euclidean_length_bound,
    isoperimetric,
    multiplier_from_beta,
    nonexistence_sequence,
)
from app.potentials import (
    Potential,
    WellData,
    apriori_bound,
    from_config,
    load_potential,
    quadratic_from_well,
    well_data,
)
from app.series import for_potential, gbeta_radial, residual_Wexp
from app.twowell import MinimizerOptions, axis_heteroclinic, epsilon_threshold, make_problem, minimize
from app.wave import (
    a_nu_sweep,
    conserved_checks,
    estimate_speed,
    manufactured_linear_solution,
    nodal_equipartition,
    ode_residual,
    profile_from_samples,
    regime_boundaries,
    second_variation_spectrum,
    speed_limits,
    speed_spectrum,
    to_profile,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

Artifacts = List[str]


def _potential(config: RunConfig) -> Optional[Potential]:
    if config.potential is None:
        return None
    if isinstance(config.potential, str):
        return load_potential(config.potential)
    return from_config(dict(config.potential))


def _out(config: RunConfig, default: str) -> Path:
    path = Path(config.out or default)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_table(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


# --- handlers ---------------------------------------------------------------------------------

def _onewell(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: OneWellParams = config.typed_params
    pot = _potential(config)
    gbeta = None
    if pot is None:
        well = WellData.diagonal(params.lambda1, params.lambda2)
        pot = quadratic_from_well(well)
    else:
        well = well_data(pot)
        if pot.kind == "radial-analytic-one-well":
            gbeta = for_potential(pot, math.pi / 2.0, params.degree or get_settings().series_degree)

    started = time.perf_counter()
    sol = isoperimetric(well, params.p0, params.area, params.nodes, gbeta=gbeta,
                        pot=pot if gbeta is not None else None)
    E = energy(sol.curve, pot)
    logger.log_stage("flow", {"beta": sol.beta, "L_beta": sol.L_beta, "E": E, "A_tilde": sol.A_tilde},
                     time.perf_counter() - started)

    report: Dict[str, Any] = {
        "beta": sol.beta,
        "L_beta": sol.L_beta,
        "energy": E,
        "momentum": momentum(sol.curve),
        "A": sol.A,
        "A_tilde": sol.A_tilde,
        "C": sol.C,
        "multiplier": multiplier_from_beta(sol.beta, well.lambda1, well.lambda2),
        "spectrum": sol.spectrum,
        "euclidean_length": sol.euclidean_length,
        "euclidean_length_bound": euclidean_length_bound(well, params.p0, sol.beta),
        "speed_defect": speed_defect(sol.curve, pot),
        "analytic": sol.analytic,
        "residual_Wexp": sol.residual_Wexp,
        "nodes": len(sol.curve),
        "well": well,
    }

    if params.certificate:
        rng = np.random.default_rng(config.seed)
        reports = [calibration_certificate(sol, area_preserving_perturbation(sol.curve, rng), pot)
                   for _ in range(params.certificate)]
        report["certificate"] = {
            "candidates": len(reports),
            "all_verdicts": all(r.verdict for r in reports),
            "all_omega_match": all(r.omega_match for r in reports),
            "min_energy_gap": min(r.energy_candidate - r.energy_solution for r in reports),
            "omega_solution": reports[0].omega_solution,
        }
        logger.log_stage("certificate", report["certificate"])

    path = _out(config, "curve.csv")
    write_csv(sol.curve, path)
    return report, [str(path)]


def _minimizer_options(config: RunConfig, params: TwoWellParams) -> MinimizerOptions:
    extra = {"tolerance": config.tolerance} if config.tolerance is not None else {}
    return MinimizerOptions(max_rounds=params.max_rounds, jitter_starts=params.jitter, seed=config.seed, **extra)


def _twowell(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: TwoWellParams = config.typed_params
    pot = _potential(config)
    n = params.nodes or get_settings().twowell_nodes
    opts = _minimizer_options(config, params)
    threads = thread_cap(config.threads)

    if params.sweep:
        started = time.perf_counter()
        table = a_nu_sweep(pot, params.sweep, n=n, threads=threads)
        logger.log_stage("A -> nu sweep", {"areas": len(params.sweep)}, time.perf_counter() - started)
        path = _out(config, "sweep.csv")
        _write_table(table, path)
        return {"sweep": table.to_dict(orient="records")}, [str(path)]

    started = time.perf_counter()
    problem = make_problem(pot, params.area, n, opts)
    result = minimize(problem, threads=threads, verbose=config.verbose)
    logger.log_stage("minimize", {"E": result.energy, "P": result.momentum, "mu": result.multiplier,
                                  "kkt": result.kkt_residual, "start": result.start_label},
                     time.perf_counter() - started)
    if not result.converged:
        logger.log_warning(f"minimizer stopped with kkt_residual={result.kkt_residual:.3g}")

    axis = axis_heteroclinic(pot, n)
    hyp = problem.hypotheses
    report: Dict[str, Any] = {
        "energy": result.energy,
        "momentum": result.momentum,
        "multiplier": result.multiplier,
        "bubble_count": result.bubble_count,
        "kkt_residual": result.kkt_residual,
        "converged": result.converged,
        "rounds": result.rounds,
        "start": result.start_label,
        "starts": result.starts,
        "axis_energy": energy(axis, pot),
        "axis_momentum": momentum(axis),
        "hypotheses": {name: check.passed for name, check in hyp.checks.items()},
        "constants": hyp.constants,
    }
    c0, c1 = hyp.constants.get("c0_ball"), hyp.constants.get("c1_ball")
    if c0 is not None and c1 is not None:
        report["epsilon_threshold"] = epsilon_threshold(c0, c1, problem.ball_radius)
    path = _out(config, "curve.csv")
    write_csv(result.curve, path)
    return report, [str(path)]


def _wave(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: WaveParams = config.typed_params
    pot = _potential(config)
    curve = read_csv(params.curve)

    started = time.perf_counter()
    profile = to_profile(curve, pot, 0.0 if params.nu is None else params.nu, params.delta)
    nu, fit_residual = estimate_speed(profile, pot)
    if params.nu is None:
        profile = to_profile(curve, pot, nu, params.delta)
        nu, fit_residual = estimate_speed(profile, pot)
    E = energy(curve, pot)
    logger.log_stage("profile", {"nodes": len(profile), "H": profile.H_value, "nu": nu},
                     time.perf_counter() - started)

    report: Dict[str, Any] = {
        "nodes": len(profile),
        "mapped": profile.mapped,
        "wells": profile.wells,
        "energy": E,
        "H": profile.H_value,
        "H_over_sqrt2E": profile.H_value / (math.sqrt(2.0) * E) if E > 0.0 else None,
        "equipartition_residual": profile.equipartition_residual,
        "nu": nu,
        "tail_nu": profile.nu,
        "speed_residual": fit_residual,
        "relative_ode_residual": ode_residual(profile, pot, nu)[1],
        "speed_limits": speed_limits(pot),
        "conserved": conserved_checks(profile, nu, pot),
    }
    if pot.is_double_well:
        try:
            report["apriori_bound"] = apriori_bound(pot)
            report["sup_norm"] = float(np.max(np.linalg.norm(profile.U, axis=1)))
        except IsoflowError as exc:
            logger.log_warning(str(exc))
    if params.spectrum_points:
        started = time.perf_counter()
        report["second_variation"] = second_variation_spectrum(profile, pot, params.spectrum_points)
        logger.log_stage("second variation", {"zero": report["second_variation"].zero_eigenvalue},
                         time.perf_counter() - started)

    path = _out(config, "profile.csv")
    table = pd.DataFrame({"y": profile.y_grid, "U1": profile.U[:, 0], "U2": profile.U[:, 1],
                          "equip_residual": nodal_equipartition(profile, pot)})
    _write_table(table, path)
    return report, [str(path)]


def _manufactured_check(well: WellData, nu: float) -> Optional[float]:
    y = np.linspace(0.0, 8.0 / well.lambda1, 4001)
    try:
        U, _ = manufactured_linear_solution(well.lambda1, well.lambda2, nu, y)
    except IsoflowError:
        return None
    return ode_residual(profile_from_samples(y, U, nu), quadratic_from_well(well), nu)[1]


def _regime_row(well: WellData, nu: float, boundary: bool, check: bool) -> Dict[str, Any]:
    rep = speed_spectrum(well, nu)
    row: Dict[str, Any] = {"nu": nu, "nu2": nu * nu, "regime": rep.regime, "admissible": rep.speed_admissible,
                           "boundary": boundary, "cross_check": rep.cross_check_residual}
    for i, z in enumerate(rep.eigenvalues):
        row[f"re_mu_{i}"] = z.real
        row[f"im_mu_{i}"] = z.imag
    if check:
        row["manufactured_residual"] = _manufactured_check(well, nu)
    return row


def _spectrum(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: SpectrumParams = config.typed_params
    well = WellData.diagonal(params.lambda1, params.lambda2)
    grid = sorted(set(params.nu))
    lo, hi = grid[0], grid[-1]
    rows = {nu: False for nu in grid}
    for nu2 in regime_boundaries(well.lambda1, well.lambda2):
        nu = math.sqrt(nu2)
        if lo <= nu <= hi:
            rows[nu] = True
    table = pd.DataFrame([_regime_row(well, nu, rows[nu], params.check) for nu in sorted(rows)])
    logger.log_stage("regimes", {"rows": len(table), "boundaries": regime_boundaries(well.lambda1, well.lambda2)})

    path = _out(config, "regimes.csv")
    _write_table(table, path)
    report = {
        "lambdas": (well.lambda1, well.lambda2),
        "boundaries_nu2": regime_boundaries(well.lambda1, well.lambda2),
        "rows": len(table),
        "max_cross_check": float(table["cross_check"].max()),
        "regime_counts": {k: int(v) for k, v in table["regime"].value_counts().sort_index().items()},
    }
    return report, [str(path)]


def _series(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: SeriesParams = config.typed_params
    pot = _potential(config)
    if pot is None:
        if params.coeffs is None:
            raise ConfigError("series needs a potential or coeffs")
        pot = Potential(kind="radial-analytic-one-well", wells=[(0.0, 0.0)],
                        params={"coeffs": list(params.coeffs), "lam": params.lam})
    degree = params.degree or get_settings().series_degree

    started = time.perf_counter()
    series = for_potential(pot, params.beta, degree)
    theta = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    ring = np.asarray(series.center) + params.radius * np.column_stack([np.cos(theta), np.sin(theta)])
    report: Dict[str, Any] = {
        "beta": params.beta,
        "degree": degree,
        "validity_radius": series.validity_radius,
        "ring_radius": params.radius,
        "residual_Wexp": residual_Wexp(pot, series, ring),
    }
    if pot.kind == "radial-analytic-one-well":
        lam = float(pot.params.get("lam", 1.0))
        exact = gbeta_radial(pot.params["coeffs"], params.beta, params.radius, lam)
        approx = float(series.value(ring[:1])[0])
        report["radial_closed_form"] = exact
        report["radial_series_error"] = abs(approx - exact)
    logger.log_stage("series", {"N": degree, "residual": report["residual_Wexp"],
                                "validity": series.validity_radius}, time.perf_counter() - started)

    path = _out(config, "series.json")
    path.write_text(dumps_report(series.to_table()))
    return report, [str(path)]


def _nonexist(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: NonexistParams = config.typed_params
    started = time.perf_counter()
    rows = []
    for j in range(1, params.jmax + 1):
        curve, E = nonexistence_sequence(params.q, params.area, j, params.points_per_circle)
        rows.append({"j": j, "r": math.sqrt(abs(params.area) / (math.pi * j)), "energy": E,
                     "closed_form": closed_form_energy(params.q, params.area, j), "momentum": momentum(curve)})
    table = pd.DataFrame(rows)
    table["rel_error"] = (table["energy"] - table["closed_form"]).abs() / table["closed_form"]
    limit = 1.0 / (1.0 + params.q)
    logger.log_stage("sequence", {"jmax": params.jmax, "last": float(table["energy"].iloc[-1]), "limit": limit},
                     time.perf_counter() - started)

    path = _out(config, "nonexist.csv")
    _write_table(table, path)
    report = {
        "limit": limit,
        "monotone": bool(table["energy"].is_monotonic_decreasing),
        "last_energy": float(table["energy"].iloc[-1]),
        "max_rel_error": float(table["rel_error"].max()),
    }
    return report, [str(path)]


def _plotdata(config: RunConfig, logger: RunLogger) -> Tuple[Dict[str, Any], Artifacts]:
    params: PlotdataParams = config.typed_params
    written = emit_plotdata(params.inputs, params.outdir)
    logger.log_stage("plotdata", {"inputs": len(params.inputs), "written": len(written)})
    return {"written": written}, written


HANDLERS: Dict[str, Callable[[RunConfig, RunLogger], Tuple[Dict[str, Any], Artifacts]]] = {
    "onewell": _onewell,
    "twowell": _twowell,
    "wave": _wave,
    "spectrum": _spectrum,
    "series": _series,
    "nonexist": _nonexist,
    "plotdata": _plotdata,
}


# --- entry ------------------------------------------------------------------------------------

def effective_settings(config: RunConfig) -> Dict[str, Any]:
    settings = get_settings().model_dump()
    settings["threads"] = thread_cap(config.threads)
    return settings


def _emit_report(config: RunConfig, body: Dict[str, Any]) -> Optional[str]:
    text = dumps_report(body)
    if config.report is None:
        return None
    path = Path(config.report)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return str(path)


def _diagnostic(exc: BaseException) -> Dict[str, Any]:
    return {"status": "error", "error": type(exc).__name__, "message": str(exc)}


def report_error(config: Optional[RunConfig], exc: BaseException) -> None:
    body = _diagnostic(exc)
    if config is not None and config.report is not None:
        _emit_report(config, body)
    else:
        sys.stderr.write(json.dumps(body) + "\n")


def run(config: RunConfig, logger: Optional[RunLogger] = None) -> int:
    """Run one subcommand; returns the process exit status."""
    logger = logger or RunLogger(enabled=config.verbose)
    logger.log_run_start(config.command, {"seed": config.seed, **config.params})
    try:
        body, artifacts = HANDLERS[config.command](config, logger)
    except (ConfigError, ValidationError) as exc:
        report_error(config, exc)
        logger.log_final("config error", [str(exc)])
        return EXIT_CONFIG
    except (IsoflowError, np.linalg.LinAlgError) as exc:
        report_error(config, exc)
        logger.log_final("numerical failure", [f"{type(exc).__name__}: {exc}"])
        return EXIT_NUMERIC

    report = {
        "status": "ok",
        "command": config.command,
        "config": to_plain(config.model_dump()),
        "settings": effective_settings(config),
        "result": to_plain(body),
    }
    written = _emit_report(config, report)
    if written is not None:
        artifacts = artifacts + [written]
    logger.log_final("ok", artifacts)
    return EXIT_OK
