"""
Calibration certificates for one-well minimizers.

omega_beta = <Lambda_beta p, dp> (plus dg_beta for analytic wells) satisfies F|v| >= omega_beta(v) with
equality along the minimizer, and its integral only depends on the endpoints and P. Both integrals below
are exact on polylines because the form has linear coefficients.
"""

from typing import Optional

import numpy as np

from core.errors import PreconditionError
from app.curves.functionals import energy, momentum
from app.curves.models import SampledCurve
from app.onewell.models import CertificateReport, OneWellSolution
from app.potentials.models import Potential
from app.series.linear_op import lambda_matrix

ENDPOINT_TOL = 1e-9
CONSTRAINT_TOL = 1e-6


def calibration_integral(sol: OneWellSolution, curve: SampledCurve) -> float:
    well = sol.well
    local = well.to_local(curve.points)
    mid = 0.5 * (local[1:] + local[:-1])
    Lam = lambda_matrix(well.lambda1, well.lambda2, sol.beta)
    val = float(np.sum((mid @ Lam.T) * np.diff(local, axis=0)))
    # g_beta vanishes at the well, so the exact part only contributes -g(p0)
    return val - sol.g_start


def calibration_certificate(sol: OneWellSolution, candidate: SampledCurve, pot: Potential) -> CertificateReport:
    scale = max(1.0, float(np.linalg.norm(sol.curve.start - sol.curve.end)))
    if (np.linalg.norm(candidate.start - sol.curve.start) > ENDPOINT_TOL * scale
            or np.linalg.norm(candidate.end - sol.curve.end) > ENDPOINT_TOL * scale):
        raise PreconditionError("candidate does not share the solution's endpoints")
    P_cand = momentum(candidate)
    if abs(P_cand - sol.A) >= CONSTRAINT_TOL:
        raise PreconditionError(f"candidate has P={P_cand:.12g}, solution constraint is A={sol.A:.12g}")

    omega_sol = calibration_integral(sol, sol.curve)
    omega_cand = calibration_integral(sol, candidate)
    E_sol = energy(sol.curve, pot)
    E_cand = energy(candidate, pot)
    return CertificateReport(
        omega_solution=omega_sol,
        omega_candidate=omega_cand,
        energy_solution=E_sol,
        energy_candidate=E_cand,
        momentum_solution=momentum(sol.curve),
        momentum_candidate=P_cand,
        calibration_gap=E_cand - omega_cand,
        omega_match=abs(omega_sol - omega_cand) <= 1e-5,
        verdict=E_cand >= E_sol - 1e-6,
    )


def _profile(curve: SampledCurve) -> np.ndarray:
    if curve.params is not None and curve.params[-1] != curve.params[0]:
        return (curve.params - curve.params[0]) / (curve.params[-1] - curve.params[0])
    return np.linspace(0.0, 1.0, len(curve))


def _quadratic_terms(points: np.ndarray, psi: np.ndarray):
    """P(points + b psi) = P0 + P1 b + P2 b^2."""
    x, y = points[:, 0], points[:, 1]
    px, py = psi[:, 0], psi[:, 1]
    P1 = -0.5 * np.sum((py[1:] + py[:-1]) * np.diff(x) + (y[1:] + y[:-1]) * np.diff(px))
    P2 = -0.5 * np.sum((py[1:] + py[:-1]) * np.diff(px))
    return float(P1), float(P2)


def area_preserving_perturbation(curve: SampledCurve, rng: np.random.Generator, amplitude: float = 0.05,
                                 modes: int = 3, target: Optional[float] = None) -> SampledCurve:
    """
    Smooth random perturbation with fixed endpoints, corrected along one sine mode so that P is unchanged
    (or equals `target`).
    """
    tau = _profile(curve)
    target = momentum(curve) if target is None else target
    k = np.arange(1, modes + 1)
    basis = np.sin(np.pi * np.outer(tau, k))
    coeffs = rng.normal(size=(modes, 2)) * amplitude / np.sqrt(modes)
    pts = np.asarray(curve.points) + basis @ coeffs
    pts[0], pts[-1] = curve.start, curve.end

    sin1, sin2 = np.sin(np.pi * tau), np.sin(2.0 * np.pi * tau)
    zero = np.zeros_like(tau)
    directions = [np.column_stack(d) for d in ((zero, sin1), (sin1, zero), (zero, sin2), (sin2, zero))]
    P0 = momentum(SampledCurve(points=pts)) - target
    for psi in sorted(directions, key=lambda d: -abs(_quadratic_terms(pts, d)[0])):
        P1, P2 = _quadratic_terms(pts, psi)
        roots = np.roots([P2, P1, P0]) if abs(P2) > 0.0 else np.array([-P0 / P1]) if P1 else np.array([])
        roots = roots[np.isreal(roots)].real
        if roots.size:
            b = roots[np.argmin(np.abs(roots))]
            return SampledCurve(points=pts + b * psi, param="uniform-t", params=curve.params)
    raise PreconditionError("no area-restoring correction found for this perturbation")
