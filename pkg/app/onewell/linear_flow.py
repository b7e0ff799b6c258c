"""
Quadratic wells: explicit flows of gamma' = Lambda_beta gamma in the well's eigenbasis.

Along the flow |gamma'| = F, the degenerate arclength grows like F^2 dt and
r~ = (lambda1 p1^2 + lambda2 p2^2)/2 decreases at rate sin(beta) per unit of degenerate length.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from core.errors import EmptyCurveError, GridError
from app.curves.functionals import momentum
from app.curves.models import SampledCurve
from app.onewell.models import ApproachSpectrum
from app.potentials.models import WellData
from app.series.linear_op import lambda_matrix

STOP_RATIO = 1e-8
FLOW_STOP_RATIO = 1e-5
FLOW_TOL = 5e-7
MAX_FLOW_NODES = 1 << 22


def reduced_radius(well: WellData, p_local) -> np.ndarray:
    p = np.asarray(p_local, dtype=float)
    return 0.5 * (well.lambda1 * p[..., 0] ** 2 + well.lambda2 * p[..., 1] ** 2)


def local_start(well: WellData, p0: Sequence[float]) -> np.ndarray:
    p = well.to_local(np.asarray(p0, dtype=float))
    if np.linalg.norm(p) == 0.0:
        raise EmptyCurveError(f"p0 {tuple(p0)} sits at the well")
    return p


def solve_beta(well: WellData, p0: Sequence[float], A_tilde: float) -> float:
    """beta in (0, pi) with r~(p0) cot(beta) / (lambda1 + lambda2) = A~."""
    rt = float(reduced_radius(well, local_start(well, p0)))
    return math.pi / 2.0 - math.atan(A_tilde * (well.lambda1 + well.lambda2) / rt)


def omega1_integral(well: WellData, local: np.ndarray) -> float:
    """
    Integral of -p2 dp1 + lambda1/(lambda1+lambda2) d(p1 p2) along a local polyline.

    The coefficients are linear, so the trapezoid rule is exact on each segment.
    """
    p1, p2 = local[:, 0], local[:, 1]
    area = float(-0.5 * np.sum((p2[1:] + p2[:-1]) * np.diff(p1)))
    k = well.lambda1 / (well.lambda1 + well.lambda2)
    return area + k * float(p1[-1] * p2[-1] - p1[0] * p2[0])


def constraint_offset(well: WellData, p0: Sequence[float]) -> float:
    """C = P(gamma_0) - int_{gamma_0} omega1 along the geodesic from p0 to the well (path independent)."""
    local = np.vstack([local_start(well, p0), np.zeros(2)])
    ref = SampledCurve(points=well.to_global(local))
    return momentum(ref) - omega1_integral(well, local)


def transform_constraint(well: WellData, p0: Sequence[float], A: float) -> float:
    return A - constraint_offset(well, p0)


def approach_spectrum(lambda1: float, lambda2: float, beta: float) -> ApproachSpectrum:
    trace = -(lambda1 + lambda2) * math.sin(beta)
    det = lambda1 * lambda2
    disc = trace**2 - 4.0 * det
    threshold = 2.0 * math.sqrt(lambda1 * lambda2) / (lambda1 + lambda2)
    if disc < 0.0:
        root = 1j * math.sqrt(-disc)
    else:
        root = complex(math.sqrt(disc))
    return ApproachSpectrum(mu_plus=0.5 * (trace + root), mu_minus=0.5 * (trace - root),
                            spiral=abs(math.sin(beta)) < threshold, threshold=threshold)


def stop_time(well: WellData, beta: float, p_local: np.ndarray, ratio: float = STOP_RATIO) -> float:
    """First t with r~(gamma(t)) <= lambda_min delta^2 / 2, delta = ratio |p0|."""
    Lam = lambda_matrix(well.lambda1, well.lambda2, beta)
    target = 0.5 * min(well.lambda1, well.lambda2) * (ratio * np.linalg.norm(p_local)) ** 2
    f = lambda t: float(reduced_radius(well, expm(Lam * t) @ p_local)) - target
    hi = 1.0
    while f(hi) > 0.0:
        hi *= 2.0
    return brentq(f, 0.0, hi, xtol=1e-13, rtol=1e-14)


def _orbit(step: np.ndarray, p: np.ndarray, count: int) -> np.ndarray:
    """p, step p, step^2 p, ... (count nodes), built by doubling."""
    pts = p[None, :]
    power = step
    while len(pts) < count:
        pts = np.vstack([pts, pts @ power.T])
        power = power @ power
    return pts[:count]


def flow_defect(well: WellData, local: np.ndarray, rt: np.ndarray, sin_beta: float) -> float:
    """max |F(mid)|chord| / dl - 1| over consecutive flow nodes, dl taken from r~ in closed form."""
    mid = 0.5 * (local[1:] + local[:-1])
    F = np.sqrt(well.lambda1_sq * mid[:, 0] ** 2 + well.lambda2_sq * mid[:, 1] ** 2)
    seg = F * np.linalg.norm(np.diff(local, axis=0), axis=1)
    dl = (rt[:-1] - rt[1:]) / sin_beta
    return float(np.max(np.abs(seg / dl - 1.0)))


def quadratic_flow(well: WellData, p0: Sequence[float], beta: float, n: int,
                   tol: Optional[float] = FLOW_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Local nodes of the flow on a uniform time grid down to the stop radius, plus the well.
    Returns (local points, degenerate arclength at each node).

    Consecutive nodes differ by one fixed matrix exponential, so every chord cuts the same share of a turn.
    With `tol` the grid starts at n - 1 flow nodes and is refined until every chord carries its exact
    degenerate length within `tol`.
    """
    p = local_start(well, p0)
    t_stop = stop_time(well, beta, p, FLOW_STOP_RATIO)
    Lam = lambda_matrix(well.lambda1, well.lambda2, beta)
    sin_beta = math.sin(beta)
    count = max(n - 1, 2)
    while True:
        flow = _orbit(expm(Lam * (t_stop / (count - 1))), p, count)
        rt = reduced_radius(well, flow)
        if tol is None:
            break
        defect = flow_defect(well, flow, rt, sin_beta)
        if defect <= tol:
            break
        if count >= MAX_FLOW_NODES:
            raise GridError(f"flow at beta={beta:.6g} needs more than {MAX_FLOW_NODES} nodes "
                            f"(speed defect {defect:.3e} > {tol:g})")
        count = min(MAX_FLOW_NODES, int(math.ceil(1.15 * count * math.sqrt(defect / tol))) + 1)
    pts = np.vstack([flow, np.zeros(2)])
    rt = np.append(rt, 0.0)
    return pts, (rt[0] - rt) / sin_beta


def radial_spiral(p0: Sequence[float], A_tilde: float, n: int, center: Sequence[float] = (0.0, 0.0),
                  lam: float = 1.0) -> SampledCurve:
    """theta(r) = theta0 - (4 A~ / |p0|^2) ln(r / |p0|) on a geometric r-grid, closed by the well point."""
    c = np.asarray(center, dtype=float)
    d = np.asarray(p0, dtype=float) - c
    r0 = float(np.linalg.norm(d))
    if r0 == 0.0:
        raise EmptyCurveError("p0 sits at the well")
    theta0 = math.atan2(d[1], d[0])
    cot = 4.0 * A_tilde / r0**2
    r = r0 * np.geomspace(1.0, STOP_RATIO, n - 1)
    theta = theta0 - cot * np.log(r / r0)
    pts = np.vstack([c + np.column_stack([r * np.cos(theta), r * np.sin(theta)]), c])
    sin_beta = 1.0 / math.sqrt(1.0 + cot**2)
    rr = np.append(r, 0.0)
    ell = 0.5 * lam * (r0**2 - rr**2) / sin_beta
    return SampledCurve(points=pts, param="degenerate-arclength", params=ell)


def beta_from_multiplier(mu: float, lambda1: float, lambda2: float) -> float:
    """Direction angle of a one-well minimizer with constraint multiplier mu = dL/dA = (lambda1+lambda2) cos(beta)."""
    return math.acos(float(np.clip(mu / (lambda1 + lambda2), -1.0, 1.0)))


def multiplier_from_beta(beta: float, lambda1: float, lambda2: float) -> float:
    return (lambda1 + lambda2) * math.cos(beta)
