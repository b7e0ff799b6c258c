"""
Curves to traveling-wave profiles.

The change of variables dy = |dgamma| / (sqrt(2) F) turns a curve into a profile with equipartition
1/2 |U'|^2 = W(U). It diverges logarithmically at the wells, so the curve is cut at the edge of a small
ball around each well and continued by the decaying solution of the linearization
    Z' = M Z,  Z = (U - p, U'),  M = [[0, I], [Hess W(p), -nu J]].
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import expm, schur

from core.errors import DegeneracyError, DomainError, EmptyCurveError
from core.lib.utils.finite_diff import first_derivative, second_derivative
from app.curves.models import SampledCurve
from app.potentials.models import Potential
from app.potentials.potential import conformal_factor, evaluate_many, gradient, value, well_data
from app.wave.models import TravelingWaveProfile

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
TAIL_TOL = 1e-6
TAIL_STEP = 0.02
ENDPOINT_TOL = 1e-9
DECAY_TOL = 1e-9
MAX_TAIL_NODES = 200000


def linearization(hess: np.ndarray, nu: float) -> np.ndarray:
    M = np.zeros((4, 4))
    M[:2, 2:] = np.eye(2)
    M[2:, :2] = hess
    M[2:, 2:] = -nu * J
    return M


def decaying_subspace(hess: np.ndarray, nu: float, forward: bool = True) -> np.ndarray:
    """
    4x2 orthonormal basis of the solutions of Z' = M Z that decay as y -> +inf (forward) or y -> -inf.
    """
    M = linearization(hess, nu)
    tol = DECAY_TOL * max(1.0, float(np.abs(M).max()))
    if forward:
        _, Z, sdim = schur(M, output="real", sort=lambda re, im: re < -tol)
    else:
        _, Z, sdim = schur(M, output="real", sort=lambda re, im: re > tol)
    if sdim != 2:
        raise DomainError(f"no two-dimensional decaying subspace at nu={nu} (regime without traveling waves)")
    return Z[:, :2]


def grafted_tail(hess: np.ndarray, nu: float, u0: np.ndarray, forward: bool = True,
                 step: float = TAIL_STEP, tol: float = TAIL_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Decaying solution with U - p = u0 at y = 0, sampled every `step` until |U - p| <= tol.
    Returns offsets y > 0 (distance from the junction) and the displacements U - p, junction excluded.
    """
    Q = decaying_subspace(hess, nu, forward)
    coeffs = np.linalg.solve(Q[:2], u0)
    z = Q @ coeffs
    M = linearization(hess, nu)
    prop = expm((M if forward else -M) * step)
    out = []
    while np.linalg.norm(z[:2]) > tol:
        z = prop @ z
        out.append(z[:2].copy())
        if len(out) > MAX_TAIL_NODES:
            raise DomainError("tail does not decay; check the speed regime")
    u = np.array(out) if out else np.zeros((0, 2))
    return step * np.arange(1, len(u) + 1), u


def _match_well(pot: Potential, p: np.ndarray) -> Optional[int]:
    for i, w in enumerate(pot.well_array()):
        if np.linalg.norm(p - w) <= ENDPOINT_TOL * max(1.0, float(np.linalg.norm(w))):
            return i
    return None


def _ball(pot: Potential, which: int, pts: np.ndarray, delta: Optional[float]) -> float:
    if delta is not None:
        return delta
    rho = well_data(pot, which).rho
    if not math.isfinite(rho):
        rho = float(np.max(np.linalg.norm(pts - np.asarray(pot.wells[which]), axis=1)))
    return 0.1 * rho


def _dedupe(pts: np.ndarray) -> np.ndarray:
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 0.0
    return pts[keep]


def to_profile(curve: SampledCurve, pot: Potential, nu: float = 0.0, delta: Optional[float] = None,
               tail_step: float = TAIL_STEP) -> TravelingWaveProfile:
    """
    Profile of a curve. Ends at wells are cut at the first/last node outside the radius-delta ball
    (delta defaults to a tenth of the well's validity radius) and continued by the tail at speed nu.
    """
    if curve.is_degenerate():
        raise EmptyCurveError("a constant curve has no profile")
    pts = _dedupe(np.asarray(curve.points))
    start_w = _match_well(pot, pts[0])
    end_w = _match_well(pot, pts[-1])

    i_a, i_b = 0, len(pts) - 1
    if start_w is not None:
        d = np.linalg.norm(pts - pts[0], axis=1)
        outside = np.nonzero(d > _ball(pot, start_w, pts, delta))[0]
        if outside.size == 0:
            raise EmptyCurveError("curve never leaves the well ball")
        i_a = int(outside[0])
    if end_w is not None:
        d = np.linalg.norm(pts - pts[-1], axis=1)
        outside = np.nonzero(d > _ball(pot, end_w, pts, delta))[0]
        if outside.size == 0:
            raise EmptyCurveError("curve never leaves the well ball")
        i_b = int(outside[-1])
    if i_b <= i_a:
        raise EmptyCurveError("nothing left of the curve between the well balls")

    seg = pts[i_a:i_b + 1]
    W_nodes = value(pot, seg)
    if np.min(W_nodes) <= 0.0:
        k = int(np.argmin(W_nodes))
        raise DegeneracyError(f"W vanishes at an interior node {tuple(seg[k])}")
    F_mid = conformal_factor(pot, 0.5 * (seg[1:] + seg[:-1]))
    if np.min(F_mid) <= 0.0:
        raise DegeneracyError("W vanishes at a segment midpoint")
    dy = np.linalg.norm(np.diff(seg, axis=0), axis=1) / (math.sqrt(2.0) * F_mid)
    y = np.concatenate([[0.0], np.cumsum(dy)])

    ys: List[np.ndarray] = []
    Us: List[np.ndarray] = []
    wells: List[Optional[Tuple[float, float]]] = [None, None]
    if start_w is not None:
        p = np.asarray(pot.wells[start_w])
        _, _, H = evaluate_many(pot, p.reshape(1, 2))
        off, u = grafted_tail(H[0], nu, seg[0] - p, forward=False, step=tail_step)
        ys.append(-off[::-1])
        Us.append(p + u[::-1])
        wells[0] = (float(p[0]), float(p[1]))
    ys.append(y)
    Us.append(seg)
    if end_w is not None:
        p = np.asarray(pot.wells[end_w])
        _, _, H = evaluate_many(pot, p.reshape(1, 2))
        off, u = grafted_tail(H[0], nu, seg[-1] - p, forward=True, step=tail_step)
        ys.append(y[-1] + off)
        Us.append(p + u)
        wells[1] = (float(p[0]), float(p[1]))

    head = len(ys[0]) if start_w is not None else 0
    y_all = np.concatenate(ys)
    U_all = np.vstack(Us)
    y_all = y_all - 0.5 * (y_all[0] + y_all[-1])
    profile = TravelingWaveProfile(y_grid=y_all, U=U_all, nu=nu, mapped=(head, head + len(seg)), wells=wells)
    return profile.model_copy(update={
        "H_value": hamiltonian_energy(profile, pot),
        "equipartition_residual": equipartition_residual(profile, pot),
        "ode_residual": ode_residual(profile, pot, nu)[1],
    })


def hamiltonian_energy(profile: TravelingWaveProfile, pot: Potential) -> float:
    """Segment rule 1/2 |dU|^2 / dy + W(mid) dy; equals sqrt(2) F(mid) |dU| on equipartitioned segments."""
    dU = np.diff(profile.U, axis=0)
    dy = np.diff(profile.y_grid)
    mid = 0.5 * (profile.U[1:] + profile.U[:-1])
    return float(np.sum(0.5 * np.sum(dU**2, axis=1) / dy + value(pot, mid) * dy))


def equipartition_residual(profile: TravelingWaveProfile, pot: Potential) -> float:
    dU = np.diff(profile.U, axis=0)
    dy = np.diff(profile.y_grid)
    mid = 0.5 * (profile.U[1:] + profile.U[:-1])
    return float(np.max(np.abs(0.5 * np.sum(dU**2, axis=1) / dy**2 - value(pot, mid))))


def ode_terms(profile: TravelingWaveProfile, pot: Potential):
    """a = J U', b = U'' - grad W(U) and quadrature weights at the interior nodes."""
    y, U = profile.y_grid, profile.U
    dU = first_derivative(y, U)
    d2U = second_derivative(y, U)
    a = dU @ J.T
    gW = gradient(pot, U[1:-1])
    b = d2U - gW
    w = 0.5 * (y[2:] - y[:-2])
    return a, b, w, gW


def ode_residual(profile: TravelingWaveProfile, pot: Potential, nu: float) -> Tuple[float, float]:
    """Weighted L2 norm of -nu J U' - U'' + grad W(U); absolute and relative to ||grad W(U)||."""
    if len(profile) < 3:
        return 0.0, 0.0
    a, b, w, gW = ode_terms(profile, pot)
    res = math.sqrt(float(np.sum(w * np.sum((nu * a + b) ** 2, axis=1))))
    scale = math.sqrt(float(np.sum(w * np.sum(gW**2, axis=1))))
    return res, (res / scale if scale > 0.0 else res)


def nodal_equipartition(profile: TravelingWaveProfile, pot: Potential) -> np.ndarray:
    """|1/2 |U'|^2 - W(U)| at every node; one-sided differences at the two ends."""
    y, U = profile.y_grid, profile.U
    dU = np.empty_like(U)
    dU[0] = (U[1] - U[0]) / (y[1] - y[0])
    dU[-1] = (U[-1] - U[-2]) / (y[-1] - y[-2])
    if len(y) > 2:
        dU[1:-1] = first_derivative(y, U)
    return np.abs(0.5 * np.sum(dU**2, axis=1) - value(pot, U))
