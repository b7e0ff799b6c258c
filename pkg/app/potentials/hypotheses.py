"""
Grid-sampled checks of the standing hypotheses on W and the constants they provide.

  nonnegative     W >= 0, W = 0 only at the wells
  well_curvature  Hess W at each well >= lambda > 0
  coercive        grad W(p).p >= c0 |p|^2 for |p| >= R0
  axis_valley     wells on the p1-axis and W(p1, p2) >= W(p1, 0)

plus the constants m0 (F >= m0 off the well balls), c0/c1 (c0|p-p_w| <= F <= c1|p-p_w| in the
balls) and the global lower bound grad W(p).p >= c0 |p|^2 - gb_c1 behind the a priori bound K.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.config import get_settings
from core.errors import DegeneracyError, DomainError
from app.potentials.models import HypothesisCheck, HypothesisReport, Potential
from app.potentials.potential import evaluate_many, well_data


class HypothesisGrid(BaseModel):
    points: int = Field(default_factory=lambda: get_settings().grid_points, ge=11)
    R0: Optional[float] = Field(default=None, description="Radius of the coercivity annulus; default 2 max|p_w| (>= 1)")
    margin: float = Field(default=0.5, description="Box half-width is R0 * (1 + margin)")
    ball_radius: Optional[float] = Field(default=None, description="Well-ball radius; default from well data")
    tol: float = 1e-10


def _ball_radius(pot: Potential, grid: HypothesisGrid) -> float:
    if grid.ball_radius is not None:
        return grid.ball_radius
    radii = []
    for i in range(len(pot.wells)):
        try:
            radii.append(well_data(pot, i).rho)
        except DegeneracyError:
            radii.append(0.25)
    r = min(radii)
    if pot.is_double_well:
        a, b = pot.well_array()
        r = min(r, 0.5 * float(np.linalg.norm(a - b)))
    return r if math.isfinite(r) else 0.5


def _sample(pot: Potential, grid: HypothesisGrid):
    wells = pot.well_array()
    R0 = grid.R0 if grid.R0 is not None else max(1.0, 2.0 * float(np.max(np.linalg.norm(wells, axis=1))))
    half = R0 * (1.0 + grid.margin)
    if pot.kind == "radial-analytic-one-well":
        # evaluation is only defined inside the validity radius
        half = min(half, float(pot.params.get("radius", 1.0)) / math.sqrt(2.0))
    xs = np.linspace(-half, half, grid.points)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    P = np.stack([X, Y], axis=-1)
    if pot.kind == "radial-analytic-one-well":
        P = P + np.asarray(pot.wells[0])
    return P, R0, half


def check_hypotheses(pot: Potential, grid: Optional[HypothesisGrid] = None) -> HypothesisReport:
    grid = grid or HypothesisGrid()
    P, R0, half = _sample(pot, grid)
    W, G, _ = evaluate_many(pot, P)
    flatP = P.reshape(-1, 2)
    flatW = W.reshape(-1)
    wells = pot.well_array()
    checks = {}
    constants = {"R0": R0}
    spacing = 2.0 * half / (grid.points - 1)

    # nonnegative
    dist = np.min(np.linalg.norm(flatP[:, None, :] - wells[None, :, :], axis=-1), axis=1)
    W_wells = evaluate_many(pot, wells)[0]
    away = dist > 2.0 * spacing
    i_min = int(np.argmin(flatW))
    nonneg_ok = bool(flatW[i_min] >= -grid.tol and np.all(np.abs(W_wells) <= grid.tol)
                 and (not np.any(away) or np.min(flatW[away]) > grid.tol))
    checks["nonnegative"] = HypothesisCheck(
        name="nonnegative", passed=nonneg_ok, value=float(flatW[away].min()) if np.any(away) else None,
        witness=tuple(flatP[away][np.argmin(flatW[away])]) if np.any(away) else None,
        detail="min W away from the wells",
    )

    # well_curvature
    lam = math.inf
    curvature_ok = True
    witness = None
    for i in range(len(pot.wells)):
        try:
            wd = well_data(pot, i, tol=grid.tol)
            lam = min(lam, 2.0 * wd.lambda1_sq)
        except (DegeneracyError, DomainError):
            curvature_ok = False
            witness = tuple(pot.wells[i])
            lam = 0.0
    checks["well_curvature"] = HypothesisCheck(name="well_curvature", passed=curvature_ok, value=lam, witness=witness,
                                   detail="smallest Hessian eigenvalue over the wells")
    constants["lambda"] = lam

    # coercive
    r = np.linalg.norm(flatP, axis=1)
    radial = np.einsum("ij,ij->i", G.reshape(-1, 2), flatP)
    outer = r >= R0
    if np.any(outer) and pot.kind != "radial-analytic-one-well":
        ratio = radial[outer] / r[outer] ** 2
        j = int(np.argmin(ratio))
        c0 = float(ratio[j])
        checks["coercive"] = HypothesisCheck(name="coercive", passed=c0 > 0.0, value=c0,
                                       witness=tuple(flatP[outer][j]),
                                       detail="min grad W(p).p / |p|^2 over |p| >= R0")
        constants["c0_coercive"] = c0
        if c0 > 0.0:
            constants["gb_c1"] = float(max(0.0, np.max(c0 * r**2 - radial)))
    else:
        checks["coercive"] = HypothesisCheck(name="coercive", passed=None, detail="grid does not reach |p| >= R0")

    # axis_valley
    on_axis = bool(np.all(np.abs(wells[:, 1]) <= grid.tol))
    axis_W = evaluate_many(pot, np.stack([P[..., 0], np.zeros_like(P[..., 1])], axis=-1))[0]
    gap = W - axis_W
    k = np.unravel_index(int(np.argmin(gap)), gap.shape)
    valley_ok = on_axis and float(gap[k]) >= -grid.tol * max(1.0, float(np.max(np.abs(W))))
    checks["axis_valley"] = HypothesisCheck(name="axis_valley", passed=valley_ok, value=float(gap[k]), witness=tuple(P[k]),
                                   detail="min over columns of W(p1, p2) - W(p1, 0)")

    # lower/upper bounds on F around the wells
    rb = _ball_radius(pot, grid)
    F = np.sqrt(np.maximum(flatW, 0.0))
    nearest = np.min(np.linalg.norm(flatP[:, None, :] - wells[None, :, :], axis=-1), axis=1)
    outside = nearest >= rb
    if np.any(outside):
        constants["m0"] = float(F[outside].min())
    inside = (nearest < rb) & (nearest > 0.0)
    if np.any(inside):
        q = F[inside] / nearest[inside]
        constants["c0_ball"] = float(q.min())
        constants["c1_ball"] = float(q.max())
    constants["ball_radius"] = rb

    return HypothesisReport(checks=checks, constants=constants, grid_points=grid.points, half_width=half)


def apriori_bound(pot: Potential, report: Optional[HypothesisReport] = None) -> float:
    """K with K^2 > max(gb_c1 / c0, |p_w|^2); bounds the sup-norm of finite-energy heteroclinics."""
    report = report or check_hypotheses(pot)
    c0 = report.constants.get("c0_coercive")
    if c0 is None or c0 <= 0.0:
        raise DomainError("the coercivity hypothesis fails; no a priori bound")
    c1 = report.constants.get("gb_c1", 0.0)
    wells_sq = float(np.max(np.sum(pot.well_array() ** 2, axis=1)))
    return 1.01 * math.sqrt(max(c1 / c0, wells_sq, 1e-300))
