"""
Analytic wells: integral curves of grad g_beta + Lambda_beta p from a truncated g_beta series.

The state carries the degenerate arclength and the omega1 integral alongside the position, so the
achieved transformed constraint is known without re-sampling; beta is then root-found on it.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from core.errors import CertificateError, PreconditionError
from app.onewell.linear_flow import STOP_RATIO, local_start, reduced_radius, solve_beta
from app.potentials.models import Potential
from app.potentials.potential import conformal_factor
from app.series.gbeta import GBetaSeries, residual_Wexp

BETA_BRACKET = (1e-2, math.pi - 1e-2)
RESIDUAL_TOL = 1e-6
MAX_EXPANSIONS = 12


@dataclass
class AnalyticFlow:
    local: np.ndarray
    ell: np.ndarray
    A_tilde: float
    series: GBetaSeries


def _F(series: GBetaSeries, pot: Optional[Potential], local: np.ndarray) -> np.ndarray:
    if pot is None:
        return np.sqrt(np.maximum(series.w_series_local(local), 0.0))
    return conformal_factor(pot, series.well.to_global(local))


def integrate(series: GBetaSeries, p0: Sequence[float], n: int, pot: Optional[Potential] = None,
              rtol: float = 1e-11) -> AnalyticFlow:
    well = series.well
    p = local_start(well, p0)
    k = series.lambda1 / (series.lambda1 + series.lambda2)
    target = 0.5 * min(series.lambda1, series.lambda2) * (STOP_RATIO * np.linalg.norm(p)) ** 2

    def rhs(_t, z):
        q = z[:2]
        f = series.field_local(q)
        F = float(_F(series, pot, q))
        # omega1(gamma') = -p2 p1' + k (p1 p2)'
        w1 = -q[1] * f[0] + k * (q[1] * f[0] + q[0] * f[1])
        return [f[0], f[1], F * math.hypot(f[0], f[1]), w1]

    def reached(_t, z):
        return float(reduced_radius(well, z[:2])) - target

    reached.terminal = True
    reached.direction = -1

    t_max = 1.0
    while True:
        sol = solve_ivp(rhs, (0.0, t_max), [p[0], p[1], 0.0, 0.0], method="RK45", rtol=rtol,
                        atol=1e-15 * max(1.0, float(np.linalg.norm(p))), events=reached, dense_output=True)
        if sol.status == 1:
            break
        if sol.status < 0:
            raise CertificateError(f"analytic flow integration failed: {sol.message}")
        t_max *= 4.0
    t_stop = float(sol.t_events[0][0])
    z = sol.sol(np.linspace(0.0, t_stop, n - 1)).T
    local = np.vstack([z[:, :2], np.zeros(2)])
    local[0] = p
    ell = np.append(z[:, 2], z[-1, 2])
    ell[0] = 0.0
    # straight closing segment into the well
    tail = (0.5 - k) * float(z[-1, 0] * z[-1, 1])
    return AnalyticFlow(local=local, ell=ell, A_tilde=float(sol.y_events[0][0][3]) + tail, series=series)


def achieved_constraint(series: GBetaSeries, p0: Sequence[float], beta: float,
                        pot: Optional[Potential] = None, n: int = 64) -> float:
    return integrate(series.at_beta(beta, pot), p0, n, pot).A_tilde


def solve_beta_analytic(series: GBetaSeries, p0: Sequence[float], A_tilde: float,
                        pot: Optional[Potential] = None) -> float:
    """Root of the achieved A~(beta), bracketed outward from the quadratic-well angle (A~ decreases in beta)."""
    f = lambda b: achieved_constraint(series, p0, b, pot) - A_tilde
    b = solve_beta(series.well, p0, A_tilde)
    b = min(max(b, BETA_BRACKET[0]), BETA_BRACKET[1])
    fb = f(b)
    if fb == 0.0:
        return b
    limit = BETA_BRACKET[1] if fb > 0.0 else BETA_BRACKET[0]
    for i in range(MAX_EXPANSIONS):
        nxt = limit if i == MAX_EXPANSIONS - 1 else b + 0.5 * (limit - b)
        fn = f(nxt)
        if fn * fb <= 0.0:
            lo, hi = sorted((b, nxt))
            return brentq(f, lo, hi, xtol=1e-13, rtol=1e-13)
        if nxt == limit:
            break
        b, fb = nxt, fn
    raise PreconditionError(f"A~={A_tilde} outside the attainable interval of this series from p0={tuple(p0)}")


def check_residual(pot: Optional[Potential], series: GBetaSeries, local: np.ndarray,
                   tol: float = RESIDUAL_TOL) -> float:
    """Series residual over the curve nodes; raises when the calibration cannot be trusted."""
    if pot is None:
        field = series.field_local(local)
        res = float(np.max(np.abs(series.w_series_local(local) - np.sum(field**2, axis=-1))))
    else:
        res = residual_Wexp(pot, series, series.well.to_global(local))
    if res > tol:
        raise CertificateError(f"residual_Wexp {res:.3e} exceeds {tol:.1e}; p0 is outside the series' reach")
    return res