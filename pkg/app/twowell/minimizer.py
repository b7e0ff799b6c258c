"""
Augmented-Lagrangian minimization of the discrete degenerate length with a momentum constraint.

    E_h = sum_i F(m_i) |x_{i+1} - x_i|,    P_h = -1/2 sum_i (y_i + y_{i+1}) (x_{i+1} - x_i)
    Phi = E_h - mu (P_h - A) + rho/2 (P_h - A)^2

over the interior nodes; the endpoints are fixed. Rounds that stop short of the tolerance are finished by
Newton steps on the KKT system with the exact sparse Hessians.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize as scipy_minimize
from scipy.sparse.linalg import spsolve

from core.lib.logger import StageLogger
from app.curves.models import SampledCurve
from app.curves.reparam import reparam
from app.potentials.models import Potential
from app.potentials.potential import evaluate_many
from app.twowell.models import MinimizerOptions

F_FLOOR = 1e-300
MOMENTUM_BLOCK = np.array([[0.0, 0.5], [-0.5, 0.0]])
MIN_NEWTON_STEP = 1e-4


@dataclass
class ALState:
    points: np.ndarray
    multiplier: float
    penalty: float
    rounds: int
    kkt_residual: float
    converged: bool
    newton_steps: int = 0


def energy_and_gradient(pot: Potential, pts: np.ndarray) -> Tuple[float, np.ndarray]:
    d = np.diff(pts, axis=0)
    length = np.linalg.norm(d, axis=1)
    mid = 0.5 * (pts[1:] + pts[:-1])
    W, G, _ = evaluate_many(pot, mid)
    F = np.sqrt(np.maximum(W, 0.0))
    gradF = G / (2.0 * np.maximum(F, F_FLOOR))[:, None]
    unit = d / np.maximum(length, F_FLOOR)[:, None]
    # each segment touches its two nodes through the midpoint (weight 1/2) and the chord
    seg_mid = 0.5 * gradF * length[:, None]
    seg_chord = F[:, None] * unit
    grad = np.zeros_like(pts)
    grad[:-1] += seg_mid - seg_chord
    grad[1:] += seg_mid + seg_chord
    return float(np.sum(F * length)), grad


def momentum_gradient(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    g = np.zeros_like(pts)
    g[1:-1, 0] = 0.5 * (y[2:] - y[:-2])
    g[1:-1, 1] = -0.5 * (x[2:] - x[:-2])
    return g


def momentum_hessian(n: int) -> sp.csr_matrix:
    """Constant Hessian of P_h; at interior nodes only the blocks between neighbours survive."""
    a = np.arange(n - 1)
    blocks = np.broadcast_to(MOMENTUM_BLOCK, (n - 1, 2, 2))
    return _assemble(n, [(blocks, a, a + 1), (blocks.transpose(0, 2, 1), a + 1, a)])


def energy_hessian(pot: Potential, pts: np.ndarray) -> sp.csr_matrix:
    """Sparse Hessian of E_h in the coordinates (x0, y0, x1, y1, ...)."""
    d = np.diff(pts, axis=0)
    length = np.maximum(np.linalg.norm(d, axis=1), F_FLOOR)
    unit = d / length[:, None]
    W, G, Hs = evaluate_many(pot, 0.5 * (pts[1:] + pts[:-1]))
    F = np.maximum(np.sqrt(np.maximum(W, 0.0)), F_FLOOR)
    gradF = G / (2.0 * F)[:, None]
    hessF = Hs / (2.0 * F)[:, None, None] - np.einsum("si,sj->sij", gradF, gradF) / F[:, None, None]
    curv = 0.25 * length[:, None, None] * hessF
    perp = (np.eye(2) - np.einsum("si,sj->sij", unit, unit)) * (F / length)[:, None, None]
    gu = 0.5 * np.einsum("si,sj->sij", gradF, unit)
    ug = gu.transpose(0, 2, 1)
    aa = curv - gu - ug + perp
    bb = curv + gu + ug + perp
    ab = curv + gu - ug - perp
    a = np.arange(len(d))
    return _assemble(len(pts), [(aa, a, a), (bb, a + 1, a + 1), (ab, a, a + 1), (ab.transpose(0, 2, 1), a + 1, a)])


def _assemble(n: int, parts) -> sp.csr_matrix:
    """2x2 node blocks (blocks, row nodes, column nodes) summed into a 2n x 2n matrix."""
    rows, cols, vals = [], [], []
    for blocks, row_nodes, col_nodes in parts:
        r = 2 * row_nodes[:, None, None] + np.arange(2)[None, :, None]
        c = 2 * col_nodes[:, None, None] + np.arange(2)[None, None, :]
        r, c = np.broadcast_arrays(r, c)
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(np.asarray(blocks).ravel())
    return sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(2 * n, 2 * n)).tocsr()


def _momentum(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return float(-0.5 * np.sum((y[1:] + y[:-1]) * np.diff(x)))


class AreaConstrainedMinimizer:
    """Minimizer of E_h over polylines with fixed ends and P_h = A."""

    def __init__(self, pot: Potential, A: float, opts: Optional[MinimizerOptions] = None,
                 logger: Optional[StageLogger] = None):
        self.pot = pot
        self.A = A
        self.opts = opts or MinimizerOptions()
        self.logger = logger or StageLogger(enabled=False)

    def kkt_residual(self, pts: np.ndarray, mu: float) -> float:
        _, gE = energy_and_gradient(self.pot, pts)
        stationarity = (gE - mu * momentum_gradient(pts))[1:-1]
        return max(float(np.max(np.abs(stationarity))) if len(stationarity) else 0.0,
                   abs(_momentum(pts) - self.A))

    def _objective(self, z: np.ndarray, pts: np.ndarray, mu: float, rho: float):
        pts = pts.copy()
        pts[1:-1] = z.reshape(-1, 2)
        E, gE = energy_and_gradient(self.pot, pts)
        c = _momentum(pts) - self.A
        gP = momentum_gradient(pts)
        val = E - mu * c + 0.5 * rho * c * c
        grad = gE + (rho * c - mu) * gP
        return val, grad[1:-1].ravel()

    def _inner(self, pts: np.ndarray, mu: float, rho: float) -> np.ndarray:
        res = scipy_minimize(self._objective, pts[1:-1].ravel(), args=(pts, mu, rho), jac=True,
                             method="L-BFGS-B",
                             options={"maxiter": self.opts.inner_maxiter, "gtol": self.opts.inner_gtol,
                                      "ftol": 1e-15, "maxcor": 20})
        out = pts.copy()
        out[1:-1] = res.x.reshape(-1, 2)
        return out

    def polish(self, pts: np.ndarray, mu: float) -> Tuple[np.ndarray, float, float, int]:
        """
        Newton steps on the KKT system of E_h - mu (P_h - A), backtracking on the KKT residual.
        Returns (points, multiplier, residual, steps taken).
        """
        n = len(pts)
        HP = momentum_hessian(n)[2:-2, 2:-2]
        kkt = self.kkt_residual(pts, mu)
        target = 0.1 * self.opts.tolerance
        steps = 0
        while steps < self.opts.newton_steps and kkt > target:
            _, gE = energy_and_gradient(self.pot, pts)
            gP = momentum_gradient(pts)
            g = (gE - mu * gP)[1:-1].ravel()
            a = sp.csc_matrix(gP[1:-1].ravel()[None, :])
            H = energy_hessian(self.pot, pts)[2:-2, 2:-2] - mu * HP
            K = sp.bmat([[H, -a.T], [a, None]], format="csc")
            with np.errstate(all="ignore"):
                step = spsolve(K, -np.concatenate([g, [_momentum(pts) - self.A]]))
            if not np.all(np.isfinite(step)):
                self.logger.log_note("singular KKT matrix; keeping the last iterate")
                break
            dx, dmu = step[:-1].reshape(-1, 2), float(step[-1])
            t = 1.0
            while t >= MIN_NEWTON_STEP:
                trial = pts.copy()
                trial[1:-1] += t * dx
                trial_kkt = self.kkt_residual(trial, mu + t * dmu)
                if trial_kkt < kkt:
                    break
                t *= 0.5
            else:
                break
            pts, mu, kkt = trial, mu + t * dmu, trial_kkt
            steps += 1
            self.logger.log_round(newton=steps, step=t, mu=mu, kkt=kkt)
        return pts, mu, kkt, steps

    def run(self, init: SampledCurve, label: str = "start") -> ALState:
        opts = self.opts
        pts = np.array(init.points, dtype=float)
        n = len(pts)
        mu, rho = 0.0, opts.penalty_start
        violation = abs(_momentum(pts) - self.A)
        kkt = self.kkt_residual(pts, mu)
        self.logger.log_start(f"{label} (n={n}, A={self.A:.6g})")
        rounds = 0
        for k in range(opts.max_rounds):
            if k > 0 and opts.reproject:
                pts = np.array(reparam(SampledCurve(points=pts), "constant-speed", n).points)
            pts = self._inner(pts, mu, rho)
            c = _momentum(pts) - self.A
            mu = mu - rho * c
            if abs(c) > max(0.25 * violation, opts.tolerance):
                rho *= opts.penalty_factor
            violation = abs(c)
            kkt = self.kkt_residual(pts, mu)
            rounds = k + 1
            self.logger.log_round(E=energy_and_gradient(self.pot, pts)[0], P_minus_A=c, mu=mu, rho=rho, kkt=kkt)
            if kkt <= opts.tolerance:
                break
        steps = 0
        if opts.polish and kkt > opts.tolerance:
            pts, mu, kkt, steps = self.polish(pts, mu)
        converged = kkt <= opts.tolerance
        self.logger.log_done(converged, f"after {rounds} rounds")
        return ALState(points=pts, multiplier=mu, penalty=rho, rounds=rounds, kkt_residual=kkt,
                       converged=converged, newton_steps=steps)


def constrained_minimize(pot: Potential, init: SampledCurve, A: float,
                         opts: Optional[MinimizerOptions] = None) -> Tuple[SampledCurve, ALState]:
    """Single-start minimization; convenience for one-well oracles and tests."""
    state = AreaConstrainedMinimizer(pot, A, opts).run(init)
    return SampledCurve(points=state.points, param="uniform-t"), state
