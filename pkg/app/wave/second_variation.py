"""
Spectrum of the second variation L Phi = -Phi'' + D^2 W(U0) Phi about a heteroclinic, by shift-invert on a
uniform Dirichlet grid.
"""

from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import make_interp_spline
from scipy.linalg import eigvalsh_tridiagonal
from scipy.sparse.linalg import eigsh

from core.errors import GridError
from core.lib.utils.finite_diff import dirichlet_laplacian
from app.potentials.models import Potential
from app.potentials.potential import evaluate_many, hessian
from app.wave.models import SecondVariationReport, TravelingWaveProfile

MIN_GRID = 200
DECAY_TOL = 1e-4


def _end_hessian(pot: Potential, p) -> np.ndarray:
    return evaluate_many(pot, np.asarray(p, dtype=float).reshape(1, 2))[2][0]


def _end_spectrum(hess: np.ndarray, m: int, h: float) -> float:
    out = np.inf
    for ev in np.linalg.eigvalsh(hess):
        d = np.full(m, 2.0 / h**2 + ev)
        e = np.full(m - 1, -1.0 / h**2)
        out = min(out, float(eigvalsh_tridiagonal(d, e, select="i", select_range=(0, 0))[0]))
    return out


def second_variation_spectrum(profile: TravelingWaveProfile, pot: Potential, m: int = 2000, k: int = 6,
                              tol: Optional[float] = None) -> SecondVariationReport:
    if m < MIN_GRID:
        raise GridError(f"second variation needs m >= {MIN_GRID} grid points, got {m}")
    if profile.wells[0] is None or profile.wells[1] is None:
        raise GridError("profile must connect two wells")
    for end, well in ((profile.U[0], profile.wells[0]), (profile.U[-1], profile.wells[1])):
        if np.linalg.norm(end - np.asarray(well)) > DECAY_TOL:
            raise GridError("profile window too short: ends have not decayed to the wells")

    y = profile.y_grid
    grid = np.linspace(y[0], y[-1], m + 2)
    h = grid[1] - grid[0]
    nodes = grid[1:-1]
    U0 = make_interp_spline(y, profile.U, k=3, axis=0)(nodes)
    blocks = hessian(pot, U0)
    D2W = sp.bsr_matrix((blocks, np.arange(m), np.arange(m + 1)), shape=(2 * m, 2 * m))
    L = sp.kron(-dirichlet_laplacian(m, h), sp.identity(2), format="csc") + D2W.tocsc()

    ends = [_end_hessian(pot, profile.wells[0]), _end_hessian(pot, profile.wells[1])]
    lam = min(float(np.linalg.eigvalsh(H)[0]) for H in ends)
    tol = 1e-4 * lam if tol is None else tol

    vals, vecs = eigsh(L, k=k, sigma=-1e-2 * lam, which="LM", v0=np.ones(2 * m))
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]

    i0 = int(np.argmin(np.abs(vals)))
    dU0 = np.gradient(U0, h, axis=0).ravel()
    v = vecs[:, i0]
    corr = float(abs(v @ dU0) / (np.linalg.norm(v) * np.linalg.norm(dU0)))
    others = np.delete(vals, i0)
    nxt = float(others.min()) if others.size else float("inf")
    end_min = min(_end_spectrum(H, m, h) for H in ends)

    return SecondVariationReport(
        eigenvalues=[float(x) for x in vals],
        eigenvectors=vecs,
        lam=lam,
        zero_eigenvalue=float(vals[i0]),
        zero_correlation=corr,
        next_eigenvalue=nxt,
        end_spectrum_min=end_min,
        min_eigenvalue_ok=bool(vals[0] >= -tol),
        zero_mode_ok=bool(abs(vals[i0]) <= tol and corr >= 0.99),
        gap_ok=bool(nxt >= 0.1 * lam),
        end_spectrum_ok=bool(end_min >= lam),
        grid_points=m,
    )
