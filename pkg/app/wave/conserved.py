"""
Conserved quantities of traveling waves near a radial well W = lambda |U|^2 + G(|U|^2) (U relative to the well):

    1/2 |U'|^2 = lambda |U|^2 + G
    U' . J U   = -(nu/2) |U|^2
    1/4 eta'^2 + 1/4 (nu^2 - 8 lambda) eta^2 = 2 eta G(eta),   eta = |U|^2
"""

import math
from typing import Optional

import numpy as np

from core.lib.utils.finite_diff import first_derivative
from app.potentials.models import Potential
from app.potentials.potential import value, well_data
from app.wave.models import ConservedReport, TravelingWaveProfile
from app.wave.profile import J


def conserved_checks(profile: TravelingWaveProfile, nu: float, pot: Potential, which: int = -1,
                     radius: Optional[float] = None) -> ConservedReport:
    wd = well_data(pot, which)
    if not wd.is_radial:
        return ConservedReport(applicable=False, detail=f"well {wd.center} is not radial")
    radius = wd.rho if radius is None else radius

    y, U = profile.y_grid, profile.U
    dU = first_derivative(y, U)
    u = U[1:-1] - np.asarray(wd.center)
    mask = np.linalg.norm(u, axis=1) <= radius if math.isfinite(radius) else np.ones(len(u), dtype=bool)
    if not np.any(mask):
        return ConservedReport(applicable=False, detail="no profile nodes inside the well ball")
    u, dU = u[mask], dU[mask]
    lam = wd.lambda1_sq
    W = value(pot, U[1:-1][mask])
    eta = np.sum(u * u, axis=1)
    G = W - lam * eta
    d_eta = 2.0 * np.sum(u * dU, axis=1)
    kinetic = 0.5 * np.sum(dU * dU, axis=1)
    energy_integral = np.abs(kinetic - lam * eta - G)
    angular_integral = np.abs(np.sum(dU * (u @ J.T), axis=1) + 0.5 * nu * eta)
    rhs = 2.0 * eta * G
    radial_integral = np.abs(0.25 * d_eta**2 + 0.25 * (nu**2 - 8.0 * lam) * eta**2 - rhs)
    stated = np.abs(0.25 * d_eta**2 + 0.5 * (nu**2 - 8.0 * lam) * eta**2 - rhs)
    return ConservedReport(applicable=True, nodes=int(np.count_nonzero(mask)),
                           energy_integral=float(energy_integral.max()),
                           angular_integral=float(angular_integral.max()),
                           radial_integral=float(radial_integral.max()),
                           radial_integral_half_coefficient=float(stated.max()))
