"""
Admissible speeds at a well.

Eigenvalues of M = [[0, I], [Hess W, -nu J]] solve mu^4 + b mu^2 + 4 l1^2 l2^2 = 0 with
b = nu^2 - 2(l1^2 + l2^2); the sign of b^2 - 16 l1^2 l2^2 and of b split the three regimes.
"""

import cmath
from typing import List

import numpy as np

from core.errors import DegeneracyError
from app.potentials.models import Potential, WellData
from app.potentials.potential import well_data
from app.wave.models import SpectralReport, SpeedLimits
from app.wave.profile import linearization


def _sorted(values) -> List[complex]:
    return sorted((complex(v) for v in values), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def closed_form_roots(lambda1: float, lambda2: float, nu: float) -> List[complex]:
    b = nu**2 - 2.0 * (lambda1**2 + lambda2**2)
    disc = cmath.sqrt(b * b - 16.0 * lambda1**2 * lambda2**2)
    roots = []
    for sq in (0.5 * (-b + disc), 0.5 * (-b - disc)):
        r = cmath.sqrt(sq)
        roots.extend([r, -r])
    return _sorted(roots)


def regime_boundaries(lambda1: float, lambda2: float):
    return 2.0 * (lambda1 - lambda2) ** 2, 2.0 * (lambda1 + lambda2) ** 2


def speed_spectrum(well: WellData, nu: float) -> SpectralReport:
    l1, l2 = well.lambda1, well.lambda2
    M = linearization(np.diag([2.0 * well.lambda1_sq, 2.0 * well.lambda2_sq]), nu)
    numeric = _sorted(np.linalg.eigvals(M))
    closed = closed_form_roots(l1, l2, nu)
    b = nu**2 - 2.0 * (l1**2 + l2**2)
    residual = max(abs(z**4 + b * z**2 + 4.0 * l1**2 * l2**2) for z in numeric)
    lo, hi = regime_boundaries(l1, l2)
    nu2 = nu * nu
    if nu2 <= lo:
        regime = "real-decay"
    elif nu2 < hi:
        regime = "spiral-decay"
    else:
        regime = "oscillatory-no-wave"
    return SpectralReport(nu=nu, lambdas=(l1, l2), eigenvalues=numeric, closed_form=closed,
                          cross_check_residual=float(residual), regime=regime,
                          speed_admissible=regime != "oscillatory-no-wave", boundaries=(lo, hi))


def speed_limits(pot: Potential) -> SpeedLimits:
    """nu^2 bound 2(lambda1 + lambda2)^2 per well; radial wells also get the 8*lambda / 8*lambda^2 pair."""
    per_well = []
    radial = None
    note = ""
    for i in range(len(pot.wells)):
        wd = well_data(pot, i)
        per_well.append(2.0 * (wd.lambda1 + wd.lambda2) ** 2)
        if wd.is_radial and radial is None:
            lam = wd.lambda1_sq
            radial = {"8*lambda": 8.0 * lam, "8*lambda^2": 8.0 * lam**2}
            note = ("W = lambda |U - p|^2 near the well; the energy integral gives nu^2 <= 8*lambda, "
                    "the squared form is reported alongside")
    if not per_well:
        raise DegeneracyError("no wells")
    return SpeedLimits(per_well=per_well, limit=min(per_well), radial_bounds=radial, radial_note=note)
