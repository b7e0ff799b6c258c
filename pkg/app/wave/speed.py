import math
from typing import Tuple

import numpy as np

from core.errors import DomainError, GridError
from app.potentials.models import Potential
from app.wave.models import TravelingWaveProfile
from app.wave.profile import DECAY_TOL, decaying_subspace, linearization, ode_terms


def estimate_speed(profile: TravelingWaveProfile, pot: Potential) -> Tuple[float, float]:
    """Closed-form least-squares nu for -nu J U' = U'' - grad W(U); returns (nu, post-fit L2 residual)."""
    if len(profile) < 7:
        raise GridError("estimate_speed needs at least five interior nodes")
    a, b, w, _ = ode_terms(profile, pot)
    aa = float(np.sum(w * np.sum(a * a, axis=1)))
    if aa == 0.0:
        return 0.0, math.sqrt(float(np.sum(w * np.sum(b * b, axis=1))))
    nu = -float(np.sum(w * np.sum(a * b, axis=1))) / aa
    res = math.sqrt(float(np.sum(w * np.sum((nu * a + b) ** 2, axis=1))))
    return nu, res


def nu_from_multiplier(mu: float) -> float:
    """Wave speed of the profile of a curve with area multiplier mu (H = sqrt(2) E)."""
    return math.sqrt(2.0) * mu


def manufactured_linear_solution(lambda1: float, lambda2: float, nu: float, y, amplitude: float = 0.1,
                                 phase: float = 0.3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact solution decaying as y -> +inf of U'' = Hess U - nu J U' for W = lambda1^2 u1^2 + lambda2^2 u2^2,
    built from the stable eigenvectors of M. Returns (U, U') at the points y.
    """
    hess = np.diag([2.0 * lambda1**2, 2.0 * lambda2**2])
    M = linearization(hess, nu)
    vals, vecs = np.linalg.eig(M)
    stable = vals.real < -DECAY_TOL * max(1.0, float(np.abs(M).max()))
    if np.count_nonzero(stable) != 2:
        raise DomainError(f"no decaying solutions at nu={nu}")
    Q = decaying_subspace(hess, nu)
    z0 = Q @ (amplitude * np.array([math.cos(phase), math.sin(phase)]))
    coeffs = np.linalg.lstsq(vecs[:, stable], z0.astype(complex), rcond=None)[0]
    y = np.asarray(y, dtype=float)
    Z = (vecs[:, stable] * coeffs) @ np.exp(np.outer(vals[stable], y))
    Z = Z.real.T
    return Z[:, :2], Z[:, 2:]


def profile_from_samples(y, U, nu: float = 0.0) -> TravelingWaveProfile:
    return TravelingWaveProfile(y_grid=y, U=U, nu=nu)
