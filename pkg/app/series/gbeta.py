"""
Formal power series of the calibration function g_beta for analytic wells.

In local coordinates at the well, W = lambda1^2 p1^2 + lambda2^2 p2^2 + sum_{n>=3} Q_n and g_beta = sum_{n>=3} P_n
solves |grad g_beta + Lambda_beta p|^2 = W. Degree by degree this is
    L(grad P_n) = Q_n - sum_{j+k=n+2} <grad P_j, grad P_k>.
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad
from scipy.special import binom

from core.config import get_settings
from core.errors import DomainError
from app.potentials.models import Potential, WellData
from app.potentials.potential import radial_to_series, value, well_data
from app.series.homog import HomogPoly, dot_gradients
from app.series.linear_op import lambda_matrix, solve_L

RING_POINTS = 32
VALIDITY_TOL = 1e-6

WSeries = Mapping[int, Union[HomogPoly, Sequence[float]]]


class GBetaSeries(BaseModel):
    """Truncated g_beta = P_3 + ... + P_N in the well's local coordinates."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    beta: float = Field(gt=0, lt=math.pi)
    lambda1: float = Field(gt=0)
    lambda2: float = Field(gt=0)
    terms: List[HomogPoly] = Field(description="P_3 .. P_N")
    w_terms: Dict[int, HomogPoly] = Field(default_factory=dict, description="Q_n of W, n >= 3")
    center: Tuple[float, float] = (0.0, 0.0)
    v1: Tuple[float, float] = (1.0, 0.0)
    v2: Tuple[float, float] = (0.0, 1.0)
    validity_radius: float = Field(default=0.0, description="Largest ring radius with residual <= 1e-6")

    @property
    def max_degree(self) -> int:
        return self.terms[-1].degree if self.terms else 2

    @property
    def well(self) -> WellData:
        return WellData(center=self.center, lambda1_sq=self.lambda1**2, lambda2_sq=self.lambda2**2,
                        v1=self.v1, v2=self.v2)

    def value_local(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1])
        for P in self.terms:
            out = out + P(p)
        return out

    def grad_local(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape)
        for P in self.terms:
            out = out + P.grad(p)
        return out

    def value(self, x) -> np.ndarray:
        return self.value_local(self.well.to_local(x))

    def grad(self, x) -> np.ndarray:
        """Gradient in global coordinates."""
        return self.grad_local(self.well.to_local(x)) @ self.well.basis.T

    def field_local(self, p) -> np.ndarray:
        """grad g_beta + Lambda_beta p."""
        p = np.asarray(p, dtype=float)
        return self.grad_local(p) + p @ lambda_matrix(self.lambda1, self.lambda2, self.beta).T

    def w_series_local(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = self.lambda1**2 * p[..., 0] ** 2 + self.lambda2**2 * p[..., 1] ** 2
        for Q in self.w_terms.values():
            out = out + Q(p)
        return out

    def at_beta(self, beta: float, pot: Optional[Potential] = None) -> "GBetaSeries":
        return gbeta_coefficients(self.w_terms, self.lambda1, self.lambda2, beta, self.max_degree,
                                  well=self.well, pot=pot)

    def to_table(self) -> Dict[str, Dict[str, float]]:
        return {str(P.degree): P.as_dict() for P in self.terms}


def _as_poly(n: int, q) -> HomogPoly:
    return q if isinstance(q, HomogPoly) else HomogPoly(degree=n, coeffs=q)


def gbeta_coefficients(w_series: WSeries, lambda1: float, lambda2: float, beta: float,
                       N: Optional[int] = None, well: Optional[WellData] = None,
                       pot: Optional[Potential] = None) -> GBetaSeries:
    """
    Terms P_3..P_N of g_beta from the Taylor terms Q_n (n >= 3) of W.

    `well` places the series in the plane (defaults to the origin with coordinate axes); with `pot` the
    validity radius is measured against the true W, otherwise against the truncated series of W.
    """
    N = N or get_settings().series_degree
    if N < 3:
        raise ValueError("series truncation N must be at least 3")
    Q = {int(n): _as_poly(int(n), q) for n, q in w_series.items()}
    if any(n < 3 for n in Q):
        raise ValueError("W series terms must have degree >= 3")

    P: Dict[int, HomogPoly] = {}
    for n in range(3, N + 1):
        rhs = Q.get(n, HomogPoly.zero(n))
        for j in range(3, n):
            k = n + 2 - j
            if 3 <= k < n:
                rhs = rhs - dot_gradients(P[j], P[k])
        P[n] = solve_L(rhs, lambda1, lambda2, beta)

    if well is None:
        well = WellData(center=(0.0, 0.0), lambda1_sq=lambda1**2, lambda2_sq=lambda2**2,
                        v1=(1.0, 0.0), v2=(0.0, 1.0))
    series = GBetaSeries(beta=beta, lambda1=lambda1, lambda2=lambda2, terms=[P[n] for n in range(3, N + 1)],
                         w_terms=Q, center=well.center, v1=well.v1, v2=well.v2)
    return series.model_copy(update={"validity_radius": estimate_validity_radius(series, pot)})


def _ring(radius: float, count: int = RING_POINTS) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    return radius * np.column_stack([np.cos(theta), np.sin(theta)])


def _local_residual(series: GBetaSeries, local: np.ndarray, pot: Optional[Potential]) -> float:
    if pot is not None:
        W = value(pot, series.well.to_global(local))
    else:
        W = series.w_series_local(local)
    field = series.field_local(local)
    return float(np.max(np.abs(W - np.sum(field**2, axis=-1))))


def estimate_validity_radius(series: GBetaSeries, pot: Optional[Potential] = None,
                             r_min: float = 1e-3, r_max: float = 10.0, steps: int = 60) -> float:
    """Largest radius of a geometric scan whose ring residual stays <= 1e-6."""
    if pot is not None:
        r_max = min(r_max, well_data(pot).rho)
    best = 0.0
    for r in np.geomspace(r_min, r_max, steps):
        try:
            res = _local_residual(series, _ring(r), pot)
        except DomainError:
            break
        if res > VALIDITY_TOL:
            break
        best = float(r)
    return best


def residual_Wexp(pot: Potential, g: GBetaSeries, sample) -> float:
    """max |W(x) - |grad g + Lambda_beta p|^2| over global sample points x."""
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    return _local_residual(g, g.well.to_local(sample), pot)


def eikonal_residual(pot: Potential, g: GBetaSeries, sample) -> float:
    """max |W - lambda1^2 p1^2 - lambda2^2 p2^2 - L(grad g) - |grad g|^2| over the sample."""
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    local = g.well.to_local(sample)
    W = value(pot, sample)
    grad = g.grad_local(local)
    Lp = local @ lambda_matrix(g.lambda1, g.lambda2, g.beta).T
    quad_part = g.lambda1**2 * local[:, 0] ** 2 + g.lambda2**2 * local[:, 1] ** 2
    rhs = 2.0 * np.sum(Lp * grad, axis=-1) + np.sum(grad**2, axis=-1)
    return float(np.max(np.abs(W - quad_part - rhs)))


# --- radial wells ---------------------------------------------------------------------------

def _f(f_coeffs: Sequence[float], s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    for k, a in enumerate(f_coeffs, start=1):
        out = out + a * s ** (k + 2)
    return out


def gbeta_radial(f_coeffs: Sequence[float], beta: float, r: float, lam: float = 1.0) -> float:
    """
    g_beta(r) = int_0^r lam sin(b) s - sqrt(lam^2 sin^2(b) s^2 + f(s)) ds for W = lam^2 r^2 + f(r),
    f(r) = sum_k a_k r^(k+2).
    """
    sb = math.sin(beta)
    radii = np.linspace(0.0, abs(r), 257)
    if np.any(lam**2 * sb**2 * radii**2 + _f(f_coeffs, radii) < 0.0):
        raise DomainError(f"negative radicand in the radial g_beta before r={r}")

    def integrand(s: float) -> float:
        rad = lam**2 * sb**2 * s**2 + float(_f(f_coeffs, s))
        if rad < 0.0:
            raise DomainError(f"negative radicand at s={s}")
        return lam * sb * s - math.sqrt(rad)

    val, _ = quad(integrand, 0.0, r, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(val)


def radial_taylor_coefficients(f_coeffs: Sequence[float], beta: float, N: int, lam: float = 1.0) -> np.ndarray:
    """c[d] with g_beta(r) = sum_d c[d] r^d, d <= N, from the binomial series of sqrt(1 + u)."""
    sigma = lam * math.sin(beta)
    # u(s) = f(s) / (sigma s)^2 = sum_k a_k s^k / sigma^2
    u = np.zeros(N + 1)
    for k, a in enumerate(f_coeffs, start=1):
        if k <= N:
            u[k] = a / sigma**2
    root = np.zeros(N + 1)
    root[0] = 1.0
    power = np.zeros(N + 1)
    power[0] = 1.0
    for m in range(1, N + 1):
        power = np.convolve(power, u)[: N + 1]
        root = root + binom(0.5, m) * power
    # integrand = sigma s (1 - sqrt(1 + u))
    root[0] -= 1.0
    integrand = np.zeros(N + 1)
    integrand[1:] = -sigma * root[:N]
    coeffs = np.zeros(N + 1)
    d = np.arange(1, N + 1)
    coeffs[1:] = integrand[: N] / d
    return coeffs


def radial_series(f_coeffs: Sequence[float], beta: float, N: int, lam: float = 1.0) -> List[HomogPoly]:
    """The radial Taylor coefficients as homogeneous polynomials c_d (p1^2 + p2^2)^(d/2), d = 3..N."""
    c = radial_taylor_coefficients(f_coeffs, beta, N, lam)
    out = []
    for d in range(3, N + 1):
        if d % 2:
            if abs(c[d]) > 0.0:
                raise DomainError(f"odd radial degree {d} is not a polynomial")
            out.append(HomogPoly.zero(d))
        else:
            out.append(HomogPoly.radial_power(d // 2, c[d]))
    return out


def for_potential(pot: Potential, beta: float, N: Optional[int] = None, which: int = 0) -> GBetaSeries:
    """g_beta series of a radial-analytic or quadratic well."""
    well = well_data(pot, which)
    w_series = radial_to_series(pot) if pot.kind == "radial-analytic-one-well" else {}
    return gbeta_coefficients(w_series, well.lambda1, well.lambda2, beta, N, well=well, pot=pot)
