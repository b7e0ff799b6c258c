"""
The first-order operator L(grad P) = 2 <Lambda_beta p, grad P> on degree-n homogeneous polynomials.

Lambda_beta p = (-lambda1 sin(b) p1 - lambda2 cos(b) p2, lambda1 cos(b) p1 - lambda2 sin(b) p2).
"""

import math

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from core.errors import NumericalSingularityError
from app.series.homog import HomogPoly

COND_LIMIT = 1e12


def lambda_matrix(lambda1: float, lambda2: float, beta: float) -> np.ndarray:
    s, c = math.sin(beta), math.cos(beta)
    return np.array([[-lambda1 * s, -lambda2 * c],
                     [lambda1 * c, -lambda2 * s]])


def apply_L(P: HomogPoly, lambda1: float, lambda2: float, beta: float) -> HomogPoly:
    if P.degree == 0:
        return HomogPoly.zero(0)
    s, c = math.sin(beta), math.cos(beta)
    a, b = P.d1(), P.d2()
    first = a.times_p1().scale(-lambda1 * s) + a.times_p2().scale(-lambda2 * c)
    second = b.times_p1().scale(lambda1 * c) + b.times_p2().scale(-lambda2 * s)
    return (first + second).scale(2.0)


def L_matrix(n: int, lambda1: float, lambda2: float, beta: float) -> np.ndarray:
    """(n+1)x(n+1) matrix of L on degree-n coefficient space; column i is L applied to the i-th monomial."""
    cols = [apply_L(HomogPoly.monomial((n - i, i)), lambda1, lambda2, beta).coeffs for i in range(n + 1)]
    return np.column_stack(cols)


def solve_L(Q: HomogPoly, lambda1: float, lambda2: float, beta: float) -> HomogPoly:
    """The unique P of degree deg Q with L(grad P) = Q."""
    if Q.degree < 3:
        raise ValueError("solve_L is defined on degrees n >= 3")
    if Q.is_zero():
        return HomogPoly.zero(Q.degree)
    M = L_matrix(Q.degree, lambda1, lambda2, beta)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalSingularityError(f"L is singular on degree {Q.degree} (condition number {cond:.3e})")
    return HomogPoly(degree=Q.degree, coeffs=lu_solve(lu_factor(M), Q.coeffs))
