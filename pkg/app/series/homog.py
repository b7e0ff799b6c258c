"""
Homogeneous polynomials in two variables.

A degree-n polynomial stores n+1 coefficients; coeffs[i] multiplies p1^(n-i) p2^i, i.e. the multi-index
alpha = (n-i, i).
"""

from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class HomogPoly(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    degree: int = Field(ge=0)
    coeffs: np.ndarray = Field(description="coeffs[i] is the coefficient of p1^(n-i) p2^i")

    @field_validator("coeffs", mode="before")
    @classmethod
    def _coeffs(cls, v):
        arr = np.array(v, dtype=float).reshape(-1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _shape(self) -> "HomogPoly":
        if self.coeffs.shape != (self.degree + 1,):
            raise ValueError(f"degree {self.degree} needs {self.degree + 1} coefficients")
        return self

    @classmethod
    def zero(cls, degree: int) -> "HomogPoly":
        return cls(degree=degree, coeffs=np.zeros(degree + 1))

    @classmethod
    def monomial(cls, alpha: Tuple[int, int], c: float = 1.0) -> "HomogPoly":
        n = alpha[0] + alpha[1]
        coeffs = np.zeros(n + 1)
        coeffs[alpha[1]] = c
        return cls(degree=n, coeffs=coeffs)

    @classmethod
    def radial_power(cls, m: int, c: float = 1.0) -> "HomogPoly":
        """c (p1^2 + p2^2)^m."""
        coeffs = np.zeros(2 * m + 1)
        row = np.array([1.0])
        for _ in range(m):
            row = np.convolve(row, [1.0, 1.0])
        coeffs[::2] = c * row
        return cls(degree=2 * m, coeffs=coeffs)

    def alphas(self):
        return [(self.degree - i, i) for i in range(self.degree + 1)]

    def as_dict(self) -> Dict[str, float]:
        return {f"{a1},{a2}": float(c) for (a1, a2), c in zip(self.alphas(), self.coeffs)}

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        if other.degree != self.degree:
            raise ValueError("cannot add homogeneous polynomials of different degree")
        return HomogPoly(degree=self.degree, coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        return self + other.scale(-1.0)

    def __mul__(self, other: "HomogPoly") -> "HomogPoly":
        return HomogPoly(degree=self.degree + other.degree, coeffs=np.convolve(self.coeffs, other.coeffs))

    def scale(self, c: float) -> "HomogPoly":
        return HomogPoly(degree=self.degree, coeffs=c * self.coeffs)

    def times_p1(self) -> "HomogPoly":
        return HomogPoly(degree=self.degree + 1, coeffs=np.append(self.coeffs, 0.0))

    def times_p2(self) -> "HomogPoly":
        return HomogPoly(degree=self.degree + 1, coeffs=np.insert(self.coeffs, 0, 0.0))

    def d1(self) -> "HomogPoly":
        n = self.degree
        if n == 0:
            return HomogPoly.zero(0)
        i = np.arange(n)
        return HomogPoly(degree=n - 1, coeffs=(n - i) * self.coeffs[:n])

    def d2(self) -> "HomogPoly":
        n = self.degree
        if n == 0:
            return HomogPoly.zero(0)
        i = np.arange(1, n + 1)
        return HomogPoly(degree=n - 1, coeffs=i * self.coeffs[1:])

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x = p[..., 0][..., None]
        y = p[..., 1][..., None]
        i = np.arange(self.degree + 1)
        return np.sum(self.coeffs * x ** (self.degree - i) * y**i, axis=-1)

    def grad(self, p) -> np.ndarray:
        return np.stack([self.d1()(p), self.d2()(p)], axis=-1)


def dot_gradients(P: HomogPoly, Q: HomogPoly) -> HomogPoly:
    """<grad P, grad Q> as a homogeneous polynomial of degree deg P + deg Q - 2."""
    return P.d1() * Q.d1() + P.d2() * Q.d2()
