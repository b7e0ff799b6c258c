import math
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

PotentialKind = Literal[
    "quadratic-one-well",
    "radial-power",
    "radial-analytic-one-well",
    "separable-double-well",
    "general-callable",
]

Point = Tuple[float, float]


class Potential(BaseModel):
    """
    Potential W >= 0 with one or two wells.

    params per kind:
      quadratic-one-well        hessian: 2x2 matrix H_W, W = (p-c)^T H_W (p-c)
      radial-power              q_prime: exponent, W = |p-c|^q'
      radial-analytic-one-well  coeffs: [a1, a2, ...], lam (1.0), radius (1.0);
                                W = lam^2 r^2 + sum_k a_k r^(k+2)
      separable-double-well     profile: "piecewise" | "quartic", transverse (1.0);
                                W = w(p1) + transverse * p2^2, wells (+-1, 0)
      general-callable          value_fn / grad_fn / hess_fn, optional rho
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: PotentialKind = Field(description="Potential family")
    wells: List[Point] = Field(description="Zeros of W (one or two points)")
    params: Dict[str, Any] = Field(default_factory=dict, description="Kind-specific parameters")
    value_fn: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)
    grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)
    hess_fn: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _check_kind(self) -> "Potential":
        if not 1 <= len(self.wells) <= 2:
            raise ValueError("a potential has one or two wells")
        p = self.params
        if self.kind == "quadratic-one-well":
            h = np.asarray(p.get("hessian"), dtype=float)
            if h.shape != (2, 2) or not np.allclose(h, h.T):
                raise ValueError("quadratic-one-well needs a symmetric 2x2 'hessian'")
            if np.linalg.eigvalsh(h)[0] < -1e-14:
                raise ValueError("quadratic-one-well hessian must be positive semi-definite")
        elif self.kind == "radial-power":
            if float(p.get("q_prime", 0.0)) <= 0.0:
                raise ValueError("radial-power needs q_prime > 0")
        elif self.kind == "radial-analytic-one-well":
            if "coeffs" not in p:
                raise ValueError("radial-analytic-one-well needs 'coeffs'")
            if float(p.get("radius", 1.0)) <= 0.0:
                raise ValueError("radius must be positive")
        elif self.kind == "separable-double-well":
            if p.get("profile", "piecewise") not in ("piecewise", "quartic"):
                raise ValueError("profile must be 'piecewise' or 'quartic'")
            if len(self.wells) != 2 or not np.allclose(sorted(self.wells), [(-1.0, 0.0), (1.0, 0.0)]):
                raise ValueError("separable-double-well has its wells at (-1, 0) and (1, 0)")
        elif self.kind == "general-callable":
            if self.value_fn is None:
                raise ValueError("general-callable needs value_fn")
        if self.kind != "separable-double-well" and self.kind != "general-callable" and len(self.wells) != 1:
            raise ValueError(f"{self.kind} has exactly one well")
        return self

    @property
    def is_double_well(self) -> bool:
        return len(self.wells) == 2

    def well_array(self) -> np.ndarray:
        return np.asarray(self.wells, dtype=float)


class WellData(BaseModel):
    """Local quadratic data at a well: W ~ lambda1^2 p1^2 + lambda2^2 p2^2 in the eigenbasis."""

    model_config = ConfigDict(frozen=True)

    center: Point = Field(description="Well location")
    lambda1_sq: float = Field(gt=0, description="Smaller eigenvalue of Hess(W)/2")
    lambda2_sq: float = Field(gt=0, description="Larger eigenvalue of Hess(W)/2")
    v1: Point = Field(description="Unit eigenvector for lambda1^2")
    v2: Point = Field(description="Unit eigenvector for lambda2^2, v2 = J^T v1 (det[v1 v2] = +1)")
    rho: float = Field(default=math.inf, description="Radius of the ball where the local data is valid")

    @property
    def lambda1(self) -> float:
        return math.sqrt(self.lambda1_sq)

    @property
    def lambda2(self) -> float:
        return math.sqrt(self.lambda2_sq)

    @property
    def basis(self) -> np.ndarray:
        """Columns v1, v2."""
        return np.column_stack([self.v1, self.v2])

    @property
    def is_radial(self) -> bool:
        return math.isclose(self.lambda1_sq, self.lambda2_sq, rel_tol=1e-9)

    def to_local(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - np.asarray(self.center)) @ self.basis

    def to_global(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.asarray(self.center) + p @ self.basis.T

    @classmethod
    def diagonal(cls, lambda1: float, lambda2: float, center: Point = (0.0, 0.0)) -> "WellData":
        """Well in coordinate axes with W = lambda1^2 p1^2 + lambda2^2 p2^2 (lambda1 <= lambda2 not required)."""
        if lambda1 <= lambda2:
            return cls(center=center, lambda1_sq=lambda1**2, lambda2_sq=lambda2**2, v1=(1.0, 0.0), v2=(0.0, 1.0))
        return cls(center=center, lambda1_sq=lambda2**2, lambda2_sq=lambda1**2, v1=(0.0, 1.0), v2=(-1.0, 0.0))


class HypothesisCheck(BaseModel):
    name: str
    passed: Optional[bool] = Field(description="None when the hypothesis does not apply")
    value: Optional[float] = None
    witness: Optional[Point] = None
    detail: str = ""


class HypothesisReport(BaseModel):
    checks: Dict[str, HypothesisCheck]
    constants: Dict[str, float] = Field(default_factory=dict,
                                        description="lambda, c0_coercive, R0, m0, c0_ball, c1_ball, gb_c1")
    grid_points: int
    half_width: float

    def passed(self, name: str) -> Optional[bool]:
        return self.checks[name].passed
