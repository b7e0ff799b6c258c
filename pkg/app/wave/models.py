from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Regime = Literal["real-decay", "spiral-decay", "oscillatory-no-wave"]


class TravelingWaveProfile(BaseModel):
    """U(y) on an increasing grid; nodes mapped from a curve sit between the two grafted tails."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    y_grid: np.ndarray
    U: np.ndarray
    nu: float = 0.0
    H_value: float = 0.0
    equipartition_residual: float = 0.0
    ode_residual: float = 0.0
    mapped: Tuple[int, int] = Field(default=(0, 0), description="Index range [start, stop) taken from the curve")
    wells: List[Optional[Tuple[float, float]]] = Field(default_factory=lambda: [None, None],
                                                      description="Well approached at y -> -inf / +inf")

    @field_validator("y_grid", "U", mode="before")
    @classmethod
    def _array(cls, v):
        arr = np.array(v, dtype=float)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _shapes(self) -> "TravelingWaveProfile":
        if self.y_grid.ndim != 1 or self.U.shape != (len(self.y_grid), 2):
            raise ValueError("U must have shape (len(y_grid), 2)")
        if len(self.y_grid) < 2 or np.any(np.diff(self.y_grid) <= 0.0):
            raise ValueError("y_grid must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.y_grid)

    def translate(self, shift: float) -> "TravelingWaveProfile":
        return self.model_copy(update={"y_grid": self.y_grid + shift})


class SpectralReport(BaseModel):
    nu: float
    lambdas: Tuple[float, float]
    eigenvalues: List[complex] = Field(description="Eigenvalues of M, sorted by real then imaginary part")
    closed_form: List[complex] = Field(description="Roots of mu^4 + b mu^2 + 4 l1^2 l2^2 = 0")
    cross_check_residual: float
    regime: Regime
    speed_admissible: bool
    boundaries: Tuple[float, float] = Field(description="nu^2 at 2(l1-l2)^2 and 2(l1+l2)^2")


class SpeedLimits(BaseModel):
    per_well: List[float] = Field(description="2 (lambda1 + lambda2)^2 at each well")
    limit: float
    radial_bounds: Optional[Dict[str, float]] = Field(
        default=None, description="8*lambda and 8*lambda^2 with lambda = Hess W / 2 at a radial well")
    radial_note: str = ""


class ConservedReport(BaseModel):
    applicable: bool
    nodes: int = 0
    energy_integral: float = 0.0
    angular_integral: float = 0.0
    radial_integral: float = 0.0
    radial_integral_half_coefficient: float = 0.0
    detail: str = ""


class SecondVariationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    eigenvalues: List[float]
    eigenvectors: Optional[np.ndarray] = Field(default=None, exclude=True, description="(2m, k), interleaved components")
    lam: float = Field(description="Smallest Hessian eigenvalue over the two wells")
    zero_eigenvalue: float
    zero_correlation: float
    next_eigenvalue: float
    end_spectrum_min: float
    min_eigenvalue_ok: bool
    zero_mode_ok: bool
    gap_ok: bool
    end_spectrum_ok: bool
    grid_points: int
