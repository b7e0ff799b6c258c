import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.curves.models import SampledCurve
from app.potentials.models import WellData


class ApproachSpectrum(BaseModel):
    """Eigenvalues of Lambda_beta; complex pairs mean the minimizer spirals into the well."""

    mu_plus: complex
    mu_minus: complex
    spiral: bool
    threshold: float = Field(description="2 sqrt(lambda1 lambda2) / (lambda1 + lambda2)")


class OneWellSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    beta: float = Field(gt=0, lt=math.pi)
    curve: SampledCurve = Field(description="From p0 to the well, degenerate-arclength parameter")
    L_beta: float = Field(description="Degenerate length of the minimizer")
    A: float = Field(description="Raw constraint P(curve)")
    A_tilde: float = Field(description="Transformed constraint A - C")
    C: float = Field(default=0.0, description="Constraint offset along the reference geodesic")
    spectrum: ApproachSpectrum
    euclidean_length: float
    well: WellData
    p0: Tuple[float, float]
    analytic: bool = Field(default=False, description="Integrated with a g_beta series")
    residual_Wexp: Optional[float] = Field(default=None, description="Series residual along the curve")
    g_start: float = Field(default=0.0, description="g_beta(p0); zero without a series")


class CertificateReport(BaseModel):
    omega_solution: float = Field(description="Integral of the calibration form along the solution")
    omega_candidate: float
    energy_solution: float
    energy_candidate: float
    momentum_solution: float
    momentum_candidate: float
    calibration_gap: float = Field(description="E(candidate) minus its calibration integral")
    omega_match: bool = Field(description="Calibration integrals agree within 1e-5")
    verdict: bool = Field(description="E(candidate) >= E(solution) - 1e-6")
