import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.curves.models import SampledCurve
from app.potentials.models import HypothesisReport, Potential


class MinimizerOptions(BaseModel):
    """Augmented-Lagrangian settings."""

    model_config = ConfigDict(frozen=True)

    max_rounds: int = Field(default=8, ge=1, description="Outer multiplier/penalty rounds")
    penalty_start: float = Field(default=10.0, gt=0)
    penalty_factor: float = Field(default=10.0, gt=1)
    tolerance: float = Field(default=1e-6, gt=0, description="Target KKT residual")
    inner_maxiter: int = Field(default=4000, ge=1, description="L-BFGS-B iterations per round")
    inner_gtol: float = Field(default=1e-10, gt=0)
    reproject: bool = Field(default=True, description="Constant-speed resampling before each round after the first")
    polish: bool = Field(default=True, description="Newton steps on the KKT system when the rounds stop short")
    newton_steps: int = Field(default=20, ge=0, description="Cap on the Newton steps")
    constraint_tolerance: float = Field(default=1e-5, gt=0, description="|P - A| for a start to count as feasible")
    jitter_starts: int = Field(default=0, ge=0, description="Extra seeded random starts")
    jitter_amplitude: float = Field(default=0.1, gt=0)
    seed: int = 0


class TwoWellProblem(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pot: Potential
    A0: float = Field(description="Constraint value for P")
    n: int = Field(default=801, ge=5, description="Polyline nodes, endpoints included")
    opts: MinimizerOptions = Field(default_factory=MinimizerOptions)
    hypotheses: Optional[HypothesisReport] = None

    @model_validator(mode="after")
    def _two_wells(self) -> "TwoWellProblem":
        if not self.pot.is_double_well:
            raise ValueError("a two-well problem needs a potential with exactly two wells")
        return self

    @property
    def p_minus(self):
        return self.pot.wells[0]

    @property
    def p_plus(self):
        return self.pot.wells[1]

    @property
    def ball_radius(self) -> float:
        if self.hypotheses is not None and "ball_radius" in self.hypotheses.constants:
            return self.hypotheses.constants["ball_radius"]
        a, b = self.pot.well_array()
        return 0.25 * float(math.dist(a, b))


class StartOutcome(BaseModel):
    index: int
    label: str
    energy: float
    momentum: float
    kkt_residual: float
    converged: bool


class MinimizerResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    curve: SampledCurve
    energy: float
    momentum: float
    kkt_residual: float
    bubble_count: int = 0
    multiplier: float = Field(description="Multiplier mu of the area constraint, dE/dA")
    converged: bool
    rounds: int = 0
    start_index: int = 0
    start_label: str = ""
    starts: List[StartOutcome] = Field(default_factory=list)
