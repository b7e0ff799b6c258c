"""
Run configuration: one parameter model per subcommand, unknown keys rejected, paths checked up front.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.config import get_settings
from core.errors import ConfigError

Command = Literal["onewell", "twowell", "wave", "spectrum", "series", "nonexist", "plotdata"]


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class OneWellParams(_Params):
    lambda1: float = Field(default=1.0, gt=0)
    lambda2: float = Field(default=1.0, gt=0)
    p0: Tuple[float, float] = (1.0, 0.0)
    area: float = 0.0
    nodes: Optional[int] = Field(default=None, ge=4)
    certificate: int = Field(default=0, ge=0, description="Random area-preserving perturbations to certify against")
    degree: Optional[int] = Field(default=None, ge=3, description="Series truncation for analytic potentials")


class TwoWellParams(_Params):
    area: float = 0.0
    nodes: Optional[int] = Field(default=None, ge=5)
    sweep: Optional[List[float]] = Field(default=None, description="Areas for the A -> nu table")
    jitter: int = Field(default=0, ge=0)
    max_rounds: int = Field(default=8, ge=1)


class WaveParams(_Params):
    curve: str
    nu: Optional[float] = Field(default=None, description="Speed of the grafted tails; estimated from the curve when unset")
    delta: Optional[float] = Field(default=None, gt=0)
    spectrum_points: Optional[int] = Field(default=None, description="Grid size for the second variation; off when unset")


class SpectrumParams(_Params):
    lambda1: float = Field(default=1.0, gt=0)
    lambda2: float = Field(default=1.0, gt=0)
    nu: List[float] = Field(default_factory=lambda: [0.0])
    check: bool = Field(default=False, description="Also run the manufactured linear solution at each speed")


class SeriesParams(_Params):
    coeffs: Optional[List[float]] = Field(default=None, description="a_k of f(r) = sum a_k r^(k+2)")
    lam: float = Field(default=1.0, gt=0)
    beta: float = Field(default=1.5707963267948966, gt=0)
    degree: Optional[int] = Field(default=None, ge=3)
    radius: float = Field(default=0.1, gt=0, description="Ring radius for residual_Wexp")


class NonexistParams(_Params):
    q: float = Field(default=2.0, gt=1)
    area: float = 3.141592653589793
    jmax: int = Field(default=100, ge=1)
    points_per_circle: int = Field(default=512, ge=8)


class PlotdataParams(_Params):
    inputs: List[str]
    outdir: str


PARAMS: Dict[str, Type[_Params]] = {
    "onewell": OneWellParams,
    "twowell": TwoWellParams,
    "wave": WaveParams,
    "spectrum": SpectrumParams,
    "series": SeriesParams,
    "nonexist": NonexistParams,
    "plotdata": PlotdataParams,
}

NEEDS_POTENTIAL = {"twowell", "wave"}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    potential: Optional[Union[str, Dict[str, Any]]] = Field(default=None, description="Inline JSON object or file path")
    params: Dict[str, Any] = Field(default_factory=dict)
    out: Optional[str] = None
    report: Optional[str] = None
    seed: int = Field(default_factory=lambda: get_settings().seed)
    threads: Optional[int] = Field(default=None, ge=1)
    tolerance: Optional[float] = Field(default=None, gt=0)
    verbose: bool = Field(default_factory=lambda: get_settings().verbose)

    @field_validator("seed")
    @classmethod
    def _seed64(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v

    @model_validator(mode="after")
    def _params(self) -> "RunConfig":
        PARAMS[self.command].model_validate(self.params)
        if self.command in NEEDS_POTENTIAL and self.potential is None:
            raise ValueError(f"{self.command} needs a potential")
        return self

    @property
    def typed_params(self) -> _Params:
        return PARAMS[self.command].model_validate(self.params)


def _check_output(path: Optional[str]) -> None:
    if path is None:
        return
    parent = Path(path).expanduser().resolve().parent
    if parent.exists() and not parent.is_dir():
        raise ConfigError(f"output directory {parent} is not a directory")


def validate_paths(config: RunConfig) -> None:
    """Inputs must exist and outputs must be writable before any compute starts."""
    if isinstance(config.potential, str) and not Path(config.potential).is_file():
        raise ConfigError(f"potential config not found: {config.potential}")
    params = config.typed_params
    if isinstance(params, WaveParams) and not Path(params.curve).is_file():
        raise ConfigError(f"curve file not found: {params.curve}")
    if isinstance(params, PlotdataParams):
        missing = [p for p in params.inputs if not Path(p).is_file()]
        if missing:
            raise ConfigError(f"missing artifacts: {', '.join(missing)}")
    _check_output(config.out)
    _check_output(config.report)


def build_config(data: Dict[str, Any]) -> RunConfig:
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    validate_paths(config)
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"run config not found: {path}")
    try:
        return build_config(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_range(text: str) -> List[float]:
    """`x` or `start:step:end` (end included when it lands on the grid)."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        start, step, end = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"expected a number or start:step:end, got {text!r}") from exc
    if step <= 0 or end < start:
        raise ConfigError(f"bad range {text!r}")
    count = int(round((end - start) / step))
    values = [start + i * step for i in range(count + 1)]
    return [v for v in values if v <= end + 1e-12 * max(1.0, abs(end))]


def parse_point(text: str) -> Tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected x,y, got {text!r}") from exc
    return x, y
