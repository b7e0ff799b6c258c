from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ParamTag = Literal["uniform-t", "constant-speed", "degenerate-arclength"]


class SampledCurve(BaseModel):
    """Immutable planar polyline; `params` holds the parameter value at each node when known."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(description="(n, 2) node coordinates, n >= 2")
    param: ParamTag = Field(default="uniform-t")
    closed: bool = Field(default=False)
    params: Optional[np.ndarray] = Field(default=None, description="parameter value per node")

    @field_validator("points", mode="before")
    @classmethod
    def _points(cls, v):
        arr = np.array(v, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValueError("a curve needs at least two planar points")
        if not np.all(np.isfinite(arr)):
            raise ValueError("curve points must be finite")
        arr.setflags(write=False)
        return arr

    @field_validator("params", mode="before")
    @classmethod
    def _params(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=float)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _consistent(self) -> "SampledCurve":
        if self.params is not None and self.params.shape != (len(self.points),):
            raise ValueError("params must have one entry per node")
        return self

    def __len__(self) -> int:
        return len(self.points)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @property
    def chords(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.points[1:] + self.points[:-1])

    def is_degenerate(self) -> bool:
        """All nodes coincide."""
        return bool(np.all(np.linalg.norm(self.points - self.points[0], axis=1) == 0.0))
