import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


class Settings(BaseModel):
    """Runtime knobs read from the environment (.env supported)."""

    threads: int = Field(description="Upper bound on concurrent compute tasks")
    nodes: int = Field(default=2048, description="Default node count for functional evaluation")
    twowell_nodes: int = Field(default=801, description="Default polyline size for the two-well minimizer")
    series_degree: int = Field(default=10, description="Default truncation degree N of the g_beta series")
    grid_points: int = Field(default=201, description="Points per side of the hypothesis grid")
    seed: int = Field(default=0, description="Default 64-bit seed")
    verbose: bool = Field(default=True, description="Console progress logging")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        threads=max(1, _env_int("ISOFLOW_THREADS", os.cpu_count() or 1)),
        nodes=_env_int("ISOFLOW_NODES", 2048),
        twowell_nodes=_env_int("ISOFLOW_TWOWELL_NODES", 801),
        series_degree=_env_int("ISOFLOW_SERIES_DEGREE", 10),
        grid_points=_env_int("ISOFLOW_GRID", 201),
        seed=_env_int("ISOFLOW_SEED", 0),
        verbose=os.getenv("ISOFLOW_VERBOSE", "1").strip().lower() not in ("0", "false", "no"),
    )


def thread_cap(override: Optional[int] = None) -> int:
    if override is not None:
        return max(1, int(override))
    return get_settings().threads
