"""
Plot-ready CSV bundles from run artifacts. The artifact kind is recognised from its CSV header.
"""

from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from core.errors import ConfigError

PathLike = Union[str, Path]


def _curve(df: pd.DataFrame) -> pd.DataFrame:
    """Polar columns about the curve's last node (the well for one-well minimizers)."""
    center = df[["x", "y"]].iloc[-1].to_numpy()
    rel = df[["x", "y"]].to_numpy() - center
    r = np.hypot(rel[:, 0], rel[:, 1])
    theta = pd.Series(np.arctan2(rel[:, 1], rel[:, 0])).where(r > 0.0).ffill().fillna(0.0)
    out = df.copy()
    out["r"] = r
    out["theta"] = np.unwrap(theta.to_numpy())
    return out


def _regimes(df: pd.DataFrame) -> pd.DataFrame:
    long = pd.wide_to_long(df[["nu", "regime"] + [c for c in df.columns if c.startswith(("re_mu_", "im_mu_"))]],
                           stubnames=["re_mu", "im_mu"], i="nu", j="i", sep="_")
    return long.reset_index()[["nu", "i", "re_mu", "im_mu", "regime"]].sort_values(["nu", "i"], kind="stable")


def _profile(df: pd.DataFrame) -> pd.DataFrame:
    return df[["y", "U1", "U2", "equip_residual"]]


def _sweep(df: pd.DataFrame) -> pd.DataFrame:
    cols = [c for c in ("A0", "nu", "nu_from_multiplier", "energy", "multiplier", "bubble_count") if c in df]
    return df[cols].sort_values("A0", kind="stable")


def _nonexist(df: pd.DataFrame) -> pd.DataFrame:
    return df[["j", "r", "energy", "closed_form"]]


KINDS: Dict[str, Callable[[pd.DataFrame], pd.DataFrame]] = {
    "curve": _curve,
    "regimes": _regimes,
    "profile": _profile,
    "sweep": _sweep,
    "nonexist": _nonexist,
}


def artifact_kind(columns: Sequence[str]) -> str:
    cols = set(columns)
    if {"param", "x", "y"} <= cols:
        return "curve"
    if {"nu", "regime", "re_mu_0"} <= cols:
        return "regimes"
    if {"y", "U1", "U2", "equip_residual"} <= cols:
        return "profile"
    if {"A0", "nu"} <= cols:
        return "sweep"
    if {"j", "energy", "closed_form"} <= cols:
        return "nonexist"
    raise ConfigError(f"unrecognised artifact columns: {sorted(cols)}")


def emit_plotdata(inputs: Sequence[PathLike], outdir: PathLike) -> List[str]:
    """One `<stem>_<kind>.csv` per input; raises ConfigError for a missing or unrecognised artifact."""
    paths = [Path(p) for p in inputs]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise ConfigError(f"missing artifacts: {', '.join(missing)}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    written = []
    for path in paths:
        df = pd.read_csv(path, float_precision="round_trip")
        kind = artifact_kind(df.columns)
        target = outdir / f"{path.stem}_{kind}.csv"
        KINDS[kind](df).to_csv(target, index=False, float_format="%.17g", lineterminator="\n")
        written.append(str(target))
    return written
