import json
import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from core.errors import ConfigError, DegeneracyError, DomainError
from app.potentials.models import Potential, WellData

FD_STEP = 1e-5


def _as_points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of size 2")
    return arr


# --- separable profiles -----------------------------------------------------------------

def _piecewise_w(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # (|x|-1)^2 for |x| >= 1/2, C^2 quartic bridge 5/8 - 2x^2 + 2x^4 inside
    ax = np.abs(x)
    outer = ax >= 0.5
    w = np.where(outer, (ax - 1.0) ** 2, 0.625 - 2.0 * x**2 + 2.0 * x**4)
    dw = np.where(outer, 2.0 * (ax - 1.0) * np.sign(x), -4.0 * x + 8.0 * x**3)
    d2w = np.where(outer, 2.0, -4.0 + 24.0 * x**2)
    return w, dw, d2w


def _quartic_w(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return 0.25 * (x**2 - 1.0) ** 2, x * (x**2 - 1.0), 3.0 * x**2 - 1.0


_PROFILES = {"piecewise": _piecewise_w, "quartic": _quartic_w}


# --- per-kind evaluation ------------------------------------------------------------------

def _quadratic(pot: Potential, P: np.ndarray):
    H = np.asarray(pot.params["hessian"], dtype=float)
    d = P - np.asarray(pot.wells[0])
    Hd = d @ H
    W = np.einsum("...i,...i->...", d, Hd)
    G = 2.0 * Hd
    Hs = np.broadcast_to(2.0 * H, P.shape[:-1] + (2, 2)).copy()
    return W, G, Hs


def _radial_power(pot: Potential, P: np.ndarray):
    q = float(pot.params["q_prime"])
    d = P - np.asarray(pot.wells[0])
    r = np.linalg.norm(d, axis=-1)
    W = r**q
    at_center = r == 0.0
    if np.any(at_center) and q < 2.0:
        raise DomainError(f"|p|^{q} is not twice differentiable at the well")
    rs = np.where(at_center, 1.0, r)
    a = np.where(at_center, 2.0 if q == 2.0 else 0.0, q * rs ** (q - 2.0))
    b = np.where(at_center, 0.0, q * (q - 2.0) * rs ** (q - 4.0))
    G = a[..., None] * d
    eye = np.eye(2)
    Hs = a[..., None, None] * eye + b[..., None, None] * np.einsum("...i,...j->...ij", d, d)
    return W, G, Hs


def _radial_analytic(pot: Potential, P: np.ndarray):
    lam = float(pot.params.get("lam", 1.0))
    coeffs = [float(c) for c in pot.params["coeffs"]]
    radius = float(pot.params.get("radius", 1.0))
    d = P - np.asarray(pot.wells[0])
    r = np.linalg.norm(d, axis=-1)
    if np.any(r > radius * (1.0 + 1e-12)):
        raise DomainError(f"radial-analytic potential evaluated outside its validity radius {radius}")
    W = lam**2 * r**2
    g_over_r = 2.0 * lam**2 * np.ones_like(r)
    curv = np.zeros_like(r)
    for k, a in enumerate(coeffs, start=1):
        W = W + a * r ** (k + 2)
        g_over_r = g_over_r + a * (k + 2) * r**k
        curv = curv + a * (k + 2) * k * r**k
    G = g_over_r[..., None] * d
    rr = np.where(r > 0.0, r, 1.0) ** 2
    dd = np.einsum("...i,...j->...ij", d, d) / rr[..., None, None]
    Hs = g_over_r[..., None, None] * np.eye(2) + curv[..., None, None] * dd
    return W, G, Hs


def _separable(pot: Potential, P: np.ndarray):
    profile = _PROFILES[pot.params.get("profile", "piecewise")]
    t = float(pot.params.get("transverse", 1.0))
    w, dw, d2w = profile(P[..., 0])
    y = P[..., 1]
    W = w + t * y**2
    G = np.stack([dw, 2.0 * t * y], axis=-1)
    Hs = np.zeros(P.shape[:-1] + (2, 2))
    Hs[..., 0, 0] = d2w
    Hs[..., 1, 1] = 2.0 * t
    return W, G, Hs


def _callable(pot: Potential, P: np.ndarray):
    W = np.asarray(pot.value_fn(P), dtype=float)
    if pot.grad_fn is not None:
        G = np.asarray(pot.grad_fn(P), dtype=float)
    else:
        G = np.stack([(pot.value_fn(P + FD_STEP * e) - pot.value_fn(P - FD_STEP * e)) / (2 * FD_STEP)
                      for e in np.eye(2)], axis=-1)
    if pot.hess_fn is not None:
        Hs = np.asarray(pot.hess_fn(P), dtype=float)
    else:
        cols = []
        for e in np.eye(2):
            gp = _callable_grad(pot, P + FD_STEP * e)
            gm = _callable_grad(pot, P - FD_STEP * e)
            cols.append((gp - gm) / (2 * FD_STEP))
        Hs = np.stack(cols, axis=-1)
        Hs = 0.5 * (Hs + np.swapaxes(Hs, -1, -2))
    return W, G, Hs


def _callable_grad(pot: Potential, P: np.ndarray) -> np.ndarray:
    if pot.grad_fn is not None:
        return np.asarray(pot.grad_fn(P), dtype=float)
    return np.stack([(pot.value_fn(P + FD_STEP * e) - pot.value_fn(P - FD_STEP * e)) / (2 * FD_STEP)
                     for e in np.eye(2)], axis=-1)


_KINDS = {
    "quadratic-one-well": _quadratic,
    "radial-power": _radial_power,
    "radial-analytic-one-well": _radial_analytic,
    "separable-double-well": _separable,
    "general-callable": _callable,
}


def evaluate_many(pot: Potential, P) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """W, grad W, Hess W at points of shape (..., 2)."""
    P = _as_points(P)
    return _KINDS[pot.kind](pot, P)


def evaluate(pot: Potential, p) -> Tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of W at a single point."""
    W, G, Hs = evaluate_many(pot, np.asarray(p, dtype=float).reshape(1, 2))
    return float(W[0]), G[0], Hs[0]


def value(pot: Potential, P) -> np.ndarray:
    return evaluate_many(pot, P)[0]


def gradient(pot: Potential, P) -> np.ndarray:
    return evaluate_many(pot, P)[1]


def hessian(pot: Potential, P) -> np.ndarray:
    return evaluate_many(pot, P)[2]


def conformal_factor(pot: Potential, P) -> np.ndarray:
    """F = sqrt(W), clipped at zero against round-off."""
    return np.sqrt(np.maximum(value(pot, P), 0.0))


# --- wells ------------------------------------------------------------------------------

def _validity_radius(pot: Potential) -> float:
    if pot.kind == "quadratic-one-well":
        return math.inf
    if pot.kind == "radial-analytic-one-well":
        return float(pot.params.get("radius", 1.0))
    if pot.kind == "separable-double-well":
        return 0.5 if pot.params.get("profile", "piecewise") == "piecewise" else 0.25
    if pot.kind == "general-callable":
        if "rho" in pot.params:
            return float(pot.params["rho"])
        if pot.is_double_well:
            a, b = pot.well_array()
            return 0.25 * float(np.linalg.norm(a - b))
        return 1.0
    return 0.0


def well_data(pot: Potential, which: int = 0, tol: float = 1e-10) -> WellData:
    """Eigen-decomposition of Hess(W)/2 at a well, ordered lambda1^2 <= lambda2^2."""
    if not -len(pot.wells) <= which < len(pot.wells):
        raise IndexError(f"well index {which} out of range")
    center = pot.wells[which]
    _, _, Hs = evaluate(pot, center)
    vals, vecs = np.linalg.eigh(0.5 * Hs)
    if vals[0] < tol * max(1.0, abs(vals[1])):
        raise DegeneracyError(
            f"Hessian of W at well {tuple(center)} is degenerate (min eigenvalue {2 * vals[0]:.3e})")
    v1 = vecs[:, 0]
    lead = 0 if abs(v1[0]) > 1e-12 else 1
    if v1[lead] < 0:
        v1 = -v1
    v2 = np.array([-v1[1], v1[0]])
    return WellData(
        center=(float(center[0]), float(center[1])),
        lambda1_sq=float(vals[0]),
        lambda2_sq=float(vals[1]),
        v1=(float(v1[0]), float(v1[1])),
        v2=(float(v2[0]), float(v2[1])),
        rho=_validity_radius(pot),
    )


def quadratic_from_well(well: WellData) -> Potential:
    """Exact quadratic potential with the given well data."""
    Q = well.basis
    H = Q @ np.diag([well.lambda1_sq, well.lambda2_sq]) @ Q.T
    H = 0.5 * (H + H.T)
    return Potential(kind="quadratic-one-well", wells=[well.center], params={"hessian": H.tolist()})


def separable_example(profile: str = "piecewise", transverse: float = 1.0) -> Potential:
    return Potential(kind="separable-double-well", wells=[(-1.0, 0.0), (1.0, 0.0)],
                     params={"profile": profile, "transverse": transverse})


# --- configuration ------------------------------------------------------------------------

_CONFIG_KEYS = {"kind", "wells", "params"}


def from_config(config: Dict[str, Any]) -> Potential:
    """Potential from the JSON schema {"kind": ..., "wells": [[x, y], ...], "params": {...}}."""
    if not isinstance(config, dict):
        raise ConfigError("potential config must be a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown potential keys: {sorted(unknown)}")
    if config.get("kind") == "general-callable":
        raise ConfigError("general-callable potentials are built in code, not from JSON")
    data = dict(config)
    if data.get("kind") == "separable-double-well" and "wells" not in data:
        data["wells"] = [[-1.0, 0.0], [1.0, 0.0]]
    try:
        wells = [tuple(float(c) for c in w) for w in data.get("wells", [])]
        return Potential(kind=data.get("kind"), wells=wells, params=data.get("params", {}))
    except (ValidationError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid potential config: {exc}") from exc


def load_potential(path: Union[str, Path]) -> Potential:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"potential config not found: {path}")
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_config(config)


def radial_to_series(pot: Potential) -> Dict[int, list]:
    """
    Taylor terms of degree >= 3 of a radial-analytic W as coefficient lists per degree
    (entry i multiplies p1^(n-i) p2^i), using r^(2m) = (p1^2 + p2^2)^m.
    """
    if pot.kind != "radial-analytic-one-well":
        raise ValueError("radial_to_series needs a radial-analytic-one-well potential")
    out: Dict[int, list] = {}
    for k, a in enumerate(pot.params["coeffs"], start=1):
        a = float(a)
        if a == 0.0:
            continue
        if k % 2:
            raise DomainError(f"r^{k + 2} is not a polynomial; odd radial terms have no Taylor expansion")
        m = (k + 2) // 2
        coeffs = [0.0] * (2 * m + 1)
        for i in range(m + 1):
            coeffs[2 * i] = a * math.comb(m, i)
        out[k + 2] = coeffs
    return out
