from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline

from core.errors import DegeneracyError, EmptyCurveError
from app.curves.models import ParamTag, SampledCurve
from app.potentials.models import Potential
from app.potentials.potential import conformal_factor, value

MAX_SWEEPS = 40


def _dedupe(points: np.ndarray) -> np.ndarray:
    keep = np.ones(len(points), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(points, axis=0), axis=1) > 0.0
    return points[keep]


def _interpolant(points: np.ndarray, method: str):
    """Chord-length parameter and an interpolant through the nodes; "linear" stays on the polyline."""
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    if method == "spline" and len(points) >= 4:
        return s, CubicSpline(s, points, axis=0)
    return s, make_interp_spline(s, points, k=1, axis=0)


def _equalize(spline, s_end: float, n: int, measure) -> np.ndarray:
    """Spline parameters of n nodes whose consecutive `measure` increments are equal."""
    s = np.linspace(0.0, s_end, n)
    for _ in range(MAX_SWEEPS):
        pts = spline(s)
        seg = measure(pts)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        target = np.linspace(0.0, cum[-1], n)
        spread = np.max(np.abs(seg / seg.mean() - 1.0))
        if spread < 1e-12:
            break
        s = np.interp(target, cum, s)
        s[0], s[-1] = 0.0, s_end
    return s


def reparam(curve: SampledCurve, target: ParamTag, n: Optional[int] = None,
            pot: Optional[Potential] = None, method: str = "linear") -> SampledCurve:
    """
    Resample the curve with n nodes.

    method="linear" places the new nodes on the input polyline, so E and P change only by the corner cuts;
    method="spline" runs through a cubic spline of the nodes instead and may overshoot between them.

    constant-speed          equal chord lengths
    degenerate-arclength    equal F(mid)|chord|; params hold the cumulative degenerate length
    uniform-t               nodes uniform in the existing parameter (or index)
    """
    if method not in ("linear", "spline"):
        raise ValueError(f"unknown reparam method {method!r}")
    n = n or len(curve)
    points = _dedupe(np.asarray(curve.points))
    if len(points) < 2:
        raise EmptyCurveError("cannot reparametrize a constant curve")

    if target == "uniform-t":
        t = curve.params if curve.params is not None else np.linspace(0.0, 1.0, len(curve))
        t = t[np.concatenate([[True], np.linalg.norm(np.diff(curve.points, axis=0), axis=1) > 0.0])]
        interp = CubicSpline(t, points, axis=0) if method == "spline" and len(t) >= 4 else \
            make_interp_spline(t, points, k=1, axis=0)
        tn = np.linspace(t[0], t[-1], n)
        return SampledCurve(points=interp(tn), param="uniform-t", closed=curve.closed, params=tn)

    s, spline = _interpolant(points, method)

    if target == "constant-speed":
        measure = lambda pts: np.linalg.norm(np.diff(pts, axis=0), axis=1)
        sn = _equalize(spline, s[-1], n, measure)
        pts = spline(sn)
        pts[0], pts[-1] = points[0], points[-1]
        chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        return SampledCurve(points=pts, param="constant-speed", closed=curve.closed,
                            params=np.concatenate([[0.0], np.cumsum(chord)]))

    if pot is None:
        raise ValueError("degenerate-arclength reparametrization needs the potential")
    interior = value(pot, points[1:-1])
    if interior.size and np.min(interior) <= 0.0:
        k = int(np.argmin(interior)) + 1
        raise DegeneracyError(f"W vanishes at interior node {k} {tuple(points[k])}")
    measure = lambda pts: conformal_factor(pot, 0.5 * (pts[1:] + pts[:-1])) * \
        np.linalg.norm(np.diff(pts, axis=0), axis=1)
    sn = _equalize(spline, s[-1], n, measure)
    pts = spline(sn)
    pts[0], pts[-1] = points[0], points[-1]
    ell = np.concatenate([[0.0], np.cumsum(measure(pts))])
    return SampledCurve(points=pts, param="degenerate-arclength", closed=curve.closed, params=ell)
