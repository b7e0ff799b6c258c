"""
Multi-start driver for the two-well problem.

Each start runs in a worker thread. Among the starts that meet the constraint the converged ones rank first,
then the lowest energy, ties going to the lower start index.
"""

import asyncio
from typing import List, Optional, Tuple

import numpy as np

from core.config import thread_cap
from core.errors import IsoflowError
from core.lib.logger import StageLogger
from app.curves.functionals import energy, momentum
from app.curves.geometry import concatenate, segment
from app.curves.models import SampledCurve
from app.curves.reparam import reparam
from app.onewell.linear_flow import beta_from_multiplier
from app.onewell.solver import isoperimetric
from app.potentials.hypotheses import check_hypotheses
from app.potentials.models import Potential
from app.potentials.potential import well_data
from app.series.linear_op import lambda_matrix
from app.twowell.bubbles import bubble_semicircle, detect_bubbles
from app.twowell.minimizer import ALState, AreaConstrainedMinimizer
from app.twowell.models import MinimizerOptions, MinimizerResult, StartOutcome, TwoWellProblem

COMPOSITE_NODES = 4000


def make_problem(pot: Potential, A0: float, n: int = 801, opts: Optional[MinimizerOptions] = None,
                 hypotheses: bool = True) -> TwoWellProblem:
    problem = TwoWellProblem(pot=pot, A0=A0, n=n, opts=opts or MinimizerOptions())
    if not hypotheses:
        return problem
    return problem.model_copy(update={"hypotheses": check_hypotheses(pot)})


def axis_heteroclinic(pot: Potential, n: int = 801) -> SampledCurve:
    """Straight segment from p- to p+; P = 0 when both wells lie on the p1-axis."""
    return segment(pot.wells[0], pot.wells[1], n)


def _resample(curve: SampledCurve, n: int) -> SampledCurve:
    return reparam(curve, "constant-speed", n)


def _bubble_start(problem: TwoWellProblem) -> Optional[SampledCurve]:
    axis = axis_heteroclinic(problem.pot, 2)
    eps = problem.A0 - momentum(axis)
    if eps == 0.0:
        return None
    bubble = bubble_semicircle(problem.p_minus, eps)
    return _resample(concatenate([bubble, axis_heteroclinic(problem.pot, 256)]), problem.n)


def _composite_start(problem: TwoWellProblem) -> Optional[SampledCurve]:
    """Straight to the midpoint, then the one-well minimizer of the quadratic model at p+."""
    a, b = problem.pot.well_array()
    mid = 0.5 * (a + b)
    first = segment(a, mid, 64)
    try:
        well = well_data(problem.pot, 1)
        sol = isoperimetric(well, mid, problem.A0 - momentum(first), COMPOSITE_NODES)
    except IsoflowError:
        return None
    pts = np.array(sol.curve.points)
    pts[0], pts[-1] = mid, b
    return _resample(concatenate([first, SampledCurve(points=pts)]), problem.n)


def _jitter_starts(problem: TwoWellProblem) -> List[SampledCurve]:
    rng = np.random.default_rng(problem.opts.seed)
    base = axis_heteroclinic(problem.pot, problem.n).points
    tau = np.linspace(0.0, 1.0, problem.n)
    out = []
    for _ in range(problem.opts.jitter_starts):
        k = np.arange(1, 4)
        coeffs = rng.normal(size=(3, 2)) * problem.opts.jitter_amplitude
        out.append(SampledCurve(points=base + np.sin(np.pi * np.outer(tau, k)) @ coeffs))
    return out


def build_starts(problem: TwoWellProblem, init: Optional[SampledCurve] = None) -> List[Tuple[str, SampledCurve]]:
    starts: List[Tuple[str, SampledCurve]] = []
    if init is not None:
        a, b = problem.pot.well_array()
        if not (np.allclose(init.start, a, atol=1e-9) and np.allclose(init.end, b, atol=1e-9)):
            raise ValueError("init must run from p- to p+")
        starts.append(("init", _resample(init, problem.n) if len(init) != problem.n else init))
    starts.append(("straight", axis_heteroclinic(problem.pot, problem.n)))
    for label, build in (("bubble", _bubble_start), ("composite", _composite_start)):
        curve = build(problem)
        if curve is not None:
            starts.append((label, curve))
    starts.extend((f"jitter-{i}", c) for i, c in enumerate(_jitter_starts(problem)))
    return starts


class TwoWellSolver:
    """Runs every start concurrently (bounded by ISOFLOW_THREADS) and reduces to the best."""

    def __init__(self, problem: TwoWellProblem, threads: Optional[int] = None, verbose: bool = False):
        self.problem = problem
        self.threads = thread_cap(threads)
        self.verbose = verbose

    def _run_start(self, index: int, label: str, init: SampledCurve) -> ALState:
        logger = StageLogger(enabled=self.verbose, name=f"twowell[{index}]")
        return AreaConstrainedMinimizer(self.problem.pot, self.problem.A0, self.problem.opts, logger).run(init, label)

    async def solve(self, init: Optional[SampledCurve] = None) -> MinimizerResult:
        starts = build_starts(self.problem, init)
        semaphore = asyncio.Semaphore(self.threads)

        async def bounded(i: int, label: str, curve: SampledCurve) -> ALState:
            async with semaphore:
                return await asyncio.to_thread(self._run_start, i, label, curve)

        states = await asyncio.gather(*(bounded(i, label, c) for i, (label, c) in enumerate(starts)))
        return self._reduce(starts, states)

    def _reduce(self, starts, states: List[ALState]) -> MinimizerResult:
        """
        Feasible starts (|P - A0| within the constraint tolerance) rank first, converged before not converged,
        then by energy and index. Without a feasible start the least violating one is returned, not converged.
        """
        pot = self.problem.pot
        outcomes = []
        for i, ((label, _), st) in enumerate(zip(starts, states)):
            curve = SampledCurve(points=st.points)
            outcomes.append(StartOutcome(index=i, label=label, energy=energy(curve, pot), momentum=momentum(curve),
                                         kkt_residual=st.kkt_residual, converged=st.converged))
        tol = self.problem.opts.constraint_tolerance
        feasible = [o for o in outcomes if abs(o.momentum - self.problem.A0) <= tol]
        if feasible:
            best = min(feasible, key=lambda o: (not o.converged, o.energy, o.index))
        else:
            best = min(outcomes, key=lambda o: (abs(o.momentum - self.problem.A0), o.index))
            StageLogger(enabled=self.verbose, name="twowell").log_note(
                f"no start meets |P - A0| <= {tol:g}; keeping start {best.index} ({best.label})")
        state = states[best.index]
        curve = SampledCurve(points=state.points, param="uniform-t")
        return MinimizerResult(
            curve=curve,
            energy=best.energy,
            momentum=best.momentum,
            kkt_residual=state.kkt_residual,
            bubble_count=detect_bubbles(curve, pot.wells, self.problem.ball_radius),
            multiplier=state.multiplier,
            converged=state.converged and bool(feasible),
            rounds=state.rounds,
            start_index=best.index,
            start_label=best.label,
            starts=outcomes,
        )


async def aminimize(problem: TwoWellProblem, init: Optional[SampledCurve] = None,
                    threads: Optional[int] = None, verbose: bool = False) -> MinimizerResult:
    return await TwoWellSolver(problem, threads, verbose).solve(init)


def minimize(problem: TwoWellProblem, init: Optional[SampledCurve] = None,
             threads: Optional[int] = None, verbose: bool = False) -> MinimizerResult:
    return asyncio.run(aminimize(problem, init, threads, verbose))


def direction_field_error(result: MinimizerResult, pot: Potential, r_min: float, r_max: float) -> float:
    """
    Largest angle between the minimizer's chords and the one-well field Lambda_beta p inside the annuli
    r_min <= |x - p_w| <= r_max. beta follows from the multiplier; leaving p- flips its sign.
    """
    pts = result.curve.points
    mid = 0.5 * (pts[1:] + pts[:-1])
    chords = np.diff(pts, axis=0)
    worst = 0.0
    for which, sign in ((1, 1.0), (0, -1.0)):
        well = well_data(pot, which)
        beta = beta_from_multiplier(sign * result.multiplier, well.lambda1, well.lambda2)
        Lam = lambda_matrix(well.lambda1, well.lambda2, beta)
        dist = np.linalg.norm(mid - np.asarray(well.center), axis=1)
        mask = (dist >= r_min) & (dist <= r_max)
        if not np.any(mask):
            continue
        field = well.to_local(mid[mask]) @ Lam.T @ well.basis.T
        tangent = sign * chords[mask]
        cos = np.sum(field * tangent, axis=1) / (np.linalg.norm(field, axis=1) * np.linalg.norm(tangent, axis=1))
        worst = max(worst, float(np.max(np.arccos(np.clip(cos, -1.0, 1.0)))))
    return worst
