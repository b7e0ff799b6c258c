import asyncio
import time
from typing import Any, Dict, List, Optional, TypedDict

from langgraph.graph import END, StateGraph

from core.config import get_settings, thread_cap
from core.lib.logger import RunLogger
from app.curves.functionals import energy, momentum
from app.potentials.models import Potential
from app.twowell.models import MinimizerOptions, MinimizerResult
from app.twowell.solver import TwoWellSolver, make_problem
from app.wave.models import SecondVariationReport, TravelingWaveProfile
from app.wave.profile import ode_residual, to_profile
from app.wave.second_variation import second_variation_spectrum
from app.wave.speed import estimate_speed, nu_from_multiplier

STANDING_SPEED = 1e-3


class PipelineState(TypedDict, total=False):
    A0: float
    minimizer: MinimizerResult
    profile: TravelingWaveProfile
    nu: float
    speed_residual: float
    relative_ode_residual: float
    second_variation: Optional[SecondVariationReport]
    summary: Dict[str, Any]


class WavePipelineGraph:
    """minimize -> profile -> speed -> (second variation for standing waves) -> summarize."""

    def __init__(self, pot: Potential, n: Optional[int] = None, opts: Optional[MinimizerOptions] = None,
                 threads: Optional[int] = None, logger: Optional[RunLogger] = None, spectrum_points: int = 2000):
        self.pot = pot
        self.n = n or get_settings().twowell_nodes
        self.opts = opts or MinimizerOptions()
        self.threads = thread_cap(threads)
        self.logger = logger or RunLogger(enabled=False)
        self.spectrum_points = spectrum_points

        workflow = StateGraph(PipelineState)
        workflow.add_node("minimize", self.node_minimize)
        workflow.add_node("profile", self.node_profile)
        workflow.add_node("speed", self.node_speed)
        workflow.add_node("second_variation", self.node_second_variation)
        workflow.add_node("summarize", self.node_summarize)

        workflow.set_entry_point("minimize")
        workflow.add_edge("minimize", "profile")
        workflow.add_edge("profile", "speed")
        workflow.add_conditional_edges(
            "speed",
            self.is_standing,
            {
                "yes": "second_variation",
                "no": "summarize",
            },
        )
        workflow.add_edge("second_variation", "summarize")
        workflow.add_edge("summarize", END)

        self.app = workflow.compile()

    async def node_minimize(self, state: PipelineState):
        started = time.perf_counter()
        problem = make_problem(self.pot, state["A0"], self.n, self.opts)
        result = await TwoWellSolver(problem, self.threads).solve()
        self.logger.log_stage("minimize", {"A0": state["A0"], "E": result.energy, "P": result.momentum,
                                           "mu": result.multiplier, "kkt": result.kkt_residual,
                                           "start": result.start_label, "bubbles": result.bubble_count},
                              time.perf_counter() - started)
        return {"minimizer": result}

    async def node_profile(self, state: PipelineState):
        result = state["minimizer"]
        nu0 = nu_from_multiplier(result.multiplier)
        profile = await asyncio.to_thread(to_profile, result.curve, self.pot, nu0)
        self.logger.log_stage("profile", {"nodes": len(profile), "H": profile.H_value,
                                          "equipartition": profile.equipartition_residual})
        return {"profile": profile}

    async def node_speed(self, state: PipelineState):
        nu, res = estimate_speed(state["profile"], self.pot)
        rel = ode_residual(state["profile"], self.pot, nu)[1]
        self.logger.log_stage("speed", {"nu": nu, "residual": res, "relative": rel})
        return {"nu": nu, "speed_residual": res, "relative_ode_residual": rel}

    async def node_second_variation(self, state: PipelineState):
        started = time.perf_counter()
        report = await asyncio.to_thread(second_variation_spectrum, state["profile"], self.pot, self.spectrum_points)
        self.logger.log_stage("second variation", {"zero": report.zero_eigenvalue, "corr": report.zero_correlation,
                                                   "next": report.next_eigenvalue},
                              time.perf_counter() - started)
        return {"second_variation": report}

    async def node_summarize(self, state: PipelineState):
        result = state["minimizer"]
        profile = state["profile"]
        E = energy(result.curve, self.pot)
        summary = {
            "A0": state["A0"],
            "energy": E,
            "momentum": momentum(result.curve),
            "multiplier": result.multiplier,
            "kkt_residual": result.kkt_residual,
            "converged": result.converged,
            "bubble_count": result.bubble_count,
            "H": profile.H_value,
            "H_over_sqrt2E": profile.H_value / (2.0**0.5 * E) if E > 0 else None,
            "nu": state["nu"],
            "nu_from_multiplier": nu_from_multiplier(result.multiplier),
            "speed_residual": state["speed_residual"],
            "relative_ode_residual": state["relative_ode_residual"],
        }
        sv = state.get("second_variation")
        if sv is not None:
            summary["zero_eigenvalue"] = sv.zero_eigenvalue
            summary["zero_correlation"] = sv.zero_correlation
            summary["lam"] = sv.lam
            summary["next_eigenvalue"] = sv.next_eigenvalue
        return {"summary": summary}

    def is_standing(self, state: PipelineState):
        return "yes" if abs(state["nu"]) <= STANDING_SPEED else "no"

    async def run(self, A0: float) -> PipelineState:
        return await self.app.ainvoke({"A0": A0, "second_variation": None})

    async def run_sweep(self, areas: List[float]) -> List[Dict[str, Any]]:
        semaphore = asyncio.Semaphore(self.threads)

        async def one(A0: float):
            async with semaphore:
                return (await self.run(A0))["summary"]

        return list(await asyncio.gather(*(one(a) for a in areas)))
