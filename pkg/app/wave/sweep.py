import asyncio
from typing import Iterable, Optional

import pandas as pd

from app.potentials.models import Potential


def a_nu_sweep(pot: Potential, areas: Iterable[float], n: Optional[int] = None,
               threads: Optional[int] = None) -> pd.DataFrame:
    """Empirical A -> nu table; each area runs the full minimize/profile/speed pipeline concurrently."""
    from app.pipeline.graph_flow import WavePipelineGraph

    graph = WavePipelineGraph(pot, n=n, threads=threads)
    rows = asyncio.run(graph.run_sweep(list(areas)))
    return pd.DataFrame(rows)
