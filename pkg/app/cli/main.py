import argparse
import sys
from typing import Any, Dict, Iterable, List, Optional

from core.errors import ConfigError
from app.cli.config import RunConfig, build_config, load_config, parse_point, parse_range
from app.cli.runner import EXIT_CONFIG, report_error, run

# flag dest -> params key; values not given on the command line fall back to the parameter model
PARAM_FLAGS = {
    "lambda1", "lambda2", "p0", "area", "nodes", "certificate", "degree", "sweep", "jitter", "max_rounds",
    "curve", "nu", "delta", "spectrum_points", "check", "coeffs", "lam", "beta", "radius", "q", "jmax",
    "points_per_circle", "inputs", "outdir",
}
COMMON_FLAGS = {"potential", "out", "report", "seed", "threads", "tolerance"}


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _common(p: argparse.ArgumentParser, potential: bool = True) -> None:
    if potential:
        p.add_argument("--potential", help="potential JSON file")
    p.add_argument("--out", help="main artifact path")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="overrides ISOFLOW_THREADS")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--quiet", action="store_true", help="no console progress")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoflow", argument_default=argparse.SUPPRESS,
                                     description="Area-constrained geodesics and traveling waves")
    parser.add_argument("--config", help="run config JSON (replaces all other flags)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("onewell", argument_default=argparse.SUPPRESS, help="one-well isoperimetric curve")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--p0", type=str)
    p.add_argument("--area", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--certificate", type=int, help="number of perturbed competitors to certify against")
    p.add_argument("--degree", type=int)
    _common(p)

    p = sub.add_parser("twowell", argument_default=argparse.SUPPRESS, help="two-well constrained minimizer")
    p.add_argument("--area", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--sweep", type=str, help="areas start:step:end for the A -> nu table")
    p.add_argument("--jitter", type=int)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    _common(p)

    p = sub.add_parser("wave", argument_default=argparse.SUPPRESS, help="traveling-wave profile of a curve")
    p.add_argument("--curve")
    p.add_argument("--nu", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--spectrum-points", dest="spectrum_points", type=int)
    _common(p)

    p = sub.add_parser("spectrum", argument_default=argparse.SUPPRESS, help="speed regimes at a quadratic well")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--nu", type=str, help="value or start:step:end")
    p.add_argument("--check", action="store_true")
    _common(p, potential=False)

    p = sub.add_parser("series", argument_default=argparse.SUPPRESS, help="g_beta coefficient table")
    p.add_argument("--coeffs", type=str, help="a1,a2,... of a radial W")
    p.add_argument("--lam", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--radius", type=float)
    _common(p)

    p = sub.add_parser("nonexist", argument_default=argparse.SUPPRESS, help="minimizing sequence without a limit")
    p.add_argument("--q", type=float)
    p.add_argument("--area", type=float)
    p.add_argument("--jmax", type=int)
    p.add_argument("--points-per-circle", dest="points_per_circle", type=int)
    _common(p, potential=False)

    p = sub.add_parser("plotdata", argument_default=argparse.SUPPRESS, help="plot-ready CSVs from artifacts")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--outdir", required=True)
    _common(p, potential=False)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    if "config" in values:
        return load_config(values["config"])
    if "command" not in values or values["command"] is None:
        raise ConfigError("a subcommand is required")

    params: Dict[str, Any] = {k: v for k, v in values.items() if k in PARAM_FLAGS}
    if "p0" in params:
        params["p0"] = parse_point(params["p0"])
    if "nu" in params and values["command"] == "spectrum":
        params["nu"] = parse_range(params["nu"])
    if "sweep" in params:
        params["sweep"] = parse_range(params["sweep"])
    if "coeffs" in params:
        params["coeffs"] = _floats(params["coeffs"])

    data: Dict[str, Any] = {"command": values["command"], "params": params}
    data.update({k: v for k, v in values.items() if k in COMMON_FLAGS})
    if values.get("quiet"):
        data["verbose"] = False
    return build_config(data)


def main(argv: Optional[Iterable[str]] = None) -> int:
    args = build_parser().parse_args(None if argv is None else list(argv))
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        report_error(None, exc)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
