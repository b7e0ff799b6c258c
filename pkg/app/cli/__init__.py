from app.cli.config import RunConfig, build_config, load_config, parse_point, parse_range
from app.cli.plotdata import artifact_kind, emit_plotdata
from app.cli.runner import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, run
from app.cli.main import build_parser, main
