from .run_logger import RunLogger
from .stage_logger import StageLogger
