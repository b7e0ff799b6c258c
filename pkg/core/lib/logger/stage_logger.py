"""
ANSI step logger for iterative solvers (outer rounds of the augmented Lagrangian, sweeps).
"""

import sys
from datetime import datetime
from typing import Optional


class StageLogger:

    COLORS = {
        'RESET': '\033[0m',
        'BOLD': '\033[1m',
        'DIM': '\033[2m',
        'RED': '\033[31m',
        'GREEN': '\033[32m',
        'YELLOW': '\033[33m',
        'BLUE': '\033[34m',
        'CYAN': '\033[36m',
    }

    def __init__(self, enabled: bool = True, name: str = "isoflow"):
        self.enabled = enabled
        self.name = name
        self.step = 0
        self.started_at: Optional[datetime] = None

    def _colorize(self, text: str, color: str) -> str:
        if not self.enabled:
            return text
        return f"{self.COLORS[color]}{text}{self.COLORS['RESET']}"

    def _emit(self, line: str) -> None:
        print(line, file=sys.stderr)

    def log_start(self, label: str) -> None:
        if not self.enabled:
            return
        self.step = 0
        self.started_at = datetime.now()
        self._emit(self._colorize("=" * 72, "GREEN"))
        self._emit(self._colorize(f"{self.name}: {label}", "BOLD") + self._colorize(
            " | " + self.started_at.strftime("%H:%M:%S"), "DIM"))

    def log_round(self, **values: float) -> None:
        """One line per outer iteration; keys are printed in call order."""
        if not self.enabled:
            return
        self.step += 1
        parts = [f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}" for k, v in values.items()]
        self._emit(f"  {self._colorize(f'[{self.step:02d}]', 'CYAN')} " + "  ".join(parts))

    def log_done(self, converged: bool, message: str = "") -> None:
        if not self.enabled:
            return
        color = "GREEN" if converged else "YELLOW"
        status = "converged" if converged else "not converged"
        self._emit(f"  {self._colorize(status, color)} {message}".rstrip())

    def log_note(self, message: str) -> None:
        if not self.enabled:
            return
        self._emit(f"  {self._colorize('note', 'YELLOW')} {message}")
