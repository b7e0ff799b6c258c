from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table


@dataclass
class StageRecord:
    name: str
    values: Dict[str, Any]
    stage_number: int
    elapsed: Optional[float] = None


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)) and value and all(isinstance(v, float) for v in value):
        return "(" + ", ".join(f"{v:.6g}" for v in value) + ")"
    return str(value)


class RunLogger:
    """Rich console log of a run: header, one table per stage, closing report panel."""

    def __init__(self, enabled: bool = True, console: Optional[Console] = None):
        self.enabled = enabled
        self.console = console or Console(stderr=True)
        self.stages: List[StageRecord] = []
        self.stage_count = 0

    def log_run_start(self, command: str, params: Dict[str, Any]) -> None:
        if not self.enabled:
            return
        table = Table(box=box.SIMPLE, show_header=False)
        for key, value in params.items():
            table.add_row(f"[bold cyan]{key}[/bold cyan]", _fmt(value))
        self.console.print(Panel(table, title=f"[bold green]isoflow {command}[/bold green]",
                                 border_style="green", box=box.ROUNDED))

    def log_stage(self, name: str, values: Dict[str, Any], elapsed: Optional[float] = None) -> None:
        self.stage_count += 1
        record = StageRecord(name=name, values=dict(values), stage_number=self.stage_count, elapsed=elapsed)
        self.stages.append(record)
        self.display_last()

    def display_last(self) -> None:
        if not self.enabled or not self.stages:
            return
        self._display_stage(self.stages[-1])

    def _display_stage(self, record: StageRecord) -> None:
        title = f"[bold blue][{record.stage_number}] {record.name}[/bold blue]"
        if record.elapsed is not None:
            title += f" [dim]({record.elapsed:.2f}s)[/dim]"
        table = Table(box=box.MINIMAL, show_header=False)
        for key, value in record.values.items():
            table.add_row(key, _fmt(value))
        self.console.print(Panel(table, title=title, border_style="blue", box=box.ROUNDED))

    def log_warning(self, message: str) -> None:
        if not self.enabled:
            return
        self.console.print(f"[bold yellow]warning:[/bold yellow] {message}")

    def log_final(self, status: str, artifacts: List[str]) -> None:
        if not self.enabled:
            return
        self.console.print(Rule(style="dim"))
        style = "green" if status == "ok" else "red"
        body = "\n".join(artifacts) if artifacts else "(no artifacts)"
        self.console.print(Panel(body, title=f"[bold {style}]{status}[/bold {style}]",
                                 border_style=style, box=box.ROUNDED))
