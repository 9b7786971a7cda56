# src/hardyprobe/logging_utils.py

import logging
from datetime import datetime

from rich.console import Console
from rich.logging import RichHandler
from rich.text import Text

console = Console(stderr=True)


def setup_logging(verbose: bool = False):
    """Routes library logging through rich; DEBUG with --verbose, WARNING otherwise."""
    level = logging.DEBUG if verbose else logging.WARNING
    root = logging.getLogger("hardyprobe")
    root.handlers.clear()
    root.addHandler(RichHandler(console=console, show_path=False, rich_tracebacks=verbose))
    root.setLevel(level)
    root.propagate = False


class ProbeLogger:
    """Per-item result lines: timestamp, tag, item name and verdict."""

    def __init__(self, item_name: str):
        self.item_name = item_name

    def _line(self, tag: str, style: str, message: str, message_style: str = "") -> Text:
        text = Text()
        text.append(f"{datetime.now():%H:%M:%S} ", style="dim")
        text.append(f"{tag} ", style=style)
        text.append(message, style=message_style)
        return text

    def warning(self, message: str):
        console.print(self._line("WARN", "bold yellow", message, "yellow"))

    def error(self, message: str, exc_info: bool = False):
        console.print(self._line("ERROR", "bold red", message, "red"))
        if exc_info:
            console.print_exception(show_locals=False)

    def complete(self, verdict: str, ok: bool, elapsed: float = 0.0):
        style = "bold green" if ok else "bold red"
        text = self._line("OK" if ok else "FAIL", style, f"{self.item_name} ", "bold")
        text.append(f"{verdict} ", style=style)
        text.append(f"[{elapsed:.2f}s]", style="dim")
        console.print(text)


def print_header(command: str):
    console.print()
    console.print("[bold cyan]hardyprobe[/bold cyan]", justify="left")
    console.print(f"   {command} starting...", style="dim")
    console.print()


def print_summary(total: int, failed: int, total_time: float):
    console.print()
    console.print("─" * 80, style="dim")
    text = Text()
    if failed:
        text.append(f"{failed} of {total} failed ", style="bold red")
    else:
        text.append("Completed successfully! ", style="bold green")
        text.append(f"Ran {total} item(s) ", style="white")
    text.append(f"in {total_time:.2f}s", style="dim")
    console.print(text)
    console.print()
