import sys
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from hardyprobe.templates.registry import Template, by_category, get_template

console = Console()
template_app = typer.Typer(help="Generate example experiment configs")


def _lookup(name: str) -> Template:
    try:
        return get_template(name)
    except KeyError:
        console.print(f"[red]Error: Template '{name}' not found[/red]")
        console.print("Run `hardyprobe template list` to see available templates")
        raise typer.Exit(code=1)


def _entries(template: Template) -> str:
    config = template.config()
    parts = []
    if config.problems:
        parts.append(f"{len(config.problems)} problem(s)")
    if config.suite is not None:
        parts.append(f"suite of {config.suite.count}")
    if config.inequalities:
        parts.append(f"{len(config.inequalities)} inequalit{'y' if len(config.inequalities) == 1 else 'ies'}")
    return ", ".join(parts)


# ======================================================================================
# COMMAND: list
# ======================================================================================
@template_app.command("list")
def list_templates():
    """List the bundled experiments grouped by category."""
    console.print("[bold]AVAILABLE TEMPLATES[/bold]")
    for title, members in by_category():
        table = Table(title=title, show_header=True, header_style="bold")
        table.add_column("Template Name", style="cyan", no_wrap=True)
        table.add_column("Command", style="green")
        table.add_column("Entries", style="magenta")
        table.add_column("Description", style="white")
        for t in members:
            table.add_row(t.name, t.command, _entries(t), t.description)
        console.print()
        console.print(table)

    console.print("\nTip: Run `hardyprobe template info <name>` for details")


# ======================================================================================
# COMMAND: info
# ======================================================================================
@template_app.command("info")
def template_info(name: str = typer.Argument(..., help="Template name to inspect")):
    """Show what a template sets up and how to run it."""
    t = _lookup(name)
    config = t.config()

    console.print(f"\n[bold]TEMPLATE:[/bold] {name}")
    console.print("─" * 50)
    console.print(f"Description: {t.description}")
    console.print(f"Command: {t.command}")

    console.print("\n[bold]CAPABILITIES[/bold]")
    for cap in t.capabilities:
        console.print(f"• {cap}")

    console.print("\n[bold]KEY SETTINGS[/bold]")
    for setting in t.settings:
        console.print(f"• {setting}")

    console.print("\n[bold]ENTRIES[/bold]")
    for cfg in config.problems:
        console.print(f"• {config.build_problem(cfg).label}")
    for cfg in config.inequalities:
        console.print(f"• {config.build_spec(cfg).label}")
    if config.suite is not None:
        console.print(f"• {config.suite.count} seeded problems")
    if config.sweep is not None:
        s = config.sweep
        console.print(f"• sweep {s.axis} over [{s.start}, {s.stop}] with {s.count} values")

    console.print(
        f"\nQuick start: `hardyprobe template generate {name} -o experiment.yml` "
        f"then run `{t.run_line()}`"
    )


# ======================================================================================
# COMMAND: generate
# ======================================================================================
@template_app.command("generate")
def generate(
    name: str = typer.Argument(..., help="Template name to output"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write here instead of stdout"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Replace the template's seed"),
):
    """Print a template's YAML, or write it to a file."""
    t = _lookup(name)
    text = t.text(seed)

    if output is None:
        sys.stdout.write(text)
        return
    if output.exists():
        console.print(f"[red]Error: {output} already exists[/red]")
        raise typer.Exit(code=1)
    try:
        output.write_text(text, encoding="utf-8")
    except OSError as e:
        console.print(f"[red]Error: could not write {output}: {e}[/red]")
        raise typer.Exit(code=1)
    console.print(f"[green]Wrote {output}[/green]; run `{t.run_line(str(output))}`")


# ======================================================================================
# REGISTER WITH MAIN APP
# ======================================================================================
from hardyprobe.cli import app  # noqa: E402

app.add_typer(template_app, name="template")
