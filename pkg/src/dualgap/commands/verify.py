"""Verify command - run the invariant and acceptance checks."""
import json
from pathlib import Path
from typing import Optional

import typer
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from dualgap.console import console
from dualgap.errors import ConfigError
from dualgap.harness import EXIT_CONFIG, EXIT_FAILURE, selected_tags, verify_suite


def verify(
    filter_: str = typer.Option("all", "--filter", "-f", help="Comma-separated check tags, or 'all'"),
    report: Optional[Path] = typer.Option(None, "--report", "-r", help="Write the JSON report here"),
    threads: Optional[int] = typer.Option(
        None, "--threads", "-t", min=1, help="Worker threads (default: DUALGAP_THREADS or 1)"
    ),
):
    """
    Run the verification suite.

    Every check is independent; a failing check is reported and the
    command exits 1 once all of them have run.
    """
    try:
        tags = selected_tags(filter_.split(","))
    except ConfigError as e:
        console.print(f"\n[bold red]❌ {e}[/bold red]\n")
        raise typer.Exit(EXIT_CONFIG)

    console.print(f"\n[bold cyan]🔍 Verifying: {', '.join(tags)}[/bold cyan]\n")
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
    ) as progress:
        task = progress.add_task("[cyan]Running checks...", total=None)
        result = verify_suite(tags, threads)
        progress.update(task, completed=True)

    table = Table(title="🧪 Verification", header_style="bold magenta")
    table.add_column("Tag", style="cyan")
    table.add_column("Check", style="white")
    table.add_column("Status")
    table.add_column("Detail", style="dim")
    table.add_column("Time (s)", justify="right")
    for check in result.results:
        status = "[green]✅ pass[/green]" if check.passed else "[red]❌ fail[/red]"
        table.add_row(check.tag, check.name, status, check.detail, f"{check.seconds:.2f}")
    console.print(table)

    if report:
        report.parent.mkdir(parents=True, exist_ok=True)
        with open(report, "w", encoding="utf-8") as f:
            json.dump(result.as_dict(), f, indent=2)
        console.print(f"\n[dim]Report written to {report}[/dim]")

    if not result.passed:
        console.print(f"\n[bold red]❌ {len(result.failures)} of {len(result.results)} checks failed[/bold red]\n")
        raise typer.Exit(EXIT_FAILURE)
    console.print(f"\n[bold green]✅ All {len(result.results)} checks passed[/bold green]\n")
