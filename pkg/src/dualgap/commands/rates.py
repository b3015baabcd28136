"""Rates command - fit the empirical convergence rate of a trace."""
from pathlib import Path

import typer
from rich.table import Table

from dualgap.console import console
from dualgap.errors import DegenerateTrace
from dualgap.harness import CONVERGED, EXIT_FAILURE, fit_rate, read_trace


def rates(
    trace: Path = typer.Option(..., "--trace", "-t", exists=True, dir_okay=False, help="CSV trace written by 'run'"),
    column: str = typer.Option("G", "--column", help="Trace column to fit"),
):
    """Fit log-gap against log-k over the second half of a trace."""
    frame = read_trace(trace)
    if column not in frame.columns:
        console.print(f"\n[bold red]❌ Trace has no column '{column}'[/bold red]\n")
        raise typer.Exit(EXIT_FAILURE)

    try:
        fit = fit_rate(frame, column)
    except DegenerateTrace as e:
        if str(e) == CONVERGED:
            console.print(f"\n[bold green]✅ {CONVERGED}[/bold green] [dim](a gap in the window is not positive)[/dim]\n")
            return
        console.print(f"\n[bold red]❌ Cannot fit a rate:[/bold red] {e}\n")
        raise typer.Exit(EXIT_FAILURE)

    table = Table(title=f"📈 Rate of {column}", header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="white")
    table.add_row("exponent", f"{fit.exponent:.4f}")
    table.add_row("contraction ratio", f"{fit.ratio:.6f}")
    table.add_row("fit residual", f"{fit.residual:.3g}")
    table.add_row("window", f"[{fit.window[0]:g}, {fit.window[1]:g}] ({fit.points} points)")
    console.print(table)
