"""Run command - execute one experiment config and write its trace and summary."""
from pathlib import Path
from typing import Optional

import typer
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from dualgap.config import load_config, parse_config
from dualgap.console import console
from dualgap.errors import ConfigError, DualGapError, IncompatibleConfiguration, InvariantViolation
from dualgap.harness import EXIT_CONFIG, EXIT_INVARIANT, exit_code_for, run_experiment


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _experiment_table(config) -> Table:
    info = Table(show_header=False, box=None)
    info.add_column("Key", style="cyan")
    info.add_column("Value", style="white")
    info.add_row("Problem", str(config.problem.get("family")))
    info.add_row("Solver", config.solver)
    info.add_row("Seed", str(config.seed))
    if config.mode == "continuous":
        info.add_row("Horizon", f"T={config.T:g}, h={config.h:g}")
    else:
        info.add_row("Steps", str(config.k_max))
    info.add_row("Schedule", (config.schedule or {}).get("kind", "(theorem default)"))
    info.add_row("Map", (config.map or {}).get("kind", "(default)"))
    return info


def _summary_table(summary) -> Table:
    table = Table(title="📉 Gap Summary", header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="white")
    for key in ("final_gap", "f_gap", "final_bound", "bound_margin", "max_chain_violation",
                "max_scaled_gap_increase", "violation_constant", "probe_gap", "primal_dual_gap",
                "violations", "halvings"):
        if key in summary:
            table.add_row(key, _fmt(summary[key]))
    rate = summary.get("rate")
    if isinstance(rate, dict):
        table.add_row("rate exponent", _fmt(rate["exponent"]))
        table.add_row("contraction ratio", _fmt(rate["ratio"]))
    elif rate is not None:
        table.add_row("rate", str(rate))
    table.add_row("wall time (s)", _fmt(summary.get("wall_time")))
    return table


def run(
    config_path: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment YAML (default: dualgap.yaml found upwards from here)"
    ),
    out_dir: Optional[Path] = typer.Option(
        None, "--out-dir", "-o", help="Directory the trace and summary paths are relative to"
    ),
):
    """
    Run one experiment.

    This command will:
    1. Load and validate the experiment config
    2. Build the instance and its ground truth
    3. Run the solver with the gap tracker attached
    4. Write the CSV trace and the JSON summary
    """
    try:
        config = parse_config(load_config(str(config_path) if config_path else None))
    except ConfigError as e:
        console.print(f"\n[bold red]❌ Invalid configuration:[/bold red] {e}\n")
        raise typer.Exit(EXIT_CONFIG)

    console.print(f"\n[bold cyan]🚀 Running {config.solver} on {config.problem.get('family')}...[/bold cyan]\n")
    console.print(Panel(_experiment_table(config), title="[bold]🧪 Experiment[/bold]", border_style="blue"))

    try:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
        ) as progress:
            task = progress.add_task("[cyan]Iterating...", total=None)
            result = run_experiment(config, out_dir)
            progress.update(task, completed=True)
    except (ConfigError, IncompatibleConfiguration) as e:
        console.print(f"\n[bold red]❌ Incompatible configuration:[/bold red] {e}\n")
        raise typer.Exit(EXIT_CONFIG)
    except InvariantViolation as e:
        console.print(f"\n[bold red]❌ Instance check failed:[/bold red] {e}\n")
        raise typer.Exit(EXIT_INVARIANT)
    except DualGapError as e:
        console.print(f"\n[bold red]❌ Experiment failed:[/bold red] {e}\n")
        raise typer.Exit(exit_code_for(e))

    if result.violation is not None:
        v = result.violation
        console.print(Panel(
            f"[bold]Step:[/bold] {v.k}\n[bold]Invariant:[/bold] {v.which}\n[bold]Detail:[/bold] {v.detail}\n\n"
            f"[dim]Summary written to {result.summary_path}[/dim]",
            title="[bold red]❌ Invariant Violation[/bold red]",
            border_style="red",
        ))
        raise typer.Exit(EXIT_INVARIANT)

    console.print(_summary_table(result.summary))
    console.print(f"\n[bold green]✅ Trace written:[/bold green] {result.trace_path}")
    console.print(f"[bold green]✅ Summary written:[/bold green] {result.summary_path}\n")
