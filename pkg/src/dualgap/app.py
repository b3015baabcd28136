import typer

from dualgap.commands.rates import rates
from dualgap.commands.run import run
from dualgap.commands.verify import verify
from dualgap.console import setup_logging

app = typer.Typer(
    name="dualgap",
    help="First-order methods with a duality gap certificate checked at every step",
    add_completion=True,
    no_args_is_help=True,
)

app.command(help="Run an experiment config and write its trace and summary")(run)
app.command(help="Run the invariant and acceptance verification suite")(verify)
app.command(help="Fit the empirical convergence rate of a trace")(rates)


@app.callback()
def main_callback(
    ctx: typer.Context,
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose output"),
):
    """dualgap - watch the gap close"""
    setup_logging(verbose)
