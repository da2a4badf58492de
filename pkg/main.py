import click

from Utils.errors import PipelineError
from commands.augment import augment_command
from commands.biomarker import biomarker_command
from commands.evaluate import evaluate_command
from commands.growth import fit_growth_command
from commands.harmonize import harmonize_command
from commands.phantom import phantom_command
from commands.summarize import summarize_command
from commands.synth import synth_command
from config import settings
from logger import get_logger, set_verbose

logger = get_logger(__name__)


class CallosimGroup(click.Group):
    """Maps pipeline errors to their exit codes instead of a traceback."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except PipelineError as e:
            logger.error(f"{type(e).__name__}: {e.detail}")
            click.echo(f"error: {e.detail}", err=True)
            ctx.exit(e.exit_code)


@click.group(cls=CallosimGroup)
@click.version_option(settings.TOOL_VERSION, prog_name=settings.TOOL_NAME)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
def cli(verbose: bool):
    """Fetal brain label augmentation, synthesis and evaluation."""
    set_verbose(verbose)


cli.add_command(augment_command)
cli.add_command(synth_command)
cli.add_command(evaluate_command)
cli.add_command(biomarker_command)
cli.add_command(harmonize_command)
cli.add_command(phantom_command)
cli.add_command(fit_growth_command)
cli.add_command(summarize_command)


if __name__ == "__main__":
    cli()
