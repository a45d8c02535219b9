"""Command-line entry point: ``deltakick <verb> --config scenario.yaml``.

Exit status 0 on success, 2 for configuration errors, 3 for physics or
numerical errors (grid overflow, degenerate lens, ...).
"""
from __future__ import annotations

import logging
import sys
from dataclasses import replace

import click

from . import __version__
from .errors import ConfigurationError, DeltaKickError
from .scenario import FIGURES, load_scenario, reproduce_figures, run_scenario

EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _fail(exc: DeltaKickError):
    click.echo(f"error[{exc.code}]: {exc}", err=True)
    sys.exit(EXIT_CONFIG if isinstance(exc, ConfigurationError) else EXIT_PHYSICS)


def _common(func):
    func = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                        help="Override a config field, e.g. protocol.expansion_time=2.")(func)
    func = click.option("--threads", type=click.IntRange(min=1), default=None,
                        help="Worker threads for sweeps and maps.")(func)
    func = click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                        help="Output directory (overrides output_dir).")(func)
    return func


def _run(verb, config, out_dir, threads, overrides):
    try:
        sc = load_scenario(config, overrides)
        if threads is not None:
            sc = replace(sc, threads=threads)
        paths = run_scenario(sc, verb, out_dir)
    except DeltaKickError as exc:
        _fail(exc)
    for path in paths:
        click.echo(str(path))


@click.group()
@click.version_option(__version__, prog_name="deltakick")
@click.option("-v", "--verbose", is_flag=True, help="Log sweep progress and warnings.")
def main(verbose):
    """Design and simulate delta-kick cooling with compound Gaussian lenses."""
    logging.basicConfig(level=logging.INFO if verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")


def _verb(name, help_text):
    @main.command(name, help=help_text)
    @click.option("--config", type=click.Path(dir_okay=False), required=True,
                  help="Scenario YAML file.")
    @_common
    def command(config, out_dir, threads, overrides):
        _run(name, config, out_dir, threads, overrides)
    return command


_verb("design", "Compute kick strengths and write them as a simulate-ready config.")
_verb("simulate", "Run the protocol and write the requested outputs.")
_verb("sweep", "Sweep the expansion time and record width ratios.")
_verb("sensitivity", "Map doublet performance around the classical strengths.")
_verb("wigner", "Write Wigner maps before expansion, at kick time and after the kick.")


@main.command()
@click.argument("which", type=click.Choice(FIGURES))
@_common
def reproduce(which, out_dir, threads, overrides):
    """Write the data behind one of the figures from its bundled preset."""
    try:
        paths = reproduce_figures(which, out_dir, overrides, threads)
    except DeltaKickError as exc:
        _fail(exc)
    for path in paths:
        click.echo(str(path))


if __name__ == "__main__":
    main()
