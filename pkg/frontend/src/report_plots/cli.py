"""Command-line surface: one subcommand per figure kind."""

from __future__ import annotations

import sys

import click

from .plots import FIGURE_KINDS, MissingColumnError, PlotSpec, render


@click.group()
def main():
    """Render reproduction figures from experiment CSVs (PNG + SVG)."""


def _make_command(kind: str):
    @main.command(kind)
    @click.option("--csv", "csv_path", type=click.Path(exists=True), required=True)
    @click.option("--out", "out_path", type=click.Path(), required=True,
                  help="output basename; .png and .svg are written")
    @click.option("--linear-x", is_flag=True, help="linear instead of log x axis")
    @click.option("--linear-y", is_flag=True, help="linear instead of log y axis")
    def cmd(csv_path, out_path, linear_x, linear_y):
        spec = PlotSpec(csv_path=csv_path, kind=kind, out_path=out_path,
                        logx=not linear_x, logy=not linear_y)
        try:
            fits = render(spec)
        except MissingColumnError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        for name, value in sorted(fits.items()):
            click.echo(f"{name} = {value:.12g}")
        click.echo(f"wrote {out_path}.png and {out_path}.svg")

    cmd.help = f"Render the '{kind}' figure."
    return cmd


for _kind in FIGURE_KINDS:
    _make_command(_kind)


if __name__ == "__main__":
    main()
