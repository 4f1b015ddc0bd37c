"""Defines CLI for decomposition, analysis, synthesis and scalograms."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import TYPE_CHECKING

import click

from src.task.dwt import BoundaryMode
from src.task.errors import (
    ImputationError,
    LevelRangeError,
    SeriesParseError,
    SyntheticSpecError,
    WaveletPeriodError,
)
from src.task.filters import WaveletName
from src.task.periods import Aggregation, BandConvention
from src.task.pipeline import (
    RunConfig,
    run_analyze,
    run_decompose,
    run_scalogram,
    run_synth,
)
from src.task.scalogram import parse_scales
from src.task.shrinkage import LambdaCount, NoiseModel, ThresholdMethod
from src.task.synthetic import (
    DEFAULT_START,
    DipPlan,
    PlantedComponent,
    SyntheticSpec,
    components_peaking_at,
    parse_components,
    parse_dips,
)
from src.utils.series_io import ImputePolicy, MonthStamp

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

EXIT_PARSE = 3
EXIT_RANGE = 4
EXIT_IO = 5


class ParseFailure(click.ClickException):
    """Input could not be parsed or imputed."""

    exit_code = EXIT_PARSE


class RangeFailure(click.ClickException):
    """A level, depth or length is out of range."""

    exit_code = EXIT_RANGE


class IOFailure(click.ClickException):
    """Reading input or writing output failed."""

    exit_code = EXIT_IO


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Translate library errors into CLI failures with distinct exit codes."""
    try:
        yield
    except (SeriesParseError, ImputationError) as e:
        raise ParseFailure(str(e)) from e
    except LevelRangeError as e:
        raise RangeFailure(str(e)) from e
    except OSError as e:
        raise IOFailure(str(e)) from e
    except SyntheticSpecError as e:
        raise click.BadParameter(str(e)) from e
    except WaveletPeriodError as e:
        raise click.ClickException(str(e)) from e


def _choice(enum: type) -> click.Choice:
    return click.Choice([member.value for member in enum], case_sensitive=False)


class ComponentsType(click.ParamType):
    """Custom `period:amplitude[:phase]` list type for the generator."""

    name = "components"

    def convert(
        self,
        value: str | tuple[PlantedComponent, ...],
        param: click.Parameter | None,
        ctx: click.Context | None,
    ) -> tuple[PlantedComponent, ...]:
        """Convert ComponentsType to a tuple of planted components."""
        if isinstance(value, tuple):
            return value
        try:
            return parse_components(value)
        except SyntheticSpecError as e:
            self.fail(str(e), param, ctx)


class DipsType(click.ParamType):
    """Custom `first_start:interval:width:depth` type for planted dips."""

    name = "dips"

    def convert(
        self,
        value: str | DipPlan,
        param: click.Parameter | None,
        ctx: click.Context | None,
    ) -> DipPlan:
        """Convert DipsType to a DipPlan."""
        if isinstance(value, DipPlan):
            return value
        try:
            return parse_dips(value)
        except SyntheticSpecError as e:
            self.fail(str(e), param, ctx)


class ScalesType(click.ParamType):
    """Custom comma separated scale list, e.g. 1,2,4,8,16."""

    name = "scales"

    def convert(
        self,
        value: str | tuple[float, ...],
        param: click.Parameter | None,
        ctx: click.Context | None,
    ) -> tuple[float, ...]:
        """Convert ScalesType to an ascending float tuple."""
        if isinstance(value, tuple):
            return value
        try:
            scales = parse_scales(value)
        except ValueError as e:
            self.fail(f"{value!r} is not a list of positive scales ({e})", param, ctx)
        if not scales:
            self.fail("at least one scale is required", param, ctx)
        return scales


class MonthStampType(click.ParamType):
    """Custom `YYYY-MM` type."""

    name = "year_month"

    def convert(
        self,
        value: str | MonthStamp,
        param: click.Parameter | None,
        ctx: click.Context | None,
    ) -> MonthStamp:
        """Convert MonthStampType to a MonthStamp."""
        if isinstance(value, MonthStamp):
            return value
        try:
            year, month = value.strip().split("-")
            return MonthStamp(int(year), int(month))
        except ValueError:
            self.fail(f"{value!r} is not a valid YYYY-MM month", param, ctx)


def _input_option(f: Callable) -> Callable:
    return click.option(
        "--input",
        "input_file",
        required=True,
        envvar="WPD_INPUT",
        type=click.Path(dir_okay=False),
        help="Rainfall CSV with year, month and rainfall_mm columns.",
    )(f)


def _impute_option(f: Callable) -> Callable:
    return click.option(
        "--impute",
        envvar="WPD_IMPUTE",
        type=_choice(ImputePolicy),
        default=ImputePolicy.FAIL.value,
        help="How missing months are repaired.",
    )(f)


def _out_option(f: Callable) -> Callable:
    return click.option(
        "--out",
        envvar="WPD_OUT",
        type=click.Path(file_okay=False),
        default="out",
        help="Directory to write outputs to.",
    )(f)


def _scales_option(f: Callable) -> Callable:
    return click.option(
        "--scales",
        envvar="WPD_SCALES",
        type=ScalesType(),
        default="1,2,4,8,16",
        help="Scalogram scales in months.",
    )(f)


def _decomposition_options(f: Callable) -> Callable:
    f = click.option(
        "--boundary",
        envvar="WPD_BOUNDARY",
        type=_choice(BoundaryMode),
        default=BoundaryMode.PERIODIC.value,
        help="Signal extension at the edges of each level.",
    )(f)
    f = click.option(
        "--levels",
        envvar="WPD_LEVELS",
        type=click.IntRange(min=1),
        default=4,
        help="Decomposition depth J.",
    )(f)
    return click.option(
        "--wavelet",
        envvar="WPD_WAVELET",
        type=_choice(WaveletName),
        default=WaveletName.HAAR.value,
        help="Orthogonal wavelet filter bank.",
    )(f)


def _configure_logging(
    _ctx: click.Context,
    _param: click.Parameter,
    verbose: int,
) -> int:
    if verbose:
        level = logging.INFO if verbose == 1 else logging.DEBUG
        logging.basicConfig(
            level=level,
            format="%(levelname)s %(name)s: %(message)s",
            force=True,
        )
    return verbose


def _verbose_option(f: Callable) -> Callable:
    # also on each command: the pyproject scripts bypass the group
    return click.option(
        "-v",
        "--verbose",
        envvar="WPD_VERBOSE",
        count=True,
        callback=_configure_logging,
        expose_value=False,
        help="Log progress (-v) or debug (-vv).",
    )(f)


@click.group(context_settings={"show_default": True})
@_verbose_option
def cli() -> None:
    """Extract dominant rainfall periods from monthly series with wavelets."""


@cli.command(context_settings={"show_default": True})
@_verbose_option
@_input_option
@_decomposition_options
@_impute_option
@_out_option
def decompose(
    input_file: str,
    wavelet: str,
    levels: int,
    boundary: str,
    impute: str,
    out: str,
) -> None:
    """Decompose a series and write every level's component."""
    cfg = RunConfig(
        input=input_file,
        wavelet=wavelet,
        depth=levels,
        boundary=BoundaryMode(boundary),
        impute=ImputePolicy(impute),
        out=out,
    )
    with _exit_codes():
        paths = run_decompose(cfg)
    click.echo(f"Wrote {len(paths)} files to {out}")


@cli.command(context_settings={"show_default": True})
@_verbose_option
@_input_option
@_decomposition_options
@click.option(
    "--threshold",
    envvar="WPD_THRESHOLD",
    type=_choice(ThresholdMethod),
    default=ThresholdMethod.HARD.value,
    help="Hard or soft thresholding.",
)
@click.option(
    "--noise",
    envvar="WPD_NOISE",
    type=_choice(NoiseModel),
    default=NoiseModel.PER_LEVEL.value,
    help="Estimate sigma once from level 1 or per level.",
)
@click.option(
    "--lambda-count",
    envvar="WPD_LAMBDA_COUNT",
    type=_choice(LambdaCount),
    default=LambdaCount.GLOBAL.value,
    help="Coefficient count in the fixed-form threshold: series or level length.",
)
@click.option(
    "--min-survivors",
    envvar="WPD_MIN_SURVIVORS",
    type=click.IntRange(min=1),
    default=1,
    help="Surviving coefficients needed for a level to be significant.",
)
@click.option(
    "--convention",
    envvar="WPD_CONVENTION",
    type=click.Choice(
        [*(c.value for c in BandConvention), "shifted"],
        case_sensitive=False,
    ),
    default=BandConvention.PAPER.value,
    help="Period band of level j: 2^(j-1)..2^j (paper, alias shifted)"
    " or 2^j..2^(j+1) (dyadic).",
)
@click.option(
    "--aggregation",
    envvar="WPD_AGGREGATION",
    type=_choice(Aggregation),
    default=Aggregation.MEDIAN.value,
    help="Per-calendar-month aggregate of the climatology.",
)
@click.option(
    "--depth-factor",
    envvar="WPD_DEPTH_FACTOR",
    type=click.FloatRange(min=0),
    default=0.5,
    help="Episodes lie below mean - k * std of the level component.",
)
@_impute_option
@_scales_option
@_out_option
@click.option(
    "--print/--no-print",
    "show",
    envvar="WPD_PRINT",
    default=False,
    help="Print tables and the episode narrative.",
)
def analyze(
    input_file: str,
    wavelet: str,
    levels: int,
    boundary: str,
    threshold: str,
    noise: str,
    lambda_count: str,
    min_survivors: int,
    convention: str,
    aggregation: str,
    depth_factor: float,
    impute: str,
    scales: tuple[float, ...],
    out: str,
    *,
    show: bool,
) -> None:
    """Run the full analysis and write tables, episodes, figures and report."""
    cfg = RunConfig(
        input=input_file,
        wavelet=wavelet,
        depth=levels,
        boundary=BoundaryMode(boundary),
        threshold=ThresholdMethod(threshold),
        noise=NoiseModel(noise),
        lambda_count=LambdaCount(lambda_count),
        min_survivors=min_survivors,
        impute=ImputePolicy(impute),
        convention=BandConvention(convention),
        aggregation=Aggregation(aggregation),
        depth_factor=depth_factor,
        scales=scales,
        out=out,
    )
    with _exit_codes():
        bundle, paths = run_analyze(cfg)
    if show:
        bundle.pretty_print()
    click.echo(f"Wrote {len(paths)} files to {out}")


@cli.command(context_settings={"show_default": True})
@_verbose_option
@click.option(
    "--components",
    envvar="WPD_COMPONENTS",
    type=ComponentsType(),
    default="6:100,3:40,2:20",
    help="Planted cosines as period:amplitude[:phase], comma separated.",
)
@click.option(
    "--peak-month",
    envvar="WPD_PEAK_MONTH",
    type=click.IntRange(1, 12),
    default=None,
    help="Re-phase every component to peak in this calendar month.",
)
@click.option(
    "--noise-sigma",
    envvar="WPD_NOISE_SIGMA",
    type=click.FloatRange(min=0),
    default=10.0,
    help="Gaussian noise standard deviation (mm).",
)
@click.option(
    "--length",
    envvar="WPD_LENGTH",
    type=click.IntRange(min=24),
    default=312,
    help="Number of months.",
)
@click.option(
    "--baseline",
    envvar="WPD_BASELINE",
    type=float,
    default=300.0,
    help="Mean rainfall (mm/month).",
)
@click.option(
    "--seed",
    envvar="WPD_SEED",
    type=int,
    required=True,
    help="Random seed; required so every run is reproducible.",
)
@click.option(
    "--start",
    envvar="WPD_START",
    type=MonthStampType(),
    default=str(DEFAULT_START),
    help="First month as YYYY-MM.",
)
@click.option(
    "--dips",
    envvar="WPD_DIPS",
    type=DipsType(),
    default=None,
    help="Planted dips as first_start:interval:width:depth.",
)
@_out_option
def synth(
    components: tuple[PlantedComponent, ...],
    peak_month: int | None,
    noise_sigma: float,
    length: int,
    baseline: float,
    seed: int,
    start: MonthStamp,
    dips: DipPlan | None,
    out: str,
) -> None:
    """Generate a seeded synthetic series and its ground truth."""
    if peak_month is not None:
        components = components_peaking_at(
            {c.period: c.amplitude for c in components},
            peak_month,
            start,
        )
    spec = SyntheticSpec(components, noise_sigma, length, baseline, seed, start, dips)
    with _exit_codes():
        _, truth, paths = run_synth(spec, out)
    click.echo(
        f"Wrote {len(paths)} files to {out} "
        f"({len(truth.dip_windows)} planted dip(s))",
    )


@cli.command(context_settings={"show_default": True})
@_verbose_option
@_input_option
@_impute_option
@_scales_option
@_out_option
def scalogram(
    input_file: str,
    impute: str,
    scales: tuple[float, ...],
    out: str,
) -> None:
    """Compute the continuous Haar scalogram of a series."""
    cfg = RunConfig(
        input=input_file,
        impute=ImputePolicy(impute),
        scales=scales,
        out=out,
    )
    with _exit_codes():
        _, paths = run_scalogram(cfg)
    click.echo(f"Wrote {len(paths)} files to {out}")


if __name__ == "__main__":
    cli()
