import click
from contextlib import contextmanager
from fs import open_fs
from fs.errors import FSError
from typing import Dict, List, Optional, TextIO

from . import _log as log
from . import _yaml
from ._app import NONCONVERGENCE, USAGE, Application
from ._cli import float_list, order_pair, sample_box, split_params
from ._config import Config
from ._effects import make_effects
from ._log import setup_logging
from ._report import ReportEnvelope, table_csv
from ._suites import SUITES
from ._util import pluralize
from .datasets import EXAMPLES, HYPERBOLIC_EXAMPLES, DatasetDescriptor
from .errors import (
    ConvergenceError,
    DegenerateLapseError,
    DomainError,
    EvalError,
    InputError,
    InvalidGaugeError,
    InvalidIsometryError,
    SingularMetricError,
    StencilError)


pass_app = click.make_pass_decorator(Application)


@contextmanager
def exit_codes():
    """
    Turn library failures into diagnostics and exit codes: 2 for bad input,
    3 for numerical failure.
    """
    try:
        yield
    except ConvergenceError as e:
        echo_error('Flux limits did not converge: {}'.format(e))
        for r, value in zip(e.radii, e.extrapolants):
            echo('  r={:<10g} extrapolant={}'.format(r, value))
        raise SystemExit(NONCONVERGENCE)
    except (StencilError, EvalError, SingularMetricError) as e:
        echo_error('Numerical failure: {}'.format(e))
        raise SystemExit(NONCONVERGENCE)
    except (InputError, DomainError, DegenerateLapseError,
            InvalidIsometryError, InvalidGaugeError) as e:
        echo_error('Invalid input: {}'.format(e))
        raise SystemExit(USAGE)
    except FSError as e:
        echo_error('File error: {}'.format(e))
        raise SystemExit(USAGE)


@click.group()
@click.option('--dry-run', '-n', 'dry_run',
              is_flag=True,
              default=False,
              help='''Perform a dry run, writing files to a temporary
              location.''')
@click.option('--log-level',
              default='ERROR',
              type=click.Choice([
                  'DEBUG',
                  'INFO',
                  'WARNING',
                  'ERROR']))
@click.option('--config',
              default=None,
              type=click.File(),
              help='YAML file of numerical settings.')
@click.version_option()
@click.pass_context
def cli(ctx, config: Optional[TextIO], dry_run: bool, log_level: str):
    """
    Audit initial data sets with non-compact boundary, compute their
    energy-momentum invariants and verify the underlying identities.
    """
    setup_logging(log_level)
    root_fs = open_fs('.')
    try:
        config = Config.default() if config is None else Config.parse(config)
    except ValueError as e:
        echo_error('Invalid configuration: {}'.format(e))
        raise SystemExit(USAGE)
    ctx.obj = Application(
        config=config,
        effects=make_effects(root_fs, dry_run))
    if dry_run:
        echo_warning('Performing a dry run, files go to a temporary place!')


def _emit(app: Application, envelope: ReportEnvelope, table: List[Dict],
          output: Optional[str], table_path: Optional[str],
          output_format: str):
    if output:
        app.effects.write_text(output, envelope.to_json())
    if table_path:
        app.effects.write_text(table_path, table_csv(table))
    if output_format == 'csv':
        echo_out(table_csv(table), nl=False)
    else:
        echo_out(envelope.to_json(), nl=False)


def _finish(code: int, what: str):
    if code == 0:
        echo_success('{} passed.'.format(what))
    else:
        echo_error('{} found a violated condition.'.format(what))
    raise SystemExit(code)


output_options = [
    click.option('--format', 'output_format',
                 default='json',
                 type=click.Choice(['json', 'csv']),
                 help='What to print: the JSON report or the CSV table.'),
    click.option('--output', '-o',
                 default=None,
                 help='Write the JSON report to this path.'),
    click.option('--table', 'table_path',
                 default=None,
                 help='Write the CSV table to this path.'),
]


def with_output_options(func):
    for option in reversed(output_options):
        func = option(func)
    return func


@cli.command()
@click.argument('example', type=click.Choice(EXAMPLES))
@click.option('--dimension', '-d', 'n',
              default=3,
              type=click.IntRange(min=3),
              help='Dimension of the initial data set.')
@click.option('--model-coords',
              default=None,
              type=click.Choice(['polar', 'ball']),
              help='Coordinate model of hyperbolic examples.')
@click.option('--param', '-p', 'params',
              multiple=True,
              callback=split_params,
              help='''Example parameter as key=value with a JSON value, can
              be specified multiple times''')
@click.option('--seed',
              default=None,
              type=int,
              help='Seed for randomly placed features.')
@click.option('--r0',
              default=1.0,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Inner radius of the asymptotic region.')
@click.option('--decay',
              default=None,
              type=float,
              help='Declared decay exponent.')
@click.option('--grid',
              default=None,
              help='Grid header (custom-grid only).')
@click.option('--output', '-o',
              default=None,
              help='Dataset path, defaults to EXAMPLE.json.')
@pass_app
def generate(app: Application, example: str, n: int,
             model_coords: Optional[str], params: Dict, seed: Optional[int],
             r0: float, decay: Optional[float], grid: Optional[str],
             output: Optional[str]):
    """
    Write a dataset file for a built-in example or a custom grid.
    """
    coords = model_coords or app.config.model_coords
    model = None
    if example in HYPERBOLIC_EXAMPLES or (
            example == 'custom-grid' and model_coords is not None):
        model = 'hyperbolic-' + coords
    if seed is not None and example == 'conformal-bump':
        params.setdefault('seed', seed)
    with exit_codes():
        descriptor = DatasetDescriptor(
            example, n, model=model, params=params, r0=r0, decay=decay,
            grid=grid)
        path = app.generate(descriptor, output or '{}.json'.format(example))
    echo_success('Wrote dataset {}'.format(path))


@cli.command()
@click.argument('dataset')
@click.option('--box',
              default=None,
              callback=sample_box,
              help='Sampling box lo:hi,lo:hi,... with one interval per axis.')
@click.option('--points',
              default=None,
              type=click.IntRange(min=2),
              help='Sample points per axis.')
@click.option('--radii',
              default=None,
              callback=float_list,
              help='Decay-audit radii, comma-separated.')
@click.option('--orders',
              default=None,
              callback=order_pair,
              help='Decay-audit quadrature orders, polar,azimuthal.')
@click.option('--step',
              default=None,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Relative finite-difference step.')
@click.option('--tol',
              default=None,
              type=click.FloatRange(min=0.0),
              help='Tolerance of the energy-condition margins.')
@with_output_options
@pass_app
def audit(app: Application, dataset: str, box, points: Optional[int],
          radii: Optional[List[float]], orders: Optional[List[int]],
          step: Optional[float], tol: Optional[float], output_format: str,
          output: Optional[str], table_path: Optional[str]):
    """
    Check the dominant energy conditions and the decay of a dataset.
    """
    app.config = app.config.replace(
        audit_points=points, decay_radii=radii, decay_orders=orders,
        step=step, dec_tol=tol)
    with exit_codes():
        descriptor = app.load_descriptor(dataset)
        envelope, table, code = app.audit(descriptor, box)
    _emit(app, envelope, table, output, table_path, output_format)
    n = len(table)
    echo_info('Sampled {} {}'.format(n, pluralize(n, 'point', 'points')))
    _finish(code, 'Audit')


@cli.command()
@click.argument('dataset')
@click.option('--radii',
              default=None,
              callback=float_list,
              help='Flux radii, comma-separated.')
@click.option('--orders',
              default=None,
              callback=order_pair,
              help='Hemisphere quadrature orders, polar,azimuthal.')
@click.option('--step',
              default=None,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Relative finite-difference step.')
@click.option('--tol',
              default=None,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Relative convergence tolerance of the extrapolation.')
@click.option('--box',
              default=None,
              callback=sample_box,
              help='Energy-condition sampling box lo:hi,lo:hi,...')
@click.option('--crosscheck',
              is_flag=True,
              default=False,
              help='Recompute the energy from the Einstein tensor (flat).')
@with_output_options
@pass_app
def mass(app: Application, dataset: str, radii: Optional[List[float]],
         orders: Optional[List[int]], step: Optional[float],
         tol: Optional[float], box, crosscheck: bool, output_format: str,
         output: Optional[str], table_path: Optional[str]):
    """
    Compute the energy-momentum invariants of a dataset.
    """
    app.config = app.config.replace(
        radii=radii, orders=orders, step=step, convergence_tol=tol)
    with exit_codes():
        descriptor = app.load_descriptor(dataset)
        envelope, table, code = app.mass(descriptor, box, crosscheck)
    _emit(app, envelope, table, output, table_path, output_format)
    _finish(code, 'Mass')


@cli.command()
@click.argument('suite', type=click.Choice(list(SUITES)))
@click.option('--dimension', '-d', 'n',
              default=3,
              type=click.IntRange(min=3),
              help='Dimension of the identities.')
@click.option('--seed',
              default=None,
              type=int,
              help='Seed of the random samples.')
@click.option('--step',
              default=None,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Finite-difference step of the identities.')
@click.option('--tol',
              default=None,
              type=click.FloatRange(min=0.0, min_open=True),
              help='Tolerance of the finite-difference identities.')
@click.option('--radii',
              default=None,
              callback=float_list,
              help='Flux radii of the invariance suite.')
@click.option('--orders',
              default=None,
              callback=order_pair,
              help='Quadrature orders of the invariance suite.')
@with_output_options
@pass_app
def verify(app: Application, suite: str, n: int, seed: Optional[int],
           step: Optional[float], tol: Optional[float],
           radii: Optional[List[float]], orders: Optional[List[int]],
           output_format: str, output: Optional[str],
           table_path: Optional[str]):
    """
    Run an identity-verification suite and tabulate its residuals.
    """
    app.config = app.config.replace(
        identity_step=step, identity_tol=tol, radii=radii, orders=orders)
    seed = app.config.seed if seed is None else seed
    with exit_codes():
        envelope, table, code = app.verify(suite, n, seed)
    _emit(app, envelope, table, output, table_path, output_format)
    failed = sum(1 for row in table if not row['passed'])
    if failed:
        echo('{} {} out of tolerance'.format(
            failed, pluralize(failed, 'residual', 'residuals')))
    _finish(code, 'Suite {}'.format(suite))


@cli.command()
@pass_app
def show_config(app: Application):
    """
    Print the effective configuration as YAML.
    """
    log.debug('Dumping configuration')
    echo_out(_yaml.dump(app.config.as_dict()), nl=False)


def echo_partial(**kw):
    """
    Partially applied version of `click.secho`.
    """
    return lambda msg, **extra: click.secho(msg, **dict(kw, **extra))


echo = echo_partial(err=True)
echo_out = echo_partial()
echo_error = echo_partial(fg='red', err=True)
echo_info = echo_partial(fg='yellow', err=True)
echo_warning = echo_partial(fg='bright_yellow', err=True)
echo_success = echo_partial(fg='green', err=True)


def main():
    cli()


if __name__ == '__main__':
    main()
