"""
Table subcommands: kernel-table, transform and spectrogram.

Each handler takes the validated AppConfig, writes one artifact and returns
an exit status. Row order depends only on the configuration.
"""

import argparse
import logging
from typing import Sequence

import numpy as np

from app.config.config_model import AppConfig, SliceModel
from app.core.algebra import CliffordDim
from app.core.calibration import sobol_box
from app.core.cstft import fixed_coordinates, spectrogram
from app.core.errors import DimensionError
from app.core.kernel import KernelArgs, assemble, kernel_masks, kernel_terms_series, kernel_values
from app.core.quadrature import grid_from_model
from app.core.signals import build_signal, build_window
from app.core.transform import transform_values
from app.cli.error_handlers import EXIT_OK
from app.cli.tables import axis_columns, blade_cells, blade_columns, resolve_output_path, write_table

logger = logging.getLogger(__name__)


def kernel_table(config: AppConfig) -> int:
    """
    K₋(x, y) on quasi-random pairs from both evaluation paths.

    Columns: x1..xd, y1..yd, the closed-form coefficients on the scalar and
    the bivectors e_jk, the series coefficients in the same order, and the
    largest absolute deviation. For d = 2 there is no series form and its
    columns stay empty.
    """
    d = config.algebra.dim
    output = config.output
    rows = sobol_box(2 * d, output.kernel_pairs, output.kernel_radius, config.qmc.seed)
    x, y = rows[:, :d], rows[:, d:]
    closed = kernel_values(x, y, d, config=config.specfun)
    series = None
    if d >= 4:
        args = KernelArgs.from_arrays(x, y)
        terms = kernel_terms_series(args, CliffordDim(d), config.kernel.series_tol, config.kernel.series_max_terms,
                                    config=config.specfun)
        series = assemble(terms, args)
        logger.info(f"Kernel series used {terms.report.terms} terms (tail {terms.report.tail:.3e})")
    else:
        logger.warning("The series form needs d >= 4; series columns of the kernel table are left empty")

    names = blade_columns(d, kernel_masks(d), paired=False)
    columns = (axis_columns("x", d) + axis_columns("y", d) + [f"closed_{n}" for n in names] +
               [f"series_{n}" for n in names] + ["abs_deviation"])
    empty = [None] * len(names)

    def table_rows():
        for i in range(rows.shape[0]):
            if series is None:
                tail = empty + [None]
            else:
                tail = list(series[i]) + [float(np.max(np.abs(closed[i] - series[i])))]
            yield list(x[i]) + list(y[i]) + list(closed[i]) + tail

    path = resolve_output_path(config, "kernel-table")
    write_table(path, columns, table_rows(), output.format)
    if series is not None:
        logger.info(f"Kernel table: max deviation {float(np.max(np.abs(closed - series))):.3e} "
                    f"over {rows.shape[0]} pairs")
    print(path)
    return EXIT_OK


def slice_points(slice_model: SliceModel, d: int) -> np.ndarray:
    """
    ω points of the transform table.

    Coordinates `first_axis` and `second_axis` of ω run over [−radius, radius];
    equal axes give a line of `points` values instead of a square.
    """
    first, second = slice_model.first_axis - 1, slice_model.second_axis - 1
    if first >= d or second >= d:
        raise DimensionError("slice axis exceeds the dimension",
                             {"d": d, "first_axis": slice_model.first_axis, "second_axis": slice_model.second_axis})
    base = fixed_coordinates(slice_model.fixed_omega, d)
    ticks = np.linspace(-slice_model.radius, slice_model.radius, slice_model.points)
    n = ticks.size
    if first == second:
        points = np.repeat(base[None, :], n, axis=0)
        points[:, first] = ticks
        return points
    points = np.repeat(base[None, :], n * n, axis=0)
    points[:, first] = np.repeat(ticks, n)
    points[:, second] = np.tile(ticks, n)
    return points


def transform_table(config: AppConfig) -> int:
    """F_± f on the ω slice: columns omega1..omegad, then paired blade coefficients."""
    d = config.algebra.dim
    signal = build_signal(config)
    grid = grid_from_model(config.grids.transform, d)
    points = slice_points(config.output.slice, d)
    sign = config.output.sign
    logger.info(f"Transforming {signal.name} with F{sign} at {points.shape[0]} points on {grid.describe()}")
    values = transform_values([signal], points, grid, sign, workers=config.runtime.workers,
                              config=config.specfun)[0]
    cells = blade_cells(values, d)
    columns = axis_columns("omega", d) + blade_columns(d)
    path = resolve_output_path(config, "transform")
    write_table(path, columns, (list(p) + list(c) for p, c in zip(points, cells)), config.output.format)
    print(path)
    return EXIT_OK


def spectrogram_table(config: AppConfig) -> int:
    """V_g f on the (x, ω) slice: x1..xd, omega1..omegad, modulus, paired blade coefficients."""
    d = config.algebra.dim
    signal = build_signal(config)
    window = build_window(config)
    grid = grid_from_model(config.grids.stft, d)
    values = spectrogram(signal, window, config.output.slice, grid, workers=config.runtime.workers)
    coeffs = np.array([value.value.coeffs for value in values])
    cells = blade_cells(coeffs, d)
    columns = axis_columns("x", d) + axis_columns("omega", d) + ["modulus"] + blade_columns(d)

    def table_rows():
        for value, cell in zip(values, cells):
            yield list(value.x.as_array()) + list(value.omega.as_array()) + [value.modulus] + list(cell)

    path = resolve_output_path(config, "spectrogram")
    write_table(path, columns, table_rows(), config.output.format)
    peak = max(values, key=lambda value: value.modulus)
    logger.info(f"Spectrogram peak {peak.modulus:.10g} at x = {peak.x.as_array().tolist()}, "
                f"ω = {peak.omega.as_array().tolist()}")
    print(path)
    return EXIT_OK


def register_table_commands(subparsers: argparse._SubParsersAction, parents: Sequence[argparse.ArgumentParser]) -> None:
    kernel = subparsers.add_parser("kernel-table", parents=list(parents),
                                   help="closed-form and series kernel values on quasi-random pairs")
    kernel.set_defaults(handler=kernel_table)

    transform = subparsers.add_parser("transform", parents=list(parents),
                                      help="Clifford-Fourier transform of the signal on an omega slice")
    transform.add_argument("--sign", choices=("-", "+"), default=None, help="kernel sign (default -)")
    transform.set_defaults(handler=transform_table)

    spectro = subparsers.add_parser("spectrogram", parents=list(parents),
                                    help="short-time transform over a two-coordinate (x, omega) slice")
    spectro.set_defaults(handler=spectrogram_table)
    logger.debug("Table commands registered")