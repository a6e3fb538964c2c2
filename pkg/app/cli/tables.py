"""
Tabular artifacts of the CLI subcommands.

Multivector values are flattened into paired real columns per blade
(`<blade>_re`, `<blade>_im`) with blades in lexicographic order of their
index sets; floats are written with their shortest round-trip form.
"""

import csv
import json
import logging
import os
from typing import Iterable, List, Literal, Optional, Sequence

import numpy as np

from app.config.config_model import AppConfig
from app.core.algebra import Blade, blade_order

logger = logging.getLogger(__name__)

TableFormat = Literal['csv', 'json-lines']

EXTENSIONS = {'csv': 'csv', 'json-lines': 'jsonl'}


def resolve_output_path(config: AppConfig, command: str) -> str:
    """Artifact path of a subcommand: output.path, else output/<command>.<ext>, under output.directory."""
    output = config.output
    path = output.path or os.path.join("output", f"{command}.{EXTENSIONS[output.format]}")
    if output.directory and not os.path.isabs(path):
        path = os.path.join(output.directory, path)
    return path


def axis_columns(prefix: str, d: int) -> List[str]:
    return [f"{prefix}{i}" for i in range(1, d + 1)]


def blade_columns(d: int, masks: Optional[Sequence[int]] = None, paired: bool = True) -> List[str]:
    """Column names of multivector coefficients; `masks` restricts and orders the blades."""
    if masks is None:
        names = [blade.column for blade in blade_order(d)]
    else:
        names = [Blade.from_mask(mask).column for mask in masks]
    if not paired:
        return names
    return [f"{name}_{part}" for name in names for part in ('re', 'im')]


def blade_cells(values: np.ndarray, d: int) -> np.ndarray:
    """(N, 2^d) coefficients to (N, 2^{d+1}) real/imaginary pairs in blade order."""
    values = np.asarray(values)
    masks = [blade.mask for blade in blade_order(d)]
    ordered = values[:, masks]
    cells = np.empty((values.shape[0], 2 * len(masks)), dtype=float)
    cells[:, 0::2] = np.real(ordered)
    cells[:, 1::2] = np.imag(ordered)
    return cells


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path: str, columns: Sequence[str], rows: Iterable[Sequence], fmt: TableFormat = 'csv') -> int:
    """
    Write rows in a fixed column order.

    Args:
        path: Output path; parent directories are created
        columns: Column names
        rows: Row sequences aligned with `columns`; None becomes an empty cell
        fmt: 'csv' or 'json-lines'

    Returns:
        Number of rows written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        if fmt == 'csv':
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(value) for value in row])
                count += 1
        else:
            for row in rows:
                record = {column: (float(value) if isinstance(value, np.floating) else value)
                          for column, value in zip(columns, row)}
                handle.write(json.dumps(record) + "\n")
                count += 1
    logger.info(f"Wrote {count} row(s) with {len(columns)} column(s) to {path}")
    return count
