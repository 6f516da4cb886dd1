"""
File I/O: headerless CSV matrices (pandas) and JSON documents (jsonschema-validated).

Dataset directory layout:
    X_minus.csv, X_plus.csv, U_minus.csv, Y_minus.csv, system.json, manifest.json
"""
import json
import logging
import os
from typing import Dict, Optional

import numpy as np
import pandas as pd

from app.core.exceptions import ConfigSchemaError, InfoAttackError
from app.core.schemas import SYSTEM_SCHEMA, validate_document, validate_report
from app.models.model_set import BLOCK_NAMES, Dataset, SystemModel

logger = logging.getLogger(__name__)

SYSTEM_FILE = 'system.json'
MANIFEST_FILE = 'manifest.json'
FLOAT_FORMAT = '%.17g'


def write_matrix(path: str, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        open(path, 'w').close()
        return
    pd.DataFrame(M).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)


def read_matrix(path: str, cols: Optional[int] = None) -> np.ndarray:
    """
    Read a headerless CSV matrix; an empty file yields a 0 x cols matrix.

    Raises:
        ConfigSchemaError: file missing or not numeric
    """
    if not os.path.exists(path):
        raise ConfigSchemaError(path, 'file not found')
    try:
        frame = pd.read_csv(path, header=None, float_precision='round_trip')
    except pd.errors.EmptyDataError:
        return np.zeros((0, cols or 0))
    try:
        return frame.to_numpy(dtype=float)
    except ValueError as e:
        raise ConfigSchemaError(path, f'non-numeric entries ({e})')


def write_dataset(directory: str, data: Dataset) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, block in data.blocks().items():
        write_matrix(os.path.join(directory, f'{name}.csv'), block)
    logger.debug(f"Wrote dataset (n={data.n}, m={data.m}, p={data.p}, T={data.T}) to {directory}")


def read_dataset(directory: str) -> Dataset:
    """Load the four data blocks from a dataset directory."""
    X_minus = read_matrix(os.path.join(directory, 'X_minus.csv'))
    T = X_minus.shape[1]
    blocks = {'X_minus': X_minus}
    for name in BLOCK_NAMES[1:]:
        blocks[name] = read_matrix(os.path.join(directory, f'{name}.csv'), cols=T)
    try:
        return Dataset(**blocks)
    except InfoAttackError as e:
        raise ConfigSchemaError(directory, str(e))


def read_json(path: str):
    if not os.path.exists(path):
        raise ConfigSchemaError(path, 'file not found')
    with open(path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigSchemaError(path, f'invalid JSON ({e.msg}, line {e.lineno})')


def write_json(path: str, document: Dict, report: Optional[str] = None) -> None:
    """Write a JSON document, validating it first against a named report schema."""
    if report is not None:
        validate_report(report, document)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write('\n')


def read_system(source: str) -> SystemModel:
    """
    Load a system from a JSON file.

    Raises:
        ConfigSchemaError: schema violation or inconsistent dimensions
    """
    document = read_json(source)
    validate_document(document, SYSTEM_SCHEMA, source)
    try:
        return SystemModel.from_dict(document)
    except (InfoAttackError, ValueError) as e:
        raise ConfigSchemaError(source, str(e))


def write_system(path: str, sys: SystemModel) -> None:
    write_json(path, sys.to_dict())

