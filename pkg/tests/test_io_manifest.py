import inspect
import json
import os

import numpy as np
import pytest

from app import __version__
from app.core.exceptions import ConfigSchemaError
from app.core.schemas import validate_report
from app.services.attack_service import load_attack_spec
from app.services.datagen_service import BUILTIN_SYSTEM, load_system
from app.utils.io import (
    read_dataset, read_json, read_matrix, read_system, write_dataset, write_json, write_matrix, write_system,
)
from app.utils.manifest import RunManifest, config_hash


def test_matrix_round_trip_is_exact(tmp_path, rng):
    M = rng.standard_normal((3, 7)) * 1e-5
    path = str(tmp_path / 'M.csv')
    write_matrix(path, M)
    np.testing.assert_array_equal(read_matrix(path), M)


def test_empty_matrix_reads_back_with_columns(tmp_path):
    path = str(tmp_path / 'U_minus.csv')
    write_matrix(path, np.zeros((0, 5)))
    assert read_matrix(path, cols=5).shape == (0, 5)


def test_missing_and_non_numeric_files(tmp_path):
    with pytest.raises(ConfigSchemaError):
        read_matrix(str(tmp_path / 'absent.csv'))
    bad = tmp_path / 'bad.csv'
    bad.write_text('1.0,abc\n2.0,3.0\n')
    with pytest.raises(ConfigSchemaError):
        read_matrix(str(bad))


def test_dataset_round_trip(tmp_path, line_data):
    write_dataset(str(tmp_path), line_data)
    restored = read_dataset(str(tmp_path))
    for name, block in line_data.blocks().items():
        np.testing.assert_array_equal(restored.block(name), block)


def test_dataset_with_mismatched_horizons(tmp_path, line_data):
    write_dataset(str(tmp_path), line_data)
    write_matrix(str(tmp_path / 'Y_minus.csv'), np.zeros((2, 50)))
    with pytest.raises(ConfigSchemaError):
        read_dataset(str(tmp_path))


def test_system_round_trip(tmp_path, line_system):
    path = str(tmp_path / 'system.json')
    write_system(path, line_system)
    restored = load_system(path)
    np.testing.assert_array_equal(restored.B, line_system.B)
    np.testing.assert_array_equal(restored.A_true, line_system.A_true)
    assert load_system(BUILTIN_SYSTEM).n == 5


def test_file_io_does_not_depend_on_services():
    import app.utils.io as io_module
    assert 'app.services' not in inspect.getsource(io_module)


def test_system_schema_violation(tmp_path):
    path = tmp_path / 'system.json'
    path.write_text(json.dumps({'n': 2, 'm': 1, 'p': 1, 'B': [[1.0], [0.0]]}))
    with pytest.raises(ConfigSchemaError) as exc:
        read_system(str(path))
    assert 'C' in str(exc.value)


def test_system_dimension_conflict(tmp_path):
    path = tmp_path / 'system.json'
    path.write_text(json.dumps({'n': 2, 'm': 1, 'p': 1, 'B': [[1.0], [0.0], [2.0]], 'C': [[1.0, 0.0]]}))
    with pytest.raises(ConfigSchemaError):
        load_system(str(path))


def test_invalid_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"lambda": 0.5,')
    with pytest.raises(ConfigSchemaError):
        read_json(str(path))


def test_attack_spec_file(tmp_path):
    path = tmp_path / 'spec.json'
    path.write_text(json.dumps({'lambda': 0.5, 'x0': [0.0, 1.0], 'u0': []}))
    spec = load_attack_spec(str(path))
    assert spec.lambda_tilde == 0.5
    assert spec.u0_tilde.shape == (0,)

    path.write_text(json.dumps({'lambda': 0.5, 'x0': [0.0, 1.0], 'u0': [], 'mu': 1}))
    with pytest.raises(ConfigSchemaError):
        load_attack_spec(str(path))


def test_report_validated_before_write(tmp_path):
    path = str(tmp_path / 'report.json')
    with pytest.raises(ConfigSchemaError):
        write_json(path, {'informative': 'yes'}, report='informativity_report')
    assert not os.path.exists(path)


def test_config_hash_ignores_output_directory():
    base = {'data': 'run1', 'seed': 42, 'tol': 1e-9}
    assert config_hash({**base, 'out': 'a'}) == config_hash({**base, 'out': 'b'})
    assert config_hash(base) != config_hash({**base, 'seed': 43})
    assert len(config_hash(base)) == 64


def test_manifest_written_and_valid(tmp_path):
    manifest = RunManifest.start('gen', {'T': 100, 'out': str(tmp_path)}, seed=7)
    path = manifest.finish(T=100).write(str(tmp_path))
    document = read_json(path)
    validate_report('manifest', document)
    assert document['tool_version'] == __version__
    assert document['seed'] == 7
    assert document['extra'] == {'T': 100}
    assert document['finished_at'] >= document['started_at']
