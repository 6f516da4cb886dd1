import json
import os

import pytest
from click.testing import CliRunner

from app.core.status import (
    EXIT_DIMENSIONAL, EXIT_NOT_INFORMATIVE, EXIT_OK, EXIT_USAGE,
)
from app.utils.io import read_json
from infoattack_app import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = str(tmp_path_factory.mktemp('cli') / 'run1')
    result = CliRunner().invoke(cli, ['gen', '--system', 'paper5', '--T', '100', '--seed', '42', '--out', out])
    assert result.exit_code == EXIT_OK, result.output
    return out


def _write_spec(path, spec, **overrides):
    path.write_text(json.dumps({**spec.to_dict(), **overrides}))
    return str(path)


def test_gen_writes_dataset_and_manifest(dataset_dir):
    for name in ('X_minus.csv', 'X_plus.csv', 'U_minus.csv', 'Y_minus.csv', 'system.json', 'manifest.json'):
        assert os.path.exists(os.path.join(dataset_dir, name))
    manifest = read_json(os.path.join(dataset_dir, 'manifest.json'))
    assert manifest['command'] == 'gen'
    assert manifest['seed'] == 42
    assert manifest['extra']['T'] == 100


def test_gen_rejects_zero_horizon(runner, tmp_path):
    result = runner.invoke(cli, ['gen', '--T', '0', '--out', str(tmp_path / 'bad')])
    assert result.exit_code == EXIT_USAGE


def test_analyze_informative(runner, dataset_dir, tmp_path):
    out = str(tmp_path / 'report')
    result = runner.invoke(cli, ['analyze', '--data', dataset_dir, '--out', out])
    assert result.exit_code == EXIT_OK, result.output
    report = read_json(os.path.join(out, 'informativity_report.json'))
    assert report['informative']
    assert report['dim_j_star'] == 95


def test_analyze_short_horizon_not_informative(runner, tmp_path):
    data = str(tmp_path / 'short')
    assert runner.invoke(cli, ['gen', '--T', '3', '--out', data]).exit_code == EXIT_OK
    result = runner.invoke(cli, ['analyze', '--data', data, '--out', str(tmp_path / 'report')])
    assert result.exit_code == EXIT_NOT_INFORMATIVE
    assert not read_json(str(tmp_path / 'report' / 'informativity_report.json'))['informative']


def test_attack_end_to_end(runner, dataset_dir, line_spec, tmp_path):
    out = str(tmp_path / 'attacked')
    spec = _write_spec(tmp_path / 'spec.json', line_spec)
    result = runner.invoke(cli, ['attack', '--data', dataset_dir, '--spec', spec, '--out', out])
    assert result.exit_code == EXIT_OK, result.output
    verification = read_json(os.path.join(out, 'verification.json'))
    assert verification['passed']
    assert verification['dim_j_star_after'] == verification['dim_j_star_before'] + 1
    assert os.path.exists(os.path.join(out, 'phi_X_plus.csv'))

    result = runner.invoke(cli, ['analyze', '--data', out, '--out', str(tmp_path / 'after')])
    assert result.exit_code == EXIT_NOT_INFORMATIVE


def test_attack_rejects_observable_direction(runner, dataset_dir, line_spec, tmp_path):
    spec = _write_spec(tmp_path / 'spec.json', line_spec, x0=[1.0, 0.0, 0.0, 0.0, 0.0])
    result = runner.invoke(cli, ['attack', '--data', dataset_dir, '--spec', spec, '--out', str(tmp_path / 'a')])
    assert result.exit_code == EXIT_USAGE


def test_attack_input_target_without_excitation(runner, dataset_dir, line_spec, tmp_path):
    spec = _write_spec(tmp_path / 'spec.json', line_spec, u0=[1.0])
    result = runner.invoke(cli, ['attack', '--data', dataset_dir, '--spec', spec, '--out', str(tmp_path / 'a')])
    assert result.exit_code == EXIT_DIMENSIONAL


def test_minnorm_end_to_end(runner, dataset_dir, tmp_path):
    out = str(tmp_path / 'minnorm')
    result = runner.invoke(cli, ['minnorm', '--data', dataset_dir, '--out', out, '--grid-step', '0.1'])
    assert result.exit_code == EXIT_OK, result.output
    report = read_json(os.path.join(out, 'minnorm_report.json'))
    assert not report['post_attack_informative']
    assert report['bound']['holds']
    assert sum(report['rho']) == pytest.approx(1.0)
    assert report['theorem2_lower_bound'] == pytest.approx(report['bound']['rhs'])


def test_minnorm_without_bound(runner, dataset_dir, tmp_path):
    out = str(tmp_path / 'minnorm')
    result = runner.invoke(cli, ['minnorm', '--data', dataset_dir, '--out', out, '--skip-bound'])
    assert result.exit_code == EXIT_OK, result.output
    assert read_json(os.path.join(out, 'minnorm_report.json'))['bound'] is None


@pytest.mark.parametrize('value', ['0', '-1e-9'])
def test_nonpositive_tolerance_is_usage_error(runner, tmp_path, value):
    out = tmp_path / 'run'
    result = runner.invoke(cli, [f'--tol={value}', 'gen', '--T', '10', '--out', str(out)])
    assert result.exit_code == EXIT_USAGE
    assert not out.exists()


def test_nonpositive_grid_step_fails_before_solving(runner, dataset_dir, tmp_path):
    out = tmp_path / 'minnorm'
    result = runner.invoke(cli, ['minnorm', '--data', dataset_dir, '--out', str(out), '--grid-step', '0'])
    assert result.exit_code == EXIT_USAGE
    assert not out.exists()


def test_gen_state_modes(runner, tmp_path):
    out = str(tmp_path / 'trajectory')
    result = runner.invoke(cli, ['gen', '--T', '20', '--states', 'trajectory', '--out', out])
    assert result.exit_code == EXIT_OK, result.output
    assert read_json(os.path.join(out, 'manifest.json'))['extra']['sim']['state_mode'] == 'trajectory'
    result = runner.invoke(cli, ['gen', '--T', '20', '--states', 'shuffled', '--out', str(tmp_path / 'bad')])
    assert result.exit_code == EXIT_USAGE


def test_minnorm_reports_energy_by_hop(runner, dataset_dir, tmp_path):
    out = str(tmp_path / 'minnorm')
    result = runner.invoke(cli, ['minnorm', '--data', dataset_dir, '--out', out, '--skip-bound'])
    assert result.exit_code == EXIT_OK, result.output
    report = read_json(os.path.join(out, 'minnorm_report.json'))
    assert report['hop_distances'] == [0, 0, 1, 2, 3]
    assert sum(report['hop_energy'].values()) == pytest.approx(1.0)
    assert report['hop_energy']['0'] + report['hop_energy']['1'] >= 0.5
    assert 1e-4 <= report['relative_error'] <= 1e-1


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(20))
def test_round_trip_over_seeds(seed, line_spec, tmp_path):
    runner = CliRunner()
    data = str(tmp_path / 'data')
    result = runner.invoke(cli, ['gen', '--seed', str(seed), '--out', data])
    assert result.exit_code == EXIT_OK, result.output
    result = runner.invoke(cli, ['analyze', '--data', data, '--out', str(tmp_path / 'before')])
    assert result.exit_code == EXIT_OK, result.output

    attacked = str(tmp_path / 'attacked')
    spec = _write_spec(tmp_path / 'spec.json', line_spec)
    result = runner.invoke(cli, ['attack', '--data', data, '--spec', spec, '--out', attacked,
                                 '--seed', str(seed)])
    assert result.exit_code == EXIT_OK, result.output
    result = runner.invoke(cli, ['analyze', '--data', attacked, '--out', str(tmp_path / 'after')])
    assert result.exit_code == EXIT_NOT_INFORMATIVE
    assert not read_json(str(tmp_path / 'after' / 'informativity_report.json'))['informative']
