"""
infoattack command-line application

    infoattack gen      --system paper5 --T 100 --seed 42 --out run1/
    infoattack analyze  --data run1/
    infoattack attack   --data run1/ --spec spec.json --out run1_attacked/
    infoattack minnorm  --data run1/ --out run1_minnorm/
"""
import json
import os
import sys

import click
import numpy as np

from app.cli.error_handling import configure_logging, handle_cli_errors
from app.core.exceptions import BoundViolatedError, VerificationFailedError
from app.core.status import EXIT_NOT_INFORMATIVE, get_verdict_label
from app.core.subspace import Tolerance
from app.models.model_set import compute_annihilator
from app.services.attack_service import load_attack_spec, run_attack, verify_theorem1
from app.services.datagen_service import (
    INPUT_MODES, NOISE_MODES, STATE_MODES, SimConfig, load_system, simulate,
)
from app.services.informativity_service import is_informative_SO
from app.services.min_norm_service import (
    MultiStartConfig, alternating_solve, build_problem, energy_by_hop, hop_distances,
)
from app.services.unobservability_service import GridConfig, theorem2_check
from app.utils.io import (
    SYSTEM_FILE, read_dataset, write_dataset, write_json, write_matrix, write_system,
)
from app.utils.manifest import RunManifest
from settings import Config

POSITIVE = click.FloatRange(min=0.0, min_open=True)


def _resolve_system(system, data_dir):
    if system is None:
        system = os.path.join(data_dir, SYSTEM_FILE)
    return load_system(system)


def _load_inputs(ctx, data_dir, system):
    tol = ctx.obj['tol']
    sys_model = _resolve_system(system, data_dir)
    data = read_dataset(data_dir)
    data.check_system(sys_model)
    ann = compute_annihilator(sys_model.E, sys_model.F, tol)
    return tol, sys_model, data, ann


@click.group()
@click.option('--tol', 'tol_rel', type=POSITIVE, default=None,
              help='Relative rank tolerance for the whole run.')
@click.option('--verbose', is_flag=True, help='Log at DEBUG level.')
@click.pass_context
def cli(ctx, tol_rel, verbose):
    """Strong-observability informativity audit and data-transformation attacks."""
    configure_logging(Config, verbose)
    ctx.ensure_object(dict)
    ctx.obj['tol'] = Tolerance.from_config(Config, tol_rel)


@cli.command('gen')
@click.option('--system', default='paper5', show_default=True, help="'paper5' or a system JSON file.")
@click.option('--T', 'horizon', type=int, default=Config.DEFAULT_HORIZON, show_default=True, help='Horizon T.')
@click.option('--seed', type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.option('--out', required=True, type=click.Path(file_okay=False), help='Output dataset directory.')
@click.option('--states', 'state_mode', type=click.Choice(STATE_MODES), default='columnwise', show_default=True,
              help='columnwise: independent random X_- columns; trajectory: one run from a unit x0.')
@click.option('--input', 'input_mode', type=click.Choice(INPUT_MODES), default='zero', show_default=True)
@click.option('--pe-order', type=int, default=None, help='Excitation order for --input pe (default n+1).')
@click.option('--noise', 'noise_mode', type=click.Choice(NOISE_MODES), default='none', show_default=True)
@click.option('--noise-sigma', type=float, default=0.01, show_default=True)
@click.pass_context
@handle_cli_errors
def gen(ctx, system, horizon, seed, out, state_mode, input_mode, pe_order, noise_mode, noise_sigma):
    """Simulate data and write them as a dataset directory."""
    config = {'system': system, 'T': horizon, 'seed': seed, 'states': state_mode, 'input': input_mode,
              'pe_order': pe_order, 'noise': noise_mode, 'noise_sigma': noise_sigma, 'tol': ctx.obj['tol'].rel}
    manifest = RunManifest.start('gen', config, seed)
    sys_model = load_system(system)
    cfg = SimConfig(T=horizon, seed=seed, state_mode=state_mode, input_mode=input_mode, pe_order=pe_order,
                    noise_mode=noise_mode, noise_sigma=noise_sigma)
    data = simulate(sys_model, cfg)

    write_dataset(out, data)
    write_system(os.path.join(out, SYSTEM_FILE), sys_model)
    manifest.finish(n=data.n, m=data.m, p=data.p, T=data.T, sim=cfg.to_dict(),
                    outside_noise_model=cfg.outside_noise_model).write(out)
    click.echo(f"Dataset written to {out} (n={data.n}, m={data.m}, p={data.p}, T={data.T}, seed={seed})")


@cli.command('analyze')
@click.option('--data', 'data_dir', required=True, type=click.Path(exists=True, file_okay=False))
@click.option('--system', default=None, help="'paper5' or a system JSON file (default: the dataset's system.json).")
@click.option('--out', default=None, type=click.Path(file_okay=False), help='Report directory (default: stdout).')
@click.pass_context
@handle_cli_errors
def analyze(ctx, data_dir, system, out):
    """Test the data for informativity; exit 3 when not informative."""
    config = {'data': data_dir, 'system': system, 'tol': ctx.obj['tol'].rel}
    manifest = RunManifest.start('analyze', config)
    tol, sys_model, data, ann = _load_inputs(ctx, data_dir, system)
    report = is_informative_SO(data, sys_model, ann, tol)
    document = report.to_dict()

    if out is None:
        click.echo(json.dumps(document, indent=2, sort_keys=True))
    else:
        os.makedirs(out, exist_ok=True)
        write_json(os.path.join(out, 'informativity_report.json'), document, report='informativity_report')
        manifest.finish(n=data.n, T=data.T, informative=report.informative).write(out)
        click.echo(f"{get_verdict_label(report.informative)}: dim J* = {report.j_star.dim}, "
                   f"report written to {out}")
    if not report.informative:
        sys.exit(EXIT_NOT_INFORMATIVE)


@cli.command('attack')
@click.option('--data', 'data_dir', required=True, type=click.Path(exists=True, file_okay=False))
@click.option('--system', default=None, help="'paper5' or a system JSON file (default: the dataset's system.json).")
@click.option('--spec', 'spec_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--out', required=True, type=click.Path(file_okay=False))
@click.option('--seed', type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.pass_context
@handle_cli_errors
def attack(ctx, data_dir, system, spec_path, out, seed):
    """Synthesize the block transformation for an eigenpair and verify it."""
    config = {'data': data_dir, 'system': system, 'spec': spec_path, 'seed': seed, 'tol': ctx.obj['tol'].rel}
    manifest = RunManifest.start('attack', config, seed)
    spec = load_attack_spec(spec_path)
    tol, sys_model, data, ann = _load_inputs(ctx, data_dir, system)
    spec.validate(sys_model, tol)

    result = run_attack(data, sys_model, ann, spec, tol, seed=seed,
                        retries=Config.DIRECTION_RETRIES, margin_factor=Config.DIRECTION_MARGIN_FACTOR)
    report = verify_theorem1(data, result.attacked, sys_model, ann, result.v, spec, tol)

    write_dataset(out, result.attacked)
    write_system(os.path.join(out, SYSTEM_FILE), sys_model)
    for name, phi in result.transform.blocks().items():
        write_matrix(os.path.join(out, f'phi_{name}.csv'), phi)
    for name, delta in result.delta.items():
        write_matrix(os.path.join(out, f'delta_{name}.csv'), delta)
    write_json(os.path.join(out, 'attack.json'), result.to_dict())
    write_json(os.path.join(out, 'verification.json'), report.to_dict(), report='verification')
    manifest.finish(n=data.n, T=data.T, pinned=list(result.pinned), passed=report.passed).write(out)

    if not report.passed:
        raise VerificationFailedError(report.failures)
    click.echo(f"Attack verified: dim J* {report.dim_j_star_before} -> {report.dim_j_star_after}, "
               f"attacked data written to {out}")


@cli.command('minnorm')
@click.option('--data', 'data_dir', required=True, type=click.Path(exists=True, file_okay=False))
@click.option('--system', default=None, help="'paper5' or a system JSON file (default: the dataset's system.json).")
@click.option('--out', required=True, type=click.Path(file_okay=False))
@click.option('--seed', type=int, default=Config.DEFAULT_SEED, show_default=True,
              help='Seed of the model-set sampler.')
@click.option('--skip-bound', is_flag=True, help='Skip the lower-bound audit.')
@click.option('--grid-step', type=POSITIVE, default=None,
              help='Grid step of the unobservability metric.')
@click.pass_context
@handle_cli_errors
def minnorm(ctx, data_dir, system, out, seed, skip_bound, grid_step):
    """Compute a near-minimal X_+ perturbation that breaks informativity."""
    config = {'data': data_dir, 'system': system, 'seed': seed, 'skip_bound': skip_bound,
              'grid_step': grid_step, 'tol': ctx.obj['tol'].rel}
    manifest = RunManifest.start('minnorm', config, seed)
    tol, sys_model, data, ann = _load_inputs(ctx, data_dir, system)

    problem = build_problem(data, sys_model, ann, tol)
    solution = alternating_solve(problem, tol, MultiStartConfig.from_config(Config))
    attacked = solution.attacked(data)
    post = is_informative_SO(attacked, sys_model, ann, tol)

    bound = None
    if not skip_bound:
        bound = theorem2_check(solution, data, sys_model, ann, tol,
                               GridConfig.from_config(Config, grid_step), Config.MODEL_SET_SAMPLES, seed)

    document = solution.to_dict()
    document['post_attack_informative'] = post.informative
    if sys_model.A_true is not None:
        hops = hop_distances(sys_model.A_true, sys_model.C)
        document['hop_distances'] = [None if np.isinf(h) else int(h) for h in hops]
        document['hop_energy'] = {'unreachable' if np.isinf(h) else str(int(h)): share
                                   for h, share in energy_by_hop(solution.rho, hops).items()}
    document['bound'] = None if bound is None else bound.to_dict()

    write_dataset(out, attacked)
    write_system(os.path.join(out, SYSTEM_FILE), sys_model)
    write_matrix(os.path.join(out, 'delta_X_plus.csv'), solution.delta_X_plus)
    write_matrix(os.path.join(out, 'phi_X_plus.csv'), solution.phi_x_plus)
    write_json(os.path.join(out, 'minnorm_report.json'), document, report='minnorm_report')
    manifest.finish(n=data.n, T=data.T, dim_K=problem.K.dim,
                    relative_error=solution.relative_error).write(out)

    click.echo(f"lambda* = {solution.lambda_star:.6g}, ||Delta||_F = {solution.frob_norm:.6e}, "
               f"relative error = {solution.relative_error:.3e}")
    click.echo('rho = ' + np.array2string(solution.rho, precision=4))
    if post.informative:
        raise VerificationFailedError(['min-norm attacked data are still informative'])
    if bound is not None:
        click.echo(f"bound: {bound.lhs:.6e} >= {bound.rhs:.6e} ({'holds' if bound.holds else 'violated'})")
        if not bound.holds:
            raise BoundViolatedError(bound.lhs, bound.rhs)


if __name__ == '__main__':
    cli()
