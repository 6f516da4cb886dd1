"""
Error Handling and Logging Configuration for the infoattack CLI
Maps toolkit exceptions to documented exit codes and configures logging
"""
import functools
import logging
import sys

import click

from app.core.exceptions import InfoAttackError
from app.core.status import EXIT_INTERNAL_ERROR, get_exit_label

logger = logging.getLogger('app')


def configure_logging(config, verbose=False):
    """
    Configure package logging for a CLI run

    - One stream handler (stderr, or stdout with LOG_TO_STDOUT)
    - Level from LOG_LEVEL; --verbose forces DEBUG

    Args:
        config: Config class
        verbose: Force DEBUG level
    """
    stream = sys.stdout if config.LOG_TO_STDOUT else sys.stderr
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL, logging.INFO)

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    stream_handler = logging.StreamHandler(stream)
    stream_handler.setLevel(level)
    formatter = logging.Formatter(
        '[%(asctime)s] %(levelname)s in %(module)s: %(message)s'
    )
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)
    logger.setLevel(level)
    logger.propagate = False


def handle_cli_errors(func):
    """
    Wrap a click command so that every failure ends in a documented exit code

    - InfoAttackError subclasses: message to stderr, exit with the class exit_code
    - Anything else: full traceback logged, exit 1
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InfoAttackError as error:
            code = error.exit_code
            logger.warning(f'{type(error).__name__} (exit {code}, {get_exit_label(code)}): {error}')
            click.echo(f'Error: {error}', err=True)
            sys.exit(code)
        except click.exceptions.Exit:
            raise
        except Exception as error:
            logger.error(
                f'Unhandled Exception\n'
                f'Exception Type: {type(error).__name__}\n'
                f'Exception Message: {str(error)}',
                exc_info=True
            )
            click.echo(f'Internal error: {error}', err=True)
            sys.exit(EXIT_INTERNAL_ERROR)
    return wrapper
