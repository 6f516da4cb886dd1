"""
Exit codes and verdict labels for infoattack runs
"""

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_INFORMATIVE = 3
EXIT_DIMENSIONAL = 4
EXIT_UNOBSERVABLE_TARGET = 5
EXIT_DIRECTION = 6
EXIT_VERIFICATION_FAILED = 7
EXIT_MINNORM_INFEASIBLE = 8
EXIT_BOUND_VIOLATED = 9

EXIT_LABELS = {
    EXIT_OK: 'Success',
    EXIT_INTERNAL_ERROR: 'Internal error',
    EXIT_USAGE: 'Usage, schema or validation error',
    EXIT_NOT_INFORMATIVE: 'Not informative for strong observability',
    EXIT_DIMENSIONAL: 'Dimensional feasibility condition fails',
    EXIT_UNOBSERVABLE_TARGET: 'Target lies in the unobservable image',
    EXIT_DIRECTION: 'No admissible attack direction',
    EXIT_VERIFICATION_FAILED: 'Attack verification failed',
    EXIT_MINNORM_INFEASIBLE: 'Minimum-norm problem infeasible',
    EXIT_BOUND_VIOLATED: 'Lower-bound audit failed',
}

VERDICT_LABELS = {
    True: 'Informative',
    False: 'Not informative',
}


def get_exit_label(code):
    """Get human-readable label for an exit code"""
    return EXIT_LABELS.get(code, f'Unknown exit code {code}')


def get_verdict_label(informative):
    """Get human-readable informativity verdict"""
    return VERDICT_LABELS.get(bool(informative), str(informative))
