"""
JSON schemas for input files and emitted reports.

Inputs (system, attack spec) are validated on load; reports are validated
before they are written.
"""
import jsonschema

from app.core.exceptions import ConfigSchemaError

_MATRIX = {
    'type': 'array',
    'items': {'type': 'array', 'items': {'type': 'number'}},
}
_NULLABLE_MATRIX = {'anyOf': [_MATRIX, {'type': 'null'}]}
_VECTOR = {'type': 'array', 'items': {'type': 'number'}}
_NULLABLE_NUMBER = {'type': ['number', 'null']}

SYSTEM_SCHEMA = {
    'type': 'object',
    'required': ['n', 'm', 'p', 'B', 'C'],
    'properties': {
        'n': {'type': 'integer', 'minimum': 1},
        'm': {'type': 'integer', 'minimum': 0},
        'p': {'type': 'integer', 'minimum': 1},
        'l': {'type': 'integer', 'minimum': 0},
        'A': _NULLABLE_MATRIX,
        'B': _MATRIX,
        'C': _MATRIX,
        'D': _NULLABLE_MATRIX,
        'E': _NULLABLE_MATRIX,
        'F': _NULLABLE_MATRIX,
    },
}

ATTACK_SPEC_SCHEMA = {
    'type': 'object',
    'required': ['lambda', 'x0', 'u0'],
    'properties': {
        'lambda': {'type': 'number'},
        'x0': {**_VECTOR, 'minItems': 1},
        'u0': _VECTOR,
    },
    'additionalProperties': False,
}

INFORMATIVITY_REPORT_SCHEMA = {
    'type': 'object',
    'required': ['informative', 'cond_image', 'cond_kernel', 'T', 'n', 'dim_j_star', 'dim_v_star_data'],
    'properties': {
        'informative': {'type': 'boolean'},
        'cond_image': {'type': 'boolean'},
        'cond_kernel': {'type': 'boolean'},
        'T': {'type': 'integer'},
        'n': {'type': 'integer'},
        'dim_j_star': {'type': 'integer', 'minimum': 0},
        'dim_v_star_data': {'type': 'integer', 'minimum': 0},
        'isa_iterations': {'type': 'integer', 'minimum': 0},
        'witness': {'anyOf': [_VECTOR, {'type': 'null'}]},
        'witness_P_norm': {'type': 'number'},
    },
}

VERIFICATION_REPORT_SCHEMA = {
    'type': 'object',
    'required': ['passed', 'inclusion_ok', 'sigma_nonempty', 'eigen_ok', 'sigma_member_ok',
                 'not_informative', 'failures'],
    'properties': {
        'passed': {'type': 'boolean'},
        'dim_j_star_before': {'type': 'integer'},
        'dim_j_star_after': {'type': 'integer'},
        'v_orthogonality': {'type': 'number'},
        'inclusion_residual': {'type': 'number'},
        'inclusion_ok': {'type': 'boolean'},
        'sigma_nonempty': {'type': 'boolean'},
        'eigen_residual': _NULLABLE_NUMBER,
        'eigen_ok': {'type': 'boolean'},
        'sigma_member_residual': _NULLABLE_NUMBER,
        'sigma_member_ok': {'type': 'boolean'},
        'not_informative': {'type': 'boolean'},
        'witness': {'anyOf': [_VECTOR, {'type': 'null'}]},
        'stealth_residual': {'type': 'number'},
        'failures': {'type': 'array', 'items': {'type': 'string'}},
    },
}

MINNORM_REPORT_SCHEMA = {
    'type': 'object',
    'required': ['lambda_star', 'v_star', 'frob_norm', 'relative_error', 'rho', 'post_attack_informative'],
    'properties': {
        'lambda_star': {'type': 'number'},
        'v_star': _VECTOR,
        'x0_tilde': _VECTOR,
        'objective_value': {'type': 'number', 'minimum': 0},
        'frob_norm': {'type': 'number', 'minimum': 0},
        'relative_error': {'type': 'number', 'minimum': 0},
        'rho': _VECTOR,
        'iterations': {'type': 'integer'},
        'start_lambda': {'type': 'number'},
        'theorem2_lower_bound': _NULLABLE_NUMBER,
        'post_attack_informative': {'type': 'boolean'},
        'hop_distances': {'type': 'array', 'items': {'type': ['integer', 'null'], 'minimum': 0}},
        'hop_energy': {'type': 'object', 'additionalProperties': {'type': 'number', 'minimum': 0}},
        'bound': {
            'anyOf': [
                {'type': 'null'},
                {
                    'type': 'object',
                    'required': ['lhs', 'rhs', 'holds'],
                    'properties': {
                        'lhs': {'type': 'number'},
                        'rhs': {'type': 'number'},
                        'holds': {'type': 'boolean'},
                        'd_unobs': {'type': 'number'},
                        'sigma_min_X_minus': {'type': 'number'},
                        'sampled': {'type': 'boolean'},
                    },
                },
            ],
        },
    },
}

MANIFEST_SCHEMA = {
    'type': 'object',
    'required': ['command', 'config_hash', 'seed', 'tool_version', 'started_at', 'finished_at'],
    'properties': {
        'command': {'type': 'string'},
        'config_hash': {'type': 'string', 'pattern': '^[0-9a-f]{64}$'},
        'seed': {'type': ['integer', 'null']},
        'tool_version': {'type': 'string'},
        'started_at': {'type': 'string'},
        'finished_at': {'type': ['string', 'null']},
        'extra': {'type': 'object'},
    },
}

REPORT_SCHEMAS = {
    'informativity_report': INFORMATIVITY_REPORT_SCHEMA,
    'verification': VERIFICATION_REPORT_SCHEMA,
    'minnorm_report': MINNORM_REPORT_SCHEMA,
    'manifest': MANIFEST_SCHEMA,
}


def validate_document(document, schema, source):
    """
    Validate a parsed JSON document.

    Raises:
        ConfigSchemaError: the document violates the schema
    """
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.ValidationError as e:
        location = '/'.join(str(part) for part in e.absolute_path) or '<root>'
        raise ConfigSchemaError(source, f"{location}: {e.message}")


def validate_report(name, document):
    validate_document(document, REPORT_SCHEMAS[name], name)
