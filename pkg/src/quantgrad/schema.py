"""JSON schemas for every file the CLI writes.

They are plain dicts (draft 2020-12) so any validator can consume them;
``toolkit schema <name>`` prints one.
"""

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM}
_NULLABLE_NUM = {"type": ["number", "null"]}
_M = {"oneOf": [_NUM, _NUMS]}

PRESET = {
    "type": "object",
    "required": ["name", "kind", "objective", "start", "n_bits", "frac_bits", "m", "l",
                 "readout", "shots", "seed"],
    "properties": {
        "name": {"type": "string"},
        "kind": {"enum": ["gradient", "descent", "fqve", "vqe-baseline", "sweep"]},
        "objective": {"type": "string"},
        "start": _NUMS,
        "n_bits": {"type": "integer", "minimum": 1},
        "frac_bits": {"type": "integer", "minimum": 0},
        "signed": {"type": "boolean"},
        "m": {"oneOf": [_NUM, _NUMS, {"type": "null"}]},
        "l": {"type": "number", "exclusiveMinimum": 0},
        "readout": {"enum": ["twos", "unsigned"]},
        "centered": {"type": "boolean"},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "exact": {"type": "boolean"},
        "learning_rate": _NUM,
        "mode": {"enum": ["grid", "offgrid"]},
        "max_iters": {"type": "integer", "minimum": 1},
        "grad_norm_tol": _NULLABLE_NUM,
        "periodic": {"type": "boolean"},
        "sweep_kind": {"type": "string"},
        "grid": _NUMS,
        "description": {"type": "string"},
    },
}

GRADIENT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gradient estimate",
    "type": "object",
    "required": ["function", "point", "n_bits", "frac_bits", "m", "l", "shots", "seed",
                 "histogram", "top_outcome", "decoded", "top_probability", "oracle_calls"],
    "properties": {
        "function": {"type": "string"},
        "point": _NUMS,
        "n_bits": {"type": "integer"},
        "frac_bits": {"type": "integer"},
        "m": _M,
        "l": _NUM,
        "readout": {"enum": ["twos", "unsigned"]},
        "centered": {"type": "boolean"},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "histogram": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "top_outcome": {"type": "string", "pattern": "^[01]+$"},
        "top_frequency": _NULLABLE_NUM,
        "top_probability": {"type": "number", "minimum": 0, "maximum": 1.000000001},
        "codes": {"type": "array", "items": {"type": "integer"}},
        "decoded": _NUMS,
        "oracle_calls": {"type": "integer", "const": 1},
        "analytic_gradient": _NUMS,
        "preset": PRESET,
    },
}

_STEP = {
    "type": "object",
    "required": ["point", "f", "gradient", "outcome"],
    "properties": {
        "point": _NUMS,
        "f": _NUM,
        "gradient": _NUMS,
        "outcome": {"type": "string"},
        "top_probability": _NUM,
        "clamped": {"type": "boolean"},
    },
}

TRACE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "descent trace",
    "type": "object",
    "required": ["objective", "stop_reason", "iterations", "final_point", "final_value", "trace"],
    "properties": {
        "objective": {"type": "string"},
        "stop_reason": {"enum": ["converged", "max_iters", "diverged"]},
        "iterations": {"type": "integer", "minimum": 1},
        "oracle_calls": {"type": "integer", "minimum": 0},
        "final_point": _NUMS,
        "final_value": _NUM,
        "final_theta": _NUMS,
        "final_true_gradient": _NUMS,
        "config": {"type": "object"},
        "coordinate_map": {"type": ["object", "null"]},
        "trace": {"type": "array", "items": _STEP, "minItems": 1},
        "preset": PRESET,
    },
}

SWEEP = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "error sweep",
    "type": "object",
    "required": ["kind", "rows"],
    "properties": {
        "kind": {"enum": ["fracbits", "m"]},
        "preset": PRESET,
        "rows": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["setting", "decoded", "true_gradient", "abs_error", "expected_abs_error"],
                "properties": {
                    "setting": _NUM, "n_bits": {"type": "integer"}, "frac_bits": {"type": "integer"},
                    "m": _NUM, "top_outcome": {"type": "string"}, "decoded": _NUM,
                    "true_gradient": _NUM, "abs_error": {"type": "number", "minimum": 0},
                    "expected_abs_error": {"type": "number", "minimum": 0}, "top_probability": _NUM,
                },
            },
        },
    },
}

MANIFEST = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "run manifest",
    "type": "object",
    "required": ["preset", "seed", "toolkit_version", "kernel_backend", "parameters", "files"],
    "properties": {
        "preset": {"type": "string"},
        "seed": {"type": "integer"},
        "toolkit_version": {"type": "string"},
        "kernel_backend": {"enum": ["numba", "numpy"]},
        "parameters": PRESET,
        "files": {
            "type": "object",
            "additionalProperties": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        },
    },
}

SCHEMAS = {"gradient": GRADIENT, "trace": TRACE, "sweep": SWEEP, "manifest": MANIFEST}


def schema_for(kind: str) -> dict:
    """Schema of the main JSON output for a preset kind."""
    return {"gradient": GRADIENT, "descent": TRACE, "fqve": TRACE, "vqe-baseline": TRACE,
            "sweep": SWEEP}[kind]
