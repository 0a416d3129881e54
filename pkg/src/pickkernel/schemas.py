"""JSON Schemas for CLI input and output documents."""

from __future__ import annotations

import jsonschema

_number = {"type": "number"}
COMPLEX = {
    "anyOf": [
        _number,
        {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
    ]
}
VECTOR = {"type": "array", "items": COMPLEX}
MATRIX = {"type": "array", "minItems": 1, "items": VECTOR}
POINTSET = {
    "anyOf": [
        {"type": "array", "items": COMPLEX, "minItems": 1},
        {
            "type": "object",
            "properties": {
                "points": {"type": "array", "items": COMPLEX, "minItems": 1},
                "labels": {"type": "array", "items": {"type": "string"}},
            },
            "required": ["points"],
        },
    ]
}
KERNEL = {
    "anyOf": [
        {"enum": ["szego", "bergman"]},
        {
            "type": "object",
            "properties": {
                "type": {"enum": ["szego", "bergman", "power", "gram_table"]},
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "matrix": MATRIX,
                "points": POINTSET,
            },
            "required": ["type"],
            "allOf": [
                {
                    "if": {"properties": {"type": {"const": "power"}}},
                    "then": {"required": ["alpha"]},
                },
                {
                    "if": {"properties": {"type": {"const": "gram_table"}}},
                    "then": {"required": ["matrix", "points"]},
                },
            ],
        },
    ]
}
TARGETS = {
    "type": "array",
    "minItems": 1,
    "items": {"anyOf": [COMPLEX, MATRIX]},
}
RANDOM_POINTS = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "radius": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    },
    "required": ["n"],
}


def _obj(required: list[str], **props) -> dict:
    return {"type": "object", "properties": props, "required": required}


INPUT_SCHEMAS = {
    "gram": _obj(["kernel", "points"], kernel=KERNEL, points=POINTSET),
    "psd": _obj(["matrix"], matrix=MATRIX),
    "fz": _obj(["kernel", "z", "sample"], kernel=KERNEL, z=COMPLEX, sample=POINTSET),
    "kz": _obj(["kernel", "z", "sample"], kernel=KERNEL, z=COMPLEX, sample=POINTSET),
    "cpp": _obj(
        ["kernel", "base_points", "sample"],
        kernel=KERNEL,
        base_points={"anyOf": [POINTSET, RANDOM_POINTS]},
        sample={"anyOf": [POINTSET, RANDOM_POINTS]},
    ),
    "irreducible": _obj(["kernel", "points"], kernel=KERNEL, points=POINTSET),
    "defect": _obj(
        ["kernel", "points", "targets"],
        kernel=KERNEL, points=POINTSET, targets=TARGETS,
        c={"type": "number", "minimum": 0},
    ),
    "multnorm": _obj(
        ["kernel", "points", "targets"],
        kernel=KERNEL, points=POINTSET, targets=TARGETS,
        tol={"type": "number", "exclusiveMinimum": 0},
    ),
    "pick": _obj(["z", "w"], z=POINTSET, w=VECTOR, kernel=KERNEL),
    "extend": _obj(["z", "w", "z_new"], z=POINTSET, w=VECTOR, z_new=COMPLEX, kernel=KERNEL),
    "prove": _obj(
        ["kernel", "ordering"],
        kernel=KERNEL,
        ordering={"anyOf": [POINTSET, RANDOM_POINTS]},
    ),
}

_PAIR = {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}
_PAIR_MATRIX = {"type": "array", "items": {"type": "array", "items": _PAIR}}
_VERDICT = {"enum": ["psd", "not_psd"]}
PSD_REPORT = {
    "type": "object",
    "properties": {
        "verdict": _VERDICT,
        "min_eigenvalue": _number,
        "tolerance": _number,
        "numerical_rank": {"type": "integer"},
        "witness": {"type": "array", "items": _PAIR},
    },
    "required": ["verdict", "min_eigenvalue", "tolerance", "witness"],
}
CRITERION_REPORT = {
    "type": "object",
    "properties": {
        "z": _PAIR,
        "verdict": _VERDICT,
        "min_eigenvalue": _number,
        "tolerance": _number,
        "matrix": _PAIR_MATRIX,
        "witness": {"type": "array", "items": _PAIR},
    },
    "required": ["z", "verdict", "min_eigenvalue", "tolerance", "matrix", "witness"],
}
EXTENSION_DISK = {
    "anyOf": [
        {
            "type": "object",
            "properties": {"center": _PAIR, "radius": {"type": "number", "minimum": 0}},
            "required": ["center", "radius"],
        },
        {"type": "object", "properties": {"empty": {"const": True}}, "required": ["empty"]},
    ]
}
_CHECK = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "passed": {"type": "boolean"},
        "verdict": _VERDICT,
        "min_eigenvalue": _number,
        "residual": _number,
    },
    "required": ["name", "passed"],
}
CERTIFICATE = {
    "type": "object",
    "properties": {
        "kernel": {"type": "object"},
        "ordering": {"type": "object"},
        "base_case": {"type": "array"},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "n": {"type": "integer"},
                    "checks": {"type": "array", "items": _CHECK},
                },
                "required": ["n", "checks"],
            },
        },
        "overall": {
            "anyOf": [
                {"const": "valid"},
                {
                    "type": "object",
                    "properties": {
                        "invalid_at": {
                            "type": "object",
                            "properties": {
                                "step": {"type": "integer"},
                                "check": {"type": "string"},
                            },
                            "required": ["step", "check"],
                        }
                    },
                    "required": ["invalid_at"],
                },
            ]
        },
    },
    "required": ["kernel", "ordering", "base_case", "steps", "overall"],
}
ERROR = _obj(["error", "detail"], error={"type": "string"}, detail={"type": "string"})


def _with_psd(**extra) -> dict:
    return {**PSD_REPORT, "properties": {**PSD_REPORT["properties"], **extra}}


OUTPUT_SCHEMAS = {
    "gram": _obj(["matrix"], matrix=_PAIR_MATRIX),
    "psd": PSD_REPORT,
    "fz": CRITERION_REPORT,
    "kz": _obj(["matrix", "psd"], matrix=_PAIR_MATRIX, psd=PSD_REPORT),
    "cpp": _obj(["verdict", "reports"], verdict=_VERDICT,
                reports={"type": "array", "items": CRITERION_REPORT}),
    "irreducible": _obj(
        ["nonvanishing", "independent_pairs", "offending_pairs"],
        nonvanishing={"type": "boolean"},
        independent_pairs={"type": "boolean"},
        offending_pairs={"type": "array"},
    ),
    "defect": _obj(["c", "matrix", "psd"], c=_number, matrix=_PAIR_MATRIX, psd=PSD_REPORT),
    "multnorm": _obj(["norm", "tol"], norm={"type": "number", "minimum": 0}, tol=_number),
    "pick": _with_psd(product_matrix=_PAIR_MATRIX, quotient_matrix=_PAIR_MATRIX,
                      quotient_verdict=_VERDICT, forms_agree={"type": "boolean"}),
    "extend": EXTENSION_DISK,
    "prove": CERTIFICATE,
}


def validate(doc, schema) -> None:
    jsonschema.validate(doc, schema)
