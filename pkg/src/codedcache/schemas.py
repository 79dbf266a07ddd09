"""Versioned JSON schemas and CSV headers of every machine-readable output.

``docs/schemas.md`` describes the same structures in prose; the test-suite
validates CLI output against the dictionaries below with ``jsonschema``.
"""

from __future__ import annotations

from typing import Any, Dict

SCHEMA_VERSION = "1"

PLOT_CSV_HEADER = ("M", "R", "source")
PLOT_SOURCES = ("new_bound", "known_bound", "achievable", "exact")
GRID_CSV_HEADER = ("n", "k", "case", "memory", "cut_set", "prior_best", "new_bound", "gap")

_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_BOUND = {
    "type": "object",
    "required": ["a", "b", "c", "origin"],
    "properties": {"a": _RAT, "b": _RAT, "c": _RAT, "origin": {"type": "string"}},
}
_SEGMENT = {
    "type": "object",
    "required": ["interval", "status", "lower", "upper"],
    "properties": {
        "interval": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2},
        "status": {"enum": ["exact", "gap"]},
        "lower": {"type": "string"},
        "upper": {"type": "string"},
        "lower_origin": {"type": "string"},
        "upper_origin": {"type": "string"},
    },
}
_HEADER = {"schema": {"type": "string"}, "version": {"type": "string"}}

SCHEMAS: Dict[str, Dict[str, Any]] = {
    "bounds": {
        "type": "object",
        "required": ["schema", "n", "k", "case", "bounds", "segments"],
        "properties": {
            **_HEADER,
            "n": {"type": "integer"},
            "k": {"type": "integer"},
            "case": {"type": "string"},
            "degenerate": {"type": "boolean"},
            "bounds": {"type": "array", "items": _BOUND},
            "segments": {"type": "array", "items": _SEGMENT},
            "m": _RAT,
            "envelope": _RAT,
            "achievable": _RAT,
            "status": {"enum": ["exact", "gap"]},
            "bracket": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2},
            "comparison": {"type": ["object", "null"]},
        },
    },
    "simulate": {
        "type": "object",
        "required": ["schema", "reports", "all_decoded"],
        "properties": {
            **_HEADER,
            "all_decoded": {"type": "boolean"},
            "reports": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["n", "k", "scheme", "demand", "memory", "rate", "decode_ok", "file_bits", "seed"],
                    "properties": {
                        "n": {"type": "integer"},
                        "k": {"type": "integer"},
                        "scheme": {"enum": ["chen", "yu"]},
                        "t": {"type": "integer"},
                        "demand": {"type": "array", "items": {"type": "integer"}},
                        "rate": _RAT,
                        "decode_ok": {"type": "boolean"},
                        "file_bits": {"type": "integer"},
                        "seed": {"type": "integer"},
                        "label": {"type": "string"},
                    },
                },
            },
        },
    },
    "lp": {
        "type": "object",
        "required": ["schema", "m", "value", "implied", "problem"],
        "properties": {
            **_HEADER,
            "m": _RAT,
            "value": _RAT,
            "method": {"type": "string"},
            "implied": _BOUND,
            "reduced_rows": {"type": "integer"},
            "reduced_cols": {"type": "integer"},
            "problem": {"type": "object"},
        },
    },
    "certificate": {
        "type": "object",
        "required": ["schema", "problem", "m", "value", "certificate"],
        "properties": {
            **_HEADER,
            "problem": {
                "type": "object",
                "required": ["n", "k", "demands", "symmetry", "cap"],
                "properties": {
                    "n": {"type": "integer"},
                    "k": {"type": "integer"},
                    "demands": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                    "symmetry": {"type": "boolean"},
                    "cap": {"type": "integer"},
                },
            },
            "m": _RAT,
            "value": _RAT,
            "certificate": {
                "type": "object",
                "required": ["multipliers"],
                "properties": {
                    "multipliers": {
                        "type": "array",
                        "items": {"type": "array", "prefixItems": [{"type": "string"}, _RAT]},
                    },
                    "implied": _BOUND,
                },
            },
        },
    },
    "verify": {
        "type": "object",
        "required": ["schema", "ok", "implied"],
        "properties": {**_HEADER, "ok": {"type": "boolean"}, "implied": _BOUND, "value_at_m": _RAT, "m": _RAT},
    },
    "prove": {
        "type": "object",
        "required": ["schema", "n", "k", "theorem", "ok", "claimed"],
        "properties": {
            **_HEADER,
            "n": {"type": "integer"},
            "k": {"type": "integer"},
            "theorem": {"type": "integer"},
            "ok": {"type": "boolean"},
            "claimed": _BOUND,
            "proved": _BOUND,
            "steps": {"type": "integer"},
            "error": {"type": "string"},
        },
    },
    "run_record": {
        "type": "object",
        "required": ["schema", "command", "config", "inputs", "outputs", "version", "timestamp"],
        "properties": {
            **_HEADER,
            "command": {"type": "array", "items": {"type": "string"}},
            "config": {"type": "object"},
            "inputs": {"type": "object"},
            "outputs": {
                "type": "object",
                "required": ["stdout", "exit_code"],
                "properties": {"stdout": {"type": "string"}, "exit_code": {"type": "integer"}, "files": {"type": "object"}},
            },
            "timestamp": {"type": "string"},
        },
    },
}


def header(name: str) -> Dict[str, str]:
    return {"schema": f"codedcache.{name}", "version": SCHEMA_VERSION}


def validate(doc: Any, name: str) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match."""
    import jsonschema

    jsonschema.validate(doc, SCHEMAS[name])
