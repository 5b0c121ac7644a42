"""Shared backend protocol schemas and the float64 audio payload codec.

One JSON object per request and per response; stdio framing is one object
per line, HTTP framing is a POST body. Audio payloads are base64 of raw
little-endian float64 samples. A failing backend answers
{"error": {"code": ..., "message": ...}} and stays alive.
"""

from __future__ import annotations

import base64

import numpy as np
from jsonschema import Draft202012Validator

KINDS = ("word_map", "align", "vc")
POS_KEYS = ("noun", "verb", "adverb", "adjective", "interjection")

_B64 = {"type": "string", "pattern": "^[A-Za-z0-9+/]*={0,2}$"}
_SPAN = {
    "type": "array",
    "minItems": 2,
    "maxItems": 2,
    "items": {"type": "number"},
}

REQUEST_SCHEMAS = {
    "word_map": {
        "type": "object",
        "required": ["kind", "lang_a", "lang_b", "text_a", "text_b",
                     "prompt_role", "prompt_format", "prompt_user"],
        "properties": {
            "kind": {"const": "word_map"},
            "lang_a": {"type": "string"},
            "lang_b": {"type": "string"},
            "text_a": {"type": "string"},
            "text_b": {"type": "string"},
            "prompt_role": {"type": "string"},
            "prompt_format": {"type": "string"},
            "prompt_user": {"type": "string"},
        },
    },
    "align": {
        "type": "object",
        "required": ["kind", "sample_rate", "audio_b64", "tokens", "lang", "romanized"],
        "properties": {
            "kind": {"const": "align"},
            "sample_rate": {"type": "integer", "exclusiveMinimum": 0},
            "audio_b64": _B64,
            "tokens": {"type": "array", "minItems": 1, "items": {"type": "string"}},
            "lang": {"type": "string"},
            "romanized": {"type": "boolean"},
        },
    },
    "vc": {
        "type": "object",
        "required": ["kind", "sample_rate", "input_b64", "reference_b64"],
        "properties": {
            "kind": {"const": "vc"},
            "sample_rate": {"type": "integer", "exclusiveMinimum": 0},
            "input_b64": _B64,
            "reference_b64": _B64,
        },
    },
}

RESPONSE_SCHEMAS = {
    "word_map": {
        "type": "object",
        "required": ["matches"],
        "properties": {
            "matches": {
                "type": "object",
                "properties": {pos: {"type": "array"} for pos in POS_KEYS},
            }
        },
    },
    "align": {
        "type": "object",
        "required": ["spans"],
        "properties": {
            "spans": {"type": "array", "items": _SPAN},
            "scores": {"type": "array", "items": {"type": "number"}},
        },
    },
    "vc": {
        "type": "object",
        "required": ["audio_b64"],
        "properties": {"audio_b64": _B64},
    },
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["error"],
    "properties": {
        "error": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {
                "code": {"type": ["string", "integer"]},
                "message": {"type": "string"},
            },
        }
    },
}

_validators = {
    ("request", kind): Draft202012Validator(schema) for kind, schema in REQUEST_SCHEMAS.items()
}
_validators.update(
    {("response", kind): Draft202012Validator(schema) for kind, schema in RESPONSE_SCHEMAS.items()}
)
_error_validator = Draft202012Validator(ERROR_SCHEMA)


def validate_request(kind: str, obj) -> list[str]:
    return [e.message for e in _validators[("request", kind)].iter_errors(obj)]


def validate_response(kind: str, obj) -> list[str]:
    """Problems with a response; an error object is always acceptable."""
    if isinstance(obj, dict) and "error" in obj:
        return [e.message for e in _error_validator.iter_errors(obj)]
    return [e.message for e in _validators[("response", kind)].iter_errors(obj)]


def error_response(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def decode_audio(b64: str) -> np.ndarray:
    raw = base64.b64decode(b64.encode("ascii"))
    if len(raw) % 8:
        raise ValueError(f"audio payload of {len(raw)} bytes is not a float64 multiple")
    return np.frombuffer(raw, dtype="<f8")


def encode_audio(samples: np.ndarray) -> str:
    return base64.b64encode(
        np.ascontiguousarray(samples, dtype="<f8").tobytes()
    ).decode("ascii")
