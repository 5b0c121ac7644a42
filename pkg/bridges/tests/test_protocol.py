import numpy as np
import pytest

from csbridges.protocol import (
    decode_audio,
    encode_audio,
    error_response,
    validate_request,
    validate_response,
)

from conftest import word_map_request


def test_recorded_fixture_responses_validate(fixture_entries):
    assert len(fixture_entries) >= 3
    for entry in fixture_entries:
        kind = entry["match"]["kind"]
        problems = validate_response(kind, entry["response"])
        assert problems == [], f"{kind}: {problems}"


def test_error_objects_validate():
    assert validate_response("vc", error_response("nope", "broken")) == []


def test_malformed_error_object_rejected():
    assert validate_response("vc", {"error": {"code": "x"}}) != []


def test_response_schema_rejects_wrong_shapes():
    assert validate_response("word_map", {"pairs": {}}) != []
    assert validate_response("word_map", {"matches": {"noun": "hiking"}}) != []
    assert validate_response("align", {"spans": [[0.0]]}) != []
    assert validate_response("align", {"scores": [1.0]}) != []
    assert validate_response("vc", {"audio_b64": "not base64!!"}) != []


def test_request_schemas():
    assert validate_request("word_map", word_map_request()) == []
    incomplete = word_map_request()
    del incomplete["text_b"]
    assert validate_request("word_map", incomplete) != []
    assert validate_request(
        "align",
        {
            "kind": "align",
            "sample_rate": 16000,
            "audio_b64": "",
            "tokens": ["a"],
            "lang": "en",
            "romanized": True,
        },
    ) == []
    assert validate_request(
        "vc", {"kind": "vc", "sample_rate": 0, "input_b64": "", "reference_b64": ""}
    ) != []


def test_audio_codec_roundtrip():
    samples = np.linspace(-1, 1, 321)
    assert np.array_equal(decode_audio(encode_audio(samples)), samples)


def test_decode_audio_rejects_partial_float():
    with pytest.raises(ValueError):
        decode_audio("AAAA")  # 3 bytes
