import http.server
import json
import sys
import threading

import numpy as np
import pytest

from csforge.audio import AudioBuffer
from csforge.backends import (
    BackendEndpoint,
    IdentityConverter,
    LexiconMapper,
    ProtocolClient,
    UniformAligner,
    decode_audio,
    encode_audio,
    parse_endpoint,
)
from csforge.errors import (
    BackendMalformedResponse,
    BackendTimeout,
    BackendUnavailable,
    ProtocolError,
)

from conftest import EN_NL_LEXICON, EN_SENT, NL_SENT


def test_parse_endpoint_forms():
    assert parse_endpoint("builtin").transport == "builtin"
    ep = parse_endpoint("cmd:python3 -m something --flag")
    assert ep.transport == "subprocess"
    assert ep.address == "python3 -m something --flag"
    assert parse_endpoint("http://127.0.0.1:9/x").transport == "http"
    with pytest.raises(ValueError):
        parse_endpoint("ftp://nope")
    with pytest.raises(ValueError):
        parse_endpoint("cmd:")


def test_audio_codec_roundtrip_bit_exact():
    buf = AudioBuffer(np.random.default_rng(3).standard_normal(777), 16000)
    back = decode_audio(encode_audio(buf), 16000)
    assert back == buf


def test_decode_audio_rejects_junk():
    with pytest.raises(BackendMalformedResponse):
        decode_audio("@@@not base64@@@", 16000)


# --- reference mapper ----------------------------------------------------------


def word_map_request(text_a, text_b, lang_a="en", lang_b="nl"):
    return {
        "kind": "word_map",
        "lang_a": lang_a,
        "lang_b": lang_b,
        "text_a": text_a,
        "text_b": text_b,
        "prompt_role": "",
        "prompt_format": "",
        "prompt_user": "",
    }


def test_lexicon_mapper_finds_reference_pairs():
    mapper = LexiconMapper(EN_NL_LEXICON)
    response = mapper.handle(word_map_request(EN_SENT, NL_SENT))
    assert ["Hiking", "Wandelen"] in response["matches"]["noun"]
    assert ["hiking trails", "wandelpaden"] in response["matches"]["noun"]
    assert ["walking", "wandelt"] in response["matches"]["verb"]
    assert response["matches"]["interjection"] == []


def test_lexicon_mapper_identity_sentence():
    words = ["alfa", "bravo", "charlie"]
    mapper = LexiconMapper([(w, w, "noun") for w in words])
    sentence = " ".join(words)
    response = mapper.handle(word_map_request(sentence, sentence))
    assert response["matches"]["noun"] == [[w, w] for w in words]


def test_lexicon_mapper_reversed_orientation():
    mapper = LexiconMapper([("Wandelen", "Hiking", "noun")])
    response = mapper.handle(word_map_request(EN_SENT, NL_SENT))
    assert response["matches"]["noun"] == [["Hiking", "Wandelen"]]


def test_lexicon_mapper_absent_words_not_matched():
    mapper = LexiconMapper([("castle", "kasteel", "noun")])
    response = mapper.handle(word_map_request(EN_SENT, NL_SENT))
    assert response["matches"]["noun"] == []


def test_lexicon_mapper_rejects_bad_pos():
    with pytest.raises(ValueError):
        LexiconMapper([("a", "b", "pronoun")])


def test_lexicon_tsv_loading(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("Hiking\tWandelen\tnoun\n# comment\n\nwalking\twandelt\tverb\n")
    mapper = LexiconMapper.from_tsv(path)
    assert len(mapper.entries) == 2
    with pytest.raises(ValueError):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only\ttwo\n")
        LexiconMapper.from_tsv(bad)


# --- reference aligner -----------------------------------------------------------


def align_request(tokens, duration_s=2.0, rate=16000):
    buf = AudioBuffer(np.zeros(int(duration_s * rate)), rate)
    return {
        "kind": "align",
        "sample_rate": rate,
        "audio_b64": encode_audio(buf),
        "tokens": tokens,
        "lang": "en",
        "romanized": True,
    }


def test_uniform_aligner_proportional_split():
    response = UniformAligner().handle(align_request(["hello", "world", "there"]))
    spans = response["spans"]
    assert spans == [[0.0, 2 / 3], [2 / 3, 4 / 3], [4 / 3, 2.0]]
    assert response["scores"] == [1.0, 1.0, 1.0]


def test_uniform_aligner_single_token():
    response = UniformAligner().handle(align_request(["hello"]))
    assert response["spans"] == [[0.0, 2.0]]


def test_uniform_aligner_char_weighting():
    response = UniformAligner().handle(align_request(["ab", "abacus"], duration_s=4.0))
    assert response["spans"] == [[0.0, 1.0], [1.0, 4.0]]


# --- identity converter ------------------------------------------------------------


def test_identity_converter_passthrough():
    buf = AudioBuffer(np.linspace(-0.5, 0.5, 64), 16000)
    payload = encode_audio(buf)
    response = IdentityConverter().handle(
        {"kind": "vc", "sample_rate": 16000, "input_b64": payload, "reference_b64": payload}
    )
    assert response["audio_b64"] == payload


def test_wrong_kind_yields_protocol_error():
    client = ProtocolClient(BackendEndpoint(transport="builtin"), IdentityConverter())
    with pytest.raises(ProtocolError):
        client.call({"kind": "align"})


# --- subprocess transport ------------------------------------------------------------

ECHO_SERVER = (
    "import sys, json\n"
    "for line in sys.stdin:\n"
    "    req = json.loads(line)\n"
    "    sys.stdout.write(json.dumps({'echo': req['kind']}) + '\\n')\n"
    "    sys.stdout.flush()\n"
)


def spawn_client(tmp_path, server_code, timeout_s=5.0):
    script = tmp_path / "server.py"
    script.write_text(server_code)
    endpoint = parse_endpoint(f"cmd:{sys.executable} {script}", timeout_s=timeout_s)
    return ProtocolClient(endpoint)


def test_subprocess_roundtrip(tmp_path):
    client = spawn_client(tmp_path, ECHO_SERVER)
    try:
        assert client.call({"kind": "vc"}) == {"echo": "vc"}
        assert client.call({"kind": "align"}) == {"echo": "align"}
    finally:
        client.close()


def test_subprocess_timeout(tmp_path):
    client = spawn_client(
        tmp_path, "import time, sys\nsys.stdin.readline()\ntime.sleep(30)\n", timeout_s=0.3
    )
    try:
        with pytest.raises(BackendTimeout):
            client.call({"kind": "vc"})
    finally:
        client._proc.kill()


def test_subprocess_unavailable():
    client = ProtocolClient(parse_endpoint("cmd:/definitely/not/a/binary"))
    with pytest.raises(BackendUnavailable):
        client.call({"kind": "vc"})


def test_subprocess_malformed_response(tmp_path):
    client = spawn_client(
        tmp_path, "import sys\nsys.stdin.readline()\nprint('not json', flush=True)\n"
    )
    try:
        with pytest.raises(BackendMalformedResponse):
            client.call({"kind": "vc"})
    finally:
        client.close()


def test_subprocess_protocol_error(tmp_path):
    server = (
        "import sys, json\n"
        "sys.stdin.readline()\n"
        "print(json.dumps({'error': {'code': 'boom', 'message': 'nope'}}), flush=True)\n"
    )
    client = spawn_client(tmp_path, server)
    try:
        with pytest.raises(ProtocolError, match="boom"):
            client.call({"kind": "vc"})
    finally:
        client.close()


# --- http transport -----------------------------------------------------------------


class _Handler(http.server.BaseHTTPRequestHandler):
    def do_POST(self):
        body = self.rfile.read(int(self.headers["Content-Length"]))
        request = json.loads(body)
        payload = json.dumps({"echo": request["kind"]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_backend():
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/"
    server.shutdown()


def test_http_roundtrip(http_backend):
    client = ProtocolClient(parse_endpoint(http_backend))
    assert client.call({"kind": "word_map"}) == {"echo": "word_map"}


def test_http_unreachable():
    client = ProtocolClient(parse_endpoint("http://127.0.0.1:1/", timeout_s=0.5))
    with pytest.raises(BackendUnavailable):
        client.call({"kind": "vc"})
