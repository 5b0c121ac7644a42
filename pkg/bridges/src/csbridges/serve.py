"""Bridge server: one backend kind per process, stdio or HTTP framing.

Each request is validated, dispatched to the configured handler, and
answered with either a protocol response or an error object; a failing
request never terminates the process.
"""

from __future__ import annotations

import http.server
import json
import sys
from dataclasses import dataclass

from .fixtures import FixtureStore
from .protocol import KINDS, error_response, validate_request
from .wordmap_llm import TEMPERATURE, LLMWordMapper


@dataclass(frozen=True)
class BridgeConfig:
    kind: str  # word_map | align | vc, exactly one per process
    model: str = ""
    device: str = "cpu"
    http_port: int | None = None  # None serves stdio
    fixtures_dir: str | None = None
    api_url: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = TEMPERATURE

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "word_map" and self.temperature != TEMPERATURE:
            raise ValueError(
                f"word_map temperature is fixed at {TEMPERATURE} and cannot be overridden"
            )


def build_handler(config: BridgeConfig):
    if config.fixtures_dir:
        return FixtureStore.load(config.fixtures_dir)
    if config.kind == "word_map":
        return LLMWordMapper(
            api_url=config.api_url, model=config.model, api_key_env=config.api_key_env
        )
    if config.kind == "align":
        from .align_mms import MMSAligner

        return MMSAligner(device=config.device)
    from .vc_knn import KNNConverter

    return KNNConverter(device=config.device)


def answer(config: BridgeConfig, handler, request) -> dict:
    if not isinstance(request, dict):
        return error_response("bad_request", "request is not a JSON object")
    if request.get("kind") != config.kind:
        return error_response(
            "bad_kind", f"this process serves {config.kind!r}, got {request.get('kind')!r}"
        )
    problems = validate_request(config.kind, request)
    if problems:
        return error_response("bad_request", "; ".join(problems))
    try:
        return handler.handle(request)
    except Exception as exc:  # per-request failures keep the process alive
        return error_response("internal", f"{type(exc).__name__}: {exc}")


def serve_stdio(config: BridgeConfig, handler, stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin.buffer
    stdout = stdout if stdout is not None else sys.stdout.buffer
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = error_response("bad_json", str(exc))
        else:
            response = answer(config, handler, request)
        stdout.write(json.dumps(response).encode("utf-8") + b"\n")
        stdout.flush()


def serve_http(config: BridgeConfig, handler) -> None:
    class Handler(http.server.BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", "0"))
            try:
                request = json.loads(self.rfile.read(length))
            except json.JSONDecodeError as exc:
                response = error_response("bad_json", str(exc))
            else:
                response = answer(config, handler, request)
            payload = json.dumps(response).encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = http.server.ThreadingHTTPServer(("127.0.0.1", config.http_port), Handler)
    print(f"serving {config.kind} on http://127.0.0.1:{server.server_address[1]}/", flush=True)
    server.serve_forever()


def serve(config: BridgeConfig) -> None:
    handler = build_handler(config)
    if config.http_port is not None:
        serve_http(config, handler)
    else:
        serve_stdio(config, handler)
