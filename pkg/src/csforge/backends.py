"""Backend protocol: endpoints, transports, and reference implementations.

All three backend kinds (word mapper, forced aligner, voice converter)
speak the same framing: one JSON object per request, one per response,
either over a subprocess's standard streams (newline-delimited) or as an
HTTP POST body. Built-in reference backends answer in-process through the
identical request/response dictionaries.

Request shapes:
  {"kind": "word_map", "lang_a", "lang_b", "text_a", "text_b",
   "prompt_role", "prompt_format", "prompt_user"}
  {"kind": "align", "sample_rate", "audio_b64", "tokens": [...],
   "lang", "romanized": true|false}
  {"kind": "vc", "sample_rate", "input_b64", "reference_b64"}

Responses:
  {"matches": {"noun": [[a, b], ...], "verb": ..., "adverb": ...,
   "adjective": ..., "interjection": ...}}
  {"spans": [[start_s, end_s], ...], "scores": [...]}
  {"audio_b64": ...}

A failing backend answers {"error": {"code": ..., "message": ...}} and
stays alive. Audio payloads are base64 of raw little-endian float64
samples, so an identity conversion round-trips bit-exactly.
"""

from __future__ import annotations

import base64
import json
import selectors
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer
from .text import find_subsequence, norm_tokens
from .errors import (
    BackendMalformedResponse,
    BackendTimeout,
    BackendUnavailable,
    ProtocolError,
)

PROTOCOL_KINDS = ("word_map", "align", "vc")


def encode_audio(buf: AudioBuffer) -> str:
    return base64.b64encode(np.ascontiguousarray(buf.samples, dtype="<f8").tobytes()).decode("ascii")


def decode_audio(b64: str, sample_rate: int) -> AudioBuffer:
    try:
        raw = base64.b64decode(b64.encode("ascii"))
    except Exception as exc:
        raise BackendMalformedResponse(f"audio payload is not valid base64: {exc}") from exc
    if len(raw) % 8:
        raise BackendMalformedResponse(f"audio payload length {len(raw)} is not a float64 multiple")
    return AudioBuffer(np.frombuffer(raw, dtype="<f8"), sample_rate)


class AudioPayload:
    """Audio value inside a protocol request/response.

    In-process (builtin transport) it hands the buffer over directly,
    byte-for-byte; it renders to the wire base64 form only when a request
    actually crosses a process boundary.
    """

    __slots__ = ("buffer",)

    def __init__(self, buffer: AudioBuffer):
        self.buffer = buffer

    def b64(self) -> str:
        return encode_audio(self.buffer)


def payload_buffer(value, sample_rate: int) -> AudioBuffer:
    """Accept either an in-process AudioPayload or a wire base64 string."""
    if isinstance(value, AudioPayload):
        return value.buffer
    if isinstance(value, str):
        return decode_audio(value, sample_rate)
    raise BackendMalformedResponse(f"audio payload has type {type(value).__name__}")


def payload_n_samples(value) -> int:
    if isinstance(value, AudioPayload):
        return len(value.buffer)
    if isinstance(value, str):
        stripped = value.rstrip("\r\n")
        padding = stripped[-2:].count("=")
        return (len(stripped) * 3 // 4 - padding) // 8
    raise BackendMalformedResponse(f"audio payload has type {type(value).__name__}")


def _render_wire(obj):
    if isinstance(obj, AudioPayload):
        return obj.b64()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


@dataclass(frozen=True)
class BackendEndpoint:
    """Address plus protocol descriptor for one backend service."""

    transport: str  # "builtin" | "subprocess" | "http"
    address: str = "builtin"
    requires_romanization: bool = False
    timeout_s: float = 60.0
    max_in_flight: int = 4


def parse_endpoint(
    spec: str,
    requires_romanization: bool = False,
    timeout_s: float = 60.0,
    max_in_flight: int = 4,
) -> BackendEndpoint:
    """Parse "builtin", "cmd:<command line>" or an http(s) URL."""
    common = dict(
        requires_romanization=requires_romanization,
        timeout_s=timeout_s,
        max_in_flight=max_in_flight,
    )
    if spec == "builtin":
        return BackendEndpoint(transport="builtin", address="builtin", **common)
    if spec.startswith("cmd:"):
        cmd = spec[4:].strip()
        if not cmd:
            raise ValueError("empty backend command")
        return BackendEndpoint(transport="subprocess", address=cmd, **common)
    if spec.startswith(("http://", "https://")):
        return BackendEndpoint(transport="http", address=spec, **common)
    raise ValueError(f"unrecognized backend spec {spec!r} (expected builtin, cmd:... or a URL)")


class ProtocolClient:
    """Sends protocol requests to one endpoint, bounding in-flight calls."""

    def __init__(self, endpoint: BackendEndpoint, builtin_handler=None):
        self.endpoint = endpoint
        self._handler = builtin_handler
        self._sem = threading.Semaphore(max(1, endpoint.max_in_flight))
        self._proc: subprocess.Popen | None = None
        self._proc_lock = threading.Lock()
        if endpoint.transport == "builtin" and builtin_handler is None:
            raise ValueError("builtin endpoint needs a handler instance")

    def call(self, request: dict) -> dict:
        with self._sem:
            if self.endpoint.transport == "builtin":
                response = self._handler.handle(request)
            elif self.endpoint.transport == "subprocess":
                response = self._call_subprocess(request)
            else:
                response = self._call_http(request)
        if not isinstance(response, dict):
            raise BackendMalformedResponse(f"expected a JSON object, got {type(response).__name__}")
        err = response.get("error")
        if isinstance(err, dict):
            raise ProtocolError(str(err.get("code", "unknown")), str(err.get("message", "")))
        return response

    def close(self) -> None:
        with self._proc_lock:
            if self._proc is not None:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
                self._proc = None

    # subprocess transport: requests are serialized per process
    def _call_subprocess(self, request: dict) -> dict:
        with self._proc_lock:
            if self._proc is None or self._proc.poll() is not None:
                try:
                    self._proc = subprocess.Popen(
                        shlex.split(self.endpoint.address),
                        stdin=subprocess.PIPE,
                        stdout=subprocess.PIPE,
                    )
                except OSError as exc:
                    raise BackendUnavailable(f"cannot spawn {self.endpoint.address!r}: {exc}") from exc
            proc = self._proc
            try:
                proc.stdin.write(json.dumps(request, default=_render_wire).encode("utf-8") + b"\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise BackendUnavailable(f"backend process died: {exc}") from exc
            line = self._read_line(proc)
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise BackendMalformedResponse(f"undecodable backend line: {exc}") from exc

    def _read_line(self, proc: subprocess.Popen) -> bytes:
        sel = selectors.DefaultSelector()
        sel.register(proc.stdout, selectors.EVENT_READ)
        chunks = []
        while True:
            if not sel.select(timeout=self.endpoint.timeout_s):
                raise BackendTimeout(f"no response within {self.endpoint.timeout_s}s")
            chunk = proc.stdout.readline()
            if not chunk:
                raise BackendUnavailable("backend closed its output stream")
            chunks.append(chunk)
            if chunk.endswith(b"\n"):
                return b"".join(chunks)

    def _call_http(self, request: dict) -> dict:
        req = urllib.request.Request(
            self.endpoint.address,
            data=json.dumps(request, default=_render_wire).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.endpoint.timeout_s) as resp:
                body = resp.read()
        except urllib.error.HTTPError as exc:
            raise BackendUnavailable(f"HTTP {exc.code} from {self.endpoint.address}") from exc
        except TimeoutError as exc:
            raise BackendTimeout(f"no response within {self.endpoint.timeout_s}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise BackendTimeout(f"no response within {self.endpoint.timeout_s}s") from exc
            raise BackendUnavailable(f"cannot reach {self.endpoint.address}: {exc.reason}") from exc
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise BackendMalformedResponse(f"undecodable HTTP body: {exc}") from exc


# --- reference backends ------------------------------------------------------

_POS_KEYS = ("noun", "verb", "adverb", "adjective", "interjection")


class LexiconMapper:
    """word_map reference backend over a static bilingual lexicon.

    Entries are (side_a, side_b, pos) rows; a pair is emitted when one
    side occurs in text_a and the other in text_b (either orientation).
    Entries are indexed by their first normalized token so large union
    lexicons stay cheap per request.
    """

    def __init__(self, entries: list[tuple[str, str, str]]):
        self.entries = list(entries)
        self._by_first: dict[str, list[tuple[list[str], list[str], str, str, str]]] = {}
        for a, b, pos in entries:
            if pos not in _POS_KEYS:
                raise ValueError(f"lexicon entry ({a!r}, {b!r}) has unknown pos {pos!r}")
            norm_a, norm_b = norm_tokens(a), norm_tokens(b)
            if not norm_a or not norm_b:
                raise ValueError(f"lexicon entry ({a!r}, {b!r}) has an empty side")
            row = (norm_a, norm_b, pos, a, b)
            self._by_first.setdefault(norm_a[0], []).append(row)
            if norm_b[0] != norm_a[0]:
                self._by_first.setdefault(norm_b[0], []).append(row)

    @classmethod
    def from_tsv(cls, path) -> "LexiconMapper":
        entries = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 tab-separated columns")
                entries.append((cols[0], cols[1], cols[2]))
        return cls(entries)

    def handle(self, request: dict) -> dict:
        if request.get("kind") != "word_map":
            return {"error": {"code": "bad_kind", "message": f"got {request.get('kind')!r}"}}
        tokens_a = norm_tokens(request["text_a"])
        tokens_b = norm_tokens(request["text_b"])
        matches: dict[str, list[list[str]]] = {pos: [] for pos in _POS_KEYS}
        seen = set()
        candidates = []
        candidate_ids = set()
        for tok in dict.fromkeys(tokens_a):
            for row in self._by_first.get(tok, ()):
                if id(row) not in candidate_ids:
                    candidate_ids.add(id(row))
                    candidates.append(row)
        for norm_a, norm_b, pos, a, b in candidates:
            oriented = None
            if (
                find_subsequence(tokens_a, norm_a) >= 0
                and find_subsequence(tokens_b, norm_b) >= 0
            ):
                oriented = (a, b)
            elif (
                find_subsequence(tokens_a, norm_b) >= 0
                and find_subsequence(tokens_b, norm_a) >= 0
            ):
                oriented = (b, a)
            if oriented and (oriented, pos) not in seen:
                seen.add((oriented, pos))
                matches[pos].append([oriented[0], oriented[1]])
        return {"matches": matches}


class UniformAligner:
    """align reference backend: spans partition [0, duration] proportionally
    to per-token character counts. Declares requires_romanization so the
    client sends romanized tokens, making counts script-independent."""

    requires_romanization = True

    def handle(self, request: dict) -> dict:
        if request.get("kind") != "align":
            return {"error": {"code": "bad_kind", "message": f"got {request.get('kind')!r}"}}
        tokens = request["tokens"]
        if not tokens:
            return {"error": {"code": "no_tokens", "message": "empty token list"}}
        rate = int(request["sample_rate"])
        duration = payload_n_samples(request["audio_b64"]) / rate
        weights = [max(1, len(str(t).replace(" ", ""))) for t in tokens]
        total = sum(weights)
        spans = []
        acc = 0
        for w in weights:
            start = duration * acc / total
            acc += w
            end = duration * acc / total
            spans.append([start, end])
        return {"spans": spans, "scores": [1.0] * len(tokens)}


class IdentityConverter:
    """vc reference backend: returns the input payload untouched."""

    def handle(self, request: dict) -> dict:
        if request.get("kind") != "vc":
            return {"error": {"code": "bad_kind", "message": f"got {request.get('kind')!r}"}}
        return {"audio_b64": request["input_b64"]}
