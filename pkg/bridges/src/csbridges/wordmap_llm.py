"""Word-pair mapping through an OpenAI-compatible chat-completions API.

The client's request already carries the three prompts (role, formatting,
user); this adapter forwards them verbatim as two system messages and one
user message, with temperature pinned to 0.0 so identical requests yield
identical mappings. The completion is expected to be the YAML mapping
document, optionally fenced; it is converted to the protocol's JSON shape
and left otherwise untouched (the pipeline's post-processing owns shape
repair).
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request

import yaml

from .protocol import error_response

TEMPERATURE = 0.0  # fixed: deterministic mapping output is part of the contract


def strip_code_fence(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        first_newline = text.find("\n")
        if first_newline >= 0:
            text = text[first_newline + 1 :]
        if text.rstrip().endswith("```"):
            text = text.rstrip()[:-3]
    return text.strip()


def _to_plain(node):
    """YAML loads into arbitrary python objects; keep only JSON-compatible ones."""
    if isinstance(node, dict):
        return {str(k): _to_plain(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [_to_plain(v) for v in node]
    if isinstance(node, (str, int, float, bool)) or node is None:
        return node
    return str(node)


def parse_mapping_document(completion: str) -> dict:
    """YAML completion text -> {"matches": {...}} JSON document."""
    loaded = yaml.safe_load(strip_code_fence(completion))
    if not isinstance(loaded, dict):
        raise ValueError(f"completion is not a mapping document: {type(loaded).__name__}")
    document = _to_plain(loaded)
    if "matches" not in document:
        document = {"matches": document}
    if not isinstance(document["matches"], dict):
        raise ValueError("'matches' is not a mapping")
    return document


class LLMWordMapper:
    def __init__(
        self,
        api_url: str,
        model: str,
        api_key_env: str = "OPENAI_API_KEY",
        timeout_s: float = 60.0,
    ):
        if not api_url:
            raise ValueError("word_map bridge needs --api-url (chat-completions endpoint)")
        self.api_url = api_url
        self.model = model
        self.api_key = os.environ.get(api_key_env, "")
        self.timeout_s = timeout_s

    def handle(self, request: dict) -> dict:
        body = {
            "model": self.model,
            "temperature": TEMPERATURE,
            "messages": [
                {"role": "system", "content": request["prompt_role"]},
                {"role": "system", "content": request["prompt_format"]},
                {"role": "user", "content": request["prompt_user"]},
            ],
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        http_request = urllib.request.Request(
            self.api_url, data=json.dumps(body).encode("utf-8"), headers=headers, method="POST"
        )
        try:
            with urllib.request.urlopen(http_request, timeout=self.timeout_s) as resp:
                payload = json.loads(resp.read())
        except urllib.error.HTTPError as exc:
            return error_response("llm_http_error", f"HTTP {exc.code} from {self.api_url}")
        except (urllib.error.URLError, TimeoutError) as exc:
            return error_response("llm_unreachable", str(exc))
        except json.JSONDecodeError as exc:
            return error_response("llm_bad_json", str(exc))

        try:
            completion = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            return error_response("llm_bad_shape", "no choices[0].message.content in reply")
        try:
            return parse_mapping_document(completion)
        except (yaml.YAMLError, ValueError) as exc:
            return error_response("llm_unparsable_yaml", str(exc))
