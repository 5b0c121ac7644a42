"""Recorded-fixture backend: replay canned responses for CI.

A fixture directory holds *.json files, each either one object or a list
of objects shaped {"match": {...}, "response": {...}}. A request is
answered by the first fixture (files in sorted order) whose "match"
entries all equal the corresponding request fields; list-valued match
entries compare element-wise. Unmatched requests get an error object.
"""

from __future__ import annotations

import json
from pathlib import Path

from .protocol import error_response


class FixtureStore:
    def __init__(self, entries: list[dict]):
        for entry in entries:
            if "match" not in entry or "response" not in entry:
                raise ValueError("fixture entries need 'match' and 'response' keys")
        self.entries = entries

    @classmethod
    def load(cls, directory: str | Path) -> "FixtureStore":
        entries: list[dict] = []
        paths = sorted(Path(directory).glob("*.json"))
        if not paths:
            raise FileNotFoundError(f"no *.json fixtures under {directory}")
        for path in paths:
            loaded = json.loads(path.read_text(encoding="utf-8"))
            entries.extend(loaded if isinstance(loaded, list) else [loaded])
        return cls(entries)

    def handle(self, request: dict) -> dict:
        for entry in self.entries:
            if all(request.get(key) == value for key, value in entry["match"].items()):
                return entry["response"]
        return error_response(
            "no_fixture",
            f"no recorded fixture matches this {request.get('kind')!r} request",
        )
