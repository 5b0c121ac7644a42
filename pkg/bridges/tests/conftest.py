import json
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

EN_SENT = (
    "Hiking is an outdoor activity which consists of walking in natural "
    "environments often on hiking trails."
)
NL_SENT = (
    "Wandelen is een buitenactiviteit waarbij je in een natuurlijke omgeving "
    "wandelt meestal op wandelpaden."
)


def bridge_cmd(kind: str, *extra: str) -> str:
    parts = [sys.executable, "-m", "csbridges", kind, "--fixtures", str(FIXTURES), *extra]
    return " ".join(parts)


def word_map_request(text_a=EN_SENT, text_b=NL_SENT):
    return {
        "kind": "word_map",
        "lang_a": "en",
        "lang_b": "nl",
        "text_a": text_a,
        "text_b": text_b,
        "prompt_role": "You are a language expert specializing in English and Dutch.",
        "prompt_format": "format",
        "prompt_user": "user",
    }


@pytest.fixture
def fixture_entries():
    entries = []
    for path in sorted(FIXTURES.glob("*.json")):
        loaded = json.loads(path.read_text())
        entries.extend(loaded if isinstance(loaded, list) else [loaded])
    return entries
