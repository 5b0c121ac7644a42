"""Tokenization and romanization.

Tokenization is defined once here and shared by word mapping, alignment,
substitution and metrics: split on Unicode whitespace, strip leading and
trailing punctuation per token, drop tokens emptied by stripping.

Romanization is a deterministic transliteration to [a-z0-9 ]: NFKD
decomposition with diacritic stripping, plus the Cyrillic / Greek / Latin
fold tables below. Anything outside that repertoire (and outside common
punctuation, which is removed) raises UnmappableCharacter with the
offending code point.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import UnmappableCharacter

# Cyrillic table, Bulgarian-oriented with the common Russian/Ukrainian
# extras. Keys are lowercase NFC characters.
CYRILLIC = {
    "а": "a", "б": "b", "в": "v", "г": "g", "д": "d", "е": "e", "ж": "zh",
    "з": "z", "и": "i", "й": "y", "к": "k", "л": "l", "м": "m", "н": "n",
    "о": "o", "п": "p", "р": "r", "с": "s", "т": "t", "у": "u", "ф": "f",
    "х": "h", "ц": "ts", "ч": "ch", "ш": "sh", "щ": "sht", "ъ": "a",
    "ь": "y", "ю": "yu", "я": "ya",
    "э": "e", "ы": "y", "ё": "yo", "є": "ye", "і": "i", "ї": "yi", "ґ": "g",
}

# Greek table (ELOT-flavoured). Accented forms decompose to these via NFKD.
GREEK = {
    "α": "a", "β": "v", "γ": "g", "δ": "d", "ε": "e", "ζ": "z", "η": "i",
    "θ": "th", "ι": "i", "κ": "k", "λ": "l", "μ": "m", "ν": "n", "ξ": "x",
    "ο": "o", "π": "p", "ρ": "r", "σ": "s", "ς": "s", "τ": "t", "υ": "y",
    "φ": "f", "χ": "ch", "ψ": "ps", "ω": "o",
}

# Latin letters that NFKD does not decompose to ASCII.
LATIN_FOLD = {
    "ß": "ss", "æ": "ae", "œ": "oe", "ø": "o", "đ": "d", "ð": "d",
    "þ": "th", "ł": "l", "ħ": "h", "ŋ": "ng", "ı": "i", "ĸ": "k",
}

_TABLE = {**CYRILLIC, **GREEK, **LATIN_FOLD}


@dataclass(frozen=True)
class RomanizedText:
    """Lowercase [a-z0-9 ] text with single spaces."""

    text: str
    source_lang: str


def _map_char(ch: str, lang: str) -> str:
    if ch in _TABLE:
        return _TABLE[ch]
    if "a" <= ch <= "z" or "0" <= ch <= "9":
        return ch
    if ch.isspace():
        return " "
    decomposed = unicodedata.normalize("NFKD", ch)
    base = "".join(c for c in decomposed if not unicodedata.combining(c))
    if base != ch:
        return "".join(_map_char(c.lower(), lang) for c in base)
    if unicodedata.category(ch).startswith("P"):
        return ""
    raise UnmappableCharacter(ch, lang)


def romanize(text: str, lang: str) -> RomanizedText:
    """Deterministic transliteration to lowercase Latin; idempotent."""
    if not text:
        raise ValueError("romanize requires non-empty text")
    lowered = unicodedata.normalize("NFC", text).lower()
    mapped = "".join(_map_char(ch, lang) for ch in lowered)
    return RomanizedText(" ".join(mapped.split()), lang)


# --- tokenization -----------------------------------------------------------


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def token_affixes(token: str) -> tuple[str, str, str]:
    """Split a raw token into (leading punctuation, core, trailing punctuation)."""
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[:start], token[start:end], token[end:]


def strip_token(token: str) -> str:
    return token_affixes(token)[1]


def norm_token(token: str) -> str:
    """Comparison key: punctuation-stripped and lowercased."""
    return strip_token(token).lower()


def tokenize(text: str) -> list[str]:
    """Whitespace split, punctuation-stripped, empties dropped."""
    out = []
    for raw in text.split():
        core = strip_token(raw)
        if core:
            out.append(core)
    return out


def norm_tokens(text: str) -> list[str]:
    return [t.lower() for t in tokenize(text)]


def find_subsequence(haystack: list[str], needle: list[str], start: int = 0) -> int:
    """Index of the first contiguous occurrence of ``needle``, or -1."""
    if not needle:
        return -1
    limit = len(haystack) - len(needle)
    for i in range(start, limit + 1):
        if haystack[i : i + len(needle)] == needle:
            return i
    return -1
