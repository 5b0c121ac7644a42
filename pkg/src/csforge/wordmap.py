"""POS-categorized equivalent word pairs between two languages.

The mapper backend returns a raw document shaped like the JSON rendering
of the prompt's YAML schema; ``postprocess_mapping`` turns arbitrary
backend output into a valid WordPairMap by dropping unpaired elements,
inserting missing keys, normalizing container shapes and enforcing the
occurs-in-transcript invariant.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass

from .backends import ProtocolClient
from .errors import UnparsableDocument
from .text import find_subsequence, norm_token, norm_tokens


class POSCategory(enum.Enum):
    NOUN = "noun"
    VERB = "verb"
    ADVERB = "adverb"
    ADJECTIVE = "adjective"
    INTERJECTION = "interjection"

    @classmethod
    def parse(cls, tag: str) -> "POSCategory":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            raise ValueError(f"unknown POS tag {tag!r}") from None

    def __str__(self) -> str:
        return self.value


POS_ORDER = tuple(POSCategory)

# Substitution pool used for corpus generation by default; the full
# five-category set is what mapping requests ask the backend to produce.
DEFAULT_POS_POOL = frozenset({POSCategory.NOUN, POSCategory.VERB, POSCategory.INTERJECTION})


@dataclass(frozen=True)
class WordPair:
    """Equivalent token spans (1..k whitespace-separated tokens per side)."""

    side_a: str
    side_b: str
    pos: POSCategory

    def __post_init__(self):
        for side in (self.side_a, self.side_b):
            if not norm_token(side.strip()):
                raise ValueError(f"word pair side {side!r} is empty or pure punctuation")

    def side(self, is_a: bool) -> str:
        return self.side_a if is_a else self.side_b


@dataclass(frozen=True)
class WordPairMap:
    """Pairs grouped by POS; all five categories always present."""

    pairs: dict[POSCategory, tuple[WordPair, ...]]

    def __post_init__(self):
        filled = {pos: tuple(self.pairs.get(pos, ())) for pos in POS_ORDER}
        object.__setattr__(self, "pairs", filled)

    def eligible(self, pos_pool=None) -> list[WordPair]:
        pool = POS_ORDER if pos_pool is None else [p for p in POS_ORDER if p in pos_pool]
        return [pair for pos in pool for pair in self.pairs[pos]]

    def total(self) -> int:
        return sum(len(v) for v in self.pairs.values())

    def to_document(self) -> dict:
        return {
            "matches": {
                pos.value: [[p.side_a, p.side_b] for p in self.pairs[pos]] for pos in POS_ORDER
            }
        }


# --- prompt construction -----------------------------------------------------

ROLE_PROMPT = "You are a language expert specializing in {lang1} and {lang2}."
FORMAT_PROMPT = (
    "The final outputs must be returned in YAML format, and each component in part of "
    "speech is a list of words with the same meaning. The YAML file structure must "
    "strictly adhere to the following format: {format}"
)
USER_PROMPT = (
    "Find pairs of words with the same meaning and sort it with the part of speech "
    "information in the given two sentences from different languages. "
    "{lang1} sentence: {trans1}, {lang2} sentence: {trans2}"
)
OUTPUT_FORMAT = (
    "matches:\n"
    "    noun:\n        - [[n1, n2]]\n"
    "    verb:\n        - [[v1, v2]]\n"
    "    adverb:\n        - [[a1, a2]]\n"
    "    adjective:\n        - [[a'1, a'2]]\n"
    "    interjection:\n        - [[i1, i2]]"
)

LANGUAGE_NAMES = {
    "bg": "Bulgarian", "hr": "Croatian", "cs": "Czech", "da": "Danish",
    "nl": "Dutch", "en": "English", "et": "Estonian", "fi": "Finnish",
    "fr": "French", "de": "German", "el": "Greek", "hu": "Hungarian",
    "it": "Italian", "lv": "Latvian", "lt": "Lithuanian", "mt": "Maltese",
    "pl": "Polish", "pt": "Portuguese", "ro": "Romanian", "sk": "Slovak",
    "sl": "Slovenian", "es": "Spanish", "sv": "Swedish",
}


def language_name(code: str) -> str:
    return LANGUAGE_NAMES.get(code, code)


def build_request(lang_a: str, lang_b: str, txt_a: str, txt_b: str) -> dict:
    name_a, name_b = language_name(lang_a), language_name(lang_b)
    return {
        "kind": "word_map",
        "lang_a": lang_a,
        "lang_b": lang_b,
        "text_a": txt_a,
        "text_b": txt_b,
        "prompt_role": ROLE_PROMPT.format(lang1=name_a, lang2=name_b),
        "prompt_format": FORMAT_PROMPT.format(format=OUTPUT_FORMAT),
        "prompt_user": USER_PROMPT.format(lang1=name_a, lang2=name_b, trans1=txt_a, trans2=txt_b),
    }


def request_mapping(
    client: ProtocolClient, lang_a: str, lang_b: str, txt_a: str, txt_b: str
) -> dict:
    """Send one mapping request; the raw response document is returned untouched."""
    return client.call(build_request(lang_a, lang_b, txt_a, txt_b))


# --- post-processing ----------------------------------------------------------


def _leaf_pairs(node, out: list[tuple[str, str]], drops: Counter) -> None:
    """Collect two-string pairs from lists / tuples / mappings, recursively."""
    if isinstance(node, dict):
        for key, value in node.items():
            if isinstance(key, str) and isinstance(value, str):
                out.append((key, value))
            else:
                drops["not_a_pair"] += 1
        return
    if isinstance(node, (list, tuple)):
        if not node:
            return
        if len(node) == 2 and all(isinstance(x, str) for x in node):
            out.append((node[0], node[1]))
            return
        if len(node) == 1 and isinstance(node[0], (list, tuple, dict)):
            _leaf_pairs(node[0], out, drops)
            return
        if node and any(isinstance(x, (list, tuple, dict)) for x in node):
            for item in node:
                _leaf_pairs(item, out, drops)
            return
    drops["not_a_pair"] += 1


def postprocess_mapping(raw, txt_a: str, txt_b: str) -> tuple[WordPairMap, Counter]:
    """Normalize a raw mapper document into a WordPairMap.

    Returns the map plus a counter of dropped entries by reason
    (not_a_pair, empty_side, not_in_transcript, duplicate, unknown_pos).
    Reprocessing a serialized valid map is a no-op.
    """
    if not isinstance(raw, dict):
        raise UnparsableDocument(f"expected an object, got {type(raw).__name__}")
    document = raw.get("matches", raw)
    if not isinstance(document, dict):
        raise UnparsableDocument("'matches' is not an object")

    drops: Counter = Counter()
    known = {pos.value for pos in POS_ORDER}
    for key in document:
        if key not in known:
            drops["unknown_pos"] += 1

    tokens_a = norm_tokens(txt_a)
    tokens_b = norm_tokens(txt_b)
    grouped: dict[POSCategory, list[WordPair]] = {pos: [] for pos in POS_ORDER}
    for pos in POS_ORDER:
        entries = document.get(pos.value)
        if entries is None:
            continue  # missing keys are inserted as empty lists by WordPairMap
        candidates: list[tuple[str, str]] = []
        _leaf_pairs(entries, candidates, drops)
        seen_sides: set[str] = set()
        seen_triples: set[tuple[str, str]] = set()
        for a, b in candidates:
            a, b = a.strip(), b.strip()
            if not norm_token(a) or not norm_token(b):
                drops["empty_side"] += 1
                continue
            if (
                find_subsequence(tokens_a, norm_tokens(a)) < 0
                or find_subsequence(tokens_b, norm_tokens(b)) < 0
            ):
                drops["not_in_transcript"] += 1
                continue
            key_a = " ".join(norm_tokens(a))
            if key_a in seen_sides or (a, b) in seen_triples:
                drops["duplicate"] += 1
                continue
            seen_sides.add(key_a)
            seen_triples.add((a, b))
            grouped[pos].append(WordPair(side_a=a, side_b=b, pos=pos))

    return WordPairMap({pos: tuple(v) for pos, v in grouped.items()}), drops


def select_substitutions(
    word_map: WordPairMap,
    n_max: int,
    pos_pool,
    rng: random.Random,
) -> list[WordPair]:
    """Uniform sample without replacement from the eligible POS categories.

    The draw count is itself uniform on 1..n_max, capped by availability;
    an empty candidate set yields an empty result (caller skips the record).
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    pool = frozenset(pos_pool)
    if not pool:
        raise ValueError("pos_pool must not be empty")
    eligible = word_map.eligible(pool)
    if not eligible:
        return []
    count = min(rng.randint(1, n_max), len(eligible))
    return rng.sample(eligible, count)
