"""N-way parallel corpus: manifest loading, pair enumeration, sentence sampling.

The manifest is JSONL, one object per utterance with string keys
sentence_id, utt_id, language, audio_path, transcript, split. Unknown keys
are ignored. Relative audio paths resolve against the manifest's directory.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestParseError, TooFewLanguages

SPLITS = ("train", "dev", "test")
_REQUIRED_KEYS = ("sentence_id", "utt_id", "language", "audio_path", "transcript", "split")


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    language: str
    audio_path: Path
    transcript: str
    split: str


@dataclass(frozen=True)
class ParallelGroup:
    """One semantic sentence with utterances in two or more languages."""

    sentence_id: str
    members: dict[str, Utterance]  # language -> utterance

    def covers(self, lang_a: str, lang_b: str) -> bool:
        return lang_a in self.members and lang_b in self.members


@dataclass(frozen=True, order=True)
class LanguagePair:
    """Unordered pair stored in lexicographic order."""

    lang_a: str
    lang_b: str

    def __post_init__(self):
        if self.lang_a >= self.lang_b:
            raise ValueError(f"pair must be distinct and sorted, got ({self.lang_a}, {self.lang_b})")

    @classmethod
    def of(cls, x: str, y: str) -> "LanguagePair":
        if x == y:
            raise ValueError(f"languages in a pair must differ, got {x!r} twice")
        return cls(min(x, y), max(x, y))

    def __str__(self) -> str:
        return f"{self.lang_a}-{self.lang_b}"


@dataclass
class Corpus:
    """Loaded manifest snapshot. Immutable by convention after loading."""

    groups: list[ParallelGroup]
    missing_audio: list[tuple[str, str]] = field(default_factory=list)  # (utt_id, path)
    singleton_groups: int = 0  # sentence ids left with < 2 members

    def languages(self) -> set[str]:
        return {lang for g in self.groups for lang in g.members}


def load_manifest(
    path: str | Path,
    languages: set[str] | None = None,
    check_audio: bool = True,
) -> Corpus:
    """Assemble ParallelGroups by sentence_id.

    Structural problems raise ManifestParseError naming the line. Rows
    whose audio file is missing are reported in Corpus.missing_audio and
    excluded from groups (never silently dropped).
    """
    path = Path(path)
    base = path.parent
    rows: list[tuple[str, Utterance]] = []
    seen_ids: set[str] = set()
    seen_members: set[tuple[str, str]] = set()
    missing: list[tuple[str, str]] = []

    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ManifestParseError(f"line {lineno}: expected an object")
            for key in _REQUIRED_KEYS:
                if not isinstance(obj.get(key), str) or not obj[key]:
                    raise ManifestParseError(f"line {lineno}: missing or non-string key {key!r}")
            if obj["split"] not in SPLITS:
                raise ManifestParseError(
                    f"line {lineno}: unknown split {obj['split']!r} (expected one of {SPLITS})"
                )
            if languages is not None and obj["language"] not in languages:
                raise ManifestParseError(
                    f"line {lineno}: language {obj['language']!r} not in the configured set"
                )
            if obj["utt_id"] in seen_ids:
                raise ManifestParseError(f"line {lineno}: duplicate utt_id {obj['utt_id']!r}")
            member_key = (obj["sentence_id"], obj["language"])
            if member_key in seen_members:
                raise ManifestParseError(
                    f"line {lineno}: duplicate language {obj['language']!r} "
                    f"for sentence {obj['sentence_id']!r}"
                )
            seen_ids.add(obj["utt_id"])
            seen_members.add(member_key)

            audio = Path(obj["audio_path"])
            if not audio.is_absolute():
                audio = base / audio
            utt = Utterance(
                utt_id=obj["utt_id"],
                language=obj["language"],
                audio_path=audio,
                transcript=obj["transcript"],
                split=obj["split"],
            )
            if check_audio and not audio.is_file():
                missing.append((utt.utt_id, str(audio)))
            else:
                rows.append((obj["sentence_id"], utt))

    by_sentence: dict[str, dict[str, Utterance]] = {}
    for sentence_id, utt in rows:
        by_sentence.setdefault(sentence_id, {})[utt.language] = utt

    groups = []
    singletons = 0
    for sentence_id in sorted(by_sentence):
        members = by_sentence[sentence_id]
        if len(members) < 2:
            singletons += 1
            continue
        groups.append(ParallelGroup(sentence_id=sentence_id, members=members))
    return Corpus(groups=groups, missing_audio=missing, singleton_groups=singletons)


def enumerate_language_pairs(languages: set[str] | list[str]) -> list[LanguagePair]:
    """All unordered pairs, deduplicated and lexicographically sorted."""
    unique = sorted(set(languages))
    if len(unique) < 2:
        raise TooFewLanguages(f"need at least 2 languages, got {len(unique)}")
    return [LanguagePair(a, b) for a, b in itertools.combinations(unique, 2)]


def sample_equivalent_pairs(
    corpus: Corpus, pair: LanguagePair, rng: random.Random
) -> list[tuple[Utterance, Utterance]]:
    """One (utterance_a, utterance_b) per group covering the pair, in an
    order determined only by the rng seed and corpus content."""
    eligible = [g for g in corpus.groups if g.covers(pair.lang_a, pair.lang_b)]
    shuffled = rng.sample(eligible, len(eligible))
    return [(g.members[pair.lang_a], g.members[pair.lang_b]) for g in shuffled]
