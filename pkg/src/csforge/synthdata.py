"""Synthetic n-way parallel corpus for demos, tests and benchmarks.

Sentences are sequences of shared concept ids rendered per language into
deterministic pseudo-words built from one syllable inventory, so all
languages share the same letter statistics. Audio gives every token a
pure-tone segment whose length is proportional to its character count,
which makes the uniform reference aligner's spans land exactly on token
boundaries. A union lexicon over all language pairs covers the
substitutable concepts with their POS tags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioBuffer, write_wav
from .seeding import derive_rng

_ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
           "st", "tr", "kl", "br"]
_VOWELS = ["a", "e", "i", "o", "u", "ai", "ea", "ou"]
_CODAS = ["", "", "n", "r", "s", "t", "l", "k"]

_POS_CYCLE = ("noun", "verb", "adjective", "adverb", "interjection",
              "noun", "verb", "noun", "interjection", "verb")

DEMO_LANGUAGES = (
    "bg", "hr", "cs", "da", "nl", "en", "et", "fi", "fr", "de", "el", "hu",
    "it", "lv", "lt", "mt", "pl", "pt", "ro", "sk", "sl", "es", "sv",
)


def synth_word(lang: str, concept: int, seed: int = 0) -> str:
    """Deterministic 2-3 syllable pseudo-word, unique per (lang, concept)."""
    rng = derive_rng(seed, "word", lang, concept)
    n_syll = rng.randint(2, 3)
    parts = []
    for _ in range(n_syll):
        parts.append(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS))
    return "".join(parts)


def concept_pos(concept: int) -> str:
    return _POS_CYCLE[concept % len(_POS_CYCLE)]


@dataclass(frozen=True)
class SynthCorpus:
    root: Path
    manifest_path: Path
    lexicon_path: Path
    languages: tuple[str, ...]
    n_groups: int


def _token_tone(token: str, n_samples: int, sample_rate: int, seed: int) -> np.ndarray:
    freq = 300.0 + (derive_rng(seed, "tone", token).randrange(40)) * 55.0
    t = np.arange(n_samples) / sample_rate
    return 0.4 * np.sin(2 * np.pi * freq * t)


def build_synthetic_corpus(
    root: str | Path,
    languages=("en", "nl"),
    n_groups: int = 20,
    seed: int = 0,
    tokens_per_sentence: tuple[int, int] = (12, 22),
    n_concepts: int = 400,
    seconds_per_char: float = 0.03,
    target_duration_s: float | None = None,
    sample_rate: int = 16000,
    split: str = "train",
) -> SynthCorpus:
    """Write audio/, manifest.jsonl and lexicon.tsv under ``root``.

    ``target_duration_s`` overrides the per-character time scale so every
    utterance lands near that duration regardless of sentence length.
    """
    root = Path(root)
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    languages = tuple(languages)

    manifest_rows = []
    for g in range(n_groups):
        sentence_id = f"s{g:05d}"
        rng = derive_rng(seed, "sentence", sentence_id)
        n_tokens = rng.randint(*tokens_per_sentence)
        concepts = [rng.randrange(n_concepts) for _ in range(n_tokens)]
        for lang in languages:
            tokens = [synth_word(lang, c, seed) for c in concepts]
            transcript = " ".join(tokens) + "."
            n_chars = sum(len(t) for t in tokens)
            if target_duration_s is not None:
                per_char = target_duration_s / n_chars
            else:
                per_char = seconds_per_char
            # token segment boundaries mirror the uniform aligner's split
            total_samples = int(round(n_chars * per_char * sample_rate))
            parts = []
            acc = 0
            start = 0
            for tok in tokens:
                acc += len(tok)
                end = int(round(total_samples * acc / n_chars))
                parts.append(_token_tone(tok, end - start, sample_rate, seed))
                start = end
            samples = np.concatenate(parts) if parts else np.zeros(0)
            utt_id = f"{sentence_id}_{lang}"
            wav_path = audio_dir / f"{utt_id}.wav"
            write_wav(AudioBuffer(samples, sample_rate), wav_path)
            manifest_rows.append(
                {
                    "sentence_id": sentence_id,
                    "utt_id": utt_id,
                    "language": lang,
                    "audio_path": f"audio/{utt_id}.wav",
                    "transcript": transcript,
                    "split": split,
                }
            )

    manifest_path = root / "manifest.jsonl"
    with manifest_path.open("w", encoding="utf-8") as fh:
        for row in manifest_rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")

    lexicon_path = root / "lexicon.tsv"
    with lexicon_path.open("w", encoding="utf-8") as fh:
        for i, lang_a in enumerate(languages):
            for lang_b in languages[i + 1 :]:
                for c in range(n_concepts):
                    fh.write(
                        f"{synth_word(lang_a, c, seed)}\t{synth_word(lang_b, c, seed)}"
                        f"\t{concept_pos(c)}\n"
                    )

    return SynthCorpus(
        root=root,
        manifest_path=manifest_path,
        lexicon_path=lexicon_path,
        languages=languages,
        n_groups=n_groups,
    )
