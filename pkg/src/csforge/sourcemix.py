"""Intra-sentential source mixing: substitute selected word pairs from the
embedded-language utterance into the matrix-language utterance, in both
text and audio, keeping the two views consistent.

The text plan is computed first (first-occurrence policy, later-starting
overlaps dropped); audio splicing then uses exactly the pairs that
survived text-side location plus embedded-side alignment lookup, so the
number of embedded token groups always matches the number of spliced
segments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .align import WordAlignment, locate_word
from .audio import AudioBuffer, TimeSpan, clip_segment, splice
from .corpus import Utterance
from .errors import NoEligiblePairs, SubstitutionMiss, WordNotAligned
from .metrics import cmi as compute_cmi
from .metrics import i_index as compute_i_index
from .text import find_subsequence, norm_token, token_affixes
from .wordmap import DEFAULT_POS_POOL, WordPair, WordPairMap, select_substitutions

MATRIX_POLICIES = ("random", "fixed_a", "fixed_b")


@dataclass(frozen=True)
class GenerationParams:
    n_max: int = 3
    pos_pool: frozenset = DEFAULT_POS_POOL
    matrix_policy: str = "random"
    crossfade_ms: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.matrix_policy not in MATRIX_POLICIES:
            raise ValueError(f"matrix_policy must be one of {MATRIX_POLICIES}")
        if not 0 <= self.crossfade_ms <= 20:
            raise ValueError(f"crossfade_ms must be in [0, 20], got {self.crossfade_ms}")
        object.__setattr__(self, "pos_pool", frozenset(self.pos_pool))


@dataclass(frozen=True)
class Substitution:
    pair: WordPair
    matrix_span: TimeSpan
    embedded_span: TimeSpan


@dataclass(frozen=True)
class CSRecord:
    record_id: str
    sentence_id: str
    matrix_lang: str
    embedded_lang: str
    cs_text: str
    audio_path: str
    substitutions: tuple[Substitution, ...]
    cmi: float
    i_index: float
    token_langs: tuple[str, ...]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.matrix_lang == self.embedded_lang:
            raise ValueError("matrix and embedded language must differ")


# --- text-side planning -------------------------------------------------------


@dataclass
class _Plan:
    kept: list[tuple[WordPair, int, int]] = field(default_factory=list)  # pair, raw start, raw end
    missed: list[WordPair] = field(default_factory=list)
    overlapped: list[WordPair] = field(default_factory=list)


def _plan_spans(raw_tokens: list[str], pairs: list[WordPair], matrix_is_side_a: bool) -> _Plan:
    """First-occurrence token spans over the raw (whitespace) tokens.

    Matching runs in the punctuation-stripped, lowercased token space;
    raw indices are recovered through the kept index map. Later-starting
    overlapping spans are dropped deterministically.
    """
    norm = [norm_token(t) for t in raw_tokens]
    filtered_idx = [i for i, t in enumerate(norm) if t]
    filtered = [norm[i] for i in filtered_idx]

    plan = _Plan()
    located: list[tuple[int, int, WordPair]] = []
    for pair in pairs:
        needle = [w for w in (norm_token(t) for t in pair.side(matrix_is_side_a).split()) if w]
        pos = find_subsequence(filtered, needle) if needle else -1
        if pos < 0:
            plan.missed.append(pair)
            continue
        located.append((filtered_idx[pos], filtered_idx[pos + len(needle) - 1], pair))

    located.sort(key=lambda item: (item[0], item[1]))
    prev_end = -1
    for start, end, pair in located:
        if start <= prev_end:
            plan.overlapped.append(pair)
            continue
        plan.kept.append((pair, start, end))
        prev_end = end
    return plan


def substitute_text(
    txt_matrix: str,
    substitutions: list[WordPair],
    matrix_is_side_a: bool,
    matrix_label: str = "matrix",
    embedded_label: str = "embedded",
) -> tuple[str, list[str]]:
    """Replace each pair's matrix side at its first occurrence.

    Non-replaced tokens are preserved verbatim (inter-token spacing
    normalized to single spaces); punctuation attached to the edges of a
    replaced span is re-attached around the replacement, whose casing is
    taken from the word pair as given. Returns the code-switched text and
    one language label per output token.
    """
    raw_tokens = txt_matrix.split()
    plan = _plan_spans(raw_tokens, substitutions, matrix_is_side_a)
    if plan.missed:
        miss = plan.missed[0]
        raise SubstitutionMiss(f"{miss.side(matrix_is_side_a)!r} does not occur in the matrix text")

    out_tokens: list[str] = []
    out_langs: list[str] = []
    cursor = 0
    for pair, start, end in plan.kept:
        for tok in raw_tokens[cursor:start]:
            out_tokens.append(tok)
            out_langs.append(matrix_label)
        lead, _, _ = token_affixes(raw_tokens[start])
        _, _, trail = token_affixes(raw_tokens[end])
        rep = pair.side(not matrix_is_side_a).split()
        rep[0] = lead + rep[0]
        rep[-1] = rep[-1] + trail
        out_tokens.extend(rep)
        out_langs.extend([embedded_label] * len(rep))
        cursor = end + 1
    for tok in raw_tokens[cursor:]:
        out_tokens.append(tok)
        out_langs.append(matrix_label)
    return " ".join(out_tokens), out_langs


# --- full generation ----------------------------------------------------------


def choose_matrix(policy: str, rng: random.Random) -> bool:
    """True when side a is the matrix language."""
    if policy == "fixed_a":
        return True
    if policy == "fixed_b":
        return False
    return rng.random() < 0.5


def generate_cs_sample(
    sentence_id: str,
    utt_a: Utterance,
    utt_b: Utterance,
    audio_a: AudioBuffer,
    audio_b: AudioBuffer,
    word_map: WordPairMap,
    alignments_a: list[WordAlignment],
    alignments_b: list[WordAlignment],
    params: GenerationParams,
    rng: random.Random,
) -> tuple[AudioBuffer, CSRecord]:
    """Run one full source-mixing step for a sampled sentence pair.

    Both utterances must already be preprocessed (filtered, normalized).
    Pairs that fail to locate on either side are dropped; the record is
    skipped (NoEligiblePairs / SubstitutionMiss) when nothing survives.
    """
    matrix_is_a = choose_matrix(params.matrix_policy, rng)
    m_utt, e_utt = (utt_a, utt_b) if matrix_is_a else (utt_b, utt_a)
    m_audio, e_audio = (audio_a, audio_b) if matrix_is_a else (audio_b, audio_a)
    m_align, e_align = (alignments_a, alignments_b) if matrix_is_a else (alignments_b, alignments_a)

    selected = select_substitutions(word_map, params.n_max, params.pos_pool, rng)
    if not selected:
        raise NoEligiblePairs(
            f"no word pair with POS in {sorted(str(p) for p in params.pos_pool)}"
        )

    plan = _plan_spans(m_utt.transcript.split(), selected, matrix_is_a)
    survivors: list[tuple[WordPair, TimeSpan, TimeSpan]] = []
    for pair, _, _ in plan.kept:
        try:
            m_span = locate_word(m_align, pair.side(matrix_is_a))
            e_span = locate_word(e_align, pair.side(not matrix_is_a))
        except WordNotAligned:
            continue
        survivors.append((pair, m_span, e_span))
    if not survivors:
        raise SubstitutionMiss(
            f"all {len(selected)} selected pairs failed to locate in {m_utt.utt_id}"
        )

    kept_pairs = [pair for pair, _, _ in survivors]
    cs_text, token_langs = substitute_text(
        m_utt.transcript,
        kept_pairs,
        matrix_is_a,
        matrix_label=m_utt.language,
        embedded_label=e_utt.language,
    )

    replacements = [(m_span, clip_segment(e_audio, e_span)) for _, m_span, e_span in survivors]
    cs_audio = splice(m_audio, replacements, crossfade_ms=params.crossfade_ms)

    record = CSRecord(
        record_id=f"{sentence_id}_{m_utt.language}{e_utt.language}",
        sentence_id=sentence_id,
        matrix_lang=m_utt.language,
        embedded_lang=e_utt.language,
        cs_text=cs_text,
        audio_path="",
        substitutions=tuple(
            Substitution(pair=p, matrix_span=m, embedded_span=e) for p, m, e in survivors
        ),
        cmi=compute_cmi(token_langs),
        i_index=compute_i_index(token_langs),
        token_langs=tuple(token_langs),
    )
    return cs_audio, record


def with_audio_path(record: CSRecord, audio_path: str) -> CSRecord:
    return replace(record, audio_path=audio_path)


def with_flags(record: CSRecord, *flags: str) -> CSRecord:
    return replace(record, flags=record.flags + flags)
