"""Word-level time spans from a forced-alignment backend.

The client romanizes tokens before dispatch when the backend declares it
requires romanized input (the reference aligner does; so does MMS-style
forced alignment). Alignment entries keep the original orthography.
"""

from __future__ import annotations

from dataclasses import dataclass

from .audio import AudioBuffer, TimeSpan
from .backends import AudioPayload, ProtocolClient
from .errors import AlignmentFailed, WordNotAligned
from .text import find_subsequence, norm_tokens, romanize, tokenize


@dataclass(frozen=True)
class WordAlignment:
    word: str  # original orthography
    span: TimeSpan
    score: float = 1.0


def align(
    client: ProtocolClient, utt: AudioBuffer, transcript: str, lang: str
) -> list[WordAlignment]:
    """One WordAlignment per transcript token, in transcript order.

    Raises AlignmentFailed when the backend returns a span count different
    from the token count or non-monotonic spans (the record is skipped and
    counted at the pipeline level).
    """
    tokens = tokenize(transcript)
    if not tokens:
        raise ValueError("transcript has no tokens")
    romanized = client.endpoint.requires_romanization
    send_tokens = [romanize(t, lang).text for t in tokens] if romanized else tokens
    response = client.call(
        {
            "kind": "align",
            "sample_rate": utt.sample_rate,
            "audio_b64": AudioPayload(utt),
            "tokens": send_tokens,
            "lang": lang,
            "romanized": romanized,
        }
    )
    spans = response.get("spans")
    if not isinstance(spans, list) or len(spans) != len(tokens):
        got = len(spans) if isinstance(spans, list) else "no"
        raise AlignmentFailed(f"backend returned {got} spans for {len(tokens)} tokens")
    scores = response.get("scores") or [1.0] * len(tokens)
    if len(scores) != len(tokens):
        raise AlignmentFailed(f"backend returned {len(scores)} scores for {len(tokens)} tokens")

    out: list[WordAlignment] = []
    prev_end = 0.0
    duration = utt.duration_seconds
    for word, (start, end), score in zip(tokens, spans, scores):
        if start < prev_end - 1e-9 or end > duration + 0.5 / utt.sample_rate:
            raise AlignmentFailed(
                f"span [{start}, {end}] for {word!r} is non-monotonic or out of range"
            )
        try:
            span = TimeSpan(max(0.0, float(start)), float(end))
        except ValueError as exc:
            raise AlignmentFailed(str(exc)) from exc
        out.append(WordAlignment(word=word, span=span, score=min(1.0, max(0.0, float(score)))))
        prev_end = end
    return out


def locate_word(alignments: list[WordAlignment], side: str) -> TimeSpan:
    """Span of the first occurrence of ``side``'s token sequence.

    Comparison is case-insensitive and punctuation-stripped; a multi-token
    side yields the merged span from its first to its last token.
    """
    needle = norm_tokens(side)
    if not needle:
        raise ValueError(f"side {side!r} has no comparable tokens")
    words = [a.word.lower() for a in alignments]
    idx = find_subsequence(words, needle)
    if idx < 0:
        raise WordNotAligned(f"{side!r} does not occur in the aligned words")
    return TimeSpan(alignments[idx].span.start_s, alignments[idx + len(needle) - 1].span.end_s)
