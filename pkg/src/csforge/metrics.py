"""Code-switching and corpus metrics.

CMI is the two-language mixing index 1 - max_label_count/N (0 for
monolingual input). The I-index counts language switches over adjacent
token boundaries, switches/(N-1), defined as 0 for a single token. RER is
the character-level edit distance over romanized text (spaces count as
characters), as a percentage of the romanized reference length.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import EmptyReference
from .text import romanize

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def cmi(labels) -> float:
    labels = list(labels)
    if not labels:
        raise ValueError("cmi needs at least one token label")
    most = Counter(labels).most_common(1)[0][1]
    return 1.0 - most / len(labels)


def i_index(labels) -> float:
    labels = list(labels)
    if not labels:
        raise ValueError("i_index needs at least one token label")
    if len(labels) == 1:
        return 0.0
    switches = sum(1 for x, y in zip(labels, labels[1:]) if x != y)
    return switches / (len(labels) - 1)


@njit(cache=True)
def _lev_kernel(a, b):  # pragma: no cover - exercised through levenshtein()
    n, m = len(a), len(b)
    prev = np.arange(m + 1, dtype=np.int32)
    cur = np.empty(m + 1, dtype=np.int32)
    for i in range(n):
        cur[0] = i + 1
        ai = a[i]
        for j in range(m):
            best = prev[j] if ai == b[j] else prev[j] + 1
            dele = prev[j + 1] + 1
            if dele < best:
                best = dele
            ins = cur[j] + 1
            if ins < best:
                best = ins
            cur[j + 1] = best
        prev, cur = cur, prev
    return prev[m]


def _codepoints(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, O(len(a)*len(b)) time, two-row memory."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    x, y = _codepoints(a), _codepoints(b)
    if len(y) < len(x):  # keep the DP rows at min(len) width
        x, y = y, x
    return int(_lev_kernel(y, x))


def rer(reference: str, hypothesis: str, lang_ref: str, lang_hyp: str) -> float:
    """Romanized character error rate, in percent of the romanized reference."""
    ref = romanize(reference, lang_ref).text
    if not ref:
        raise EmptyReference(f"reference {reference!r} romanizes to nothing")
    hyp = romanize(hypothesis, lang_hyp).text if hypothesis else ""
    return 100.0 * levenshtein(ref, hyp) / len(ref)


@dataclass(frozen=True)
class CharHistogram:
    """Relative a-z frequencies over romanized text."""

    freq: dict[str, float]
    n_letters: int

    @property
    def degenerate(self) -> bool:
        return self.n_letters == 0


def char_diversity(texts) -> CharHistogram:
    """Count a-z letters over romanized texts (digits and spaces excluded)."""
    counts = Counter()
    for text, lang in texts:
        if not text:
            continue
        counts.update(c for c in romanize(text, lang).text if c in LETTERS)
    total = sum(counts.values())
    if total == 0:
        return CharHistogram({c: 0.0 for c in LETTERS}, 0)
    return CharHistogram({c: counts[c] / total for c in LETTERS}, total)


@dataclass
class DatasetStats:
    n_language_pairs: int = 0
    total_duration_s: float = 0.0
    n_utterances: int = 0
    n_token_types: int = 0
    mean_cmi: float = 0.0
    mean_i_index: float = 0.0
    char_histogram: dict[str, float] = field(default_factory=dict)
    skip_counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)


def aggregate_stats(records, durations, skip_counts=None) -> DatasetStats:
    """Fold CSRecord-like objects (record_id, matrix_lang, embedded_lang,
    cs_text, cmi, i_index attributes) plus a record_id -> seconds mapping."""
    records = list(records)
    pairs = set()
    token_types = set()
    cmi_sum = 0.0
    i_sum = 0.0
    duration = 0.0
    for r in records:
        pairs.add(tuple(sorted((r.matrix_lang, r.embedded_lang))))
        token_types.update(t.lower() for t in r.cs_text.split())
        cmi_sum += r.cmi
        i_sum += r.i_index
        duration += durations.get(r.record_id, 0.0)
    n = len(records)
    hist = char_diversity((r.cs_text, r.matrix_lang) for r in records)
    return DatasetStats(
        n_language_pairs=len(pairs),
        total_duration_s=duration,
        n_utterances=n,
        n_token_types=len(token_types),
        mean_cmi=cmi_sum / n if n else 0.0,
        mean_i_index=i_sum / n if n else 0.0,
        char_histogram=hist.freq,
        skip_counts=dict(skip_counts or {}),
    )


def per_pair_rows(records, durations) -> list[dict]:
    """Rows for the optional per-pair CSV: pair, n_utt, duration_s, mean_cmi, mean_i_index."""
    grouped: dict[str, list] = {}
    for r in records:
        key = "-".join(sorted((r.matrix_lang, r.embedded_lang)))
        grouped.setdefault(key, []).append(r)
    rows = []
    for key in sorted(grouped):
        rs = grouped[key]
        rows.append(
            {
                "pair": key,
                "n_utt": len(rs),
                "duration_s": round(sum(durations.get(r.record_id, 0.0) for r in rs), 6),
                "mean_cmi": sum(r.cmi for r in rs) / len(rs),
                "mean_i_index": sum(r.i_index for r in rs) / len(rs),
            }
        )
    return rows


def jensen_shannon(p: dict[str, float], q: dict[str, float]) -> float:
    """Base-2 Jensen-Shannon divergence between two letter distributions."""
    keys = set(p) | set(q)
    div = 0.0
    for k in keys:
        pk, qk = p.get(k, 0.0), q.get(k, 0.0)
        mk = (pk + qk) / 2
        if pk > 0:
            div += 0.5 * pk * math.log2(pk / mk)
        if qk > 0:
            div += 0.5 * qk * math.log2(qk / mk)
    return div
