import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csforge.align import WordAlignment, align, locate_word
from csforge.audio import AudioBuffer, TimeSpan
from csforge.backends import BackendEndpoint, ProtocolClient, UniformAligner
from csforge.errors import AlignmentFailed, WordNotAligned


def aligner_client(handler=None, requires_romanization=True):
    endpoint = BackendEndpoint(transport="builtin", requires_romanization=requires_romanization)
    return ProtocolClient(endpoint, handler or UniformAligner())


def silent(duration_s, rate=16000):
    return AudioBuffer(np.zeros(int(duration_s * rate)), rate)


def test_uniform_alignment_proportional():
    # romanized char counts 5:5:5 over 2 s -> thirds
    out = align(aligner_client(), silent(2.0), "hello world there", "en")
    assert [a.word for a in out] == ["hello", "world", "there"]
    starts = [a.span.start_s for a in out]
    ends = [a.span.end_s for a in out]
    assert starts == pytest.approx([0.0, 2 / 3, 4 / 3])
    assert ends == pytest.approx([2 / 3, 4 / 3, 2.0])
    assert all(a.score == 1.0 for a in out)


def test_single_token_spans_whole_utterance():
    out = align(aligner_client(), silent(1.5), "hello", "en")
    assert len(out) == 1
    assert out[0].span == TimeSpan(0.0, 1.5)


def test_original_orthography_kept_with_romanization():
    out = align(aligner_client(), silent(1.0), "София є красива", "bg")
    assert [a.word for a in out] == ["София", "є", "красива"]


class ArityBreaker:
    def handle(self, request):
        return {"spans": [[0.0, 0.5], [0.5, 1.0]], "scores": [1.0, 1.0]}


def test_span_count_mismatch_fails():
    with pytest.raises(AlignmentFailed):
        align(aligner_client(ArityBreaker()), silent(1.0), "one two three", "en")


class NonMonotone:
    def handle(self, request):
        return {"spans": [[0.5, 1.0], [0.0, 0.5]]}


def test_non_monotone_spans_fail():
    with pytest.raises(AlignmentFailed):
        align(aligner_client(NonMonotone()), silent(1.0), "one two", "en")


class RequestRecorder:
    def __init__(self):
        self.requests = []

    def handle(self, request):
        self.requests.append(request)
        return UniformAligner().handle(request)


def test_romanization_applied_before_dispatch():
    recorder = RequestRecorder()
    align(aligner_client(recorder), silent(1.0), "Größe Straße", "de")
    request = recorder.requests[0]
    assert request["romanized"] is True
    assert request["tokens"] == ["grosse", "strasse"]


def test_tokens_sent_verbatim_without_romanization():
    recorder = RequestRecorder()
    align(aligner_client(recorder, requires_romanization=False), silent(1.0), "Größe Straße", "de")
    request = recorder.requests[0]
    assert request["romanized"] is False
    assert request["tokens"] == ["Größe", "Straße"]


def test_empty_transcript_rejected():
    with pytest.raises(ValueError):
        align(aligner_client(), silent(1.0), " ... ", "en")


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.sampled_from(["a", "bb", "ccc", "dddd", "go"]), min_size=1, max_size=12),
    st.floats(0.2, 8.0),
)
def test_uniform_spans_partition_duration(tokens, duration_s):
    out = align(aligner_client(), silent(duration_s), " ".join(tokens), "en")
    assert out[0].span.start_s == 0.0
    assert out[-1].span.end_s == pytest.approx(silent(duration_s).duration_seconds, abs=1 / 16000)
    for left, right in zip(out, out[1:]):
        assert left.span.end_s == right.span.start_s


# --- locate_word -------------------------------------------------------------


def alignments_for(words, step=0.5):
    return [
        WordAlignment(word=w, span=TimeSpan(i * step, (i + 1) * step)) for i, w in enumerate(words)
    ]


def test_locate_direct_hit():
    spans = alignments_for(["hiking", "is", "an", "outdoor", "activity"])
    assert locate_word(spans, "hiking") == TimeSpan(0.0, 0.5)


def test_locate_multi_token_merged_span():
    spans = alignments_for(["hiking", "is", "an", "outdoor", "activity"])
    assert locate_word(spans, "outdoor activity") == TimeSpan(1.5, 2.5)


def test_locate_case_and_punctuation_insensitive():
    spans = alignments_for(["Hiking", "is", "fun"])
    assert locate_word(spans, "hiking.") == TimeSpan(0.0, 0.5)


def test_locate_first_occurrence():
    spans = alignments_for(["the", "dog", "saw", "the", "dog"])
    assert locate_word(spans, "the dog") == TimeSpan(0.0, 1.0)


def test_locate_missing_word():
    spans = alignments_for(["hiking", "is", "fun"])
    with pytest.raises(WordNotAligned):
        locate_word(spans, "mountain")


def test_locate_result_within_duration():
    spans = alignments_for(["a", "b", "c"], step=0.25)
    span = locate_word(spans, "b c")
    assert 0.0 <= span.start_s < span.end_s <= 0.75
