import math
import struct
import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csforge.audio import (
    AudioBuffer,
    TimeSpan,
    bandpass_filter,
    clip_segment,
    normalize_amplitude,
    read_wav,
    splice,
    time_to_sample,
    write_wav,
)
from csforge.errors import (
    EmptyBuffer,
    InvalidCutoff,
    MalformedWav,
    OverlappingSpans,
    RateMismatch,
    SpanOutOfRange,
)

from conftest import sine_buffer


def rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def gain_db(buf_in: AudioBuffer, buf_out: AudioBuffer) -> float:
    return 20 * math.log10(rms(buf_out.samples) / rms(buf_in.samples))


# --- read_wav ---------------------------------------------------------------


def test_read_16bit_pcm_rescale(tmp_path):
    path = tmp_path / "one.wav"
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(16000)
        fh.writeframes(struct.pack("<h", 16384))
    buf = read_wav(path)
    assert buf.sample_rate == 16000
    assert buf.samples.tolist() == [0.5]


def test_read_stereo_downmix_average(tmp_path):
    path = tmp_path / "stereo.wav"
    frames = np.array([[0.2, 0.6]], dtype="<f4").tobytes()
    header = b"".join(
        [
            b"RIFF", struct.pack("<I", 36 + len(frames)), b"WAVE",
            b"fmt ", struct.pack("<IHHIIHH", 16, 3, 2, 16000, 16000 * 8, 8, 32),
            b"data", struct.pack("<I", len(frames)),
        ]
    )
    path.write_bytes(header + frames)
    buf = read_wav(path)
    assert len(buf) == 1
    assert buf.samples[0] == pytest.approx(0.4, abs=1e-7)


def test_read_silence_second(tmp_path):
    path = tmp_path / "silence.wav"
    write_wav(AudioBuffer(np.zeros(16000), 16000), path)
    buf = read_wav(path)
    assert len(buf) == 16000
    assert not buf.samples.any()


def test_read_rejects_non_riff(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"not a wav at all")
    with pytest.raises(MalformedWav):
        read_wav(path)


def test_read_rejects_unsupported_codec(tmp_path):
    path = tmp_path / "alaw.wav"
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(1)  # 8-bit PCM is outside the contract
        fh.setframerate(8000)
        fh.writeframes(b"\x80\x80")
    with pytest.raises(MalformedWav):
        read_wav(path)


def test_read_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_wav(tmp_path / "nope.wav")


# --- write_wav ---------------------------------------------------------------


def test_roundtrip_quantization_bound(tmp_path):
    buf = AudioBuffer(np.array([0.0, 0.5, -0.5]), 22050)
    path = tmp_path / "rt.wav"
    write_wav(buf, path)
    back = read_wav(path)
    assert back.sample_rate == 22050
    assert np.max(np.abs(back.samples - buf.samples)) <= 1 / 32768


def test_write_empty_buffer(tmp_path):
    path = tmp_path / "empty.wav"
    write_wav(AudioBuffer(np.zeros(0), 16000), path)
    back = read_wav(path)
    assert len(back) == 0
    assert back.sample_rate == 16000


@settings(max_examples=50, deadline=None)
@given(
    samples=st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=300),
    rate=st.sampled_from([8000, 16000, 44100, 48000]),
)
def test_roundtrip_property(tmp_path_factory, samples, rate):
    buf = AudioBuffer(np.array(samples), rate)
    path = tmp_path_factory.mktemp("wav") / "p.wav"
    write_wav(buf, path)
    back = read_wav(path)
    assert back.sample_rate == rate
    assert len(back) == len(buf)
    assert np.max(np.abs(back.samples - buf.samples)) <= 1 / 32768


# --- bandpass_filter ----------------------------------------------------------

# Gains measured by the sine-RMS oracle: passband within ±1 dB, both
# stopbands at least 20 dB down.


def test_passband_gain_1khz():
    x = sine_buffer(1000, 1.0, 16000)
    assert abs(gain_db(x, bandpass_filter(x))) <= 1.0


def test_stopband_gain_50hz():
    x = sine_buffer(50, 1.0, 16000)
    assert gain_db(x, bandpass_filter(x)) <= -20.0


def test_stopband_gain_10khz_at_48k():
    x = sine_buffer(10000, 1.0, 48000)
    assert gain_db(x, bandpass_filter(x)) <= -20.0


def test_filter_preserves_length_and_zeros():
    x = AudioBuffer(np.zeros(1234), 16000)
    y = bandpass_filter(x)
    assert len(y) == 1234
    assert not y.samples.any()


@pytest.mark.parametrize("low,high", [(0, 7000), (80, 80), (7000, 80), (80, 9000)])
def test_invalid_cutoffs(low, high):
    x = sine_buffer(440, 0.1, 16000)
    with pytest.raises(InvalidCutoff):
        bandpass_filter(x, low, high)


# --- normalize_amplitude --------------------------------------------------------


def test_normalize_peak_value():
    buf = AudioBuffer(np.array([0.25, -0.1]), 16000)
    out = normalize_amplitude(buf, -1.0)
    assert abs(float(np.max(np.abs(out.samples))) - 10 ** (-1 / 20)) < 1e-6


def test_normalize_all_zero_unchanged():
    buf = AudioBuffer(np.zeros(10), 16000)
    out = normalize_amplitude(buf)
    assert np.array_equal(out.samples, buf.samples)


def test_normalize_already_at_target():
    buf = normalize_amplitude(AudioBuffer(np.array([0.3, -0.7, 0.1]), 16000))
    again = normalize_amplitude(buf)
    assert np.max(np.abs(again.samples - buf.samples)) < 1e-6


def test_normalize_empty_raises():
    with pytest.raises(EmptyBuffer):
        normalize_amplitude(AudioBuffer(np.zeros(0), 16000))


@settings(max_examples=100, deadline=None)
@given(
    samples=st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=100),
    k=st.floats(1e-3, 1e3, allow_nan=False),
)
def test_normalize_idempotent_and_scale_equivariant(samples, k):
    arr = np.array(samples)
    if not arr.any() or not (k * arr).any():
        return  # all-zero input falls under the degenerate-input contract
    base = normalize_amplitude(AudioBuffer(arr, 16000))
    scaled = normalize_amplitude(AudioBuffer(k * arr, 16000))
    twice = normalize_amplitude(base)
    assert np.max(np.abs(scaled.samples - base.samples)) < 1e-6
    assert np.max(np.abs(twice.samples - base.samples)) < 1e-6


# --- clip_segment ---------------------------------------------------------------


def test_clip_full_range_identity():
    buf = sine_buffer(440, 1.0, 16000)
    out = clip_segment(buf, TimeSpan(0.0, 1.0))
    assert out == buf


def test_clip_index_arithmetic():
    buf = AudioBuffer(np.arange(16000) / 16000.0, 16000)
    out = clip_segment(buf, TimeSpan(0.25, 0.50))
    assert len(out) == 4000
    assert np.array_equal(out.samples, buf.samples[4000:8000])


def test_clip_out_of_range():
    buf = sine_buffer(440, 1.0, 16000)
    with pytest.raises(SpanOutOfRange):
        clip_segment(buf, TimeSpan(0.5, 1.5))


def test_timespan_validation():
    with pytest.raises(ValueError):
        TimeSpan(-0.1, 0.5)
    with pytest.raises(ValueError):
        TimeSpan(0.5, 0.5)


# --- splice ----------------------------------------------------------------------


def naive_splice(base: AudioBuffer, replacements) -> np.ndarray:
    """Independent copy-based oracle sharing only the span convention."""
    out = []
    pos = 0
    for span, rep in replacements:
        start = int(math.floor(span.start_s * base.sample_rate + 0.5))
        end = int(math.floor(span.end_s * base.sample_rate + 0.5))
        out.extend(base.samples[pos:start].tolist())
        out.extend(rep.samples.tolist())
        pos = end
    out.extend(base.samples[pos:].tolist())
    return np.array(out)


def test_splice_example_ten_samples():
    base = AudioBuffer(np.arange(10) / 10.0, 10)
    rep = AudioBuffer(np.full(5, 0.9), 10)
    out = splice(base, [(TimeSpan(0.4, 0.6), rep)])
    assert len(out) == 13
    assert np.array_equal(out.samples[:4], base.samples[:4])
    assert np.array_equal(out.samples[4:9], rep.samples)
    assert np.array_equal(out.samples[9:], base.samples[6:])


def test_splice_empty_replacements_identity():
    base = sine_buffer(440, 0.5, 16000)
    assert splice(base, []) == base


def test_splice_equal_length_keeps_length():
    base = sine_buffer(440, 1.0, 16000)
    reps = [
        (TimeSpan(0.1, 0.2), AudioBuffer(np.ones(1600), 16000)),
        (TimeSpan(0.5, 0.75), AudioBuffer(np.ones(4000), 16000)),
    ]
    out = splice(base, reps)
    assert len(out) == len(base)
    assert np.array_equal(out.samples, naive_splice(base, reps))


def test_splice_overlap_rejected():
    base = sine_buffer(440, 1.0, 16000)
    reps = [
        (TimeSpan(0.1, 0.5), AudioBuffer(np.ones(10), 16000)),
        (TimeSpan(0.4, 0.6), AudioBuffer(np.ones(10), 16000)),
    ]
    with pytest.raises(OverlappingSpans):
        splice(base, reps)


def test_splice_unsorted_rejected():
    base = sine_buffer(440, 1.0, 16000)
    reps = [
        (TimeSpan(0.5, 0.6), AudioBuffer(np.ones(10), 16000)),
        (TimeSpan(0.1, 0.2), AudioBuffer(np.ones(10), 16000)),
    ]
    with pytest.raises(OverlappingSpans):
        splice(base, reps)


def test_splice_rate_mismatch():
    base = sine_buffer(440, 1.0, 16000)
    with pytest.raises(RateMismatch):
        splice(base, [(TimeSpan(0.1, 0.2), AudioBuffer(np.ones(10), 8000))])


def test_splice_out_of_range():
    base = sine_buffer(440, 1.0, 16000)
    with pytest.raises(SpanOutOfRange):
        splice(base, [(TimeSpan(0.9, 1.1), AudioBuffer(np.ones(10), 16000))])


def test_splice_crossfade_keeps_length_contract():
    base = sine_buffer(440, 1.0, 16000)
    reps = [(TimeSpan(0.25, 0.5), sine_buffer(880, 0.3, 16000))]
    plain = splice(base, reps)
    faded = splice(base, reps, crossfade_ms=10)
    assert len(faded) == len(plain)
    # samples away from the junctions are untouched
    assert np.array_equal(faded.samples[:3840], plain.samples[:3840])


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_splice_matches_naive_oracle(data):
    rate = 1000
    base = AudioBuffer(np.random.default_rng(0).standard_normal(500), rate)
    n_spans = data.draw(st.integers(0, 4))
    bounds = sorted(
        data.draw(
            st.lists(st.integers(0, 500), min_size=2 * n_spans, max_size=2 * n_spans, unique=True)
        )
    )
    replacements = []
    for i in range(n_spans):
        start, end = bounds[2 * i], bounds[2 * i + 1]
        rep_len = data.draw(st.integers(0, 40))
        replacements.append(
            (TimeSpan(start / rate, end / rate), AudioBuffer(np.full(rep_len, 0.5), rate))
        )
    out = splice(base, replacements)
    expected = naive_splice(base, replacements)
    span_samples = sum(
        time_to_sample(s.end_s, rate) - time_to_sample(s.start_s, rate)
        for s, _ in replacements
    )
    rep_samples = sum(len(r) for _, r in replacements)
    assert len(out) == len(base) - span_samples + rep_samples
    assert np.array_equal(out.samples, expected)
