"""Sample-accurate mono audio: WAV I/O, bandpass preprocessing, peak
normalization, segment clipping and splice recombination.

All operations are pure: buffers are immutable values, every operation
returns a new buffer. Time-to-sample conversion is round-half-up on start
and end independently, so external aligner backends can reproduce the
exact sample indices this module uses.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.signal import butter, sosfilt

from .errors import (
    EmptyBuffer,
    InvalidCutoff,
    MalformedWav,
    OverlappingSpans,
    RateMismatch,
    SpanOutOfRange,
)

# int16 full scale used by both the WAV codec and the round-trip error bound
_PCM_SCALE = 32768.0

DEFAULT_LOW_HZ = 80.0
DEFAULT_HIGH_HZ = 7000.0
# Butterworth biquad-cascade order. 8 sections give > 30 dB at 50 Hz and at
# 10 kHz for the 80/7000 Hz band; 4 sections measure only ~16 dB and miss
# the 20 dB stopband requirement.
DEFAULT_FILTER_ORDER = 8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform with a fixed sample rate.

    ``samples`` is a read-only float64 array. Values are nominally in
    [-1, 1]; intermediate DSP output may overshoot, normalization restores
    the bound.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {arr.shape}")
        if arr.flags.writeable:
            arr = _frozen(arr.copy())
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AudioBuffer)
            and self.sample_rate == other.sample_rate
            and np.array_equal(self.samples, other.samples)
        )


@dataclass(frozen=True)
class TimeSpan:
    """Half-open time interval in seconds, 0 <= start < end."""

    start_s: float
    end_s: float

    def __post_init__(self):
        if self.start_s < 0:
            raise ValueError(f"start_s must be >= 0, got {self.start_s}")
        if self.end_s <= self.start_s:
            raise ValueError(f"end_s must exceed start_s, got [{self.start_s}, {self.end_s}]")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def time_to_sample(t: float, sample_rate: int) -> int:
    """Round-half-up conversion used everywhere spans meet samples."""
    return int(math.floor(t * sample_rate + 0.5))


def span_to_samples(span: TimeSpan, sample_rate: int) -> tuple[int, int]:
    return time_to_sample(span.start_s, sample_rate), time_to_sample(span.end_s, sample_rate)


# --- WAV I/O ---------------------------------------------------------------

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a PCM WAV file (16-bit int or 32-bit float, mono or stereo).

    Stereo is downmixed by channel averaging; integer samples are rescaled
    by 1/32768 so full negative scale maps to -1.0 exactly.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if size < 16:
                raise MalformedWav(f"{path}: fmt chunk too short ({size} bytes)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _FMT_EXTENSIBLE:
                if size < 40:
                    raise MalformedWav(f"{path}: extensible fmt chunk too short")
                (subfmt,) = struct.unpack_from("<H", body, 24)
                fmt = (subfmt,) + fmt[1:]
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise MalformedWav(f"{path}: missing fmt or data chunk")
    codec, channels, rate, _byte_rate, _block_align, bits = fmt
    if channels < 1 or rate <= 0:
        raise MalformedWav(f"{path}: invalid channel count or sample rate")

    if codec == _FMT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2")
        samples = raw.astype(np.float64) / _PCM_SCALE
    elif codec == _FMT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise MalformedWav(f"{path}: unsupported codec (format {codec}, {bits}-bit)")

    if channels > 1:
        usable = (len(samples) // channels) * channels
        samples = samples[:usable].reshape(-1, channels).mean(axis=1)
    return AudioBuffer(_frozen(samples if samples.flags.writeable else samples.copy()), rate)


def write_wav(buf: AudioBuffer, path: str | Path) -> None:
    """Write 16-bit PCM mono; round-trip error is at most 1/32768 per sample."""
    pcm = np.clip(np.rint(buf.samples * _PCM_SCALE), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    rate = buf.sample_rate
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(body)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, _FMT_PCM, 1, rate, rate * 2, 2, 16),
            b"data",
            struct.pack("<I", len(body)),
        ]
    )
    Path(path).write_bytes(header + body)


# --- preprocessing ----------------------------------------------------------


@lru_cache(maxsize=32)
def _bandpass_sos(low_hz: float, high_hz: float, sample_rate: int, order: int):
    return butter(order, [low_hz, high_hz], btype="bandpass", fs=sample_rate, output="sos")


def bandpass_filter(
    buf: AudioBuffer,
    low_hz: float = DEFAULT_LOW_HZ,
    high_hz: float = DEFAULT_HIGH_HZ,
    order: int = DEFAULT_FILTER_ORDER,
) -> AudioBuffer:
    """Causal Butterworth bandpass (cascade of biquad sections, forward-only).

    Output length equals input length. Requires 0 < low < high < rate/2.
    """
    nyquist = buf.sample_rate / 2
    if not 0 < low_hz < high_hz < nyquist:
        raise InvalidCutoff(
            f"need 0 < low < high < {nyquist} Hz, got low={low_hz}, high={high_hz}"
        )
    if len(buf) == 0:
        return buf
    sos = _bandpass_sos(float(low_hz), float(high_hz), buf.sample_rate, order)
    return AudioBuffer(_frozen(sosfilt(sos, buf.samples)), buf.sample_rate)


def normalize_amplitude(buf: AudioBuffer, target_peak_dbfs: float = -1.0) -> AudioBuffer:
    """Scale so the peak sits at ``target_peak_dbfs``; all-zero input is
    returned unchanged (silent segments occur in real corpora)."""
    if len(buf) == 0:
        raise EmptyBuffer("cannot normalize an empty buffer")
    peak = float(np.max(np.abs(buf.samples)))
    if peak == 0.0:
        return buf
    target = 10.0 ** (target_peak_dbfs / 20.0)
    # dividing by the peak first keeps intermediates in [-1, 1] even for
    # subnormal peaks, where target/peak would overflow
    return AudioBuffer(_frozen(buf.samples / peak * target), buf.sample_rate)


# --- clipping and splicing --------------------------------------------------


def clip_segment(buf: AudioBuffer, span: TimeSpan) -> AudioBuffer:
    """Copy the samples covered by ``span`` into a new buffer."""
    start, end = span_to_samples(span, buf.sample_rate)
    if end > len(buf):
        raise SpanOutOfRange(
            f"span [{span.start_s}, {span.end_s}]s ends at sample {end}, buffer has {len(buf)}"
        )
    return AudioBuffer(_frozen(buf.samples[start:end].copy()), buf.sample_rate)


def splice(
    base: AudioBuffer,
    replacements: list[tuple[TimeSpan, AudioBuffer]],
    crossfade_ms: float = 0.0,
) -> AudioBuffer:
    """Replace each span of ``base`` with the paired buffer.

    Spans must be sorted ascending, non-overlapping, within ``base``; all
    buffers must share the base sample rate. Output length is exactly
    base - sum(span samples) + sum(replacement samples). A crossfade
    length > 0 applies complementary linear ramps on each side of every
    junction; it never changes the length contract.
    """
    if not replacements:
        return base
    rate = base.sample_rate
    cuts: list[tuple[int, int, AudioBuffer]] = []
    prev_end = 0
    for span, rep in replacements:
        if rep.sample_rate != rate:
            raise RateMismatch(f"replacement at {rate} Hz expected, got {rep.sample_rate} Hz")
        start, end = span_to_samples(span, rate)
        if end > len(base):
            raise SpanOutOfRange(f"span [{span.start_s}, {span.end_s}]s exceeds base buffer")
        if start < prev_end:
            raise OverlappingSpans(f"span starting at {span.start_s}s overlaps or is unsorted")
        cuts.append((start, end, rep))
        prev_end = end

    parts: list[np.ndarray] = []
    pos = 0
    for start, end, rep in cuts:
        parts.append(base.samples[pos:start])
        parts.append(rep.samples)
        pos = end
    parts.append(base.samples[pos:])

    if crossfade_ms > 0:
        fade = time_to_sample(crossfade_ms / 1000.0, rate)
        parts = [p.copy() for p in parts]
        for left, right in zip(parts, parts[1:]):
            k = min(fade, len(left), len(right))
            if k == 0:
                continue
            ramp = np.arange(1, k + 1) / float(k)  # 1/k .. 1.0
            left[-k:] *= ramp[::-1]
            right[:k] *= ramp
    return AudioBuffer(_frozen(np.concatenate(parts)), rate)
