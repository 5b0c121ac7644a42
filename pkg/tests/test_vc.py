import numpy as np
import pytest

from csforge.audio import AudioBuffer, normalize_amplitude
from csforge.backends import (
    BackendEndpoint,
    IdentityConverter,
    ProtocolClient,
    encode_audio,
    payload_buffer,
)
from csforge.errors import DegenerateConversion, EmptyBuffer, RateMismatch
from csforge.vc import VCRequest, unify_style


def vc_client(handler=None):
    return ProtocolClient(BackendEndpoint(transport="builtin"), handler or IdentityConverter())


def tone(duration_s=3.0, rate=16000, amplitude=0.5):
    t = np.arange(int(duration_s * rate)) / rate
    return AudioBuffer(amplitude * np.sin(2 * np.pi * 440 * t), rate)


def test_identity_at_target_peak_is_bit_exact():
    buf = normalize_amplitude(tone(), -1.0)
    out = unify_style(vc_client(), VCRequest(buf, buf))
    assert out == buf


def test_renormalization_from_minus_six_dbfs():
    buf = normalize_amplitude(tone(), -6.0)
    out = unify_style(vc_client(), VCRequest(buf, buf), target_peak_dbfs=-1.0)
    # renormalization factor 10^(5/20)
    assert float(np.max(np.abs(out.samples))) == pytest.approx(10 ** (-1 / 20), abs=1e-9)
    assert np.max(np.abs(out.samples - buf.samples * 10 ** (5 / 20))) < 1e-9


class ShortOutput:
    def handle(self, request):
        rate = request["sample_rate"]
        return {"audio_b64": encode_audio(AudioBuffer(np.zeros(int(0.01 * rate)), rate))}


def test_degenerate_duration_guard():
    buf = tone(5.0)
    with pytest.raises(DegenerateConversion):
        unify_style(vc_client(ShortOutput()), VCRequest(buf, buf))


class SlightlyLonger:
    def handle(self, request):
        rate = request["sample_rate"]
        samples = payload_buffer(request["input_b64"], rate).samples
        return {"audio_b64": encode_audio(AudioBuffer(np.concatenate([samples, samples[: len(samples) // 20]]), rate))}


def test_five_percent_longer_output_accepted():
    buf = tone(2.0)
    out = unify_style(vc_client(SlightlyLonger()), VCRequest(buf, buf))
    assert len(out) == len(buf) + len(buf) // 20
    assert out.sample_rate == buf.sample_rate


def test_output_rate_always_matches_input():
    buf = tone(1.0, rate=22050)
    out = unify_style(vc_client(), VCRequest(buf, buf))
    assert out.sample_rate == 22050


class ReferenceRecorder:
    def __init__(self):
        self.reference_len = None

    def handle(self, request):
        rate = request["sample_rate"]
        self.reference_len = len(payload_buffer(request["reference_b64"], rate))
        return {"audio_b64": request["input_b64"]}


def test_short_reference_padded_by_self_repetition():
    recorder = ReferenceRecorder()
    buf = tone(3.0)
    short_ref = tone(0.5)
    unify_style(vc_client(recorder), VCRequest(buf, short_ref, min_reference_s=2.0))
    assert recorder.reference_len == 4 * len(short_ref)  # tiled to >= 2 s


def test_long_reference_untouched():
    recorder = ReferenceRecorder()
    buf = tone(3.0)
    unify_style(vc_client(recorder), VCRequest(buf, buf))
    assert recorder.reference_len == len(buf)


def test_identity_commutes_with_normalization():
    buf = tone(1.0, amplitude=0.37)
    converted = unify_style(vc_client(), VCRequest(buf, buf))
    assert np.array_equal(
        normalize_amplitude(converted).samples, normalize_amplitude(buf).samples
    )


def test_vc_request_validation():
    with pytest.raises(RateMismatch):
        VCRequest(tone(1.0, rate=16000), tone(1.0, rate=8000))
    with pytest.raises(EmptyBuffer):
        VCRequest(AudioBuffer(np.zeros(0), 16000), tone(1.0))
