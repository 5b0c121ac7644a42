"""Speaker-style unification through a voice-conversion backend.

The spliced utterance is converted as a whole, with the full matrix
utterance as target-speaker reference material. Short references are
padded by self-repetition before dispatch; backend output is guarded
against degenerate durations and re-normalized to the pipeline peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer, normalize_amplitude
from .backends import AudioPayload, ProtocolClient, payload_buffer
from .errors import DegenerateConversion, EmptyBuffer, RateMismatch

MIN_REFERENCE_S = 2.0
DURATION_GUARD = 0.10  # output must stay within ±10% of the input duration


@dataclass(frozen=True)
class VCRequest:
    input: AudioBuffer
    reference: AudioBuffer
    min_reference_s: float = MIN_REFERENCE_S

    def __post_init__(self):
        if self.input.sample_rate != self.reference.sample_rate:
            raise RateMismatch(
                f"input at {self.input.sample_rate} Hz, reference at {self.reference.sample_rate} Hz"
            )
        if len(self.input) == 0 or len(self.reference) == 0:
            raise EmptyBuffer("VC input and reference must be non-empty")


def _pad_reference(ref: AudioBuffer, min_s: float) -> AudioBuffer:
    need = int(math.ceil(min_s * ref.sample_rate))
    if len(ref) >= need:
        return ref
    reps = int(math.ceil(need / len(ref)))
    return AudioBuffer(np.tile(ref.samples, reps), ref.sample_rate)


def unify_style(
    client: ProtocolClient, req: VCRequest, target_peak_dbfs: float = -1.0
) -> AudioBuffer:
    """Convert, guard, and re-normalize to the pipeline's target peak.

    Raises DegenerateConversion if the backend output duration deviates
    more than 10% from the input; the caller keeps the unconverted audio
    and flags the record instead of dropping it.
    """
    reference = _pad_reference(req.reference, req.min_reference_s)
    response = client.call(
        {
            "kind": "vc",
            "sample_rate": req.input.sample_rate,
            "input_b64": AudioPayload(req.input),
            "reference_b64": AudioPayload(reference),
        }
    )
    converted = payload_buffer(response["audio_b64"], req.input.sample_rate)
    if abs(len(converted) - len(req.input)) > DURATION_GUARD * len(req.input):
        raise DegenerateConversion(
            f"backend returned {len(converted)} samples for a {len(req.input)}-sample input"
        )
    peak = float(np.max(np.abs(converted.samples))) if len(converted) else 0.0
    target = 10.0 ** (target_peak_dbfs / 20.0)
    if peak == 0.0 or abs(peak / target - 1.0) < 1e-9:
        return converted  # already at target: keep bit-exact identity output
    return normalize_amplitude(converted, target_peak_dbfs)
