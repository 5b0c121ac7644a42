"""Voice conversion through the retrieval-based kNN converter from
torch.hub, with the reference payload as target-speaker matching material.

The hub model works on 16 kHz file paths, so payloads round-trip through
temporary WAVs. Assets load lazily; missing ML dependencies produce an
error object instead of killing the process.
"""

from __future__ import annotations

import tempfile
import wave
from pathlib import Path

import numpy as np

from .protocol import decode_audio, encode_audio, error_response

MODEL_SAMPLE_RATE = 16000


def _write_wav16(path: Path, samples: np.ndarray, rate: int) -> None:
    pcm = np.clip(np.rint(samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(pcm.tobytes())


class KNNConverter:
    def __init__(self, device: str = "cpu", topk: int = 4):
        self.device = device
        self.topk = topk
        self._model = None

    def _load(self):
        try:
            import torch
        except ImportError as exc:
            raise RuntimeError(f"vc bridge needs torch installed: {exc}") from exc
        self._torch = torch
        self._model = torch.hub.load(
            "bshall/knn-vc", "knn_vc", prematched=True, trust_repo=True, device=self.device
        )

    def handle(self, request: dict) -> dict:
        rate = int(request["sample_rate"])
        if rate != MODEL_SAMPLE_RATE:
            return error_response(
                "unsupported_rate", f"converter runs at {MODEL_SAMPLE_RATE} Hz, got {rate}"
            )
        if self._model is None:
            try:
                self._load()
            except RuntimeError as exc:
                return error_response("model_unavailable", str(exc))

        source = decode_audio(request["input_b64"])
        reference = decode_audio(request["reference_b64"])
        with tempfile.TemporaryDirectory(prefix="csbridge-vc-") as tmp:
            tmp = Path(tmp)
            src_path, ref_path = tmp / "src.wav", tmp / "ref.wav"
            _write_wav16(src_path, source, rate)
            _write_wav16(ref_path, reference, rate)
            with self._torch.inference_mode():
                query = self._model.get_features(str(src_path))
                matching = self._model.get_matching_set([str(ref_path)])
                converted = self._model.match(query, matching, topk=self.topk)
        return {"audio_b64": encode_audio(converted.cpu().numpy().astype(np.float64))}
