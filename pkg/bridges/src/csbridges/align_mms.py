"""Forced alignment through torchaudio's multilingual alignment pipeline.

The model consumes romanized tokens, so requests must arrive with
romanized=true (the pipeline client romanizes before dispatch when the
endpoint declares it). Model assets load lazily on the first request;
missing ML dependencies produce an error object instead of killing the
process.
"""

from __future__ import annotations

import numpy as np

from .protocol import decode_audio, encode_audio, error_response


class MMSAligner:
    requires_romanization = True

    def __init__(self, device: str = "cpu"):
        self.device = device
        self._bundle = None
        self._model = None
        self._tokenizer = None
        self._aligner = None

    def _load(self):
        try:
            import torch
            import torchaudio
        except ImportError as exc:
            raise RuntimeError(
                f"forced-alignment bridge needs torch+torchaudio installed: {exc}"
            ) from exc
        self._torch = torch
        self._torchaudio = torchaudio
        self._bundle = torchaudio.pipelines.MMS_FA
        self._model = self._bundle.get_model().to(self.device)
        self._tokenizer = self._bundle.get_tokenizer()
        self._aligner = self._bundle.get_aligner()

    def handle(self, request: dict) -> dict:
        if not request.get("romanized", False):
            return error_response("needs_romanized_tokens", "this aligner requires romanized input")
        if self._model is None:
            try:
                self._load()
            except RuntimeError as exc:
                return error_response("model_unavailable", str(exc))

        torch = self._torch
        samples = decode_audio(request["audio_b64"]).astype(np.float32)
        rate = int(request["sample_rate"])
        waveform = torch.from_numpy(samples).unsqueeze(0)
        if rate != self._bundle.sample_rate:
            waveform = self._torchaudio.functional.resample(waveform, rate, self._bundle.sample_rate)
        tokens = [str(t) for t in request["tokens"]]

        with torch.inference_mode():
            emission, _ = self._model(waveform.to(self.device))
            token_spans = self._aligner(emission[0], self._tokenizer(tokens))

        # frame index -> seconds in the original-rate signal
        seconds_per_frame = (len(samples) / rate) / emission.size(1)
        spans = []
        scores = []
        for word_spans in token_spans:
            start = word_spans[0].start * seconds_per_frame
            end = word_spans[-1].end * seconds_per_frame
            spans.append([start, end])
            scores.append(float(sum(s.score for s in word_spans) / len(word_spans)))
        return {"spans": spans, "scores": scores}


__all__ = ["MMSAligner", "encode_audio"]
