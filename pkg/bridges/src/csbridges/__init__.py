"""Model-backend bridges speaking the csforge backend JSON protocol.

One process serves one backend kind (word_map, align or vc) over stdio or
HTTP, either backed by a real model (OpenAI-compatible LLM, torchaudio
forced alignment, torch.hub voice conversion) or replaying recorded
fixture responses for CI.
"""

from .fixtures import FixtureStore
from .protocol import (
    KINDS,
    decode_audio,
    encode_audio,
    error_response,
    validate_request,
    validate_response,
)
from .serve import BridgeConfig, build_handler, serve

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "BridgeConfig",
    "FixtureStore",
    "build_handler",
    "serve",
    "decode_audio",
    "encode_audio",
    "error_response",
    "validate_request",
    "validate_response",
]
