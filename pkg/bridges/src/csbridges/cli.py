"""csbridge command line: serve one backend kind over stdio or HTTP."""

from __future__ import annotations

import argparse
import sys

from .protocol import KINDS
from .serve import BridgeConfig, serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="csbridge", description=__doc__)
    parser.add_argument("kind", choices=KINDS, help="which backend kind this process serves")
    parser.add_argument("--fixtures", help="replay recorded responses from this directory")
    parser.add_argument("--model", default="", help="model identifier")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--http", type=int, default=None, metavar="PORT", help="serve HTTP instead of stdio")
    parser.add_argument("--api-url", default="", help="chat-completions endpoint (word_map)")
    parser.add_argument("--api-key-env", default="OPENAI_API_KEY")
    parser.add_argument(
        "--temperature", type=float, default=0.0,
        help="LLM sampling temperature (word_map pins this to 0.0)",
    )
    args = parser.parse_args(argv)

    try:
        config = BridgeConfig(
            kind=args.kind,
            model=args.model,
            device=args.device,
            http_port=args.http,
            fixtures_dir=args.fixtures,
            api_url=args.api_url,
            api_key_env=args.api_key_env,
            temperature=args.temperature,
        )
        serve(config)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
