"""Run the scorer service with uvicorn."""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn

from .app import create_app
from .config import DEFAULT_MAX_SEQ_LEN, DEFAULT_PORT, MODEL_PATH_ENV, config_from_env


def main() -> None:
    parser = argparse.ArgumentParser(
        prog="scorer-service",
        description="HTTP service scoring multiple-choice candidates with a transformer")
    parser.add_argument("--model", type=Path, default=None,
                        help=f"model directory (default: ${MODEL_PATH_ENV})")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument("--max-seq-len", type=int, default=DEFAULT_MAX_SEQ_LEN)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args()

    overrides = dict(host=args.host, port=args.port,
                     max_seq_len=args.max_seq_len, device=args.device)
    if args.model is not None:
        overrides["model_path"] = args.model
    config = config_from_env(**overrides)
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
