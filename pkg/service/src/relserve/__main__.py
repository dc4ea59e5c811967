"""Run the service: ``relserve --checkpoint-dir ckpt --port 8008``."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="relserve", description=__doc__)
    parser.add_argument("--checkpoint-dir", default="checkpoints")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--max-batch-size", type=int, default=16)
    args = parser.parse_args(argv)
    app = create_app(args.checkpoint_dir, max_batch_size=args.max_batch_size)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
