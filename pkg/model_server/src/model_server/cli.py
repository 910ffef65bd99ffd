"""model-server command line: train a checkpoint, serve it, build a tiny base."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, TrainConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="model-server", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fine-tune a token classifier on CoNLL data")
    train.add_argument(
        "--config",
        required=True,
        help="JSON file with checkpoint_dir, dataset, transformers_model, "
        "lr, epochs, max_seq_length, batch_size",
    )

    serve = sub.add_parser("serve", help="serve a checkpoint over the wire protocol")
    serve.add_argument("--checkpoint", required=True, help="checkpoint directory")
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--host", default="127.0.0.1")

    tiny = sub.add_parser(
        "make-tiny", help="build a tiny random-init base model from a corpus (offline helper)"
    )
    tiny.add_argument("--corpus", required=True, help="CoNLL dataset directory")
    tiny.add_argument("--out", required=True, help="output model directory")
    tiny.add_argument("--max-seq-length", type=int, default=128)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "train":
        from .training import DatasetNotFound, LabelMismatch, finetune

        try:
            config = TrainConfig.from_file(args.config)
            checkpoint = finetune(config)
        except (ConfigError, DatasetNotFound, LabelMismatch, OSError, ValueError) as exc:
            print(f"model-server: error: {exc}", file=sys.stderr)
            return 1
        print(checkpoint)
        return 0

    if args.command == "serve":
        from .serving import CheckpointLoadError, serve as run_server

        try:
            run_server(args.checkpoint, port=args.port, host=args.host)
        except CheckpointLoadError as exc:
            print(f"model-server: error: {exc}", file=sys.stderr)
            return 1
        return 0

    from .tiny import build_tiny_pretrained

    out = build_tiny_pretrained(args.corpus, args.out, max_seq_length=args.max_seq_length)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
