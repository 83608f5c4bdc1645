"""The embed-corpus command. Exit codes: 0 success, 1 domain error, 2 usage."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .emb1 import Emb1Error
from .embed import EmbedJob, Pooling, embed_corpus
from .encoders import EncoderError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-corpus",
        description="Convert a one-text-per-line corpus into an EMB1 embedding file",
    )
    parser.add_argument("--version", action="version", version=f"embed-corpus {__version__}")
    parser.add_argument("--input", required=True, help="corpus file, one text per line")
    parser.add_argument("--out", required=True, help="output EMB1 path")
    parser.add_argument(
        "--encoder",
        default="hash",
        help="encoder id: hash[:dim], a transformers hub id, or a local model path",
    )
    parser.add_argument(
        "--pooling",
        choices=[p.value.lower() for p in Pooling],
        default="mean",
        help="token pooling strategy",
    )
    parser.add_argument("--max-texts", type=int, default=None)
    parser.add_argument("--json", action="store_true", help="JSON summary on stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = EmbedJob(
            input_path=args.input,
            output_path=args.out,
            encoder=args.encoder,
            pooling=Pooling(args.pooling.upper()),
            max_texts=args.max_texts,
        )
        result = embed_corpus(job)
    except (EncoderError, Emb1Error, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary = {
        "rows": result.rows,
        "dim": result.dim,
        "truncated": result.truncated,
        "output": result.output_path,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"wrote {result.rows}x{result.dim} embeddings to {result.output_path}"
              + (f" ({result.truncated} texts truncated)" if result.truncated else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
