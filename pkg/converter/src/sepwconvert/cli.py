"""Command line: convert checkpoints, inspect emitted bundles."""

from __future__ import annotations

import argparse
import json
import sys

from .convert import ConversionError, ConvertConfig, convert, load_name_map
from .sepw import read_manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepw-convert",
        description="Convert flat-tensor .npz checkpoints into .sepw weight bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="convert a checkpoint to .sepw")
    conv.add_argument("checkpoint", help="flat-tensor .npz checkpoint")
    conv.add_argument("output", help="output .sepw path")
    conv.add_argument("--m", type=int, required=True, help="channel multiplier")
    conv.add_argument("--s-o", type=int, required=True, help="1D LUT size")
    conv.add_argument("--s-t", type=int, required=True, help="3D LUT size")
    conv.add_argument("--k", type=int, required=True, help="factorization rank")
    conv.add_argument("--leaky-slope", type=float, default=0.2)
    conv.add_argument(
        "--name-map",
        help="JSON file mapping checkpoint tensor names to bundle names",
    )

    insp = sub.add_parser("inspect", help="dump a bundle's manifest as JSON")
    insp.add_argument("bundle", help=".sepw file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "convert":
            config = ConvertConfig(
                m=args.m, s_o=args.s_o, s_t=args.s_t, k=args.k, leaky_slope=args.leaky_slope
            )
            name_map = load_name_map(args.name_map) if args.name_map else None
            shapes = convert(args.checkpoint, config, args.output, name_map)
            print(f"wrote {args.output} ({len(shapes)} tensors)")
        else:
            print(json.dumps(read_manifest(args.bundle), indent=2))
    except (ConversionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
