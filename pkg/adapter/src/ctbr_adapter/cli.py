"""ctbr-extract: convert a PDF into canonical blocks-JSON.

Exit codes: 0 success, 2 on any extraction or schema failure. The adapter
does no classification or cleanup beyond fragment merging; everything
downstream consumes the JSON through the main pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .blocks import DEFAULT_MERGE_TOLERANCE, ExtractionConfig, extract_blocks, extract_fonts_report
from .errors import AdapterError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctbr-extract", description="PDF to blocks-JSON extractor"
    )
    parser.add_argument("pdf", help="input PDF path")
    parser.add_argument("--out", required=True, help="output blocks-JSON path")
    parser.add_argument(
        "--merge-tol",
        type=float,
        default=DEFAULT_MERGE_TOLERANCE,
        help="extra line-gap slack in points when merging lines into blocks",
    )
    parser.add_argument("--columns", default="auto", help="1, 2, or auto")
    parser.add_argument("--doc-id", help="doc_id for the output (default: file stem)")
    parser.add_argument("--font-report", help="also write a font usage report here")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        column_hint: int | str = args.columns
        if column_hint in ("1", "2"):
            column_hint = int(column_hint)
        cfg = ExtractionConfig(merge_tolerance=args.merge_tol, column_hint=column_hint)
        pdf_path = Path(args.pdf)
        try:
            pdf_bytes = pdf_path.read_bytes()
        except OSError as exc:
            raise AdapterError(f"cannot read {pdf_path}: {exc}") from exc
        doc_id = args.doc_id or pdf_path.stem
        data = extract_blocks(pdf_bytes, cfg, doc_id=doc_id)
        Path(args.out).write_bytes(data)
        if args.font_report:
            report = extract_fonts_report(pdf_bytes)
            Path(args.font_report).write_text(
                json.dumps(report, sort_keys=True, indent=2) + "\n", "utf-8"
            )
    except (AdapterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = json.loads(data.decode("utf-8"))
    blocks = sum(len(p["blocks"]) for p in payload["pages"])
    print(f"{doc_id}: {len(payload['pages'])} pages, {blocks} blocks -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
