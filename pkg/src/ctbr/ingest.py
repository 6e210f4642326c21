"""Read, validate, and write the canonical blocks-JSON document and the
sidecar label file; merge labels onto blocks.

Canonical form: UTF-8, keys sorted, 2-space indent, coordinates and font
sizes quantized to 4 decimal places. Saving a loaded document reproduces
the bytes exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    DocMismatchError,
    DuplicateIdError,
    GeometryError,
    SchemaError,
    UnknownBlockError,
)
from .model import BBox, BlockDocument, BlockLabel, Page, Span, TextBlock

_LABEL_VALUES = {label.value: label for label in BlockLabel}


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def _round4(x: float) -> float:
    return round(float(x), 4)


def canonical_json_bytes(obj) -> bytes:
    """Stable serialization: sorted keys, 2-space indent, UTF-8, no ASCII escapes."""
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaError(path, message)


def _get(mapping, key: str, path: str):
    _expect(isinstance(mapping, dict), path, f"expected object, got {type(mapping).__name__}")
    if key not in mapping:
        raise SchemaError(f"{path}.{key}", "missing field")
    return mapping[key]


def _number(value, path: str) -> float:
    _expect(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        path,
        f"expected number, got {type(value).__name__}",
    )
    return float(value)


def _string(value, path: str) -> str:
    _expect(isinstance(value, str), path, f"expected string, got {type(value).__name__}")
    return value


def _integer(value, path: str) -> int:
    _expect(
        isinstance(value, int) and not isinstance(value, bool),
        path,
        f"expected integer, got {type(value).__name__}",
    )
    return value


def _parse_bbox(value, path: str, require_area: bool) -> BBox:
    _expect(isinstance(value, list) and len(value) == 4, path, "expected [l, t, r, b]")
    nums = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    try:
        box = BBox(*nums)
    except GeometryError as exc:
        raise GeometryError(f"{path}: {exc}") from exc
    if require_area and box.area <= 0:
        raise GeometryError(f"{path}: zero-area bbox")
    return box


# ---------------------------------------------------------------------------
# Document load / save
# ---------------------------------------------------------------------------


def load_document(data: bytes) -> BlockDocument:
    """Parse and fully validate a blocks-JSON byte stream.

    Raises SchemaError (with a JSON path) for structural problems,
    GeometryError for invalid boxes, DuplicateIdError for id collisions.
    """
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"not valid UTF-8 JSON: {exc}") from exc

    _expect(isinstance(raw, dict), "$", "top level must be an object")
    doc_id = _string(_get(raw, "doc_id", "$"), "$.doc_id")
    columns = _integer(_get(raw, "layout_columns", "$"), "$.layout_columns")
    _expect(columns in (1, 2), "$.layout_columns", "must be 1 or 2")
    raw_pages = _get(raw, "pages", "$")
    _expect(isinstance(raw_pages, list), "$.pages", "expected array")

    seen_ids: set[str] = set()
    pages: list[Page] = []
    for pi, raw_page in enumerate(raw_pages):
        ppath = f"pages[{pi}]"
        index = _integer(_get(raw_page, "index", ppath), f"{ppath}.index")
        _expect(index == pi, f"{ppath}.index", f"expected {pi} (contiguous from 0)")
        media = _parse_bbox(_get(raw_page, "media_box", ppath), f"{ppath}.media_box", True)
        raw_blocks = _get(raw_page, "blocks", ppath)
        _expect(isinstance(raw_blocks, list), f"{ppath}.blocks", "expected array")

        blocks: list[TextBlock] = []
        for bi, raw_block in enumerate(raw_blocks):
            bpath = f"{ppath}.blocks[{bi}]"
            bid = _string(_get(raw_block, "id", bpath), f"{bpath}.id")
            _expect(bool(bid), f"{bpath}.id", "must be non-empty")
            if bid in seen_ids:
                raise DuplicateIdError(f"block id {bid!r} used twice (at {bpath})")
            seen_ids.add(bid)
            order = _integer(_get(raw_block, "reading_order", bpath), f"{bpath}.reading_order")
            bbox = _parse_bbox(_get(raw_block, "bbox", bpath), f"{bpath}.bbox", True)
            raw_spans = _get(raw_block, "spans", bpath)
            _expect(isinstance(raw_spans, list) and raw_spans, f"{bpath}.spans", "expected non-empty array")
            spans = []
            for si, raw_span in enumerate(raw_spans):
                spath = f"{bpath}.spans[{si}]"
                text = _string(_get(raw_span, "text", spath), f"{spath}.text")
                _expect(bool(text), f"{spath}.text", "must be non-empty")
                font_name = _string(_get(raw_span, "font_name", spath), f"{spath}.font_name")
                font_size = _number(_get(raw_span, "font_size", spath), f"{spath}.font_size")
                _expect(font_size > 0, f"{spath}.font_size", "must be > 0")
                spans.append(Span(text=text, font_name=font_name, font_size=font_size))
            try:
                blocks.append(
                    TextBlock(id=bid, page_index=pi, bbox=bbox, spans=tuple(spans), reading_order=order)
                )
            except GeometryError as exc:
                raise GeometryError(f"{bpath}: {exc}") from exc
        try:
            pages.append(Page(index=pi, media_box=media, blocks=tuple(blocks)))
        except DuplicateIdError as exc:
            raise DuplicateIdError(f"{ppath}: {exc}") from exc
        except GeometryError as exc:
            raise GeometryError(f"{ppath}: {exc}") from exc

    return BlockDocument(doc_id=doc_id, pages=tuple(pages), layout_columns=columns)


def document_to_dict(doc: BlockDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "layout_columns": doc.layout_columns,
        "pages": [
            {
                "index": page.index,
                "media_box": [_round4(v) for v in page.media_box.as_list()],
                "blocks": [
                    {
                        "id": blk.id,
                        "reading_order": blk.reading_order,
                        "bbox": [_round4(v) for v in blk.bbox.as_list()],
                        "spans": [
                            {
                                "text": s.text,
                                "font_name": s.font_name,
                                "font_size": _round4(s.font_size),
                            }
                            for s in blk.spans
                        ],
                    }
                    for blk in page.blocks
                ],
            }
            for page in doc.pages
        ],
    }


def save_document(doc: BlockDocument) -> bytes:
    """Serialize to canonical blocks-JSON bytes (round-trips through load)."""
    return canonical_json_bytes(document_to_dict(doc))


# ---------------------------------------------------------------------------
# Label files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabelFile:
    """Sidecar annotation file: block ids mapped to one of the three classes."""

    doc_id: str
    entries: tuple[tuple[str, BlockLabel], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for bid, _ in self.entries:
            if bid in seen:
                raise DuplicateIdError(f"label file: block id {bid!r} labeled twice")
            seen.add(bid)


@dataclass(frozen=True)
class LabeledDocument:
    """A document plus a (possibly partial) block-id -> label map."""

    document: BlockDocument
    labels: dict[str, BlockLabel]


def load_labels(data: bytes) -> LabelFile:
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"not valid UTF-8 JSON: {exc}") from exc
    _expect(isinstance(raw, dict), "$", "top level must be an object")
    doc_id = _string(_get(raw, "doc_id", "$"), "$.doc_id")
    raw_labels = _get(raw, "labels", "$")
    _expect(isinstance(raw_labels, list), "$.labels", "expected array")
    entries = []
    for i, raw_entry in enumerate(raw_labels):
        epath = f"labels[{i}]"
        bid = _string(_get(raw_entry, "block_id", epath), f"{epath}.block_id")
        value = _string(_get(raw_entry, "label", epath), f"{epath}.label")
        _expect(value in _LABEL_VALUES, f"{epath}.label", f"unknown label {value!r}")
        entries.append((bid, _LABEL_VALUES[value]))
    return LabelFile(doc_id=doc_id, entries=tuple(entries))


def save_labels(labels: LabelFile) -> bytes:
    return canonical_json_bytes(
        {
            "doc_id": labels.doc_id,
            "labels": [
                {"block_id": bid, "label": label.value} for bid, label in labels.entries
            ],
        }
    )


def merge_labels(doc: BlockDocument, labels: LabelFile) -> LabeledDocument:
    """Attach label entries to a document; unlabeled blocks stay unlabeled.

    Raises DocMismatchError when doc_ids differ and UnknownBlockError when an
    entry names a block the document does not contain.
    """
    if labels.doc_id != doc.doc_id:
        raise DocMismatchError(
            f"label file is for {labels.doc_id!r}, document is {doc.doc_id!r}"
        )
    known = doc.block_index()
    merged: dict[str, BlockLabel] = {}
    for bid, label in labels.entries:
        if bid not in known:
            raise UnknownBlockError(f"label references unknown block {bid!r}")
        merged[bid] = label
    return LabeledDocument(document=doc, labels=merged)
