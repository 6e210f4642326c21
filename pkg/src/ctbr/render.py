"""Static SVG page overlays: labeled blocks, boundaries, detected regions.

Output is a deterministic standalone SVG sized to the page media box, built
as plain text so tests can parse and count elements.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import PageNotFoundError
from .model import BlockDocument, BlockLabel
from .segmenter import Boundary, DetectedObject, ObjectKind

LABEL_FILL = {
    BlockLabel.BODY_TEXT: "#a8c6e8",
    BlockLabel.SUPPLEMENTARY: "#f5b041",
    BlockLabel.ACCESSORY: "#b5b5b5",
}
UNLABELED_FILL = "#e6e6e6"
REGION_STROKE = {ObjectKind.FIGURE: "#1e8449", ObjectKind.TABLE: "#7d3c98"}
REGION_GLYPH = {ObjectKind.FIGURE: "F", ObjectKind.TABLE: "T"}


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_overlay(
    doc: BlockDocument,
    labels: dict[str, BlockLabel],
    objects: list[DetectedObject],
    page_index: int,
    boundaries: list[Boundary] | None = None,
) -> bytes:
    """Render one page; same inputs always give the same bytes."""
    page = next((p for p in doc.pages if p.index == page_index), None)
    if page is None:
        raise PageNotFoundError(f"document {doc.doc_id!r} has no page {page_index}")
    media = page.media_box
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(media.width)}" '
        f'height="{_f(media.height)}" '
        f'viewBox="{_f(media.left)} {_f(media.top)} {_f(media.width)} {_f(media.height)}">',
        f'<rect class="media-box" x="{_f(media.left)}" y="{_f(media.top)}" '
        f'width="{_f(media.width)}" height="{_f(media.height)}" '
        'fill="white" stroke="#333333" stroke-width="1"/>',
    ]

    for block in page.blocks:
        fill = LABEL_FILL.get(labels.get(block.id), UNLABELED_FILL)
        box = block.bbox
        out.append(
            f'<rect class="block" x="{_f(box.left)}" y="{_f(box.top)}" '
            f'width="{_f(box.width)}" height="{_f(box.height)}" '
            f'fill="{fill}" fill-opacity="0.55" stroke="#555555" stroke-width="0.5">'
            f"<title>{escape(block.id)}</title></rect>"
        )

    for boundary in boundaries or ():
        if boundary.page_index != page_index:
            continue
        y = (boundary.y_extent[0] + boundary.y_extent[1]) / 2.0
        out.append(
            f'<line class="boundary" x1="{_f(media.left)}" y1="{_f(y)}" '
            f'x2="{_f(media.right)}" y2="{_f(y)}" '
            'stroke="#c0392b" stroke-width="1" stroke-dasharray="6 3"/>'
        )

    for obj in objects:
        if obj.page_index != page_index:
            continue
        region = obj.region
        stroke = REGION_STROKE[obj.kind]
        out.append(
            f'<rect class="region" x="{_f(region.left)}" y="{_f(region.top)}" '
            f'width="{_f(region.width)}" height="{_f(region.height)}" '
            f'fill="none" stroke="{stroke}" stroke-width="3"/>'
        )
        out.append(
            f'<text class="region-glyph" x="{_f(region.left + 4)}" '
            f'y="{_f(region.top + 14)}" font-size="14" font-family="monospace" '
            f'fill="{stroke}">{REGION_GLYPH[obj.kind]}</text>'
        )

    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
