"""Per-document layout statistics and the 9-code block feature vector.

The nine codes, in fixed order: left, right, top, bottom positions as
ratios against the document's boundary lines; width and height as ratios
against the largest block; a body-font indicator; the block/body font-size
ratio; and a text-density ratio (block area over non-whitespace character
count times the size ratio, scaled by a fixed 1/100 so its magnitude sits
near the other codes).

Boundary lines are taken from wide blocks only (width at least half the
document maximum): justified body paragraphs dominate that set, which is
what makes their min-left / max-right a reliable margin estimate. A
boundary coordinate that lands exactly on 0 is shifted by +1pt so the
position ratios stay defined.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBlockError, DivisionError, EmptyDocumentError, GeometryError
from .model import BlockDocument, TextBlock

log = logging.getLogger(__name__)

FEATURE_ORDER: tuple[str, ...] = (
    "code_left",
    "code_right",
    "code_top",
    "code_bottom",
    "code_width",
    "code_height",
    "code_font_type",
    "code_font_size",
    "code_density",
)

# Wide-block cutoff for boundary estimation, as a fraction of max block width.
BOUNDARY_WIDTH_FRACTION = 0.5

# Fixed density scale; artifact constant, not part of the published formula.
DENSITY_NORMALIZER = 100.0


@dataclass(frozen=True)
class DocumentStats:
    """Document-level aggregates every block encoding is measured against."""

    body_font_name: str
    body_font_size: float
    boundary_left: float
    boundary_right: float
    boundary_top: float
    boundary_bottom: float
    max_width: float
    max_height: float


@dataclass(frozen=True)
class FeatureVector:
    """The 9 codes for one block, in FEATURE_ORDER."""

    code_left: float
    code_right: float
    code_top: float
    code_bottom: float
    code_width: float
    code_height: float
    code_font_type: float
    code_font_size: float
    code_density: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_ORDER], dtype=float)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        values = list(values)
        if len(values) != len(FEATURE_ORDER):
            raise ValueError(f"expected {len(FEATURE_ORDER)} values, got {len(values)}")
        return cls(**{name: float(v) for name, v in zip(FEATURE_ORDER, values)})


@dataclass(frozen=True)
class EncodingResult:
    """Per-block features plus the blocks skipped as whitespace-only."""

    features: dict[str, FeatureVector]
    skipped: tuple[str, ...]
    stats: DocumentStats


# ---------------------------------------------------------------------------
# Font aggregation
# ---------------------------------------------------------------------------


def _top_by_char_count(counter: Counter) -> object:
    """Most frequent key by character count; ties go to the smaller key."""
    return min(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def dominant_font(block: TextBlock) -> tuple[str, float]:
    """The block's most frequent (font name, font size) by character count,
    aggregated independently; ties break toward the smaller name / size."""
    names: Counter = Counter()
    sizes: Counter = Counter()
    for span in block.spans:
        names[span.font_name] += len(span.text)
        sizes[span.font_size] += len(span.text)
    return _top_by_char_count(names), _top_by_char_count(sizes)


def block_font_size(block: TextBlock) -> float:
    """Most frequent span font size in the block by character count."""
    sizes: Counter = Counter()
    for span in block.spans:
        sizes[span.font_size] += len(span.text)
    return _top_by_char_count(sizes)


# ---------------------------------------------------------------------------
# Document statistics
# ---------------------------------------------------------------------------


def compute_stats(doc: BlockDocument) -> DocumentStats:
    """Scan every block once and derive fonts, boundary lines, and maxima."""
    blocks = list(doc.iter_blocks())
    if not blocks:
        raise EmptyDocumentError(f"document {doc.doc_id!r} has no blocks")

    media_sizes = {(p.media_box.width, p.media_box.height) for p in doc.pages}
    if len(media_sizes) > 1:
        log.warning(
            "document %s mixes %d page sizes; boundary lines are document-global",
            doc.doc_id,
            len(media_sizes),
        )

    font_chars: Counter = Counter()
    for block in blocks:
        for span in block.spans:
            font_chars[span.font_name] += len(span.text)
    body_font_name = _top_by_char_count(font_chars)

    body_sizes: Counter = Counter()
    for block in blocks:
        for span in block.spans:
            if span.font_name == body_font_name:
                body_sizes[span.font_size] += len(span.text)
    body_font_size = _top_by_char_count(body_sizes)

    max_width = max(b.bbox.width for b in blocks)
    max_height = max(b.bbox.height for b in blocks)

    wide = [b for b in blocks if b.bbox.width >= BOUNDARY_WIDTH_FRACTION * max_width]
    boundary = {
        "left": min(b.bbox.left for b in wide),
        "right": max(b.bbox.right for b in wide),
        "top": min(b.bbox.top for b in blocks),
        "bottom": max(b.bbox.bottom for b in blocks),
    }
    # +1pt epsilon: a boundary flush with the origin would zero the divisor.
    for key, value in boundary.items():
        if value == 0:
            boundary[key] = 1.0

    if not boundary["left"] < boundary["right"]:
        raise GeometryError(
            f"degenerate horizontal boundaries ({boundary['left']}, {boundary['right']})"
        )
    if not boundary["top"] < boundary["bottom"]:
        raise GeometryError(
            f"degenerate vertical boundaries ({boundary['top']}, {boundary['bottom']})"
        )

    return DocumentStats(
        body_font_name=body_font_name,
        body_font_size=body_font_size,
        boundary_left=boundary["left"],
        boundary_right=boundary["right"],
        boundary_top=boundary["top"],
        boundary_bottom=boundary["bottom"],
        max_width=max_width,
        max_height=max_height,
    )


# ---------------------------------------------------------------------------
# Block encoding
# ---------------------------------------------------------------------------


def encode_block(block: TextBlock, stats: DocumentStats) -> FeatureVector:
    """Compute the 9 codes for one block against document statistics."""
    length_text = sum(1 for ch in block.text if not ch.isspace())
    if length_text == 0:
        raise DegenerateBlockError(f"block {block.id}: no non-whitespace text")
    for side in ("left", "right", "top", "bottom"):
        if getattr(stats, f"boundary_{side}") == 0:
            raise DivisionError(f"boundary_{side} is 0; position code undefined")

    font_name, _ = dominant_font(block)
    code_font_size = block_font_size(block) / stats.body_font_size
    s_block = block.bbox.width * block.bbox.height

    return FeatureVector(
        code_left=block.bbox.left / stats.boundary_left,
        code_right=block.bbox.right / stats.boundary_right,
        code_top=block.bbox.top / stats.boundary_top,
        code_bottom=block.bbox.bottom / stats.boundary_bottom,
        code_width=block.bbox.width / stats.max_width,
        code_height=block.bbox.height / stats.max_height,
        code_font_type=1.0 if font_name == stats.body_font_name else 0.0,
        code_font_size=code_font_size,
        code_density=s_block / (length_text * code_font_size) / DENSITY_NORMALIZER,
    )


def encode_document(doc: BlockDocument) -> EncodingResult:
    """Encode every block; whitespace-only blocks are skipped and reported."""
    stats = compute_stats(doc)
    features: dict[str, FeatureVector] = {}
    skipped: list[str] = []
    for block in doc.iter_blocks():
        try:
            features[block.id] = encode_block(block, stats)
        except DegenerateBlockError:
            skipped.append(block.id)
    return EncodingResult(features=features, skipped=tuple(skipped), stats=stats)
