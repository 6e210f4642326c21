"""Core document model: geometry, spans, blocks, pages, labels.

Coordinate convention (fixed for the whole package): top-left origin,
y grows downward, units are PDF points. Everything is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DuplicateIdError, GeometryError


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BBox:
    """Axis-aligned rectangle; left <= right, top <= bottom, all finite."""

    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self):
        for name in ("left", "top", "right", "bottom"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise GeometryError(f"bbox {name} must be finite, got {v!r}")
        if self.left > self.right:
            raise GeometryError(f"bbox left {self.left} > right {self.right}")
        if self.top > self.bottom:
            raise GeometryError(f"bbox top {self.top} > bottom {self.bottom}")

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.left + self.right) / 2.0, (self.top + self.bottom) / 2.0)

    def contains_point(self, x: float, y: float) -> bool:
        return self.left <= x <= self.right and self.top <= y <= self.bottom

    def intersects(self, other: "BBox") -> bool:
        return (
            self.left <= other.right
            and other.left <= self.right
            and self.top <= other.bottom
            and other.top <= self.bottom
        )

    def as_list(self) -> list[float]:
        return [self.left, self.top, self.right, self.bottom]


def bbox_union(a: BBox, b: BBox) -> BBox:
    """Smallest box containing both inputs (coordinate-wise min/max)."""
    return BBox(
        min(a.left, b.left),
        min(a.top, b.top),
        max(a.right, b.right),
        max(a.bottom, b.bottom),
    )


def bbox_iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union in [0, 1]; 0 when disjoint or both degenerate."""
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def crosses_central_axis(b: BBox, media: BBox) -> bool:
    """True iff the block straddles the page's vertical midline.

    Strict on both sides: a block whose edge merely touches the midline
    does not cross it.
    """
    mid = (media.left + media.right) / 2.0
    return b.left < mid < b.right


# ---------------------------------------------------------------------------
# Text content
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    """A run of text in a single font at a single size."""

    text: str
    font_name: str
    font_size: float

    def __post_init__(self):
        if not self.text:
            raise ValueError("span text must be non-empty")
        if not (isinstance(self.font_size, (int, float)) and self.font_size > 0):
            raise ValueError(f"span font_size must be > 0, got {self.font_size!r}")


@dataclass(frozen=True)
class TextBlock:
    """One extracted block: the atomic unit of classification."""

    id: str
    page_index: int
    bbox: BBox
    spans: tuple[Span, ...]
    reading_order: int

    def __post_init__(self):
        if not self.id:
            raise ValueError("block id must be non-empty")
        if not self.spans:
            raise ValueError(f"block {self.id}: spans must be non-empty")
        if self.bbox.area <= 0:
            raise GeometryError(f"block {self.id}: bbox area must be > 0")
        object.__setattr__(self, "spans", tuple(self.spans))

    @property
    def text(self) -> str:
        return "".join(s.text for s in self.spans)

    def first_line(self) -> str:
        """Concatenated text up to the first newline, whitespace-stripped."""
        return self.text.split("\n", 1)[0].strip()


@dataclass(frozen=True)
class Page:
    """A page: media box plus blocks sorted by reading order."""

    index: int
    media_box: BBox
    blocks: tuple[TextBlock, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        orders = set()
        for blk in self.blocks:
            if blk.reading_order in orders:
                raise DuplicateIdError(
                    f"page {self.index}: reading_order {blk.reading_order} used twice"
                )
            orders.add(blk.reading_order)
            if not blk.bbox.intersects(self.media_box):
                raise GeometryError(
                    f"block {blk.id} lies outside page {self.index} media box"
                )
        object.__setattr__(
            self, "blocks", tuple(sorted(self.blocks, key=lambda b: b.reading_order))
        )


@dataclass(frozen=True)
class BlockDocument:
    """Ordered pages of blocks; the canonical interchange artifact."""

    doc_id: str
    pages: tuple[Page, ...]
    layout_columns: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pages", tuple(self.pages))
        if self.layout_columns not in (1, 2):
            raise ValueError(f"layout_columns must be 1 or 2, got {self.layout_columns}")
        for i, page in enumerate(self.pages):
            if page.index != i:
                raise ValueError(
                    f"page indices must be contiguous from 0; slot {i} holds index {page.index}"
                )
        seen: set[str] = set()
        for page in self.pages:
            for blk in page.blocks:
                if blk.id in seen:
                    raise DuplicateIdError(f"block id {blk.id!r} used twice")
                seen.add(blk.id)

    def iter_blocks(self):
        """Yield blocks in document order (page, then reading order)."""
        for page in self.pages:
            yield from page.blocks

    def block_index(self) -> dict[str, TextBlock]:
        return {b.id: b for b in self.iter_blocks()}


class BlockLabel(Enum):
    """The three classes every multi-modal block falls into."""

    BODY_TEXT = "body_text"
    SUPPLEMENTARY = "supplementary"
    ACCESSORY = "accessory"


# Fixed class order used for one-vs-rest training and argmax tie-breaks.
CLASS_ORDER: tuple[BlockLabel, ...] = (
    BlockLabel.BODY_TEXT,
    BlockLabel.SUPPLEMENTARY,
    BlockLabel.ACCESSORY,
)
