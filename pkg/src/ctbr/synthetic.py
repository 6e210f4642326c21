"""Deterministic synthetic-document generator with exact ground truth.

Generates two-column (or single-column) scientific-article lookalikes:
justified body paragraphs in a body font, numbered section titles, sparse
figure/table block clusters in distinct fonts with pattern-matching
captions, plus footnote / page-number / front-matter noise. The generator
records, for every block, its true class, and for every placed object, the
tight bounding box of its cluster - which is exactly what the detection
pipeline is supposed to recover.

Layout choices that keep the truth unambiguous: a caption's opposite side
never holds another cluster (consecutive objects in a lane are separated by
a section title), captions are always narrower than their clusters, and
cluster text avoids token shapes that the title patterns would match.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .model import BBox, BlockDocument, BlockLabel, Page, Span, TextBlock
from .segmenter import ObjectKind

PAGE_W, PAGE_H = 612.0, 792.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 54.0, 54.0, 72.0, 72.0
GUTTER = 18.0
LINE_H = 12.0

BODY_FONT = ("NimbusRomNo9L-Regu", 10.0)
CAPTION_FONT = BODY_FONT  # captions ride the body font: exercises the rules' exemption
SECTION_FONT = ("NimbusSanL-Bold", 12.0)
FIGURE_FONT = ("NimbusSanL-Regu", 8.0)
TABLE_FONT = ("NimbusMonL-Regu", 8.0)
FOOTNOTE_SIZE = 8.0
PAGENUM_SIZE = 9.0

_WORDS = (
    "analysis baseline block boundary caption cluster column compartment "
    "corpus density document domain encoder evaluation feature figure font "
    "framework layout margin marker matrix measure metric model module page "
    "parser pattern pipeline position region result sample section segment "
    "sequence signal spacing structure table template text title token "
    "vector weight width window zone"
).split()

# Cluster tokens must never look like titles: no digit immediately followed
# by '.', '|', or ',', and no leading caption keywords.
_CLUSTER_TOKENS = (
    "input output layer node edge axis scale probe trial batch stage unit "
    "407 93 125 18 62 340 77 x1 x2 y1 run acc err sum avg max min net"
).split()


@dataclass(frozen=True)
class NoiseSpec:
    footnote_prob: float = 0.3
    page_number: bool = True


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of one generated document; identical seeds give identical output."""

    seed: int
    pages: int = 3
    columns: int = 2
    figures_per_page: tuple[int, int] = (1, 3)
    tables_per_page: tuple[int, int] = (0, 2)
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if self.pages < 1:
            raise ValueError("pages must be >= 1")
        if self.columns not in (1, 2):
            raise ValueError("columns must be 1 or 2")
        for name in ("figures_per_page", "tables_per_page"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ValueError(f"{name} must be a non-negative (lo, hi) range")


@dataclass(frozen=True)
class TruthObject:
    kind: ObjectKind
    region: BBox
    title_block_id: str
    page_index: int


@dataclass(frozen=True)
class GroundTruth:
    labels: dict[str, BlockLabel]
    objects: tuple[TruthObject, ...]


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------


def _r(v: float) -> float:
    return round(v, 2)


class _DocBuilder:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.block_counter = 0
        self.labels: dict[str, BlockLabel] = {}
        self.objects: list[TruthObject] = []
        self.fig_counter = 0
        self.tab_counter = 0
        self.section_counter = 0
        self.sub_counter = 0
        self.pages: list[Page] = []
        self._page_blocks: list[TextBlock] = []
        self._page_index = 0

    def words(self, n: int) -> str:
        return " ".join(self.rng.choice(_WORDS) for _ in range(n))

    def sentence_fill(self, approx_chars: int) -> str:
        out = []
        total = 0
        while total < approx_chars:
            w = self.rng.choice(_WORDS)
            out.append(w)
            total += len(w) + 1
        text = " ".join(out)
        return text[0].upper() + text[1:] + "."

    def add(self, bbox: BBox, text: str, font: tuple[str, float], label: BlockLabel) -> str:
        bid = f"b{self.block_counter:04d}"
        self.block_counter += 1
        block = TextBlock(
            id=bid,
            page_index=self._page_index,
            bbox=BBox(_r(bbox.left), _r(bbox.top), _r(bbox.right), _r(bbox.bottom)),
            spans=(Span(text=text, font_name=font[0], font_size=font[1]),),
            reading_order=len(self._page_blocks),
        )
        self._page_blocks.append(block)
        self.labels[bid] = label
        return bid

    def finish_page(self):
        self.pages.append(
            Page(
                index=self._page_index,
                media_box=BBox(0.0, 0.0, PAGE_W, PAGE_H),
                blocks=tuple(self._page_blocks),
            )
        )
        self._page_index += 1
        self._page_blocks = []


# ---------------------------------------------------------------------------
# Items
# ---------------------------------------------------------------------------


def _paragraph(b: _DocBuilder, x0: float, x1: float, y: float, lines: int) -> float:
    width = x1 - x0
    height = lines * LINE_H
    chars = int(lines * width / 5.0)
    b.add(BBox(x0, y, x1, y + height), b.sentence_fill(chars), BODY_FONT, BlockLabel.BODY_TEXT)
    return y + height + b.rng.uniform(6, 10)


def _section_title(b: _DocBuilder, x0: float, x1: float, y: float, main: bool) -> float:
    if main:
        b.section_counter += 1
        b.sub_counter = 0
        text = f"{b.section_counter}. {b.words(b.rng.randint(2, 4)).title()}"
    else:
        if b.section_counter == 0:
            b.section_counter = 1
        b.sub_counter += 1
        text = f"{b.section_counter}.{b.sub_counter} {b.words(b.rng.randint(2, 4)).title()}"
    width = (x1 - x0) * b.rng.uniform(0.55, 0.85)
    b.add(BBox(x0, y, x0 + width, y + 14.0), text, SECTION_FONT, BlockLabel.SUPPLEMENTARY)
    return y + 14.0 + b.rng.uniform(6, 10)


def _caption(b: _DocBuilder, x0: float, x1: float, y: float, kind: ObjectKind, centered: bool) -> tuple[str, float]:
    if kind is ObjectKind.FIGURE:
        b.fig_counter += 1
        text = f"Figure {b.fig_counter}: {b.words(b.rng.randint(4, 7))}"
    else:
        b.tab_counter += 1
        text = f"Table {b.tab_counter}: {b.words(b.rng.randint(3, 6))}"
    width = (x1 - x0) * b.rng.uniform(0.6, 0.72)
    left = (x0 + x1 - width) / 2.0 if centered else x0 + b.rng.uniform(0, 8)
    bid = b.add(BBox(left, y, left + width, y + LINE_H), text, CAPTION_FONT, BlockLabel.SUPPLEMENTARY)
    return bid, y + LINE_H + b.rng.uniform(4, 8)


def _figure_cluster(b: _DocBuilder, x0: float, x1: float, y: float, height: float) -> tuple[BBox, float]:
    """Sparse scatter of label blocks plus a wide axis bar; returns the
    (tight truth bbox, next y). The axis bar keeps the cluster wider than
    any caption, so the title-width rule stays a no-op on generated pages."""
    pad = b.rng.uniform(2, 8)
    rx0, rx1 = x0 + pad, x1 - pad
    width = rx1 - rx0
    rows = b.rng.randint(2, 3)
    row_h = (height - 14.0) / rows
    boxes = []
    for r in range(rows):
        n = b.rng.randint(1, 2)
        for k in range(n):
            w = width * b.rng.uniform(0.22, 0.4)
            bh = b.rng.uniform(10, min(18, max(10.5, row_h - 2)))
            left = rx0 + width * (k / n + b.rng.uniform(0.02, 0.12))
            left = min(left, rx1 - w)
            top = y + r * row_h + b.rng.uniform(0, max(0.5, row_h - bh - 1))
            box = BBox(_r(left), _r(top), _r(left + w), _r(top + bh))
            text = " ".join(b.rng.choice(_CLUSTER_TOKENS) for _ in range(b.rng.randint(1, 3)))
            b.add(box, text, FIGURE_FONT, BlockLabel.SUPPLEMENTARY)
            boxes.append(box)
    axis_w = width * b.rng.uniform(0.82, 0.92)
    axis_left = rx0 + b.rng.uniform(0, width - axis_w)
    axis_top = y + rows * row_h + 2.0
    box = BBox(_r(axis_left), _r(axis_top), _r(axis_left + axis_w), _r(axis_top + 11.0))
    b.add(
        box,
        " ".join(b.rng.choice(_CLUSTER_TOKENS) for _ in range(b.rng.randint(3, 5))),
        FIGURE_FONT,
        BlockLabel.SUPPLEMENTARY,
    )
    boxes.append(box)
    tight = BBox(
        min(x.left for x in boxes),
        min(x.top for x in boxes),
        max(x.right for x in boxes),
        max(x.bottom for x in boxes),
    )
    return tight, y + height + b.rng.uniform(3, 6)


def _table_cluster(b: _DocBuilder, x0: float, x1: float, y: float) -> tuple[BBox, float]:
    """Tight grid of cell blocks; returns (tight truth bbox, next y)."""
    pad = b.rng.uniform(2, 8)
    rx0, rx1 = x0 + pad, x1 - pad
    rows = b.rng.randint(2, 4)
    cols = b.rng.randint(2, 3)
    cell_w = (rx1 - rx0) / cols - 3.0
    cell_h = 11.0
    boxes = []
    for r in range(rows):
        for c in range(cols):
            left = rx0 + c * (cell_w + 3.0)
            top = y + r * (cell_h + 3.0)
            box = BBox(_r(left), _r(top), _r(left + cell_w), _r(top + cell_h))
            b.add(box, b.rng.choice(_CLUSTER_TOKENS), TABLE_FONT, BlockLabel.SUPPLEMENTARY)
            boxes.append(box)
    tight = BBox(
        min(x.left for x in boxes),
        min(x.top for x in boxes),
        max(x.right for x in boxes),
        max(x.bottom for x in boxes),
    )
    return tight, y + rows * (cell_h + 3.0) + b.rng.uniform(3, 6)


def _object_item(b: _DocBuilder, x0: float, x1: float, y: float, kind: ObjectKind, centered_caption: bool) -> float:
    """Figure: cluster then caption below. Table: caption then cluster below."""
    page = b._page_index
    if kind is ObjectKind.FIGURE:
        height = b.rng.uniform(90, 150)
        tight, y = _figure_cluster(b, x0, x1, y, height)
        title_id, y = _caption(b, x0, x1, y, kind, centered_caption)
    else:
        title_id, y = _caption(b, x0, x1, y, kind, centered_caption)
        tight, y = _table_cluster(b, x0, x1, y)
    b.objects.append(
        TruthObject(kind=kind, region=tight, title_block_id=title_id, page_index=page)
    )
    return y


# ---------------------------------------------------------------------------
# Page assembly
# ---------------------------------------------------------------------------


def _fill_lane(
    b: _DocBuilder,
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    queue: list[ObjectKind],
    *,
    must_start_with_para: bool,
    lead_main_section: bool,
    footnote_prob: float,
):
    y = y0
    floor = y1 - 16.0  # reserved for a possible footnote

    if lead_main_section and not must_start_with_para:
        y = _section_title(b, x0, x1, y, main=True)
        y = _paragraph(b, x0, x1, y, b.rng.randint(3, 6))
    else:
        y = _paragraph(b, x0, x1, y, b.rng.randint(3, 6))
        if lead_main_section:
            y = _section_title(b, x0, x1, y, main=True)

    placed_since_object = True  # a paragraph/section separates consecutive objects
    while queue:
        kind = queue[0]
        need = 190.0 if kind is ObjectKind.FIGURE else 120.0
        if not placed_since_object:
            need += 90.0
        if y + need > floor:
            break
        if not placed_since_object:
            y = _paragraph(b, x0, x1, y, b.rng.randint(3, 5))
            y = _section_title(b, x0, x1, y, main=b.rng.random() < 0.4)
        queue.pop(0)
        y = _object_item(b, x0, x1, y, kind, centered_caption=False)
        placed_since_object = False

    while y + 3 * LINE_H <= floor:
        room = int((floor - y) / LINE_H)
        lines = b.rng.randint(3, max(3, min(8, room)))
        y = _paragraph(b, x0, x1, y, lines)
        if y + 3 * LINE_H <= floor and b.rng.random() < 0.25:
            y = _section_title(b, x0, x1, y, main=b.rng.random() < 0.35)

    if b.rng.random() < footnote_prob:
        width = (x1 - x0) * 0.75
        b.add(
            BBox(x0, y1 - 10.0, x0 + width, y1),
            f"{b.rng.randint(1, 9)} {b.words(b.rng.randint(5, 9))}",
            (BODY_FONT[0], FOOTNOTE_SIZE),
            BlockLabel.ACCESSORY,
        )


def generate_synthetic(spec: SyntheticSpec, doc_id: str | None = None) -> tuple[BlockDocument, GroundTruth]:
    """Generate one document and its exact ground truth."""
    rng = random.Random(spec.seed)
    b = _DocBuilder(rng)
    content_l, content_r = MARGIN_L, PAGE_W - MARGIN_R
    content_t, content_b = MARGIN_T, PAGE_H - MARGIN_B

    for page_index in range(spec.pages):
        n_figs = rng.randint(*spec.figures_per_page)
        n_tabs = rng.randint(*spec.tables_per_page)
        queue = [ObjectKind.FIGURE] * n_figs + [ObjectKind.TABLE] * n_tabs
        # deterministic interleave: draw without replacement via rng
        rng.shuffle(queue)

        y_top = content_t
        # Full-width bands hold figures only: a figure's caption sits below
        # its cluster, so the caption strip cleanly closes the band above it.
        band_present = False
        if ObjectKind.FIGURE in queue and spec.columns == 2 and rng.random() < 0.35:
            band_present = True
            queue.remove(ObjectKind.FIGURE)
            y_top = _object_item(
                b, content_l, content_r, y_top, ObjectKind.FIGURE, centered_caption=True
            )
            y_top += rng.uniform(4, 8)

        if spec.columns == 2:
            half = len(queue) - len(queue) // 2
            lanes = [
                (content_l, (PAGE_W - GUTTER) / 2.0, queue[:half]),
                ((PAGE_W + GUTTER) / 2.0, content_r, queue[half:]),
            ]
        else:
            lanes = [(content_l, content_r, queue)]
        for li, (x0, x1, lane_queue) in enumerate(lanes):
            _fill_lane(
                b,
                x0,
                x1,
                y_top,
                content_b,
                list(lane_queue),
                must_start_with_para=band_present,
                lead_main_section=(page_index == 0 and li == 0),
                footnote_prob=spec.noise.footnote_prob,
            )

        if spec.noise.page_number:
            b.add(
                BBox(PAGE_W / 2.0 - 4.0, PAGE_H - 47.0, PAGE_W / 2.0 + 4.0, PAGE_H - 35.0),
                str(page_index + 1),
                (BODY_FONT[0], PAGENUM_SIZE),
                BlockLabel.ACCESSORY,
            )
        b.finish_page()

    doc = BlockDocument(
        doc_id=doc_id or f"synth-{spec.seed}",
        pages=tuple(b.pages),
        layout_columns=spec.columns,
    )
    truth = GroundTruth(labels=dict(b.labels), objects=tuple(b.objects))
    return doc, truth


def generate_corpus(spec: SyntheticSpec, count: int) -> list[tuple[BlockDocument, GroundTruth]]:
    """count documents with per-document seeds derived from the spec seed."""
    out = []
    for i in range(count):
        child = replace(spec, seed=spec.seed * 1_000_003 + i)
        out.append(generate_synthetic(child, doc_id=f"synth-{spec.seed}-{i:04d}"))
    return out
