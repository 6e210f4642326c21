"""Shared builders for handcrafted documents and fuzzed valid documents."""

from __future__ import annotations

import random

import pytest

from ctbr.model import BBox, BlockDocument, Page, Span, TextBlock

BODY = ("BodySerif", 10.0)
BOLD = ("HeadSans-Bold", 12.0)


def block(
    bid: str,
    bbox: tuple[float, float, float, float],
    text: str = "lorem ipsum dolor",
    font: tuple[str, float] = BODY,
    order: int = 0,
    page: int = 0,
    spans: tuple[Span, ...] | None = None,
) -> TextBlock:
    return TextBlock(
        id=bid,
        page_index=page,
        bbox=BBox(*bbox),
        spans=spans or (Span(text=text, font_name=font[0], font_size=font[1]),),
        reading_order=order,
    )


def doc_of(blocks_by_page, doc_id="doc-1", media=(0.0, 0.0, 600.0, 800.0), columns=1):
    """blocks_by_page: list of lists of TextBlock (page index taken from slot)."""
    pages = []
    for i, blocks in enumerate(blocks_by_page):
        fixed = [
            TextBlock(
                id=b.id,
                page_index=i,
                bbox=b.bbox,
                spans=b.spans,
                reading_order=b.reading_order,
            )
            for b in blocks
        ]
        pages.append(Page(index=i, media_box=BBox(*media), blocks=tuple(fixed)))
    return BlockDocument(doc_id=doc_id, pages=tuple(pages), layout_columns=columns)


def single_block_doc(**kwargs):
    return doc_of([[block("b0", (50, 50, 250, 100), "hello world text")]], **kwargs)


FONT_POOL = [
    ("BodySerif", 10.0),
    ("BodySerif", 8.0),
    ("HeadSans-Bold", 12.0),
    ("MonoCell", 8.5),
    ("Amälie-Ünicode", 9.25),
]

TEXT_POOL = [
    "plain ascii text",
    "größere Umlaute",
    "数式と図表のテスト",
    "mixed 12 tokens & symbols",
    "x",
]


def random_document(rng: random.Random, doc_id: str = "fuzz") -> BlockDocument:
    """A random but fully valid document; coordinates 4dp-exact so the
    canonical round trip is lossless."""
    pages = []
    n_pages = rng.randint(0, 3)
    counter = 0
    for pi in range(n_pages):
        media_w = rng.choice([400.0, 600.0, 612.0])
        media_h = rng.choice([500.0, 800.0, 792.0])
        blocks = []
        for order in range(rng.randint(0, 8)):
            left = round(rng.uniform(0, media_w - 20), 4)
            top = round(rng.uniform(0, media_h - 12), 4)
            width = round(rng.uniform(5, media_w - left - 1), 4)
            height = round(rng.uniform(4, min(80.0, media_h - top - 1)), 4)
            spans = tuple(
                Span(
                    text=rng.choice(TEXT_POOL),
                    font_name=rng.choice(FONT_POOL)[0],
                    font_size=round(rng.choice(FONT_POOL)[1] + rng.uniform(0, 2), 4),
                )
                for _ in range(rng.randint(1, 3))
            )
            blocks.append(
                TextBlock(
                    id=f"b{counter:04d}",
                    page_index=pi,
                    bbox=BBox(left, top, round(left + width, 4), round(top + height, 4)),
                    spans=spans,
                    reading_order=order,
                )
            )
            counter += 1
        pages.append(
            Page(index=pi, media_box=BBox(0.0, 0.0, media_w, media_h), blocks=tuple(blocks))
        )
    return BlockDocument(
        doc_id=doc_id, pages=tuple(pages), layout_columns=rng.choice([1, 2])
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
