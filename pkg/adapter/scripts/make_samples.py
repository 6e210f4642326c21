#!/usr/bin/env python3
"""Regenerate the checked-in sample PDFs (requires reportlab).

The samples are committed so the adapter's tests never depend on
reportlab; rerun this script only when the fixtures need to change.
"""

from pathlib import Path

from reportlab.lib.pagesizes import letter
from reportlab.pdfgen import canvas

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
TEST_DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

BODY = (
    "The adapter reads the text layer of a PDF and groups it into blocks. "
    "Lines that sit close together merge; larger gaps start a new block."
).split()


def _paragraph(c, x, y, words, font, size, leading, width_chars):
    c.setFont(font, size)
    line = []
    for word in words:
        if sum(len(w) + 1 for w in line) + len(word) > width_chars:
            c.drawString(x, y, " ".join(line))
            y -= leading
            line = []
        line.append(word)
    if line:
        c.drawString(x, y, " ".join(line))
        y -= leading
    return y


def single_paragraph():
    c = canvas.Canvas(str(SAMPLES / "single_paragraph.pdf"), pagesize=letter, pageCompression=0)
    c.setFont("Helvetica", 11)
    c.drawString(72, 700, "Hello world from the adapter sample.")
    c.showPage()
    c.save()


def headings_two_fonts():
    c = canvas.Canvas(str(SAMPLES / "headings_two_fonts.pdf"), pagesize=letter, pageCompression=0)
    y = 720
    c.setFont("Times-Bold", 13)
    c.drawString(72, y, "1. First heading")
    y -= 26
    y = _paragraph(c, 72, y, BODY, "Helvetica", 10, 12, 60)
    y -= 14
    c.setFont("Times-Bold", 13)
    c.drawString(72, y, "2. Second heading")
    y -= 26
    y = _paragraph(c, 72, y, BODY * 2, "Helvetica", 10, 12, 60)
    c.showPage()
    c.save()


def two_column():
    c = canvas.Canvas(str(SAMPLES / "two_column.pdf"), pagesize=letter, pageCompression=1)
    for page in range(2):
        for lane_x in (54, 318):
            y = 720
            for para in range(3):
                y = _paragraph(c, lane_x, y, BODY, "Helvetica", 9, 11, 44)
                y -= 12
        c.setFont("Helvetica", 9)
        c.drawString(200, 120, f"Figure {page + 1}: a full width caption line")
        c.showPage()
    c.save()


def error_fixtures():
    c = canvas.Canvas(str(TEST_DATA / "empty_page.pdf"), pagesize=letter, pageCompression=0)
    c.showPage()
    c.save()
    c = canvas.Canvas(
        str(TEST_DATA / "encrypted.pdf"), pagesize=letter, pageCompression=0, encrypt="secret"
    )
    c.setFont("Helvetica", 11)
    c.drawString(72, 700, "hidden text")
    c.showPage()
    c.save()
    (TEST_DATA / "not_a_pdf.bin").write_bytes(b"definitely not a pdf\n" * 4)


if __name__ == "__main__":
    SAMPLES.mkdir(parents=True, exist_ok=True)
    TEST_DATA.mkdir(parents=True, exist_ok=True)
    single_paragraph()
    headings_two_fonts()
    two_column()
    error_fixtures()
    print(f"wrote samples to {SAMPLES} and error fixtures to {TEST_DATA}")
