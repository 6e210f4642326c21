"""Content-stream interpretation: positioned text spans per page.

Implements the text-positioning subset of the content-stream operator set
(BT/ET, Tf, Td/TD/Tm/T*, TL, Tc/Tw/Tz, Tj/TJ/'/"), plus cm and q/Q so
transformed text lands where it should. Glyph advances come from the
font's /Widths array when present, otherwise from per-family average
width factors for the standard 14 fonts (an approximation: good enough
for line/block geometry, irrelevant to text content and font reporting).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import hypot

from .errors import UnreadablePdfError
from .pdfmini import (
    Name,
    PdfReader,
    _Lexer,
    _parse_hex_string,
    _parse_name,
    _parse_string,
    parse_object,
)

# average glyph width as a fraction of font size, by font family
_FAMILY_WIDTH = (
    ("courier", 0.600),
    ("helvetica", 0.527),
    ("arial", 0.527),
    ("times", 0.480),
    ("symbol", 0.587),
    ("zapf", 0.740),
)
_DEFAULT_WIDTH = 0.5


@dataclass(frozen=True)
class PositionedSpan:
    """One shown string in device space (PDF bottom-left origin)."""

    page_index: int
    x: float
    baseline: float
    width: float
    text: str
    font_name: str
    font_size: float


@dataclass(frozen=True)
class FontInfo:
    name: str
    first_char: int = 0
    widths: tuple[float, ...] = ()

    def char_width(self, code: int) -> float:
        """Width in text space units (fraction of font size)."""
        idx = code - self.first_char
        if 0 <= idx < len(self.widths) and self.widths[idx] > 0:
            return self.widths[idx] / 1000.0
        lowered = self.name.lower()
        for family, factor in _FAMILY_WIDTH:
            if family in lowered:
                return factor
        return _DEFAULT_WIDTH


_IDENTITY = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def _mul(m: tuple, n: tuple) -> tuple:
    a, b, c, d, e, f = m
    a2, b2, c2, d2, e2, f2 = n
    return (
        a * a2 + b * c2,
        a * b2 + b * d2,
        c * a2 + d * c2,
        c * b2 + d * d2,
        e * a2 + f * c2 + e2,
        e * b2 + f * d2 + f2,
    )


def _apply(m: tuple, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


def _decode_text(raw: bytes) -> str:
    try:
        return raw.decode("cp1252")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def load_fonts(reader: PdfReader, page: dict) -> dict[str, FontInfo]:
    """Map resource names (F1, ...) to font descriptions."""
    resources = reader.get(page.get("Resources")) or {}
    fonts_dict = reader.get(resources.get("Font")) or {}
    out: dict[str, FontInfo] = {}
    for res_name, ref in fonts_dict.items():
        font = reader.get(ref)
        if not isinstance(font, dict):
            continue
        base = reader.get(font.get("BaseFont"))
        name = str(base) if base is not None else str(res_name)
        widths_obj = reader.get(font.get("Widths"))
        widths: tuple[float, ...] = ()
        first_char = 0
        if isinstance(widths_obj, list):
            widths = tuple(
                float(reader.get(w)) if isinstance(reader.get(w), (int, float)) else 0.0
                for w in widths_obj
            )
            fc = reader.get(font.get("FirstChar"))
            first_char = fc if isinstance(fc, int) else 0
        out[str(res_name)] = FontInfo(name=name, first_char=first_char, widths=widths)
    return out


class _TextState:
    __slots__ = ("ctm", "font", "size", "leading", "char_sp", "word_sp", "hscale")

    def __init__(self):
        self.ctm = _IDENTITY
        self.font: FontInfo | None = None
        self.size = 0.0
        self.leading = 0.0
        self.char_sp = 0.0
        self.word_sp = 0.0
        self.hscale = 1.0

    def clone(self) -> "_TextState":
        other = _TextState()
        for slot in self.__slots__:
            setattr(other, slot, getattr(self, slot))
        return other


def _tokenize_content(data: bytes):
    """Yield (kind, value) with kind one of num/str/name/arr/op."""
    lex = _Lexer(data)
    while True:
        lex.skip_ws()
        if lex.pos >= len(lex.data):
            return
        c = lex.peek()
        if c == 0x2F:
            lex.pos += 1
            yield ("name", _parse_name(lex))
            continue
        if c == 0x28:
            lex.pos += 1
            yield ("str", _parse_string_bytes(lex))
            continue
        if c == 0x3C and lex.data[lex.pos : lex.pos + 2] != b"<<":
            lex.pos += 1
            yield ("str", _parse_hex_bytes(lex))
            continue
        if c == 0x5B:
            lex.pos += 1
            items = []
            while True:
                lex.skip_ws()
                if lex.peek() == 0x5D:
                    lex.pos += 1
                    break
                inner = lex.peek()
                if inner == 0x28:
                    lex.pos += 1
                    items.append(_parse_string_bytes(lex))
                elif inner == 0x3C:
                    lex.pos += 1
                    items.append(_parse_hex_bytes(lex))
                else:
                    tok = lex.read_token()
                    try:
                        items.append(float(tok))
                    except ValueError:
                        break
            yield ("arr", items)
            continue
        if lex.data[lex.pos : lex.pos + 2] == b"<<":
            yield ("dict", parse_object(lex))
            continue
        tok = lex.read_token()
        if not tok:
            return
        if _CONTENT_NUM.match(tok):
            yield ("num", float(tok))
        else:
            yield ("op", tok)


_CONTENT_NUM = re.compile(rb"^[+-]?(\d+\.?\d*|\.\d+)$")


def _parse_string_bytes(lex: _Lexer) -> bytes:
    return _parse_string(lex)


def _parse_hex_bytes(lex: _Lexer) -> bytes:
    return _parse_hex_string(lex)


def extract_spans(reader: PdfReader, page: dict, page_index: int) -> list[PositionedSpan]:
    """Run the text machine over one page's content."""
    fonts = load_fonts(reader, page)
    content = reader.content_bytes(page)
    if not content:
        return []

    state = _TextState()
    stack: list[_TextState] = []
    tm = _IDENTITY
    tlm = _IDENTITY
    operands: list = []
    spans: list[PositionedSpan] = []

    def show(raw: bytes):
        nonlocal tm
        if not raw or state.font is None or state.size <= 0:
            return
        text = _decode_text(raw)
        trm = _mul(tm, state.ctm)
        x0, y0 = trm[4], trm[5]
        eff_size = state.size * hypot(trm[2], trm[3])
        advance = 0.0
        for ch in text:
            w = state.font.char_width(ord(ch) if ord(ch) < 256 else 0) * state.size
            w += state.char_sp
            if ch == " ":
                w += state.word_sp
            advance += w * state.hscale
        ax, ay = _apply(trm, advance, 0.0)
        width = hypot(ax - x0, ay - y0)
        spans.append(
            PositionedSpan(
                page_index=page_index,
                x=x0,
                baseline=y0,
                width=width,
                text=text,
                font_name=state.font.name,
                font_size=eff_size,
            )
        )
        tm = _mul((1, 0, 0, 1, advance, 0), tm)

    def move_line(tx: float, ty: float):
        nonlocal tm, tlm
        tlm = _mul((1, 0, 0, 1, tx, ty), tlm)
        tm = tlm

    for kind, value in _tokenize_content(content):
        if kind != "op":
            operands.append((kind, value))
            continue
        op = value
        try:
            if op == b"q":
                stack.append(state.clone())
            elif op == b"Q":
                if stack:
                    state = stack.pop()
            elif op == b"cm" and len(operands) >= 6:
                nums = [v for k, v in operands[-6:] if k == "num"]
                if len(nums) == 6:
                    state.ctm = _mul(tuple(nums), state.ctm)
            elif op == b"BT":
                tm = tlm = _IDENTITY
            elif op == b"ET":
                pass
            elif op == b"Tf" and len(operands) >= 2:
                fname = operands[-2][1]
                size = operands[-1][1]
                if isinstance(fname, Name) and isinstance(size, float):
                    state.font = fonts.get(str(fname), FontInfo(name=str(fname)))
                    state.size = size
            elif op == b"TL" and operands:
                state.leading = float(operands[-1][1])
            elif op == b"Tc" and operands:
                state.char_sp = float(operands[-1][1])
            elif op == b"Tw" and operands:
                state.word_sp = float(operands[-1][1])
            elif op == b"Tz" and operands:
                state.hscale = float(operands[-1][1]) / 100.0
            elif op == b"Td" and len(operands) >= 2:
                move_line(float(operands[-2][1]), float(operands[-1][1]))
            elif op == b"TD" and len(operands) >= 2:
                state.leading = -float(operands[-1][1])
                move_line(float(operands[-2][1]), float(operands[-1][1]))
            elif op == b"Tm" and len(operands) >= 6:
                nums = [v for k, v in operands[-6:] if k == "num"]
                if len(nums) == 6:
                    tm = tlm = tuple(nums)
            elif op == b"T*":
                move_line(0.0, -state.leading)
            elif op == b"Tj" and operands:
                if operands[-1][0] == "str":
                    show(operands[-1][1])
            elif op == b"'" and operands:
                move_line(0.0, -state.leading)
                if operands[-1][0] == "str":
                    show(operands[-1][1])
            elif op == b'"' and len(operands) >= 3:
                state.word_sp = float(operands[-3][1])
                state.char_sp = float(operands[-2][1])
                move_line(0.0, -state.leading)
                if operands[-1][0] == "str":
                    show(operands[-1][1])
            elif op == b"TJ" and operands and operands[-1][0] == "arr":
                for item in operands[-1][1]:
                    if isinstance(item, bytes):
                        show(item)
                    else:
                        shift = -float(item) / 1000.0 * state.size * state.hscale
                        tm = _mul((1, 0, 0, 1, shift, 0), tm)
        except (TypeError, ValueError, IndexError) as exc:
            raise UnreadablePdfError(f"malformed content stream near {op!r}: {exc}") from exc
        operands.clear()
    return spans
