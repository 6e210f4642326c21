"""Minimal PDF object-layer reader.

Scope: unencrypted PDFs with a text layer, classic cross-reference tables
(with a brute-force object scan as fallback for files using xref streams),
FlateDecode or plain content streams, and Type1/TrueType simple fonts.
That covers the common output of mainstream PDF writers for born-digital
documents; scanned or encrypted files are rejected explicitly.
"""

from __future__ import annotations

import base64
import re
import zlib
from dataclasses import dataclass

from .errors import EncryptedPdfError, UnreadablePdfError

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"


@dataclass(frozen=True)
class Ref:
    num: int
    gen: int


class Name(str):
    """PDF name object; behaves as its string value without the slash."""


class _Lexer:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_ws(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                return

    def peek(self) -> int:
        return self.data[self.pos] if self.pos < len(self.data) else -1

    def read_token(self) -> bytes:
        self.skip_ws()
        start = self.pos
        data, n = self.data, len(self.data)
        if start >= n:
            return b""
        c = data[start]
        if c in _DELIMITERS:
            if data[start : start + 2] in (b"<<", b">>"):
                self.pos += 2
                return data[start : start + 2]
            self.pos += 1
            return data[start : start + 1]
        while self.pos < n and data[self.pos] not in _WHITESPACE + _DELIMITERS:
            self.pos += 1
        return data[start : self.pos]


def _parse_name(lex: _Lexer) -> Name:
    data, n = lex.data, len(lex.data)
    start = lex.pos
    out = bytearray()
    while lex.pos < n:
        c = data[lex.pos]
        if c in _WHITESPACE or (c in _DELIMITERS and not (c == 0x23)):
            break
        if c == 0x23 and lex.pos + 2 < n:  # '#' hex escape
            try:
                out.append(int(data[lex.pos + 1 : lex.pos + 3], 16))
                lex.pos += 3
                continue
            except ValueError:
                pass
        out.append(c)
        lex.pos += 1
    if lex.pos == start:
        raise UnreadablePdfError("empty name object")
    return Name(out.decode("latin-1"))


_ESCAPES = {
    ord("n"): b"\n",
    ord("r"): b"\r",
    ord("t"): b"\t",
    ord("b"): b"\b",
    ord("f"): b"\x0c",
    ord("("): b"(",
    ord(")"): b")",
    ord("\\"): b"\\",
}


def _parse_string(lex: _Lexer) -> bytes:
    data, n = lex.data, len(lex.data)
    depth = 1
    out = bytearray()
    while lex.pos < n:
        c = data[lex.pos]
        if c == 0x5C:  # backslash
            lex.pos += 1
            if lex.pos >= n:
                break
            e = data[lex.pos]
            if e in _ESCAPES:
                out += _ESCAPES[e]
                lex.pos += 1
            elif 0x30 <= e <= 0x37:  # octal, up to 3 digits
                digits = bytearray()
                while lex.pos < n and len(digits) < 3 and 0x30 <= data[lex.pos] <= 0x37:
                    digits.append(data[lex.pos])
                    lex.pos += 1
                out.append(int(digits, 8) & 0xFF)
            elif e in (0x0A, 0x0D):  # line continuation
                lex.pos += 1
                if e == 0x0D and lex.pos < n and data[lex.pos] == 0x0A:
                    lex.pos += 1
            else:
                out.append(e)
                lex.pos += 1
        elif c == 0x28:  # '('
            depth += 1
            out.append(c)
            lex.pos += 1
        elif c == 0x29:  # ')'
            depth -= 1
            lex.pos += 1
            if depth == 0:
                return bytes(out)
            out.append(c)
        else:
            out.append(c)
            lex.pos += 1
    raise UnreadablePdfError("unterminated string literal")


def _parse_hex_string(lex: _Lexer) -> bytes:
    end = lex.data.find(b">", lex.pos)
    if end < 0:
        raise UnreadablePdfError("unterminated hex string")
    raw = re.sub(rb"[^0-9A-Fa-f]", b"", lex.data[lex.pos : end])
    lex.pos = end + 1
    if len(raw) % 2:
        raw += b"0"
    return bytes.fromhex(raw.decode("ascii"))


_NUMBER_RE = re.compile(rb"^[+-]?(\d+\.?\d*|\.\d+)$")
_INT_RE = re.compile(rb"^[+-]?\d+$")


def parse_object(lex: _Lexer):
    """Parse one PDF object at the lexer position."""
    lex.skip_ws()
    c = lex.peek()
    if c < 0:
        raise UnreadablePdfError("unexpected end of data")
    if c == 0x2F:  # '/'
        lex.pos += 1
        return _parse_name(lex)
    if c == 0x28:  # '('
        lex.pos += 1
        return _parse_string(lex)
    if c == 0x5B:  # '['
        lex.pos += 1
        items = []
        while True:
            lex.skip_ws()
            if lex.peek() == 0x5D:
                lex.pos += 1
                return items
            items.append(parse_object(lex))
    if lex.data[lex.pos : lex.pos + 2] == b"<<":
        lex.pos += 2
        out = {}
        while True:
            lex.skip_ws()
            if lex.data[lex.pos : lex.pos + 2] == b">>":
                lex.pos += 2
                return out
            if lex.peek() != 0x2F:
                raise UnreadablePdfError("dictionary key must be a name")
            lex.pos += 1
            key = _parse_name(lex)
            out[str(key)] = parse_object(lex)
    if c == 0x3C:  # single '<'
        lex.pos += 1
        return _parse_hex_string(lex)

    token = lex.read_token()
    if token == b"true":
        return True
    if token == b"false":
        return False
    if token == b"null":
        return None
    if _INT_RE.match(token):
        # possible indirect reference "num gen R"
        save = lex.pos
        gen_tok = lex.read_token()
        if _INT_RE.match(gen_tok):
            r_tok = lex.read_token()
            if r_tok == b"R":
                return Ref(int(token), int(gen_tok))
        lex.pos = save
        return int(token)
    if _NUMBER_RE.match(token):
        return float(token)
    raise UnreadablePdfError(f"unexpected token {token[:20]!r}")


class PdfReader:
    """Random-access reader over one PDF byte string."""

    def __init__(self, data: bytes):
        if not data.lstrip(b"\xef\xbb\xbf \r\n").startswith(b"%PDF-"):
            raise UnreadablePdfError("missing %PDF header")
        self.data = data
        self._cache: dict[int, object] = {}
        self._offsets: dict[int, int] = {}
        self.trailer: dict = {}
        self._load_xref()
        if "Encrypt" in self.trailer:
            raise EncryptedPdfError("PDF declares /Encrypt; encrypted files are unsupported")

    # -- cross-reference handling ------------------------------------------

    def _load_xref(self):
        try:
            self._load_classic_chain()
        except UnreadablePdfError:
            self._offsets.clear()
        if not self._offsets:
            self._scan_objects()
        if not self.trailer:
            self._recover_trailer()
        if "Root" not in self.trailer:
            raise UnreadablePdfError("no document catalog (/Root)")

    def _load_classic_chain(self):
        tail = self.data[-2048:]
        m = None
        for m in re.finditer(rb"startxref\s+(\d+)", tail):
            pass
        if m is None:
            raise UnreadablePdfError("startxref not found")
        offset = int(m.group(1))
        seen = set()
        while offset and offset not in seen:
            seen.add(offset)
            lex = _Lexer(self.data, offset)
            lex.skip_ws()
            if self.data[lex.pos : lex.pos + 4] != b"xref":
                raise UnreadablePdfError("xref table not at startxref offset")
            lex.pos += 4
            while True:
                lex.skip_ws()
                if self.data[lex.pos : lex.pos + 7] == b"trailer":
                    lex.pos += 7
                    trailer = parse_object(lex)
                    if not self.trailer:
                        self.trailer = trailer
                    offset = trailer.get("Prev", 0)
                    if not isinstance(offset, int):
                        offset = 0
                    break
                first_tok = lex.read_token()
                count_tok = lex.read_token()
                if not (_INT_RE.match(first_tok) and _INT_RE.match(count_tok)):
                    raise UnreadablePdfError("malformed xref subsection header")
                first, count = int(first_tok), int(count_tok)
                for i in range(count):
                    off_tok = lex.read_token()
                    gen_tok = lex.read_token()
                    kind_tok = lex.read_token()
                    if not (_INT_RE.match(off_tok) and _INT_RE.match(gen_tok)):
                        raise UnreadablePdfError("truncated xref entry")
                    if kind_tok == b"n":
                        num = first + i
                        if num not in self._offsets:
                            self._offsets[num] = int(off_tok)

    def _scan_objects(self):
        # later definitions win: incremental updates append replacements
        for m in re.finditer(rb"(?m)^\s*(\d+)\s+(\d+)\s+obj\b", self.data):
            self._offsets[int(m.group(1))] = m.start()
        if not self._offsets:
            raise UnreadablePdfError("no indirect objects found")

    def _recover_trailer(self):
        m = None
        for m in re.finditer(rb"trailer", self.data):
            pass
        if m is not None:
            try:
                lex = _Lexer(self.data, m.end())
                trailer = parse_object(lex)
                if isinstance(trailer, dict):
                    self.trailer = trailer
                    return
            except UnreadablePdfError:
                pass
        for num in sorted(self._offsets):
            try:
                obj = self.get(Ref(num, 0))
            except UnreadablePdfError:
                continue
            if isinstance(obj, dict) and obj.get("Type") == "Catalog":
                self.trailer = {"Root": Ref(num, 0)}
                return
        raise UnreadablePdfError("cannot locate document catalog")

    # -- object access ------------------------------------------------------

    def get(self, obj):
        """Resolve an object, following indirect references."""
        while isinstance(obj, Ref):
            if obj.num in self._cache:
                obj = self._cache[obj.num]
                continue
            offset = self._offsets.get(obj.num)
            if offset is None:
                return None
            parsed = self._parse_indirect(offset)
            self._cache[obj.num] = parsed
            obj = parsed
        return obj

    def _parse_indirect(self, offset: int):
        lex = _Lexer(self.data, offset)
        lex.read_token()  # object number
        lex.read_token()  # generation
        if lex.read_token() != b"obj":
            raise UnreadablePdfError(f"no obj keyword at offset {offset}")
        value = parse_object(lex)
        lex.skip_ws()
        if self.data[lex.pos : lex.pos + 6] == b"stream":
            lex.pos += 6
            if self.data[lex.pos : lex.pos + 2] == b"\r\n":
                lex.pos += 2
            elif self.data[lex.pos : lex.pos + 1] in (b"\n", b"\r"):
                lex.pos += 1
            length = self.get(value.get("Length"))
            if isinstance(length, int) and length >= 0:
                raw = self.data[lex.pos : lex.pos + length]
                endpos = self.data.find(b"endstream", lex.pos + length)
                if endpos < 0 or endpos > lex.pos + length + 4:
                    end = self.data.find(b"endstream", lex.pos)
                    raw = self.data[lex.pos : end] if end >= 0 else raw
            else:
                end = self.data.find(b"endstream", lex.pos)
                if end < 0:
                    raise UnreadablePdfError("stream without endstream")
                raw = self.data[lex.pos : end]
            return Stream(dict(value), bytes(raw))
        return value

    def catalog(self) -> dict:
        root = self.get(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise UnreadablePdfError("document catalog unreadable")
        return root

    def pages(self) -> list[dict]:
        """Flattened page dictionaries with inherited attributes applied."""
        catalog = self.catalog()
        out: list[dict] = []
        seen: set[int] = set()

        def walk(node_ref, inherited):
            node = self.get(node_ref)
            if not isinstance(node, dict):
                return
            key = id(node)
            if key in seen:
                return
            seen.add(key)
            merged = dict(inherited)
            for field in ("Resources", "MediaBox", "Rotate"):
                if field in node:
                    merged[field] = node[field]
            if node.get("Type") == "Page" or ("Kids" not in node and "Contents" in node):
                page = dict(node)
                for field, value in merged.items():
                    page.setdefault(field, value)
                out.append(page)
                return
            for kid in self.get(node.get("Kids")) or []:
                walk(kid, merged)

        walk(catalog.get("Pages"), {})
        if not out:
            raise UnreadablePdfError("page tree is empty or unreadable")
        return out

    def content_bytes(self, page: dict) -> bytes:
        contents = self.get(page.get("Contents"))
        if contents is None:
            return b""
        parts = contents if isinstance(contents, list) else [contents]
        chunks = []
        for part in parts:
            stream = self.get(part)
            if isinstance(stream, Stream):
                chunks.append(stream.decoded(self))
        return b"\n".join(chunks)


class Stream:
    def __init__(self, meta: dict, raw: bytes):
        self.meta = meta
        self.raw = raw

    def decoded(self, reader: PdfReader) -> bytes:
        filters = reader.get(self.meta.get("Filter"))
        if filters is None:
            return self.raw
        if not isinstance(filters, list):
            filters = [filters]
        data = self.raw
        for f in filters:
            name = str(reader.get(f))
            if name == "FlateDecode":
                try:
                    # decompressobj tolerates trailing bytes after the stream
                    data = zlib.decompressobj().decompress(data)
                except zlib.error as exc:
                    raise UnreadablePdfError(f"broken FlateDecode stream: {exc}") from exc
            elif name == "ASCII85Decode":
                body = data.strip()
                if not body.startswith(b"<~"):
                    body = b"<~" + body
                if not body.endswith(b"~>"):
                    body += b"~>"
                try:
                    data = base64.a85decode(body, adobe=True)
                except ValueError as exc:
                    raise UnreadablePdfError(f"broken ASCII85 stream: {exc}") from exc
            elif name == "ASCIIHexDecode":
                hex_body = re.sub(rb"[^0-9A-Fa-f]", b"", data.split(b">")[0])
                if len(hex_body) % 2:
                    hex_body += b"0"
                data = bytes.fromhex(hex_body.decode("ascii"))
            else:
                raise UnreadablePdfError(f"unsupported stream filter {name}")
        return data
