"""Object-layer parsing units and reader robustness."""

import pytest

from ctbr_adapter.errors import EncryptedPdfError, UnreadablePdfError
from ctbr_adapter.pdfmini import Name, PdfReader, Ref, _Lexer, parse_object


def parse(src: bytes):
    return parse_object(_Lexer(src))


class TestObjectParsing:
    def test_numbers(self):
        assert parse(b"42") == 42
        assert parse(b"-7") == -7
        assert parse(b"3.14") == pytest.approx(3.14)
        assert parse(b"-.5") == pytest.approx(-0.5)

    def test_name_with_hex_escape(self):
        assert parse(b"/Font") == Name("Font")
        assert parse(b"/A#20B") == Name("A B")

    def test_string_escapes(self):
        assert parse(rb"(simple)") == b"simple"
        assert parse(rb"(with \(nested\) parens)") == b"with (nested) parens"
        assert parse(rb"(octal \101\102)") == b"octal AB"
        assert parse(b"(balanced (inner) text)") == b"balanced (inner) text"
        assert parse(rb"(line\nbreak)") == b"line\nbreak"

    def test_hex_string(self):
        assert parse(b"<48656C6C6F>") == b"Hello"
        assert parse(b"<48 65 6C>") == b"Hel"
        assert parse(b"<486>") == b"H`"  # odd count pads with zero

    def test_array_and_dict(self):
        assert parse(b"[1 2 /X (s)]") == [1, 2, Name("X"), b"s"]
        obj = parse(b"<< /A 1 /B [2 3] /C << /D true >> >>")
        assert obj == {"A": 1, "B": [2, 3], "C": {"D": True}}

    def test_reference(self):
        assert parse(b"12 0 R") == Ref(12, 0)
        # bare integer followed by a non-reference stays an integer
        lex = _Lexer(b"12 /Next")
        assert parse_object(lex) == 12

    def test_booleans_and_null(self):
        assert parse(b"true") is True
        assert parse(b"false") is False
        assert parse(b"null") is None

    def test_comment_skipped(self):
        assert parse(b"% a comment\n  7") == 7


class TestReader:
    def test_rejects_non_pdf(self, fixture_bytes):
        with pytest.raises(UnreadablePdfError):
            PdfReader(fixture_bytes["not_a_pdf.bin"])

    def test_rejects_encrypted(self, fixture_bytes):
        with pytest.raises(EncryptedPdfError):
            PdfReader(fixture_bytes["encrypted.pdf"])

    def test_reads_sample_pages(self, sample_bytes):
        reader = PdfReader(sample_bytes["two_column"])
        assert len(reader.pages()) == 2

    def test_fallback_scan_when_xref_broken(self, sample_bytes):
        data = sample_bytes["single_paragraph"]
        # corrupt the startxref offset: reader must fall back to object scan
        broken = data.replace(b"startxref", b"startxrEF")
        reader = PdfReader(broken)
        assert len(reader.pages()) == 1

    def test_content_stream_nonempty(self, sample_bytes):
        reader = PdfReader(sample_bytes["single_paragraph"])
        page = reader.pages()[0]
        content = reader.content_bytes(page)
        assert b"Hello world" in content
