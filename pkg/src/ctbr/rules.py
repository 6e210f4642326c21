"""Rule-based recognition of single-modal blocks and base-domain segmentation.

Single-modal blocks (section / figure / table titles) are recognizable from
their first line alone. The stock "acl_printed" pack keeps the classic
ACL-style patterns verbatim, quirks included (its table pattern rejects "Table 3:"
because no whitespace is allowed before the digits); "acl_corrected" fixes
that one pattern. Packs are plain JSON so other publication formats are a
config change rather than a code change.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .encoder import DocumentStats, dominant_font
from .errors import NoBodyError, SchemaError
from .model import BlockDocument

# Unnumbered headings that end the body / open the appendix. These two
# checks are plumbing around the title patterns, not part of the packs.
_REFERENCES_RE = re.compile(r"^(references|bibliography)$", re.IGNORECASE)
_APPENDIX_RE = re.compile(r"^(appendix(\s+[A-Za-z0-9]+)?|appendices)$", re.IGNORECASE)


class SingleModalKind(Enum):
    MAIN_SECTION_TITLE = "main_section_title"
    SUB_SECTION_TITLE = "sub_section_title"
    FIGURE_TITLE = "figure_title"
    TABLE_TITLE = "table_title"


# More specific patterns first: "2.1 Foo" also satisfies the main-section
# pattern, so the sub-section pattern must win.
_PRECEDENCE: tuple[tuple[str, SingleModalKind], ...] = (
    ("sub_section", SingleModalKind.SUB_SECTION_TITLE),
    ("main_section", SingleModalKind.MAIN_SECTION_TITLE),
    ("figure_title", SingleModalKind.FIGURE_TITLE),
    ("table_title", SingleModalKind.TABLE_TITLE),
)

_SECTION_KINDS = frozenset(
    {SingleModalKind.MAIN_SECTION_TITLE, SingleModalKind.SUB_SECTION_TITLE}
)


@dataclass(frozen=True)
class RulePack:
    """Four anchored regexes plus the font-distinctness switch."""

    main_section: str
    sub_section: str
    figure_title: str
    table_title: str
    required_font_distinct: bool = True

    def __post_init__(self):
        for name in ("main_section", "sub_section", "figure_title", "table_title"):
            pattern = getattr(self, name)
            if not (pattern.startswith("^") and pattern.endswith("$")):
                raise ValueError(f"{name} pattern must be anchored with ^ and $")
            try:
                re.compile(pattern)
            except re.error as exc:
                raise ValueError(f"{name} pattern does not compile: {exc}") from exc

    def compiled(self) -> dict[str, re.Pattern]:
        return {
            name: re.compile(getattr(self, name))
            for name, _ in _PRECEDENCE
        }


def load_rulepack(data: bytes) -> RulePack:
    """Parse a rulepack JSON config."""
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("$", "top level must be an object")
    kwargs = {}
    for name in ("main_section", "sub_section", "figure_title", "table_title"):
        if name not in raw:
            raise SchemaError(f"$.{name}", "missing field")
        if not isinstance(raw[name], str):
            raise SchemaError(f"$.{name}", "expected string")
        kwargs[name] = raw[name]
    flag = raw.get("required_font_distinct", True)
    if not isinstance(flag, bool):
        raise SchemaError("$.required_font_distinct", "expected boolean")
    try:
        return RulePack(required_font_distinct=flag, **kwargs)
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from exc


def _builtin_pack(filename: str) -> RulePack:
    data = resources.files("ctbr.data").joinpath(filename).read_bytes()
    return load_rulepack(data)


def acl_printed_pack() -> RulePack:
    """The stock ACL-format patterns, verbatim (default)."""
    return _builtin_pack("rulepack_acl_printed.json")


def acl_corrected_pack() -> RulePack:
    """Same pack with whitespace allowed between "Table" and the number."""
    return _builtin_pack("rulepack_acl_corrected.json")


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def match_single_modal(text: str, pack: RulePack) -> SingleModalKind | None:
    """Classify one stripped first line; None when no pattern fires.

    Pure function of the string: geometry and fonts are applied separately
    in detect_single_modal_blocks.
    """
    patterns = pack.compiled()
    for name, kind in _PRECEDENCE:
        if patterns[name].match(text):
            return kind
    return None


def detect_single_modal_blocks(
    doc: BlockDocument, pack: RulePack, font_stats: DocumentStats
) -> dict[str, SingleModalKind]:
    """Run the pack over every block's first line, then apply the font filter.

    A section-title match survives only if the pack does not require font
    distinctness or the block's dominant (font, size) differs from the
    body-text (font, size). Figure and table titles are exempt: captions are
    routinely typeset in the body font.
    """
    result: dict[str, SingleModalKind] = {}
    body_pair = (font_stats.body_font_name, font_stats.body_font_size)
    for block in doc.iter_blocks():
        kind = match_single_modal(block.first_line(), pack)
        if kind is None:
            continue
        if kind in _SECTION_KINDS and pack.required_font_distinct:
            if dominant_font(block) == body_pair:
                continue
        result[block.id] = kind
    return result


# ---------------------------------------------------------------------------
# Base domains
# ---------------------------------------------------------------------------


class BaseDomainKind(Enum):
    BASIC_INFORMATION = "basic_information"
    BODY = "body"
    REFERENCE = "reference"
    APPENDIX = "appendix"


@dataclass(frozen=True)
class BaseDomain:
    """A contiguous run of blocks forming one top-level document zone."""

    kind: BaseDomainKind
    first: tuple[int, int]  # (page_index, reading_order) of the first block
    last: tuple[int, int]  # (page_index, reading_order) of the last block
    block_ids: tuple[str, ...]


def segment_base_domains(
    doc: BlockDocument, titles: dict[str, SingleModalKind]
) -> list[BaseDomain]:
    """Split the block sequence into basic-information / body / reference /
    appendix zones. Empty zones are omitted; together the returned domains
    partition the document's blocks.

    Raises NoBodyError when no main-section title exists.
    """
    blocks = list(doc.iter_blocks())
    if not any(
        titles.get(b.id) is SingleModalKind.MAIN_SECTION_TITLE for b in blocks
    ):
        raise NoBodyError("no main-section title found; cannot locate the body domain")

    body_start = next(
        i
        for i, b in enumerate(blocks)
        if titles.get(b.id) is SingleModalKind.MAIN_SECTION_TITLE
    )
    ref_start = next(
        (
            i
            for i in range(body_start, len(blocks))
            if _REFERENCES_RE.match(blocks[i].first_line())
        ),
        len(blocks),
    )
    app_start = next(
        (
            i
            for i in range(ref_start, len(blocks))
            if _APPENDIX_RE.match(blocks[i].first_line())
        ),
        len(blocks),
    )

    cuts = [
        (BaseDomainKind.BASIC_INFORMATION, 0, body_start),
        (BaseDomainKind.BODY, body_start, ref_start),
        (BaseDomainKind.REFERENCE, ref_start, app_start),
        (BaseDomainKind.APPENDIX, app_start, len(blocks)),
    ]
    domains = []
    for kind, lo, hi in cuts:
        if lo >= hi:
            continue
        run = blocks[lo:hi]
        domains.append(
            BaseDomain(
                kind=kind,
                first=(run[0].page_index, run[0].reading_order),
                last=(run[-1].page_index, run[-1].reading_order),
                block_ids=tuple(b.id for b in run),
            )
        )
    return domains
