"""Boundary setting, rough compartment construction, and the refinement
rules that turn classified blocks into figure/table regions.

Every recognized title block becomes a horizontal separator (a boundary).
Full-width boundaries slice the page into bands; column-confined boundaries
slice their own lane within a band. The gaps left over are the rough
compartments. Figure/table boundaries then claim the adjacent compartment
whose supplementary-block coverage is larger (claimed compartments are
exclusive), and the claimed compartment is tightened to the min/max box of
its supplementary members.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NoSupplementaryError, UnassignedBlockError
from .model import (
    BBox,
    BlockDocument,
    BlockLabel,
    TextBlock,
    bbox_union,
    crosses_central_axis,
)
from .rules import SingleModalKind


class BoundaryKind(Enum):
    FIGURE_TITLE = "figure_title"
    TABLE_TITLE = "table_title"
    SECTION_TITLE = "section_title"


_BOUNDARY_KIND = {
    SingleModalKind.FIGURE_TITLE: BoundaryKind.FIGURE_TITLE,
    SingleModalKind.TABLE_TITLE: BoundaryKind.TABLE_TITLE,
    SingleModalKind.MAIN_SECTION_TITLE: BoundaryKind.SECTION_TITLE,
    SingleModalKind.SUB_SECTION_TITLE: BoundaryKind.SECTION_TITLE,
}

_OBJECT_BOUNDARY_KINDS = frozenset({BoundaryKind.FIGURE_TITLE, BoundaryKind.TABLE_TITLE})


class Column(Enum):
    LEFT = "left"
    RIGHT = "right"
    FULL = "full"


class ObjectKind(Enum):
    FIGURE = "figure"
    TABLE = "table"


@dataclass(frozen=True)
class Boundary:
    """A separator derived from one title block."""

    id: str
    source_block_id: str
    kind: BoundaryKind
    page_index: int
    y_extent: tuple[float, float]
    crosses_axis: bool
    sequence: int


@dataclass(frozen=True)
class Compartment:
    """A gap between separators; members are the blocks centered inside it.

    upper_boundary_id / lower_boundary_id name the separators delimiting the
    gap (None at a page edge); they are what "directly above/below" means
    during region assignment.
    """

    id: str
    page_index: int
    bbox: BBox
    member_block_ids: frozenset[str]
    sequence: int
    column: Column
    upper_boundary_id: str | None = None
    lower_boundary_id: str | None = None


@dataclass(frozen=True)
class DetectedObject:
    """A finished figure/table region with its matched title."""

    kind: ObjectKind
    title_block_id: str
    region: BBox
    page_index: int
    compartment_id: str
    confidence: float


@dataclass(frozen=True)
class AssignmentResult:
    assignments: dict[str, str]  # boundary id -> compartment id
    unresolved: tuple[str, ...]  # boundary ids with no available compartment


@dataclass(frozen=True)
class DetectionResult:
    objects: tuple[DetectedObject, ...]
    unresolved: tuple[str, ...]
    assignments: dict[str, str]
    boundaries: tuple[Boundary, ...]
    compartments: tuple[Compartment, ...]


# ---------------------------------------------------------------------------
# Boundary setting
# ---------------------------------------------------------------------------


def set_boundaries(
    doc: BlockDocument, titles: dict[str, SingleModalKind]
) -> list[Boundary]:
    """One boundary per title block, in document order.

    In single-column documents every boundary spans the page, so
    crosses_axis is forced true.
    """
    boundaries = []
    seq = 0
    for page in doc.pages:
        for block in page.blocks:
            kind = titles.get(block.id)
            if kind is None:
                continue
            crosses = doc.layout_columns == 1 or crosses_central_axis(
                block.bbox, page.media_box
            )
            boundaries.append(
                Boundary(
                    id=f"bd{seq:04d}",
                    source_block_id=block.id,
                    kind=_BOUNDARY_KIND[kind],
                    page_index=page.index,
                    y_extent=(block.bbox.top, block.bbox.bottom),
                    crosses_axis=crosses,
                    sequence=seq,
                )
            )
            seq += 1
    return boundaries


# ---------------------------------------------------------------------------
# Rough compartments
# ---------------------------------------------------------------------------


def _gaps(top: float, bottom: float, strips, upper_id, lower_id):
    """Vertical gaps between consecutive strips inside [top, bottom].

    strips: list of (strip_top, strip_bottom, boundary_id), sorted by top.
    Yields (gap_top, gap_bottom, upper_boundary_id, lower_boundary_id).
    """
    cursor = top
    upper = upper_id
    for s_top, s_bottom, bid in strips:
        if s_top > cursor:
            yield cursor, s_top, upper, bid
        cursor = max(cursor, s_bottom)
        upper = bid
    if bottom > cursor:
        yield cursor, bottom, upper, lower_id


def rough_compartments(
    doc: BlockDocument, boundaries: list[Boundary]
) -> list[Compartment]:
    """Carve every page into compartments and assign each non-title block.

    Full-width boundaries cut horizontal bands; a band containing
    column-confined boundaries (two-column documents only) splits into a
    left and a right lane at the media-box midline, and those boundaries cut
    their own lane. Raises UnassignedBlockError when a block's center lies
    in no compartment.
    """
    blocks = doc.block_index()
    title_ids = {b.source_block_id for b in boundaries}
    built: list[dict] = []

    for page in doc.pages:
        media = page.media_box
        mid = (media.left + media.right) / 2.0
        page_bounds = [b for b in boundaries if b.page_index == page.index]
        type1 = sorted(
            (b for b in page_bounds if b.crosses_axis),
            key=lambda b: (b.y_extent[0], b.sequence),
        )
        type2 = sorted(
            (b for b in page_bounds if not b.crosses_axis),
            key=lambda b: (b.y_extent[0], b.sequence),
        )

        t1_strips = [(b.y_extent[0], b.y_extent[1], b.id) for b in type1]
        bands = list(_gaps(media.top, media.bottom, t1_strips, None, None))

        def band_of(y: float) -> int | None:
            for bi, (b_top, b_bottom, _, _) in enumerate(bands):
                if b_top <= y <= b_bottom:
                    return bi
            return None

        band_type2: dict[int, list[Boundary]] = {bi: [] for bi in range(len(bands))}
        for b in type2:
            center_y = (b.y_extent[0] + b.y_extent[1]) / 2.0
            bi = band_of(center_y)
            if bi is None:
                # center swallowed by a full-width strip; attach below it
                bi = next(
                    (i for i, (b_top, _, _, _) in enumerate(bands) if b_top >= center_y),
                    len(bands) - 1,
                )
            band_type2[bi].append(b)

        for bi, (band_top, band_bottom, upper_id, lower_id) in enumerate(bands):
            laners = band_type2[bi]
            if doc.layout_columns == 2 and laners:
                lanes = [
                    (Column.LEFT, media.left, mid),
                    (Column.RIGHT, mid, media.right),
                ]
                for column, lx, rx in lanes:
                    lane_strips = []
                    for b in laners:
                        cx = blocks[b.source_block_id].bbox.center[0]
                        side = Column.LEFT if cx <= mid else Column.RIGHT
                        if side is column:
                            lane_strips.append((b.y_extent[0], b.y_extent[1], b.id))
                    lane_strips.sort(key=lambda s: s[0])
                    for g_top, g_bottom, up, low in _gaps(
                        band_top, band_bottom, lane_strips, upper_id, lower_id
                    ):
                        built.append(
                            dict(
                                page_index=page.index,
                                bbox=BBox(lx, g_top, rx, g_bottom),
                                column=column,
                                upper=up,
                                lower=low,
                                members=[],
                            )
                        )
            else:
                built.append(
                    dict(
                        page_index=page.index,
                        bbox=BBox(media.left, band_top, media.right, band_bottom),
                        column=Column.FULL,
                        upper=upper_id,
                        lower=lower_id,
                        members=[],
                    )
                )

    # membership by bbox-center containment, first matching compartment wins
    by_page: dict[int, list[dict]] = {}
    for comp in built:
        by_page.setdefault(comp["page_index"], []).append(comp)
    for page in doc.pages:
        for block in page.blocks:
            if block.id in title_ids:
                continue
            cx, cy = block.bbox.center
            home = next(
                (
                    comp
                    for comp in by_page.get(page.index, ())
                    if comp["bbox"].contains_point(cx, cy)
                ),
                None,
            )
            if home is None:
                raise UnassignedBlockError(
                    f"block {block.id} center ({cx:.1f}, {cy:.1f}) lies in no "
                    f"compartment on page {page.index}"
                )
            home["members"].append(block.id)

    # freeze: widen to cover members, then number in document order
    for comp in built:
        bbox = comp["bbox"]
        for bid in comp["members"]:
            bbox = bbox_union(bbox, blocks[bid].bbox)
        comp["bbox"] = bbox
    built.sort(key=lambda c: (c["page_index"], c["bbox"].top, c["bbox"].left))
    return [
        Compartment(
            id=f"cmp{seq:04d}",
            page_index=comp["page_index"],
            bbox=comp["bbox"],
            member_block_ids=frozenset(comp["members"]),
            sequence=seq,
            column=comp["column"],
            upper_boundary_id=comp["upper"],
            lower_boundary_id=comp["lower"],
        )
        for seq, comp in enumerate(built)
    ]


# ---------------------------------------------------------------------------
# Region assignment
# ---------------------------------------------------------------------------


def supplementary_fraction(
    comp: Compartment,
    labels: dict[str, BlockLabel],
    blocks: dict[str, TextBlock],
) -> float:
    """Supplementary member area over compartment area, clamped to [0, 1].

    Members without a label count as non-supplementary.
    """
    if comp.bbox.area <= 0:
        return 0.0
    supp_area = sum(
        blocks[bid].bbox.area
        for bid in comp.member_block_ids
        if labels.get(bid) is BlockLabel.SUPPLEMENTARY
    )
    return min(1.0, max(0.0, supp_area / comp.bbox.area))


def assign_regions(
    boundaries: list[Boundary],
    compartments: list[Compartment],
    labels: dict[str, BlockLabel],
    blocks: dict[str, TextBlock],
) -> AssignmentResult:
    """Match each figure/table boundary to an adjacent compartment.

    Processed in boundary sequence order. A boundary with a compartment on
    only one side takes it; with both sides present the side with the larger
    supplementary fraction wins (tie: above). Claimed compartments are
    exclusive; when a boundary's preferred side is taken it falls back to
    the other, and with neither available it is reported unresolved.
    Section-title boundaries separate compartments but claim nothing.
    """
    above_of: dict[str, list[Compartment]] = {}
    below_of: dict[str, list[Compartment]] = {}
    crosses = {b.id: b.crosses_axis for b in boundaries}
    for comp in compartments:
        if comp.lower_boundary_id is not None:
            above_of.setdefault(comp.lower_boundary_id, []).append(comp)
        if comp.upper_boundary_id is not None:
            below_of.setdefault(comp.upper_boundary_id, []).append(comp)

    def compatible(boundary_id: str, comp: Compartment) -> bool:
        # A full-width title owns a full-width region; a column-confined
        # title owns a region in its own column.
        if crosses.get(boundary_id, False):
            return comp.column is Column.FULL
        return comp.column is not Column.FULL

    fractions = {
        comp.id: supplementary_fraction(comp, labels, blocks) for comp in compartments
    }

    def best_unclaimed(boundary_id: str, cands: list[Compartment], claimed: set[str]):
        open_cands = [
            c for c in cands if c.id not in claimed and compatible(boundary_id, c)
        ]
        if not open_cands:
            return None
        return max(open_cands, key=lambda c: (fractions[c.id], -c.sequence))

    assignments: dict[str, str] = {}
    unresolved: list[str] = []
    claimed: set[str] = set()
    for boundary in sorted(boundaries, key=lambda b: b.sequence):
        if boundary.kind not in _OBJECT_BOUNDARY_KINDS:
            continue
        above = best_unclaimed(boundary.id, above_of.get(boundary.id, []), claimed)
        below = best_unclaimed(boundary.id, below_of.get(boundary.id, []), claimed)
        if above is None and below is None:
            unresolved.append(boundary.id)
            continue
        if above is None:
            chosen = below
        elif below is None:
            chosen = above
        else:
            # equal coverage goes above: figures conventionally precede captions
            chosen = above if fractions[above.id] >= fractions[below.id] else below
        assignments[boundary.id] = chosen.id
        claimed.add(chosen.id)
    return AssignmentResult(assignments=assignments, unresolved=tuple(unresolved))


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------


def refine_region(
    comp: Compartment,
    labels: dict[str, BlockLabel],
    blocks: dict[str, TextBlock],
) -> BBox:
    """Tight min/max box over the compartment's supplementary members only;
    body-text and accessory members (stray prose, footnotes) are excluded."""
    supp = [
        blocks[bid].bbox
        for bid in sorted(comp.member_block_ids)
        if labels.get(bid) is BlockLabel.SUPPLEMENTARY
    ]
    if not supp:
        raise NoSupplementaryError(
            f"compartment {comp.id} has no supplementary-labeled member"
        )
    region = supp[0]
    for box in supp[1:]:
        region = bbox_union(region, box)
    return region


def finalize_object(
    boundary: Boundary,
    refined: BBox,
    title_bbox: BBox,
    *,
    media_box: BBox,
    compartment_id: str,
    confidence: float,
) -> DetectedObject:
    """Apply the title-width rule and package the detection.

    A region narrower than its title widens symmetrically about its own
    horizontal center to the title's width, clipped to the media box.
    """
    region = refined
    if title_bbox.width > region.width:
        cx = (region.left + region.right) / 2.0
        half = title_bbox.width / 2.0
        region = BBox(
            max(media_box.left, cx - half),
            region.top,
            min(media_box.right, cx + half),
            region.bottom,
        )
    kind = (
        ObjectKind.FIGURE
        if boundary.kind is BoundaryKind.FIGURE_TITLE
        else ObjectKind.TABLE
    )
    return DetectedObject(
        kind=kind,
        title_block_id=boundary.source_block_id,
        region=region,
        page_index=boundary.page_index,
        compartment_id=compartment_id,
        confidence=min(1.0, max(0.0, confidence)),
    )


# ---------------------------------------------------------------------------
# End-to-end detection
# ---------------------------------------------------------------------------


def detect_objects(
    doc: BlockDocument,
    titles: dict[str, SingleModalKind],
    labels: dict[str, BlockLabel],
) -> DetectionResult:
    """Compose boundary setting, compartment construction, assignment, and
    refinement. Every figure/table title ends up in exactly one of
    result.objects or result.unresolved.

    Title blocks are treated as supplementary regardless of the incoming
    label map, matching the class taxonomy.
    """
    blocks = doc.block_index()
    effective = dict(labels)
    for tid in titles:
        effective[tid] = BlockLabel.SUPPLEMENTARY

    boundaries = set_boundaries(doc, titles)
    compartments = rough_compartments(doc, boundaries)
    result = assign_regions(boundaries, compartments, effective, blocks)

    comp_by_id = {c.id: c for c in compartments}
    unresolved = list(result.unresolved)
    objects = []
    for boundary in boundaries:
        comp_id = result.assignments.get(boundary.id)
        if comp_id is None:
            continue
        comp = comp_by_id[comp_id]
        try:
            refined = refine_region(comp, effective, blocks)
        except NoSupplementaryError:
            unresolved.append(boundary.id)
            continue
        objects.append(
            finalize_object(
                boundary,
                refined,
                blocks[boundary.source_block_id].bbox,
                media_box=doc.pages[boundary.page_index].media_box,
                compartment_id=comp.id,
                confidence=supplementary_fraction(comp, effective, blocks),
            )
        )

    seq_of = {b.id: b.sequence for b in boundaries}
    objects.sort(key=lambda o: (o.page_index, o.region.top, o.region.left))
    unresolved.sort(key=lambda bid: seq_of[bid])
    assignments = {
        bid: cid
        for bid, cid in result.assignments.items()
        if bid not in set(unresolved)
    }
    return DetectionResult(
        objects=tuple(objects),
        unresolved=tuple(unresolved),
        assignments=assignments,
        boundaries=tuple(boundaries),
        compartments=tuple(compartments),
    )
