"""
Compartments and region claiming
================================

Trace the segmentation stage on one generated document: boundaries from
recognized titles, the rough compartments between them, the supplementary
coverage of each compartment, and the claimed/refined figure and table
regions. Writes per-page SVG overlays next to this script.
"""

from pathlib import Path

from ctbr import encoder, rules, segmenter, synthetic
from ctbr.render import render_overlay

OUT = Path(__file__).resolve().parent / "demo-output"
OUT.mkdir(exist_ok=True)

doc, truth = synthetic.generate_synthetic(synthetic.SyntheticSpec(seed=21, pages=1))
enc = encoder.encode_document(doc)
titles = rules.detect_single_modal_blocks(doc, rules.acl_corrected_pack(), enc.stats)
blocks = doc.block_index()

result = segmenter.detect_objects(doc, titles, truth.labels)

print(f"{doc.doc_id}: {len(titles)} recognized titles\n")
print("boundaries:")
for b in result.boundaries:
    text = blocks[b.source_block_id].first_line()[:44]
    kind = "full-width" if b.crosses_axis else "column"
    print(f"  {b.id}  {b.kind.value:14s} {kind:10s} y={b.y_extent[0]:.0f}  {text!r}")

print("\ncompartments (coverage = supplementary area / compartment area):")
effective = dict(truth.labels)
for tid in titles:
    effective[tid] = synthetic.BlockLabel.SUPPLEMENTARY
for comp in result.compartments:
    frac = segmenter.supplementary_fraction(comp, effective, blocks)
    claimed = next((b for b, c in result.assignments.items() if c == comp.id), None)
    marker = f"  <- claimed by {claimed}" if claimed else ""
    print(f"  {comp.id}  {comp.column.value:5s} members={len(comp.member_block_ids):2d} "
          f"coverage={frac:.2f}{marker}")

print("\ndetected objects:")
for obj in result.objects:
    r = obj.region
    print(f"  {obj.kind.value:6s} page {obj.page_index} "
          f"({r.left:.0f},{r.top:.0f})-({r.right:.0f},{r.bottom:.0f}) "
          f"title={obj.title_block_id} confidence={obj.confidence:.2f}")

for page in doc.pages:
    svg = render_overlay(doc, truth.labels, list(result.objects), page.index,
                         list(result.boundaries))
    path = OUT / f"{doc.doc_id}.page{page.index}.svg"
    path.write_bytes(svg)
    print(f"\noverlay written to {path}")
