"""Document-layout analysis for scientific articles: classify text blocks
into body-text / supplementary / accessory classes with a 9-code linear
SVM, then segment compartments and detect figure/table regions with their
titles.

Typical flow:

    from ctbr import synthetic, encoder, svm, rules, segmenter

    doc, truth = synthetic.generate_synthetic(synthetic.SyntheticSpec(seed=7))
    enc = encoder.encode_document(doc)
    titles = rules.detect_single_modal_blocks(doc, rules.acl_corrected_pack(), enc.stats)
    result = segmenter.detect_objects(doc, titles, truth.labels)
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    BBox,
    BlockDocument,
    BlockLabel,
    CLASS_ORDER,
    Page,
    Span,
    TextBlock,
    bbox_iou,
    bbox_union,
    crosses_central_axis,
)
from .errors import CtbrError  # noqa: F401
