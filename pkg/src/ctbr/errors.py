"""Exception hierarchy shared across the pipeline.

Every error raised on purpose by this package derives from CtbrError so
callers (and the CLI) can distinguish anticipated failures from bugs.
"""

from __future__ import annotations


class CtbrError(Exception):
    """Base class for all anticipated pipeline errors."""


# --- document ingestion -----------------------------------------------------


class SchemaError(CtbrError):
    """Input JSON does not conform to the blocks-JSON / label-file schema.

    ``path`` locates the offending node, e.g. ``pages[0].blocks[2].bbox``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class GeometryError(CtbrError):
    """A bounding box violates a geometric invariant (inverted, non-finite,
    zero area where positive area is required)."""


class DuplicateIdError(CtbrError):
    """Two blocks share an id, or two blocks share a reading_order slot."""


class UnknownBlockError(CtbrError):
    """A label entry references a block id absent from the document."""


class DocMismatchError(CtbrError):
    """A sidecar file's doc_id does not match the target document."""


class EmptyDocumentError(CtbrError):
    """An operation that needs at least one block got none."""


# --- feature encoding -------------------------------------------------------


class DegenerateBlockError(CtbrError):
    """Block contains no non-whitespace text and cannot be encoded."""


class DivisionError(CtbrError):
    """A boundary coordinate of zero would make a position code undefined."""


# --- rule-based recognition -------------------------------------------------


class NoBodyError(CtbrError):
    """Base-domain segmentation found no main-section title."""


# --- classifier -------------------------------------------------------------


class InsufficientClassesError(CtbrError):
    """Training data contains fewer than two distinct labels."""


class VersionError(CtbrError):
    """Model file claims a format version this build does not understand."""


class CorruptModelError(CtbrError):
    """Model file is truncated, not JSON, or structurally broken."""


# --- segmentation -----------------------------------------------------------


class UnassignedBlockError(CtbrError):
    """A block's center fell inside no compartment; lane construction bug."""


class NoSupplementaryError(CtbrError):
    """Region refinement requires at least one supplementary-labeled block."""


# --- evaluation / rendering -------------------------------------------------


class IdMismatchError(CtbrError):
    """Predicted and truth label sets cover different block ids."""


class PageNotFoundError(CtbrError):
    """Requested page index does not exist in the document."""
