"""PDF-to-blocks-JSON adapter for the text-block analysis pipeline.

Reads unencrypted text-layer PDFs with a from-scratch minimal parser and
emits the canonical blocks-JSON consumed by the main package.
"""

__version__ = "0.1.0"

from .blocks import ExtractionConfig, extract_blocks, extract_fonts_report  # noqa: F401
from .errors import (  # noqa: F401
    AdapterError,
    EmptyDocumentError,
    EncryptedPdfError,
    UnreadablePdfError,
)
