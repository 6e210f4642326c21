"""Adapter error types, mapped to CLI exit code 2."""


class AdapterError(Exception):
    """Base class for extraction failures."""


class UnreadablePdfError(AdapterError):
    """Input is not a parseable PDF (bad header, broken xref, no page tree)."""


class EncryptedPdfError(AdapterError):
    """Input PDF declares encryption; extraction is out of scope."""


class EmptyDocumentError(AdapterError):
    """PDF parsed fine but carries no text layer."""
