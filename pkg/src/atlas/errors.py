"""Error types shared across the catalog pipeline."""

from __future__ import annotations


class MalformedUrn(ValueError):
    """URN text does not follow the expected grammar."""


class IndexRequired(LookupError):
    """Range comparison needs document order but no reference index was given."""


class UnknownReference(LookupError):
    """A dotted reference does not exist in the version's index."""


class InvertedRange(ValueError):
    """Range end precedes range start in document order."""


class TokenOutOfRange(LookupError):
    """veRef token index exceeds the row's token count."""


class BadColumnCount(ValueError):
    """TSV line has the wrong number of tab-separated columns."""


class NonMonotoneSeq(ValueError):
    """TSV sequence numbers are not strictly increasing."""


class MixedContent(ValueError):
    """A division carries both leaf text and child divisions."""


class DuplicateRef(ValueError):
    """The same dotted reference appears twice within one version."""


class SchemaError(ValueError):
    """Structured payload is missing required fields or has the wrong shape."""


class BadVeRef(ValueError):
    """Token reference is malformed or lies outside the note's references."""


class DanglingHead(ValueError):
    """A word's head_id names no word in the tree."""


class CyclicHeads(ValueError):
    """The head relation contains a cycle."""


class ColumnCountError(ValueError):
    """A token table line has the wrong column layout."""


class NonContiguousIndices(ValueError):
    """Sentence token indices are not contiguous from 1."""


class OverlappingSpans(ValueError):
    """Sub-token spans overlap or are out of order."""


class DuplicateEntryId(ValueError):
    """Two grammar entries share an entry_id."""


class UnknownVersion(LookupError):
    """URN names a version that is not registered in the catalog."""


class DuplicateVersion(ValueError):
    """A version URN is already registered in the catalog."""


class InvariantViolation(ValueError):
    """Rows or metadata break a catalog invariant."""
