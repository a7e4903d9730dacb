"""Aligned text and linguistic annotation toolkit."""

from __future__ import annotations

from .errors import (
    BadColumnCount,
    BadVeRef,
    ColumnCountError,
    CyclicHeads,
    DanglingHead,
    DuplicateEntryId,
    DuplicateRef,
    DuplicateVersion,
    IndexRequired,
    InvariantViolation,
    InvertedRange,
    MalformedUrn,
    MixedContent,
    NonContiguousIndices,
    NonMonotoneSeq,
    OverlappingSpans,
    SchemaError,
    TokenOutOfRange,
    UnknownReference,
    UnknownVersion,
)
from .store import Catalog, load_catalog
from .text import TextRow, Token, VersionMetadata, read_text_tsv, write_text_tsv
from .urn import (
    Cite2Urn,
    CtsUrn,
    PassageRef,
    ReferenceIndex,
    expand_range,
    format_cite2_urn,
    format_cts_urn,
    parse_cite2_urn,
    parse_cts_urn,
    urn_contains,
)

__version__ = "0.1.0"
