"""Flat reference+text corpus model: TSV transport and row tokenization."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import BadColumnCount, NonMonotoneSeq, TokenOutOfRange, UnknownReference
from .urn import CtsUrn, DottedRef, format_veref, parse_veref

WORD = "word"
PUNCTUATION = "punctuation"

_CHUNK = re.compile(r"\S+")

# Apostrophe-like marks are never detached: they carry elision ("ἄλγε'")
# and word-internal contraction, not sentence punctuation.
_APOSTROPHES = frozenset("'’ʼ᾽´")


@dataclass(frozen=True)
class TextRow:
    """One citable chunk: sequence number, dotted reference, text."""

    seq: int
    ref: DottedRef
    text: str


@dataclass(frozen=True)
class VersionMetadata:
    """Catalog entry for one text version."""

    urn: CtsUrn
    language: str
    label: str
    scheme: tuple[str, ...]


@dataclass(frozen=True)
class Token:
    """One tokenizer output unit, addressable as a veRef ("1.1.t2")."""

    ref: DottedRef
    index: int
    value: str
    kind: str
    start: int
    end: int

    @property
    def ve_ref(self) -> str:
        return format_veref(self.ref, self.index)


def _is_detachable(ch: str) -> bool:
    return ch not in _APOSTROPHES and unicodedata.category(ch).startswith("P")


def tokenize_row(row: TextRow) -> list[Token]:
    """Split a row into word and punctuation tokens with character spans.

    Chunks are split on Unicode whitespace; leading and trailing punctuation
    of each chunk becomes separate single-character punctuation tokens.
    Interleaving token values with the skipped characters reproduces the
    row text exactly.
    """
    tokens: list[Token] = []

    def emit(value: str, kind: str, start: int) -> None:
        tokens.append(
            Token(
                ref=row.ref,
                index=len(tokens) + 1,
                value=value,
                kind=kind,
                start=start,
                end=start + len(value),
            )
        )

    for m in _CHUNK.finditer(row.text):
        chunk = m.group()
        base = m.start()
        lo, hi = 0, len(chunk)
        while lo < hi and _is_detachable(chunk[lo]):
            lo += 1
        trail_at = hi
        while trail_at > lo and _is_detachable(chunk[trail_at - 1]):
            trail_at -= 1
        for i in range(lo):
            emit(chunk[i], PUNCTUATION, base + i)
        if lo < trail_at:
            emit(chunk[lo:trail_at], WORD, base + lo)
        for i in range(trail_at, hi):
            emit(chunk[i], PUNCTUATION, base + i)
    return tokens


def tokenize_version(rows: Sequence[TextRow]) -> dict[DottedRef, list[Token]]:
    return {row.ref: tokenize_row(row) for row in rows}


def token_by_veref(tokenized: Mapping[DottedRef, Sequence[Token]], ve_ref: str) -> Token:
    """Resolve a veRef string against a tokenized version.

    Raises UnknownReference when the dotted reference does not exist and
    TokenOutOfRange when the token index exceeds the row's token count.
    """
    ref, index = parse_veref(ve_ref)
    tokens = tokenized.get(ref)
    if tokens is None:
        raise UnknownReference(f"unknown reference {'.'.join(ref)}")
    if index > len(tokens):
        raise TokenOutOfRange(f"{ve_ref}: row has {len(tokens)} tokens")
    return tokens[index - 1]


def write_text_tsv(rows: Sequence[TextRow]) -> bytes:
    """Serialize rows as seq<TAB>ref<TAB>text lines, LF-terminated, no header."""
    lines: list[str] = []
    prev_seq = 0
    for n, row in enumerate(rows, start=1):
        if row.seq <= prev_seq:
            raise NonMonotoneSeq(f"row {n}: seq {row.seq} after {prev_seq}")
        prev_seq = row.seq
        if "\t" in row.text or "\n" in row.text or "\r" in row.text:
            raise BadColumnCount(f"row {n}: text contains tab or newline")
        ref = ".".join(row.ref)
        if "\t" in ref or "\n" in ref:
            raise BadColumnCount(f"row {n}: reference contains tab or newline")
        lines.append(f"{row.seq}\t{ref}\t{row.text}\n")
    return "".join(lines).encode("utf-8")


def read_text_tsv(data: bytes) -> list[TextRow]:
    """Parse canonical text TSV bytes; text is NFC-normalized on the way in."""
    text = data.decode("utf-8")
    if "\r" in text:
        raise BadColumnCount("CR line endings are not allowed")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    rows: list[TextRow] = []
    prev_seq = 0
    for lineno, line in enumerate(lines, start=1):
        columns = line.split("\t")
        if len(columns) != 3:
            raise BadColumnCount(f"at line {lineno}: expected 3 columns, got {len(columns)}")
        seq_text, ref_text, row_text = columns
        try:
            seq = int(seq_text)
        except ValueError:
            raise NonMonotoneSeq(f"at line {lineno}: seq {seq_text!r} is not an integer") from None
        if seq <= prev_seq:
            raise NonMonotoneSeq(f"at line {lineno}: seq {seq} after {prev_seq}")
        prev_seq = seq
        ref = tuple(ref_text.split("."))
        if any(part == "" for part in ref):
            raise BadColumnCount(f"at line {lineno}: empty reference component")
        row_text = unicodedata.normalize("NFC", row_text)
        if not row_text.strip():
            raise BadColumnCount(f"at line {lineno}: empty text column")
        rows.append(TextRow(seq=seq, ref=ref, text=row_text))
    return rows
