"""Flattening of citable TEI-subset XML into the reference+text model."""

from __future__ import annotations

import logging
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import DuplicateRef, InvariantViolation, MixedContent, SchemaError
from .text import TextRow, VersionMetadata
from .urn import CtsUrn, DottedRef, parse_cts_urn

log = logging.getLogger(__name__)

_XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"


@dataclass(frozen=True)
class TeiDivision:
    """One div[type=textpart]: either children or leaf text, never both."""

    subtype: str
    n: str
    children: tuple[TeiDivision, ...] = ()
    text: str = ""


@dataclass(frozen=True)
class TeiSubsetDoc:
    urn: CtsUrn
    language: str
    label: str
    divisions: tuple[TeiDivision, ...]


def _local(tag: object) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _is_textpart(elem: ET.Element) -> bool:
    return _local(elem.tag) == "div" and elem.get("type") == "textpart"


def _split_division(elem: ET.Element) -> tuple[list[ET.Element], str]:
    """Separate child textpart divs from inline text content."""
    parts: list[ET.Element] = []
    texts: list[str] = []
    if elem.text:
        texts.append(elem.text)
    for child in elem:
        if _is_textpart(child):
            parts.append(child)
        else:
            texts.append("".join(child.itertext()))
        if child.tail:
            texts.append(child.tail)
    return parts, " ".join("".join(texts).split())


def _build_division(elem: ET.Element) -> TeiDivision:
    n = elem.get("n") or ""
    if not n:
        raise SchemaError("textpart division without an n attribute")
    subtype = elem.get("subtype") or ""
    parts, text = _split_division(elem)
    if parts and text:
        raise MixedContent(f"division n={n!r} has both text and child divisions")
    return TeiDivision(
        subtype=subtype,
        n=n,
        children=tuple(_build_division(part) for part in parts),
        text=text,
    )


def parse_tei_subset(data: bytes) -> TeiSubsetDoc:
    """Read TEI-subset XML: an edition div holding nested textpart divs.

    The edition div's n attribute carries the version URN and its xml:lang
    the language tag. A teiHeader title, when present, becomes the label.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as err:
        raise SchemaError(f"not well-formed XML: {err}") from None
    edition = None
    for elem in root.iter():
        if _local(elem.tag) == "div" and elem.get("type") == "edition":
            edition = elem
            break
    if edition is None:
        raise SchemaError("no div with type=\"edition\"")
    urn_text = edition.get("n") or ""
    if not urn_text:
        raise SchemaError("edition division without an n attribute")
    urn = parse_cts_urn(urn_text)
    if urn.passage is not None:
        raise SchemaError(f"edition URN must not carry a passage: {urn_text}")
    language = edition.get(_XML_LANG) or root.get(_XML_LANG) or ""
    label = ""
    for elem in root.iter():
        if _local(elem.tag) == "title":
            label = " ".join("".join(elem.itertext()).split())
            break
    divisions = tuple(_build_division(child) for child in edition if _is_textpart(child))
    return TeiSubsetDoc(urn=urn, language=language, label=label, divisions=divisions)


def flatten_tei_subset(doc: TeiSubsetDoc) -> tuple[VersionMetadata, list[TextRow]]:
    """Depth-first flattening: one TextRow per leaf division.

    Row refs are the dot-joined n attributes along the path; rows whose
    text is empty are dropped with a warning. Every leaf must sit at the
    same depth with the same subtype path.
    """
    leaves: list[tuple[DottedRef, tuple[str, ...], str]] = []

    def walk(division: TeiDivision, path: tuple[str, ...], labels: tuple[str, ...]) -> None:
        path = path + (division.n,)
        labels = labels + (division.subtype,)
        if division.children:
            for child in division.children:
                walk(child, path, labels)
        else:
            leaves.append((path, labels, division.text))

    for division in doc.divisions:
        walk(division, (), ())

    scheme: tuple[str, ...] | None = None
    rows: list[TextRow] = []
    seen: set[DottedRef] = set()
    for ref, labels, text in leaves:
        if scheme is None:
            scheme = labels
        elif labels != scheme:
            raise InvariantViolation(
                f"citation scheme varies: {'.'.join(ref)} has depth {len(labels)}"
            )
        if ref in seen:
            raise DuplicateRef(f"duplicate reference {'.'.join(ref)}")
        seen.add(ref)
        text = unicodedata.normalize("NFC", text)
        if not text:
            log.warning("dropping empty division %s", ".".join(ref))
            continue
        rows.append(TextRow(seq=len(rows) + 1, ref=ref, text=text))

    meta = VersionMetadata(
        urn=doc.urn,
        language=doc.language,
        label=doc.label,
        scheme=scheme or (),
    )
    return meta, rows
