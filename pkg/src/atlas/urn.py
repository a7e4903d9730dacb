"""CTS and CITE2 URN parsing, formatting, containment, and range expansion."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    BadVeRef,
    DuplicateRef,
    IndexRequired,
    InvertedRange,
    MalformedUrn,
    UnknownReference,
)

# A dotted citation reference ("1.1.2") as a tuple of components.
DottedRef = tuple[str, ...]

# Token extension: '.t' + digits as the final dotted component ("1.1.t4").
_TOKEN_PART = re.compile(r"^t([0-9]+)$")
_WHITESPACE = re.compile(r"\s")


def _check_component(value: str, what: str) -> str:
    if not value:
        raise MalformedUrn(f"empty {what} component")
    if ":" in value or _WHITESPACE.search(value):
        raise MalformedUrn(f"illegal character in {what} component: {value!r}")
    return value


@dataclass(frozen=True)
class PassageRef:
    """A point or range citation, optionally token-qualified at either end."""

    start: DottedRef
    end: DottedRef | None = None
    start_token: int | None = None
    end_token: int | None = None

    def __post_init__(self) -> None:
        if not self.start or any(not part for part in self.start):
            raise MalformedUrn("passage components must be non-empty")
        if self.end is not None and (not self.end or any(not p for p in self.end)):
            raise MalformedUrn("passage components must be non-empty")
        if self.end is None and self.end_token is not None:
            raise MalformedUrn("end token without range end")
        for token in (self.start_token, self.end_token):
            if token is not None and token < 1:
                raise MalformedUrn("token index must be >= 1")

    @property
    def is_range(self) -> bool:
        return self.end is not None


@dataclass(frozen=True)
class CtsUrn:
    """Hierarchical citation: namespace / text group / work / version / passage."""

    namespace: str
    text_group: str
    work: str | None = None
    version: str | None = None
    exemplar: str | None = None
    passage: PassageRef | None = None

    def __post_init__(self) -> None:
        if self.version is not None and self.work is None:
            raise MalformedUrn("version requires a work")
        if self.exemplar is not None and self.version is None:
            raise MalformedUrn("exemplar requires a version")
        if self.passage is not None and self.work is None:
            raise MalformedUrn("passage requires a work")

    def work_component(self) -> str:
        """The dotted work-hierarchy part ("tlg0012.tlg001.perseus-grc2")."""
        parts = [self.text_group, self.work, self.version, self.exemplar]
        return ".".join(p for p in parts if p is not None)

    def version_key(self) -> tuple[str | None, ...]:
        """Identity of the text this URN cites, passage excluded."""
        return (self.namespace, self.text_group, self.work, self.version, self.exemplar)

    def up_to_version(self) -> CtsUrn:
        return CtsUrn(self.namespace, self.text_group, self.work, self.version, self.exemplar)


@dataclass(frozen=True)
class Cite2Urn:
    """Identifier for an object in a versioned non-text collection."""

    namespace: str
    collection: str
    version: str
    object_id: str


def _parse_passage_point(piece: str) -> tuple[DottedRef, int | None]:
    parts = piece.split(".")
    for part in parts:
        if part == "" or _WHITESPACE.search(part):
            raise MalformedUrn(f"bad passage component in {piece!r}")
    token: int | None = None
    # A lone "t4" is a literal citation component; only ".t4" is a token ref.
    if len(parts) > 1:
        m = _TOKEN_PART.match(parts[-1])
        if m:
            token = int(m.group(1))
            if token < 1:
                raise MalformedUrn(f"token index must be >= 1 in {piece!r}")
            parts = parts[:-1]
    return tuple(parts), token


def parse_passage(text: str) -> PassageRef:
    """Parse the passage component of a CTS URN ("1.1", "1.1-1.7", "1.1.t4")."""
    pieces = text.split("-")
    if len(pieces) == 1:
        start, start_token = _parse_passage_point(pieces[0])
        return PassageRef(start=start, start_token=start_token)
    if len(pieces) == 2:
        start, start_token = _parse_passage_point(pieces[0])
        end, end_token = _parse_passage_point(pieces[1])
        return PassageRef(start=start, end=end, start_token=start_token, end_token=end_token)
    raise MalformedUrn(f"too many range separators in passage {text!r}")


def format_passage(passage: PassageRef) -> str:
    out = ".".join(passage.start)
    if passage.start_token is not None:
        out += f".t{passage.start_token}"
    if passage.end is not None:
        out += "-" + ".".join(passage.end)
        if passage.end_token is not None:
            out += f".t{passage.end_token}"
    return out


def parse_cts_urn(text: str) -> CtsUrn:
    """Parse a CTS URN string.

    Raises MalformedUrn for a wrong scheme, an empty component, or a URN
    with no work hierarchy. A trailing empty passage (":…:") is dropped.
    """
    parts = text.split(":")
    if len(parts) < 2 or parts[0] != "urn" or parts[1] != "cts":
        raise MalformedUrn(f"not a urn:cts reference: {text!r}")
    if len(parts) == 5 and parts[4] == "":
        parts = parts[:4]
    if len(parts) < 4:
        raise MalformedUrn(f"no work hierarchy in {text!r}")
    if len(parts) > 5:
        raise MalformedUrn(f"too many ':' separators in {text!r}")
    namespace = _check_component(parts[2], "namespace")
    hierarchy = parts[3].split(".")
    if len(hierarchy) > 4:
        raise MalformedUrn(f"work hierarchy too deep in {text!r}")
    for part in hierarchy:
        _check_component(part, "work hierarchy")
    padded = hierarchy + [None] * (4 - len(hierarchy))
    passage = parse_passage(parts[4]) if len(parts) == 5 else None
    return CtsUrn(
        namespace=namespace,
        text_group=padded[0],
        work=padded[1],
        version=padded[2],
        exemplar=padded[3],
        passage=passage,
    )


def format_cts_urn(urn: CtsUrn) -> str:
    out = f"urn:cts:{urn.namespace}:{urn.work_component()}"
    if urn.passage is not None:
        out += ":" + format_passage(urn.passage)
    return out


def parse_cite2_urn(text: str) -> Cite2Urn:
    """Parse a CITE2 URN ("urn:cite2:exploreHomer:senses.atlas_v1:1.117")."""
    parts = text.split(":")
    if len(parts) < 2 or parts[0] != "urn" or parts[1] != "cite2":
        raise MalformedUrn(f"not a urn:cite2 reference: {text!r}")
    if len(parts) != 5:
        raise MalformedUrn(f"expected 5 ':' parts in {text!r}")
    namespace = _check_component(parts[2], "namespace")
    collection_part = parts[3]
    if "." not in collection_part:
        raise MalformedUrn(f"collection lacks '.version' in {text!r}")
    collection, version = collection_part.split(".", 1)
    _check_component(collection, "collection")
    _check_component(version, "collection version")
    object_id = _check_component(parts[4], "object id")
    return Cite2Urn(namespace=namespace, collection=collection, version=version, object_id=object_id)


def format_cite2_urn(urn: Cite2Urn) -> str:
    return f"urn:cite2:{urn.namespace}:{urn.collection}.{urn.version}:{urn.object_id}"


def parse_veref(text: str) -> tuple[DottedRef, int]:
    """Split a token reference like "1.1.t4" into (ref, token index)."""
    parts = text.split(".")
    if len(parts) < 2:
        raise BadVeRef(f"no token extension in {text!r}")
    m = _TOKEN_PART.match(parts[-1])
    if not m:
        raise BadVeRef(f"no token extension in {text!r}")
    index = int(m.group(1))
    if index < 1:
        raise BadVeRef(f"token index must be >= 1 in {text!r}")
    ref = tuple(parts[:-1])
    if any(part == "" or _WHITESPACE.search(part) for part in ref):
        raise BadVeRef(f"bad reference component in {text!r}")
    return ref, index


def format_veref(ref: DottedRef, index: int) -> str:
    return ".".join(ref) + f".t{index}"


class ReferenceIndex:
    """Document-order index over the leaf references of one text version."""

    def __init__(self, refs: Iterable[DottedRef]) -> None:
        self._refs: tuple[DottedRef, ...] = tuple(refs)
        self._pos: dict[DottedRef, int] = {}
        for pos, ref in enumerate(self._refs):
            if ref in self._pos:
                raise DuplicateRef(f"duplicate reference {'.'.join(ref)}")
            self._pos[ref] = pos
        # Prefix -> (first, last) leaf position, leaves included as their own prefix.
        self._span: dict[DottedRef, tuple[int, int]] = {}
        for pos, ref in enumerate(self._refs):
            for depth in range(1, len(ref) + 1):
                prefix = ref[:depth]
                found = self._span.get(prefix)
                if found is None:
                    self._span[prefix] = (pos, pos)
                else:
                    self._span[prefix] = (min(found[0], pos), max(found[1], pos))

    def __len__(self) -> int:
        return len(self._refs)

    def __iter__(self) -> Iterator[DottedRef]:
        return iter(self._refs)

    @property
    def refs(self) -> tuple[DottedRef, ...]:
        return self._refs

    def position(self, ref: DottedRef) -> int | None:
        return self._pos.get(ref)

    def span_under(self, prefix: DottedRef) -> tuple[int, int] | None:
        """Positions of the first and last leaf under prefix, or None."""
        return self._span.get(prefix)

    def at(self, pos: int) -> DottedRef:
        return self._refs[pos]


def _is_prefix(prefix: DottedRef, ref: DottedRef) -> bool:
    return len(prefix) <= len(ref) and ref[: len(prefix)] == prefix


def _item_interval(
    passage: PassageRef, index: ReferenceIndex
) -> tuple[tuple[int, float], tuple[int, float]] | None:
    """Map a passage onto (position, token) bounds; None when outside the index.

    None also covers an inverted range: such a passage selects nothing.
    """
    start_span = index.span_under(passage.start)
    if start_span is None:
        return None
    if passage.is_range:
        end_span = index.span_under(passage.end)  # type: ignore[arg-type]
        if end_span is None:
            return None
        lo = (start_span[0], float(passage.start_token) if passage.start_token else 0.0)
        hi = (end_span[1], float(passage.end_token) if passage.end_token else math.inf)
        if lo > hi:
            return None
        return lo, hi
    token = passage.start_token
    if token is not None:
        return (start_span[0], float(token)), (start_span[1], float(token))
    return (start_span[0], 0.0), (start_span[1], math.inf)


def urn_contains(container: CtsUrn, item: CtsUrn, index: ReferenceIndex | None = None) -> bool:
    """True iff item's passage lies within container's passage.

    Both URNs must cite the same version, else False. A container without
    a passage contains everything in the version. Range containment that
    cannot be settled by hierarchical prefixes needs a ReferenceIndex.
    """
    if container.version_key() != item.version_key():
        return False
    if container.passage is None:
        return True
    if item.passage is None:
        return False
    con = container.passage
    itm = item.passage
    if not con.is_range:
        if con.start_token is not None:
            return (
                not itm.is_range
                and itm.start == con.start
                and itm.start_token == con.start_token
            )
        if itm.is_range:
            return _is_prefix(con.start, itm.start) and _is_prefix(con.start, itm.end)  # type: ignore[arg-type]
        return _is_prefix(con.start, itm.start)
    if index is None:
        # Prefix shortcut: anything wholly under a token-free endpoint is inside.
        for endpoint, token in ((con.start, con.start_token), (con.end, con.end_token)):
            if token is not None:
                if (
                    not itm.is_range
                    and itm.start == endpoint
                    and itm.start_token == token
                ):
                    return True
            elif itm.is_range:
                if _is_prefix(endpoint, itm.start) and _is_prefix(endpoint, itm.end):  # type: ignore[arg-type]
                    return True
            elif _is_prefix(endpoint, itm.start):
                return True
        raise IndexRequired("range containment needs a reference index")
    con_lo_span = index.span_under(con.start)
    con_hi_span = index.span_under(con.end)  # type: ignore[arg-type]
    if con_lo_span is None or con_hi_span is None:
        missing = con.start if con_lo_span is None else con.end
        raise UnknownReference(f"range endpoint {'.'.join(missing)} not in index")  # type: ignore[arg-type]
    con_lo = (con_lo_span[0], float(con.start_token) if con.start_token else 0.0)
    con_hi = (con_hi_span[1], float(con.end_token) if con.end_token else math.inf)
    if con_lo > con_hi:
        # An inverted container selects nothing, so it contains nothing.
        return False
    interval = _item_interval(itm, index)
    if interval is None:
        return False
    itm_lo, itm_hi = interval
    return con_lo <= itm_lo and itm_hi <= con_hi


def expand_range(passage: PassageRef, index: ReferenceIndex) -> list[DottedRef]:
    """Inclusive document-order leaf references from start to end.

    A point passage expands to every leaf under it. Token qualifiers do
    not narrow the expansion; granularity is the leaf reference.
    """
    start_span = index.span_under(passage.start)
    if start_span is None:
        raise UnknownReference(f"unknown reference {'.'.join(passage.start)}")
    end = passage.end if passage.end is not None else passage.start
    end_span = index.span_under(end)
    if end_span is None:
        raise UnknownReference(f"unknown reference {'.'.join(end)}")
    lo, hi = start_span[0], end_span[1]
    if lo > hi:
        raise InvertedRange(
            f"{'.'.join(end)} precedes {'.'.join(passage.start)} in document order"
        )
    return [index.at(pos) for pos in range(lo, hi + 1)]
