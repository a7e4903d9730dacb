"""Immutable catalog snapshots: passage resolution, overlap queries, reports."""

from __future__ import annotations

import json
import math
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .annotations import (
    PARSERS,
    AttributionRecord,
    SubTokenSpanAnnotation,
    SyntaxTree,
    parse_attributions,
    validate_tree,
)
from .errors import (
    DuplicateRef,
    DuplicateVersion,
    InvariantViolation,
    UnknownVersion,
)
from .text import TextRow, Token, VersionMetadata, read_text_tsv, tokenize_row
from .urn import (
    CtsUrn,
    DottedRef,
    PassageRef,
    ReferenceIndex,
    expand_range,
    format_cite2_urn,
    format_cts_urn,
    format_passage,
    parse_cts_urn,
)

Interval = tuple[tuple[int, float], tuple[int, float]]


class VersionEntry:
    """One registered text version with its index and memoized tokens."""

    def __init__(self, meta: VersionMetadata, rows: Sequence[TextRow]) -> None:
        self.meta = meta
        self.rows: tuple[TextRow, ...] = tuple(rows)
        try:
            self.index = ReferenceIndex(row.ref for row in self.rows)
        except DuplicateRef as err:
            raise InvariantViolation(str(err)) from None
        self.by_ref: dict[DottedRef, TextRow] = {row.ref: row for row in self.rows}
        # Concurrent fills recompute the same value; last write wins harmlessly.
        self._tokens: dict[DottedRef, tuple[Token, ...]] = {}

    def tokens_for(self, ref: DottedRef) -> tuple[Token, ...]:
        found = self._tokens.get(ref)
        if found is None:
            found = tuple(tokenize_row(self.by_ref[ref]))
            self._tokens[ref] = found
        return found


@dataclass(frozen=True)
class AttributionReportRow:
    role: str
    contributor: str
    count: int


def _validate_rows(meta: VersionMetadata, rows: Sequence[TextRow]) -> None:
    for n, row in enumerate(rows, start=1):
        if row.seq != n:
            raise InvariantViolation(f"row {n}: seq {row.seq}, expected {n}")
        if not row.text.strip():
            raise InvariantViolation(f"row {n}: empty text")
        if meta.scheme and len(row.ref) != len(meta.scheme):
            raise InvariantViolation(
                f"row {n}: ref depth {len(row.ref)} does not match "
                f"citation scheme depth {len(meta.scheme)}"
            )


def _passage_interval(passage: PassageRef, index: ReferenceIndex) -> Interval | None:
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


def _endpoint_token_ok(entry: VersionEntry, ref: DottedRef, token: int | None) -> bool:
    if token is None:
        return True
    row = entry.by_ref.get(ref)
    if row is None:
        return False
    return token <= len(entry.tokens_for(ref))


def _token_in_bounds(entry: VersionEntry, passage: PassageRef) -> bool:
    """False when any token qualifier exceeds its row's token count."""
    if not _endpoint_token_ok(entry, passage.start, passage.start_token):
        return False
    if passage.is_range:
        return _endpoint_token_ok(entry, passage.end, passage.end_token)  # type: ignore[arg-type]
    return True


class Catalog:
    """An immutable snapshot of versions, annotations, and attributions.

    Mutating operations return a new snapshot; the previous one is
    unaffected and stays safe for concurrent readers.
    """

    def __init__(
        self,
        versions: dict[str, VersionEntry] | None = None,
        annotations: tuple[Any, ...] = (),
        attributions: tuple[AttributionRecord, ...] = (),
    ) -> None:
        self.versions: dict[str, VersionEntry] = dict(versions or {})
        self.annotations = annotations
        self.attributions = attributions
        self.snapshot_id = uuid.uuid4().hex

    def entry_for(self, urn: CtsUrn) -> VersionEntry:
        key = format_cts_urn(urn.up_to_version())
        entry = self.versions.get(key)
        if entry is None:
            raise UnknownVersion(f"no registered version {key}")
        return entry

    def register_version(self, meta: VersionMetadata, rows: Sequence[TextRow]) -> Catalog:
        if meta.urn.passage is not None:
            raise InvariantViolation("version URN must not carry a passage")
        key = format_cts_urn(meta.urn)
        if key in self.versions:
            raise DuplicateVersion(f"version {key} already registered")
        _validate_rows(meta, rows)
        versions = dict(self.versions)
        versions[key] = VersionEntry(meta, rows)
        return Catalog(versions, self.annotations, self.attributions)

    def with_annotations(self, records: Iterable[Any]) -> Catalog:
        merged: dict[str, Any] = {r.record_key(): r for r in self.annotations}
        merged.update((r.record_key(), r) for r in records)
        return Catalog(self.versions, tuple(merged.values()), self.attributions)

    def with_attributions(self, records: Iterable[AttributionRecord]) -> Catalog:
        merged = {
            (r.role, r.person_name, r.organization_name, r.references): r
            for r in self.attributions
        }
        merged.update(
            ((r.role, r.person_name, r.organization_name, r.references), r)
            for r in records
        )
        return Catalog(self.versions, self.annotations, tuple(merged.values()))

    def resolve_passage(self, urn: CtsUrn) -> list[tuple[TextRow, tuple[Token, ...]]]:
        """Rows (with tokens) under a passage URN, in sequence order.

        A version URN with no passage resolves to every row. Token
        qualifiers select the rows that own them; granularity is the row.
        """
        entry = self.entry_for(urn)
        if urn.passage is None:
            refs = [row.ref for row in entry.rows]
        else:
            refs = expand_range(urn.passage, entry.index)
        return [(entry.by_ref[ref], entry.tokens_for(ref)) for ref in refs]

    def annotations_overlapping(self, urn: CtsUrn, kind: str | None = None) -> list[Any]:
        """Annotations whose target set intersects the queried interval.

        Targets that name an unregistered version, or that resolve to no
        row or token of a registered one, never match; they are surfaced
        by link_check instead. Results are ordered by (kind, record key).
        """
        entry = self.entry_for(urn)
        version_key = urn.version_key()
        if not entry.rows:
            return []
        if urn.passage is None:
            query: Interval | None = ((0, 0.0), (len(entry.rows) - 1, math.inf))
        else:
            if not _token_in_bounds(entry, urn.passage):
                return []
            query = _passage_interval(urn.passage, entry.index)
        if query is None:
            return []
        matches = []
        for record in self.annotations:
            if kind is not None and record.kind != kind:
                continue
            for target in record.targets():
                if target.version is None:
                    continue
                if target.version.version_key() != version_key:
                    continue
                if target.passage is None:
                    matches.append(record)
                    break
                if not _token_in_bounds(entry, target.passage):
                    continue
                interval = _passage_interval(target.passage, entry.index)
                if interval is None:
                    continue
                lo, hi = interval
                if lo <= query[1] and query[0] <= hi:
                    matches.append(record)
                    break
        matches.sort(key=lambda r: (r.kind, r.record_key()))
        return matches

    def aggregate_attributions(self) -> list[AttributionReportRow]:
        """Distinct credited references per (role, person, organization)."""
        groups: dict[tuple[str, str, str | None], set[str]] = {}
        for record in self.attributions:
            key = (record.role, record.person_name, record.organization_name)
            refs = groups.setdefault(key, set())
            refs.update(format_cite2_urn(urn) for urn in record.references)
        rows = [
            AttributionReportRow(
                role=role,
                contributor=f"{person}, {organization}" if organization else person,
                count=len(refs),
            )
            for (role, person, organization), refs in groups.items()
        ]
        rows.sort(key=lambda row: (row.role, row.contributor))
        return rows

    def link_check(self) -> list[str]:
        """Diagnostics for targets and credits that resolve to nothing.

        Covers annotation targets naming a registered version but no row
        or token of it, credited reference URNs matching no loaded
        annotation record, sub-token spans outside their row's text, and
        lenient tree validation reports.
        """
        diagnostics: list[str] = []
        for record in self.annotations:
            for target in record.targets():
                if target.version is None or target.passage is None:
                    continue
                key = format_cts_urn(target.version)
                entry = self.versions.get(key)
                if entry is None:
                    continue
                passage = target.passage
                where = f"{record.kind} {record.record_key()}"
                interval = _passage_interval(passage, entry.index)
                if interval is None:
                    diagnostics.append(
                        f"{where}: dangling target {format_passage(passage)} in {key}"
                    )
                elif not _token_in_bounds(entry, passage):
                    diagnostics.append(
                        f"{where}: dangling token {format_passage(passage)} in {key}"
                    )
            if isinstance(record, SubTokenSpanAnnotation) and record.version is not None:
                entry = self.versions.get(format_cts_urn(record.version))
                row = entry.by_ref.get(record.ref) if entry else None
                if row is not None:
                    for span in record.spans:
                        if span.end > len(row.text):
                            diagnostics.append(
                                f"{record.kind} {record.record_key()}: span "
                                f"[{span.start}, {span.end}) outside row text "
                                f"of length {len(row.text)}"
                            )
            if isinstance(record, SyntaxTree):
                for finding in validate_tree(record, mode="lenient"):
                    diagnostics.append(f"{record.kind} {record.record_key()}: {finding}")
        loaded_keys = {
            record.record_key()
            for record in self.annotations
            if record.record_urn is not None
        }
        for record in self.attributions:
            for reference in record.references:
                key = format_cite2_urn(reference)
                if key not in loaded_keys:
                    diagnostics.append(
                        f"attribution {record.role} {record.contributor()}: "
                        f"unmatched credit {key}"
                    )
        return diagnostics

    def library_entries(self) -> list[dict[str, Any]]:
        out = []
        for key in sorted(self.versions):
            entry = self.versions[key]
            out.append(
                {
                    "urn": key,
                    "label": entry.meta.label,
                    "language": entry.meta.language,
                    "row_count": len(entry.rows),
                }
            )
        return out


# ---------------------------------------------------------------------------
# On-disk persistence: a directory tree mirroring the ingestion formats.


def _meta_to_json(meta: VersionMetadata) -> dict[str, Any]:
    return {
        "urn": format_cts_urn(meta.urn),
        "language": meta.language,
        "label": meta.label,
        "scheme": list(meta.scheme),
    }


def _meta_from_json(payload: dict[str, Any]) -> VersionMetadata:
    return VersionMetadata(
        urn=parse_cts_urn(payload["urn"]),
        language=payload.get("language", ""),
        label=payload.get("label", ""),
        scheme=tuple(payload.get("scheme", [])),
    )


def save_version(data_dir: Path, meta: VersionMetadata, rows: Sequence[TextRow]) -> Path:
    """Write texts/<work>.tsv and its metadata sidecar; replaces any old copy."""
    from .text import write_text_tsv

    texts = data_dir / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    base = meta.urn.work_component()
    # Sidecar first: an orphan sidecar is ignored by the loader, but a TSV
    # without its sidecar would fail the next load.
    (texts / f"{base}.meta.json").write_text(
        json.dumps(_meta_to_json(meta), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    path = texts / f"{base}.tsv"
    path.write_bytes(write_text_tsv(rows))
    return path


def save_annotation_file(
    data_dir: Path,
    kind: str,
    basename: str,
    data: bytes,
    default_urn: str | None = None,
) -> Path:
    target_dir = data_dir / "annotations" / kind
    target_dir.mkdir(parents=True, exist_ok=True)
    path = target_dir / basename
    path.write_bytes(data)
    sidecar = target_dir / f"{basename}.meta.json"
    if default_urn:
        sidecar.write_text(
            json.dumps({"urn": default_urn}) + "\n", encoding="utf-8"
        )
    elif sidecar.exists():
        sidecar.unlink()
    return path


def save_attribution_file(data_dir: Path, basename: str, data: bytes) -> Path:
    target_dir = data_dir / "attributions"
    target_dir.mkdir(parents=True, exist_ok=True)
    path = target_dir / basename
    path.write_bytes(data)
    return path


def load_catalog(data_dir: Path) -> Catalog:
    """Rebuild a catalog snapshot from a persistence directory.

    Files are read in sorted order; records sharing a key replace earlier
    ones, which keeps re-ingestion idempotent.
    """
    catalog = Catalog()
    texts = data_dir / "texts"
    if texts.is_dir():
        for path in sorted(texts.glob("*.tsv")):
            sidecar = texts / f"{path.stem}.meta.json"
            if not sidecar.exists():
                raise InvariantViolation(f"{path.name}: missing metadata sidecar")
            meta = _meta_from_json(json.loads(sidecar.read_text(encoding="utf-8")))
            rows = read_text_tsv(path.read_bytes())
            catalog = catalog.register_version(meta, rows)
    annotations_dir = data_dir / "annotations"
    if annotations_dir.is_dir():
        records = []
        for kind_dir in sorted(p for p in annotations_dir.iterdir() if p.is_dir()):
            parser = PARSERS.get(kind_dir.name)
            if parser is None:
                raise InvariantViolation(f"unknown annotation kind {kind_dir.name!r}")
            for path in sorted(p for p in kind_dir.iterdir() if p.is_file()):
                if path.name.endswith(".meta.json"):
                    continue
                parsed = parser(path.read_bytes())
                sidecar = kind_dir / f"{path.name}.meta.json"
                if sidecar.exists():
                    payload = json.loads(sidecar.read_text(encoding="utf-8"))
                    default = parse_cts_urn(payload["urn"])
                    parsed = [
                        r.bound_to(default) if hasattr(r, "bound_to") else r
                        for r in parsed
                    ]
                records.extend(parsed)
        catalog = catalog.with_annotations(records)
    attributions_dir = data_dir / "attributions"
    if attributions_dir.is_dir():
        records = []
        for path in sorted(p for p in attributions_dir.iterdir() if p.is_file()):
            records.extend(parse_attributions(path.read_bytes()))
        catalog = catalog.with_attributions(records)
    return catalog
