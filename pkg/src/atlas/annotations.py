"""Parsers for the standoff annotation formats and attribution records."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

from .errors import (
    BadColumnCount,
    BadVeRef,
    ColumnCountError,
    CyclicHeads,
    DanglingHead,
    DuplicateEntryId,
    MalformedUrn,
    NonContiguousIndices,
    OverlappingSpans,
    SchemaError,
)
from .urn import (
    Cite2Urn,
    CtsUrn,
    DottedRef,
    PassageRef,
    format_cite2_urn,
    format_cts_urn,
    format_veref,
    parse_cite2_urn,
    parse_cts_urn,
    parse_veref,
)

KIND_COMMENTARY = "commentary"
KIND_TEXTUAL_NOTE = "textual-note"
KIND_ALIGNMENT = "alignment"
KIND_SYNTAX_TREE = "syntax-tree"
KIND_CONLLU = "conllu"
KIND_DICTIONARY = "dictionary-citation"
KIND_AUDIO = "audio"
KIND_METRICAL = "metrical"
KIND_GRAMMAR = "grammar"

ANNOTATION_KINDS = (
    KIND_COMMENTARY,
    KIND_TEXTUAL_NOTE,
    KIND_ALIGNMENT,
    KIND_SYNTAX_TREE,
    KIND_CONLLU,
    KIND_DICTIONARY,
    KIND_AUDIO,
    KIND_METRICAL,
    KIND_GRAMMAR,
)

# Boundary markers may coincide with the weight spans they delimit.
FOOT_BOUNDARY = "foot-boundary"


@dataclass(frozen=True)
class Target:
    """One passage address an annotation points at.

    version is the version-level URN, or None when the source carried a
    bare reference that names no version.
    """

    version: CtsUrn | None
    passage: PassageRef | None


def _load_array(data: bytes, what: str) -> list[dict[str, Any]]:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise SchemaError(f"{what}: {err}") from None
    if not isinstance(payload, list):
        raise SchemaError(f"{what}: expected a JSON array")
    for obj in payload:
        if not isinstance(obj, dict):
            raise SchemaError(f"{what}: expected objects, got {type(obj).__name__}")
    return payload


def _require(obj: dict[str, Any], key: str, what: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{what}: missing {key!r}")
    return obj[key]


def _string(value: Any, what: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"{what}: expected a string")
    return value


def _string_list(value: Any, what: str) -> list[str]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise SchemaError(f"{what}: expected a list of strings")
    return value


def _version_and_passage(urn: CtsUrn) -> Target:
    return Target(version=urn.up_to_version(), passage=urn.passage)


def _parse_bound_ref(text: str, what: str) -> tuple[CtsUrn | None, DottedRef]:
    """A point reference, either a full CTS URN or a bare dotted ref."""
    if text.startswith("urn:cts:"):
        urn = parse_cts_urn(text)
        if urn.passage is None or urn.passage.is_range or urn.passage.start_token:
            raise SchemaError(f"{what}: expected a point reference, got {text!r}")
        return urn.up_to_version(), urn.passage.start
    ref = tuple(text.split("."))
    if any(part == "" for part in ref):
        raise SchemaError(f"{what}: bad reference {text!r}")
    return None, ref


# ---------------------------------------------------------------------------
# Commentary and textual notes


@dataclass(frozen=True)
class Witness:
    value: str
    label: str


@dataclass(frozen=True)
class CommentaryNote:
    urn: Cite2Urn
    references: tuple[CtsUrn, ...]
    body_html: str
    fragment: str
    ve_refs: tuple[tuple[DottedRef, int], ...]
    idx: str | int | None
    kind: str
    witnesses: tuple[Witness, ...]
    raw: dict[str, Any] = field(repr=False)

    @property
    def record_urn(self) -> Cite2Urn:
        return self.urn

    def record_key(self) -> str:
        return format_cite2_urn(self.urn)

    def targets(self) -> tuple[Target, ...]:
        out = [_version_and_passage(ref) for ref in self.references]
        for ref, token in self.ve_refs:
            version = self._owner_version(ref)
            out.append(Target(version, PassageRef(start=ref, start_token=token)))
        return tuple(out)

    def _owner_version(self, ref: DottedRef) -> CtsUrn | None:
        for reference in self.references:
            if _reference_covers(reference, ref):
                return reference.up_to_version()
        return None

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def _reference_covers(reference: CtsUrn, ref: DottedRef) -> bool:
    passage = reference.passage
    if passage is None:
        return True
    heads = [passage.start] + ([passage.end] if passage.end is not None else [])
    return any(ref[: len(head)] == head for head in heads)


def parse_commentary(data: bytes) -> list[CommentaryNote]:
    """Parse commentary JSON; notes carrying witnesses are textual notes."""
    notes = []
    for obj in _load_array(data, "commentary"):
        urn = parse_cite2_urn(_string(_require(obj, "urn", "commentary note"), "urn"))
        reference_texts = _string_list(
            _require(obj, "references", "commentary note"), "references"
        )
        if not reference_texts:
            raise SchemaError("commentary note: references must be non-empty")
        references = tuple(parse_cts_urn(text) for text in reference_texts)
        ve_refs: list[tuple[DottedRef, int]] = []
        for text in _string_list(obj.get("ve_refs", []), "ve_refs"):
            ref, token = parse_veref(text)
            if not any(_reference_covers(reference, ref) for reference in references):
                raise BadVeRef(f"{text} lies under none of the note's references")
            ve_refs.append((ref, token))
        witnesses = []
        has_witnesses = "witnesses" in obj
        for item in obj.get("witnesses", []):
            if not isinstance(item, dict):
                raise SchemaError("witnesses: expected objects")
            witnesses.append(
                Witness(
                    value=_string(_require(item, "value", "witness"), "witness value"),
                    label=_string(item.get("label", ""), "witness label"),
                )
            )
        notes.append(
            CommentaryNote(
                urn=urn,
                references=references,
                body_html=_string(obj.get("commentary", ""), "commentary"),
                fragment=_string(obj.get("fragment", ""), "fragment"),
                ve_refs=tuple(ve_refs),
                idx=obj.get("idx"),
                kind=KIND_TEXTUAL_NOTE if has_witnesses else KIND_COMMENTARY,
                witnesses=tuple(witnesses),
                raw=obj,
            )
        )
    return notes


# ---------------------------------------------------------------------------
# Translation alignments


@dataclass(frozen=True)
class AlignmentRecord:
    urn: Cite2Urn
    relations: tuple[tuple[CtsUrn, ...], ...]
    raw: dict[str, Any] = field(repr=False)

    kind = KIND_ALIGNMENT

    @property
    def record_urn(self) -> Cite2Urn:
        return self.urn

    def record_key(self) -> str:
        return format_cite2_urn(self.urn)

    def targets(self) -> tuple[Target, ...]:
        return tuple(
            _version_and_passage(token) for group in self.relations for token in group
        )

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def parse_alignments(data: bytes) -> list[AlignmentRecord]:
    records = []
    for obj in _load_array(data, "alignment"):
        urn = parse_cite2_urn(_string(_require(obj, "urn", "alignment record"), "urn"))
        relations_raw = _require(obj, "relations", "alignment record")
        if not isinstance(relations_raw, list):
            raise SchemaError("alignment record: relations must be a list of groups")
        relations = []
        for group in relations_raw:
            tokens = []
            for text in _string_list(group, "alignment group"):
                token_urn = parse_cts_urn(text)
                if token_urn.passage is None or token_urn.passage.start_token is None:
                    raise MalformedUrn(f"alignment target is not token-level: {text}")
                tokens.append(token_urn)
            relations.append(tuple(tokens))
        records.append(AlignmentRecord(urn=urn, relations=tuple(relations), raw=obj))
    return records


def alignment_pairs(record: AlignmentRecord) -> list[tuple[CtsUrn, CtsUrn]]:
    """Cross product of each adjacent pair of groups."""
    pairs = []
    for left, right in zip(record.relations, record.relations[1:]):
        pairs.extend((a, b) for a in left for b in right)
    return pairs


# ---------------------------------------------------------------------------
# Syntax trees


@dataclass(frozen=True)
class TreeWord:
    id: int
    value: str
    head_id: int
    relation: str
    lemma: str
    tag: str


@dataclass(frozen=True)
class SyntaxTree:
    urn: Cite2Urn
    treebank_id: str
    words: tuple[TreeWord, ...]
    references: tuple[CtsUrn, ...]
    raw: dict[str, Any] = field(repr=False)

    kind = KIND_SYNTAX_TREE

    @property
    def record_urn(self) -> Cite2Urn:
        return self.urn

    def record_key(self) -> str:
        return format_cite2_urn(self.urn)

    def targets(self) -> tuple[Target, ...]:
        return tuple(_version_and_passage(ref) for ref in self.references)

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def _word_int(obj: dict[str, Any], key: str, minimum: int) -> int:
    value = _require(obj, key, "tree word")
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise SchemaError(f"tree word: {key} must be an integer >= {minimum}")
    return value


def parse_treebank_json(data: bytes) -> list[SyntaxTree]:
    """Parse treebank JSON; both treebank_id spellings seen in the wild are read."""
    trees = []
    for obj in _load_array(data, "treebank"):
        urn = parse_cite2_urn(_string(_require(obj, "urn", "syntax tree"), "urn"))
        treebank_id = obj.get("treebank_id", obj.get("trebank_id", ""))
        words = []
        seen_ids: set[int] = set()
        words_raw = _require(obj, "words", "syntax tree")
        if not isinstance(words_raw, list):
            raise SchemaError("syntax tree: words must be a list")
        for item in words_raw:
            if not isinstance(item, dict):
                raise SchemaError("syntax tree: words must be objects")
            word = TreeWord(
                id=_word_int(item, "id", 1),
                value=_string(item.get("value", ""), "word value"),
                head_id=_word_int(item, "head_id", 0),
                relation=_string(item.get("relation", ""), "word relation"),
                lemma=_string(item.get("lemma", ""), "word lemma"),
                tag=_string(item.get("tag", ""), "word tag"),
            )
            if word.id in seen_ids:
                raise SchemaError(f"syntax tree: duplicate word id {word.id}")
            seen_ids.add(word.id)
            words.append(word)
        references = tuple(
            parse_cts_urn(text)
            for text in _string_list(obj.get("references", []), "references")
        )
        trees.append(
            SyntaxTree(
                urn=urn,
                treebank_id=_string(treebank_id, "treebank_id"),
                words=tuple(words),
                references=references,
                raw=obj,
            )
        )
    return trees


def validate_tree(tree: SyntaxTree, mode: str = "strict") -> list[str]:
    """Check that head_ids form a forest rooted at the 0 sentinel.

    Lenient mode returns diagnostics; strict mode raises DanglingHead or
    CyclicHeads on the first problem found.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown validation mode {mode!r}")
    diagnostics: list[str] = []
    ids = {word.id for word in tree.words}
    dangling: dict[int, list[int]] = {}
    for word in tree.words:
        if word.head_id != 0 and word.head_id not in ids:
            dangling.setdefault(word.head_id, []).append(word.id)
    for head_id in sorted(dangling):
        referrers = ", ".join(str(i) for i in dangling[head_id])
        diagnostics.append(f"DanglingHead {head_id} (head of words {referrers})")
    if mode == "strict" and diagnostics:
        raise DanglingHead(diagnostics[0])
    head_of = {word.id: word.head_id for word in tree.words}
    state: dict[int, int] = {}  # 1 = on current path, 2 = known acyclic
    for word in tree.words:
        path = []
        current = word.id
        while current != 0 and current in head_of and state.get(current) != 2:
            if state.get(current) == 1:
                cycle = path[path.index(current):] + [current]
                diagnostics.append(
                    "CyclicHeads " + " -> ".join(str(i) for i in cycle)
                )
                if mode == "strict":
                    raise CyclicHeads(diagnostics[-1])
                break
            state[current] = 1
            path.append(current)
            current = head_of[current]
        for visited in path:
            state[visited] = 2
    return diagnostics


# ---------------------------------------------------------------------------
# ConLL-U sentence analyses


@dataclass(frozen=True)
class ConlluToken:
    index: int
    form: str
    upos: str | None
    xpos: str | None
    feats: dict[str, str]
    lemma: str | None
    deprel: str | None
    head: int
    misc: str | None


@dataclass(frozen=True)
class SentenceAnalysis:
    version: CtsUrn | None
    ref: DottedRef
    tokens: tuple[ConlluToken, ...]

    kind = KIND_CONLLU
    record_urn = None

    def record_key(self) -> str:
        version = format_cts_urn(self.version) if self.version else ""
        return f"conllu:{version}:{'.'.join(self.ref)}"

    def bound_to(self, version: CtsUrn) -> SentenceAnalysis:
        if self.version is not None:
            return self
        return replace(self, version=version.up_to_version())

    def targets(self) -> tuple[Target, ...]:
        return (Target(self.version, PassageRef(start=self.ref)),)

    def to_jsonable(self) -> dict[str, Any]:
        urn = None
        if self.version is not None:
            urn = format_cts_urn(
                replace(self.version, passage=PassageRef(start=self.ref))
            )
        return {
            "ref": ".".join(self.ref),
            "urn": urn,
            "tokens": [
                {
                    "index": t.index,
                    "form": t.form,
                    "upos": t.upos,
                    "xpos": t.xpos,
                    "feats": t.feats,
                    "lemma": t.lemma,
                    "deprel": t.deprel,
                    "head": t.head,
                    "misc": t.misc,
                }
                for t in self.tokens
            ],
        }


def _parse_feats(cell: str, lineno: int) -> dict[str, str]:
    if cell in ("", "_"):
        return {}
    feats: dict[str, str] = {}
    for item in cell.split("|"):
        if "=" not in item:
            raise ColumnCountError(f"line {lineno}: bad feature {item!r}")
        key, value = item.split("=", 1)
        if key in feats:
            raise SchemaError(f"line {lineno}: duplicate feature key {key!r}")
        feats[key] = value
    return feats


def _opt(cell: str) -> str | None:
    return None if cell in ("", "_") else cell


def _parse_int(cell: str, lineno: int, what: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ColumnCountError(f"line {lineno}: {what} {cell!r} is not an integer") from None


def _finish_sentence(
    ref_text: str, rows: list[ConlluToken], lineno: int
) -> SentenceAnalysis:
    indices = [token.index for token in rows]
    if indices != list(range(1, len(rows) + 1)):
        raise NonContiguousIndices(
            f"sentence {ref_text}: token indices {indices} are not 1..{len(rows)}"
        )
    for token in rows:
        if token.head and token.head not in indices:
            raise SchemaError(
                f"sentence {ref_text}: head {token.head} names no token"
            )
    version, ref = _parse_bound_ref(ref_text, f"line {lineno}")
    return SentenceAnalysis(version=version, ref=ref, tokens=tuple(rows))


def _parse_conllu_standard(lines: list[str]) -> list[SentenceAnalysis]:
    sentences: list[SentenceAnalysis] = []
    sent_id: str | None = None
    rows: list[ConlluToken] = []
    start_line = 0

    def flush(lineno: int) -> None:
        nonlocal sent_id, rows
        if not rows:
            sent_id = None
            return
        if sent_id is None:
            raise SchemaError(f"line {start_line}: sentence without '# sent_id ='")
        sentences.append(_finish_sentence(sent_id, rows, lineno))
        sent_id, rows = None, []

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id"):
                _, _, value = body.partition("=")
                if rows:
                    flush(lineno)
                sent_id = value.strip()
            continue
        cells = line.split("\t")
        if len(cells) != 10:
            raise ColumnCountError(f"line {lineno}: expected 10 columns, got {len(cells)}")
        if not rows:
            start_line = lineno
        rows.append(
            ConlluToken(
                index=_parse_int(cells[0], lineno, "token id"),
                form=cells[1],
                lemma=_opt(cells[2]),
                upos=_opt(cells[3]),
                xpos=_opt(cells[4]),
                feats=_parse_feats(cells[5], lineno),
                head=0 if cells[6] in ("", "_") else _parse_int(cells[6], lineno, "head"),
                deprel=_opt(cells[7]),
                misc=_opt(cells[9]),
            )
        )
    flush(len(lines))
    return sentences


def _parse_conllu_ref_dialect(lines: list[str]) -> list[SentenceAnalysis]:
    """The per-row-reference dialect: 0-based indices shifted to 1-based."""
    sentences: list[SentenceAnalysis] = []
    current_ref: str | None = None
    rows: list[ConlluToken] = []

    def flush(lineno: int) -> None:
        nonlocal rows
        if rows:
            sentences.append(_finish_sentence(current_ref, rows, lineno))  # type: ignore[arg-type]
            rows = []

    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 11:
            raise ColumnCountError(f"line {lineno}: expected 11 columns, got {len(cells)}")
        ref_text = cells[0]
        if ref_text != current_ref:
            flush(lineno)
            current_ref = ref_text
        head_cell = cells[8]
        rows.append(
            ConlluToken(
                index=_parse_int(cells[1], lineno, "token index") + 1,
                form=cells[2],
                upos=_opt(cells[3]),
                xpos=_opt(cells[4]),
                feats=_parse_feats(cells[5], lineno),
                lemma=_opt(cells[6]),
                deprel=_opt(cells[7]),
                head=0
                if head_cell in ("", "_")
                else _parse_int(head_cell, lineno, "head") + 1,
                misc=_opt(cells[10]),
            )
        )
    flush(len(lines))
    return sentences


def parse_conllu(data: bytes) -> list[SentenceAnalysis]:
    """Parse either accepted dialect into 1-based sentence analyses.

    Standard 10-column files carry their reference in "# sent_id ="
    comments; 11-column files carry it in a leading column per row and
    use 0-based indices, which are shifted up by one. An empty head
    becomes the root sentinel 0.
    """
    text = data.decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    width = None
    for line in lines:
        if line.strip() and not line.startswith("#"):
            width = len(line.split("\t"))
            break
    if width is None:
        return []
    if width == 10:
        return _parse_conllu_standard(lines)
    if width == 11:
        return _parse_conllu_ref_dialect(lines)
    raise ColumnCountError(f"expected 10 or 11 columns, got {width}")


# ---------------------------------------------------------------------------
# Dictionary entries


@dataclass(frozen=True)
class SenseCitation:
    urn: Cite2Urn
    ref: str
    quote: str | None
    target: CtsUrn | None


@dataclass(frozen=True)
class Sense:
    label: str
    urn: Cite2Urn
    definition: str
    citations: tuple[SenseCitation, ...]
    children: tuple[Sense, ...]


@dataclass(frozen=True)
class DictionaryEntry:
    headword: str
    urn: Cite2Urn
    content_html: str
    senses: tuple[Sense, ...]
    raw: dict[str, Any] = field(repr=False)

    kind = KIND_DICTIONARY

    @property
    def record_urn(self) -> Cite2Urn:
        return self.urn

    def record_key(self) -> str:
        return format_cite2_urn(self.urn)

    def iter_senses(self) -> Iterator[Sense]:
        def walk(senses: tuple[Sense, ...]) -> Iterator[Sense]:
            for sense in senses:
                yield sense
                yield from walk(sense.children)

        return walk(self.senses)

    def citation_targets(self) -> list[CtsUrn]:
        return [
            citation.target
            for sense in self.iter_senses()
            for citation in sense.citations
            if citation.target is not None
        ]

    def targets(self) -> tuple[Target, ...]:
        return tuple(_version_and_passage(urn) for urn in self.citation_targets())

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def _parse_sense(obj: dict[str, Any], seen: set[str]) -> Sense:
    if not isinstance(obj, dict):
        raise SchemaError("sense: expected an object")
    urn = parse_cite2_urn(_string(_require(obj, "urn", "sense"), "sense urn"))
    key = format_cite2_urn(urn)
    if key in seen:
        raise SchemaError(f"duplicate sense urn {key}")
    seen.add(key)
    citations = []
    for item in obj.get("citations", []):
        if not isinstance(item, dict):
            raise SchemaError("citation: expected an object")
        data = item.get("data", {})
        if not isinstance(data, dict):
            raise SchemaError("citation: data must be an object")
        target_text = data.get("urn")
        citations.append(
            SenseCitation(
                urn=parse_cite2_urn(_string(_require(item, "urn", "citation"), "citation urn")),
                ref=_string(data.get("ref", ""), "citation ref"),
                quote=data.get("quote"),
                target=parse_cts_urn(target_text) if target_text else None,
            )
        )
    return Sense(
        label=_string(obj.get("label", ""), "sense label"),
        urn=urn,
        definition=_string(obj.get("definition", ""), "sense definition"),
        citations=tuple(citations),
        children=tuple(_parse_sense(child, seen) for child in obj.get("children", [])),
    )


def parse_dictionary(data: bytes) -> list[DictionaryEntry]:
    entries = []
    for obj in _load_array(data, "dictionary"):
        urn = parse_cite2_urn(_string(_require(obj, "urn", "dictionary entry"), "urn"))
        payload = obj.get("data", {})
        if not isinstance(payload, dict):
            raise SchemaError("dictionary entry: data must be an object")
        seen: set[str] = set()
        entries.append(
            DictionaryEntry(
                headword=_string(_require(obj, "headword", "dictionary entry"), "headword"),
                urn=urn,
                content_html=_string(payload.get("content", ""), "content"),
                senses=tuple(_parse_sense(s, seen) for s in payload.get("senses", [])),
                raw=obj,
            )
        )
    return entries


# ---------------------------------------------------------------------------
# Audio alignments


@dataclass(frozen=True)
class AudioAnnotation:
    target: CtsUrn
    media_url: str

    kind = KIND_AUDIO
    record_urn = None

    def record_key(self) -> str:
        return f"audio:{format_cts_urn(self.target)}:{self.media_url}"

    def targets(self) -> tuple[Target, ...]:
        return (_version_and_passage(self.target),)

    def to_jsonable(self) -> dict[str, Any]:
        return {"urn": format_cts_urn(self.target), "media_url": self.media_url}


def parse_audio_tsv(data: bytes) -> list[AudioAnnotation]:
    """Each line maps a point-passage URN to a media URL."""
    text = data.decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    annotations = []
    for lineno, line in enumerate(lines, start=1):
        cells = line.split("\t")
        if len(cells) != 2:
            raise BadColumnCount(f"line {lineno}: expected 2 columns, got {len(cells)}")
        target = parse_cts_urn(cells[0])
        if target.passage is None or target.passage.is_range:
            raise SchemaError(f"line {lineno}: audio target must be a point passage")
        if not cells[1]:
            raise SchemaError(f"line {lineno}: empty media url")
        annotations.append(AudioAnnotation(target=target, media_url=cells[1]))
    return annotations


# ---------------------------------------------------------------------------
# Sub-token spans (metrical analyses)


@dataclass(frozen=True)
class SubTokenSpan:
    start: int
    end: int
    label: str
    group: int | None


@dataclass(frozen=True)
class SubTokenSpanAnnotation:
    urn: Cite2Urn
    version: CtsUrn | None
    ref: DottedRef
    spans: tuple[SubTokenSpan, ...]
    credit: str | None
    raw: dict[str, Any] = field(repr=False)

    kind = KIND_METRICAL

    @property
    def record_urn(self) -> Cite2Urn:
        return self.urn

    def record_key(self) -> str:
        return format_cite2_urn(self.urn)

    def bound_to(self, version: CtsUrn) -> SubTokenSpanAnnotation:
        if self.version is not None:
            return self
        return replace(self, version=version.up_to_version())

    def targets(self) -> tuple[Target, ...]:
        return (Target(self.version, PassageRef(start=self.ref)),)

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def parse_subtoken_spans(data: bytes) -> list[SubTokenSpanAnnotation]:
    """Character-offset spans within one row's text, e.g. syllable weights.

    Spans must be ordered and non-overlapping; foot-boundary markers are
    exempt and may be zero-width. Offsets are validated against the row
    text at link time, not here.
    """
    annotations = []
    for obj in _load_array(data, "sub-token spans"):
        urn = parse_cite2_urn(_string(_require(obj, "urn", "span annotation"), "urn"))
        version, ref = _parse_bound_ref(
            _string(_require(obj, "ref", "span annotation"), "ref"), "span annotation"
        )
        spans = []
        cursor = 0
        spans_raw = _require(obj, "spans", "span annotation")
        if not isinstance(spans_raw, list):
            raise SchemaError("span annotation: spans must be a list")
        for item in spans_raw:
            if not isinstance(item, dict):
                raise SchemaError("span: expected an object")
            start = _require(item, "start", "span")
            end = _require(item, "end", "span")
            if not isinstance(start, int) or not isinstance(end, int) or start < 0:
                raise SchemaError("span: start and end must be non-negative integers")
            if end < start:
                raise OverlappingSpans(f"span [{start}, {end}) is inverted")
            label = _string(_require(item, "label", "span"), "span label")
            group = item.get("group")
            if group is not None and not isinstance(group, int):
                raise SchemaError("span: group must be an integer")
            if label != FOOT_BOUNDARY:
                if start < cursor:
                    raise OverlappingSpans(
                        f"span [{start}, {end}) overlaps or precedes [{cursor})"
                    )
                cursor = end
            spans.append(SubTokenSpan(start=start, end=end, label=label, group=group))
        annotations.append(
            SubTokenSpanAnnotation(
                urn=urn,
                version=version,
                ref=ref,
                spans=tuple(spans),
                credit=obj.get("credit"),
                raw=obj,
            )
        )
    return annotations


# ---------------------------------------------------------------------------
# Grammar links


@dataclass(frozen=True)
class GrammarLink:
    entry_id: str
    title: str
    body_html: str
    target_refs: tuple[str, ...]
    parsed_targets: tuple[Target, ...]
    raw: dict[str, Any] = field(repr=False)

    kind = KIND_GRAMMAR
    record_urn = None

    def record_key(self) -> str:
        return f"grammar:{self.entry_id}"

    def bound_to(self, version: CtsUrn) -> GrammarLink:
        bound = tuple(
            Target(version.up_to_version(), t.passage) if t.version is None else t
            for t in self.parsed_targets
        )
        return replace(self, parsed_targets=bound)

    def targets(self) -> tuple[Target, ...]:
        return self.parsed_targets

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def _parse_grammar_target(text: str) -> Target:
    if text.startswith("urn:cts:"):
        urn = parse_cts_urn(text)
        if urn.passage is None or urn.passage.start_token is None:
            raise SchemaError(f"grammar target is not token-level: {text}")
        return _version_and_passage(urn)
    ref, token = parse_veref(text)
    return Target(None, PassageRef(start=ref, start_token=token))


def parse_grammar_links(data: bytes) -> list[GrammarLink]:
    """Grammar entries tagging tokens, e.g. every imperfect of one type."""
    links = []
    seen: set[str] = set()
    for obj in _load_array(data, "grammar"):
        entry_id = _string(_require(obj, "entry_id", "grammar link"), "entry_id")
        if entry_id in seen:
            raise DuplicateEntryId(f"duplicate entry_id {entry_id!r}")
        seen.add(entry_id)
        target_refs = _string_list(_require(obj, "targets", "grammar link"), "targets")
        if not target_refs:
            raise SchemaError(f"grammar link {entry_id!r}: targets must be non-empty")
        links.append(
            GrammarLink(
                entry_id=entry_id,
                title=_string(obj.get("title", ""), "title"),
                body_html=_string(obj.get("body_html", ""), "body_html"),
                target_refs=tuple(target_refs),
                parsed_targets=tuple(_parse_grammar_target(t) for t in target_refs),
                raw=obj,
            )
        )
    return links


# ---------------------------------------------------------------------------
# Attribution records


@dataclass(frozen=True)
class AttributionRecord:
    role: str
    person_name: str
    organization_name: str | None
    references: tuple[Cite2Urn, ...]
    raw: dict[str, Any] = field(repr=False)

    def contributor(self) -> str:
        if self.organization_name:
            return f"{self.person_name}, {self.organization_name}"
        return self.person_name

    def to_jsonable(self) -> dict[str, Any]:
        return self.raw


def parse_attributions(data: bytes) -> list[AttributionRecord]:
    records = []
    for obj in _load_array(data, "attributions"):
        role = _string(_require(obj, "role", "attribution"), "role")
        person = _require(obj, "person", "attribution")
        if not isinstance(person, dict):
            raise SchemaError("attribution: person must be an object")
        person_name = _string(_require(person, "name", "person"), "person name")
        if not role or not person_name:
            raise SchemaError("attribution: role and person name must be non-empty")
        organization = obj.get("organization")
        organization_name = None
        if organization is not None:
            if not isinstance(organization, dict):
                raise SchemaError("attribution: organization must be an object")
            organization_name = _string(
                _require(organization, "name", "organization"), "organization name"
            )
        payload = obj.get("data", {})
        if not isinstance(payload, dict):
            raise SchemaError("attribution: data must be an object")
        references = tuple(
            parse_cite2_urn(text)
            for text in _string_list(payload.get("references", []), "references")
        )
        records.append(
            AttributionRecord(
                role=role,
                person_name=person_name,
                organization_name=organization_name,
                references=references,
                raw=obj,
            )
        )
    return records


# Parser registry used by ingestion: kind -> callable(bytes) -> records.
PARSERS = {
    KIND_COMMENTARY: parse_commentary,
    KIND_TEXTUAL_NOTE: parse_commentary,
    KIND_ALIGNMENT: parse_alignments,
    KIND_SYNTAX_TREE: parse_treebank_json,
    KIND_CONLLU: parse_conllu,
    KIND_DICTIONARY: parse_dictionary,
    KIND_AUDIO: parse_audio_tsv,
    KIND_METRICAL: parse_subtoken_spans,
    KIND_GRAMMAR: parse_grammar_links,
}
