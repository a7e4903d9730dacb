"""Catalog snapshots: registration, queries, aggregation, persistence."""

from __future__ import annotations

import json

import pytest

from atlas.annotations import AttributionRecord, Target, parse_dictionary
from atlas.errors import (
    DuplicateVersion,
    InvariantViolation,
    InvertedRange,
    UnknownReference,
    UnknownVersion,
)
from atlas.store import (
    Catalog,
    load_catalog,
    save_annotation_file,
    save_attribution_file,
    save_version,
)
from atlas.text import TextRow, VersionMetadata
from atlas.urn import parse_cite2_urn, parse_cts_urn

from conftest import ENG, GRC, MARLOWE, THUC, build_full_catalog, fixture_bytes
from generators import StubRecord, make_catalog_plan
from oracles import oracle_attribution_counts, oracle_expand, oracle_overlapping

V1 = "urn:cts:test:g.w.v1"


def _meta(urn_text: str = V1, depth: int = 1) -> VersionMetadata:
    return VersionMetadata(
        urn=parse_cts_urn(urn_text),
        language="grc",
        label="Test text",
        scheme=tuple(f"level{i}" for i in range(1, depth + 1)),
    )


def _rows(texts: list[str]) -> list[TextRow]:
    return [
        TextRow(seq=i, ref=(str(i),), text=text)
        for i, text in enumerate(texts, start=1)
    ]


class TestRegister:
    def test_empty_version_is_valid(self):
        catalog = Catalog().register_version(_meta(), [])
        entry = catalog.entry_for(parse_cts_urn(V1))
        assert entry.rows == ()

    def test_duplicate_version_rejected(self):
        catalog = Catalog().register_version(_meta(), [])
        with pytest.raises(DuplicateVersion):
            catalog.register_version(_meta(), [])

    def test_version_urn_must_be_passage_free(self):
        meta = _meta(f"{V1}:1.1")
        with pytest.raises(InvariantViolation):
            Catalog().register_version(meta, [])

    def test_seq_must_count_from_one(self):
        rows = [TextRow(seq=2, ref=("1",), text="x")]
        with pytest.raises(InvariantViolation) as err:
            Catalog().register_version(_meta(), rows)
        assert "row 1: seq 2, expected 1" in str(err.value)

    def test_blank_text_rejected(self):
        with pytest.raises(InvariantViolation):
            Catalog().register_version(_meta(), _rows(["ok", "   "]))

    def test_scheme_depth_must_match_refs(self):
        rows = [TextRow(seq=1, ref=("1", "1"), text="x")]
        with pytest.raises(InvariantViolation):
            Catalog().register_version(_meta(depth=1), rows)

    def test_duplicate_ref_rejected(self):
        rows = [
            TextRow(seq=1, ref=("1",), text="x"),
            TextRow(seq=2, ref=("1",), text="y"),
        ]
        with pytest.raises(InvariantViolation):
            Catalog().register_version(_meta(), rows)

    def test_unknown_version_lookup(self):
        with pytest.raises(UnknownVersion):
            Catalog().entry_for(parse_cts_urn(V1))


class TestSnapshots:
    def test_every_mutation_returns_a_new_snapshot(self):
        c0 = Catalog()
        c1 = c0.register_version(_meta(), _rows(["a"]))
        record = StubRecord(kind="grammar", key="k1", bound_targets=())
        c2 = c1.with_annotations([record])
        c3 = c2.with_attributions(
            [AttributionRecord("R", "P", None, (), {})]
        )
        ids = {c.snapshot_id for c in (c0, c1, c2, c3)}
        assert len(ids) == 4

    def test_older_snapshots_are_untouched(self):
        c0 = Catalog()
        c1 = c0.register_version(_meta(), _rows(["a"]))
        c1.with_annotations([StubRecord(kind="grammar", key="k1", bound_targets=())])
        with pytest.raises(UnknownVersion):
            c0.entry_for(parse_cts_urn(V1))
        assert c1.annotations == ()
        # The first snapshot still accepts the version the second already has.
        c0.register_version(_meta(), [])

    def test_annotation_records_merge_by_key(self):
        first = StubRecord(kind="grammar", key="k1", bound_targets=())
        second = StubRecord(kind="commentary", key="k1", bound_targets=())
        other = StubRecord(kind="audio", key="k2", bound_targets=())
        catalog = Catalog().with_annotations([first, other]).with_annotations([second])
        by_key = {r.record_key(): r for r in catalog.annotations}
        assert len(catalog.annotations) == 2
        assert by_key["k1"] is second

    def test_attribution_duplicates_collapse(self):
        record = AttributionRecord("R", "P", "O", (), {})
        twin = AttributionRecord("R", "P", "O", (), {})
        catalog = Catalog().with_attributions([record]).with_attributions([twin])
        assert len(catalog.attributions) == 1


class TestResolve:
    def test_whole_version(self, text_catalog):
        resolved = text_catalog.resolve_passage(parse_cts_urn(GRC))
        assert len(resolved) == 7
        row, tokens = resolved[0]
        assert row.ref == ("1", "1")
        assert tokens[0].value == "μῆνιν"

    def test_leaf_range(self, text_catalog):
        resolved = text_catalog.resolve_passage(parse_cts_urn(f"{GRC}:1.2-1.4"))
        assert [row.ref for row, _ in resolved] == [
            ("1", "2"),
            ("1", "3"),
            ("1", "4"),
        ]

    def test_container_point(self, text_catalog):
        resolved = text_catalog.resolve_passage(parse_cts_urn(f"{THUC}:1.1"))
        assert [row.ref for row, _ in resolved] == [
            ("1", "1", "1"),
            ("1", "1", "2"),
            ("1", "1", "3"),
        ]

    def test_container_range(self, text_catalog):
        resolved = text_catalog.resolve_passage(parse_cts_urn(f"{THUC}:1.1-1.2"))
        assert len(resolved) == 6

    def test_unknown_reference(self, text_catalog):
        with pytest.raises(UnknownReference):
            text_catalog.resolve_passage(parse_cts_urn(f"{GRC}:9.9"))

    def test_inverted_range(self, text_catalog):
        with pytest.raises(InvertedRange):
            text_catalog.resolve_passage(parse_cts_urn(f"{GRC}:1.7-1.1"))

    def test_unknown_version(self, text_catalog):
        with pytest.raises(UnknownVersion):
            text_catalog.resolve_passage(parse_cts_urn(V1))


class TestOverlap:
    def _kinds(self, catalog, urn_text, kind=None):
        records = catalog.annotations_overlapping(parse_cts_urn(urn_text), kind=kind)
        return [r.kind for r in records]

    def test_greek_line_one(self, full_catalog):
        assert self._kinds(full_catalog, f"{GRC}:1.1") == [
            "alignment",
            "audio",
            "grammar",
            "metrical",
            "syntax-tree",
        ]

    def test_token_query_narrows(self, full_catalog):
        assert self._kinds(full_catalog, f"{GRC}:1.1.t1") == [
            "alignment",
            "audio",
            "metrical",
            "syntax-tree",
        ]
        assert self._kinds(full_catalog, f"{GRC}:1.1.t2") == [
            "audio",
            "grammar",
            "metrical",
            "syntax-tree",
        ]

    def test_kind_filter(self, full_catalog):
        assert self._kinds(full_catalog, f"{GRC}:1.1", kind="audio") == ["audio"]
        assert self._kinds(full_catalog, f"{GRC}:1.1", kind="conllu") == []

    def test_thucydides_section(self, full_catalog):
        assert self._kinds(full_catalog, f"{THUC}:1.1.1") == ["commentary", "conllu"]
        assert self._kinds(full_catalog, THUC) == ["commentary", "conllu"]

    def test_english_token_alignment(self, full_catalog):
        assert self._kinds(full_catalog, f"{ENG}:1.1.t4") == ["alignment"]
        assert self._kinds(full_catalog, f"{ENG}:1.1.t3") == []

    def test_textual_note_reaches_marlowe_tokens(self, full_catalog):
        assert self._kinds(full_catalog, f"{MARLOWE}:1.1.t2") == ["textual-note"]
        assert self._kinds(full_catalog, f"{MARLOWE}:1.2") == []

    def test_unknown_passage_is_empty(self, full_catalog):
        assert self._kinds(full_catalog, f"{GRC}:9.1") == []

    def test_unknown_version_raises(self, full_catalog):
        with pytest.raises(UnknownVersion):
            full_catalog.annotations_overlapping(parse_cts_urn(V1))


class TestAggregate:
    def test_fixture_report(self, full_catalog):
        rows = full_catalog.aggregate_attributions()
        assert [(r.role, r.contributor, r.count) for r in rows] == [
            (
                "Annotator",
                "Alex Lessie, University of Pennsylvania, Philadelphia, PA, USA",
                8,
            ),
            (
                "Annotator",
                "Farnoosh Shamsian, Universität Leipzig: Leipzig, Sachsen, DE",
                3,
            ),
        ]

    def test_counts_union_distinct_references(self):
        def urns(*ids):
            return tuple(parse_cite2_urn(f"urn:cite2:x:c.v1:{i}") for i in ids)

        records = [
            AttributionRecord("Editor", "P", None, urns("a", "b", "c"), {}),
            AttributionRecord("Editor", "P", None, urns("c", "d"), {}),
        ]
        rows = Catalog().with_attributions(records).aggregate_attributions()
        assert [(r.role, r.contributor, r.count) for r in rows] == [("Editor", "P", 4)]

    def test_distinct_roles_stay_separate(self):
        ref = (parse_cite2_urn("urn:cite2:x:c.v1:a"),)
        records = [
            AttributionRecord("Editor", "P", None, ref, {}),
            AttributionRecord("Annotator", "P", None, ref, {}),
        ]
        rows = Catalog().with_attributions(records).aggregate_attributions()
        assert [(r.role, r.count) for r in rows] == [("Annotator", 1), ("Editor", 1)]


class TestLinkCheck:
    def test_text_only_catalog_is_clean(self, text_catalog):
        assert text_catalog.link_check() == []

    def test_full_catalog_findings(self, full_catalog):
        findings = full_catalog.link_check()
        dangling = [f for f in findings if "DanglingHead" in f]
        credits = [f for f in findings if "unmatched credit" in f]
        assert len(findings) == len(dangling) + len(credits)
        assert dangling == [
            "syntax-tree urn:cite2:beyond-translation:syntaxTree.atlas_v1:"
            "tlg0008-tlg001-grc-1: DanglingHead 79 (head of words 1, 2)"
        ]
        assert len(credits) == 10
        assert sum("Alex Lessie" in f for f in credits) == 7
        assert sum("Farnoosh Shamsian" in f for f in credits) == 3

    def test_dangling_target_reported(self, full_catalog):
        entries = parse_dictionary(fixture_bytes("dictionary.json"))
        findings = full_catalog.with_annotations(entries).link_check()
        dictionary_findings = [f for f in findings if "dictionary-citation" in f]
        assert len(dictionary_findings) == 3
        assert any("dangling target 12.46" in f for f in dictionary_findings)

    def test_dangling_token_reported(self, text_catalog):
        record = StubRecord(
            kind="grammar",
            key="ghost",
            bound_targets=(
                Target(
                    version=parse_cts_urn(GRC),
                    passage=parse_cts_urn(f"{GRC}:1.1.t99").passage,
                ),
            ),
        )
        findings = text_catalog.with_annotations([record]).link_check()
        assert len(findings) == 1
        assert "t99" in findings[0] or "token 99" in findings[0]


class TestLibraryEntries:
    def test_listing(self, text_catalog):
        entries = text_catalog.library_entries()
        assert [e["urn"] for e in entries] == sorted(e["urn"] for e in entries)
        by_urn = {e["urn"]: e for e in entries}
        marlowe = by_urn[MARLOWE]
        assert marlowe["label"] == "The Passionate Shepherd"
        assert marlowe["row_count"] == 2
        assert by_urn[GRC]["language"] == "grc"


class TestPersistence:
    def test_roundtrip(self, tmp_path, full_catalog):
        for entry in full_catalog.versions.values():
            save_version(tmp_path, entry.meta, entry.rows)
        save_annotation_file(
            tmp_path, "commentary", "commentary.json", fixture_bytes("commentary.json")
        )
        save_annotation_file(
            tmp_path,
            "conllu",
            "thucydides.conllu",
            fixture_bytes("thucydides.conllu"),
            default_urn=THUC,
        )
        save_annotation_file(tmp_path, "audio", "audio.tsv", fixture_bytes("audio.tsv"))
        save_attribution_file(
            tmp_path, "attributions.json", fixture_bytes("attributions.json")
        )
        loaded = load_catalog(tmp_path)
        assert sorted(loaded.versions) == sorted(full_catalog.versions)
        keys = {r.record_key() for r in loaded.annotations}
        assert "urn:cite2:scaife-viewer:commentary.v1:commentary1" in keys
        assert f"conllu:{THUC}:1.1.1" in keys
        assert len(loaded.attributions) == 2
        resolved = loaded.resolve_passage(parse_cts_urn(f"{GRC}:1.1"))
        assert resolved[0][0].text.startswith("μῆνιν")

    def test_reingestion_is_idempotent(self, tmp_path):
        for _ in range(2):
            save_annotation_file(
                tmp_path,
                "commentary",
                "commentary.json",
                fixture_bytes("commentary.json"),
            )
        loaded = load_catalog(tmp_path)
        assert len(loaded.annotations) == 1

    def test_missing_sidecar(self, tmp_path):
        texts = tmp_path / "texts"
        texts.mkdir()
        (texts / "orphan.tsv").write_bytes(b"1\t1\tx\n")
        with pytest.raises(InvariantViolation) as err:
            load_catalog(tmp_path)
        assert "missing metadata sidecar" in str(err.value)

    def test_unknown_kind_directory(self, tmp_path):
        bogus = tmp_path / "annotations" / "scribbles"
        bogus.mkdir(parents=True)
        (bogus / "x.json").write_bytes(b"[]")
        with pytest.raises(InvariantViolation):
            load_catalog(tmp_path)

    def test_sidecar_binding_applied(self, tmp_path):
        save_annotation_file(
            tmp_path,
            "metrical",
            "spans.json",
            json.dumps(
                [{"urn": "urn:cite2:x:m.v1:1", "ref": "1.1", "spans": []}]
            ).encode(),
            default_urn=GRC,
        )
        loaded = load_catalog(tmp_path)
        record = loaded.annotations[0]
        assert record.version is not None

    def test_empty_directory(self, tmp_path):
        loaded = load_catalog(tmp_path)
        assert loaded.versions == {}
        assert loaded.annotations == ()


class TestOracleAgreement:
    def test_overlap_matches_brute_force_on_many_catalogs(self):
        for seed in range(120):
            plan = make_catalog_plan(seed)
            for urn, kind in plan.queries:
                version = next(
                    v
                    for v in plan.versions
                    if v.urn.version_key() == urn.version_key()
                )
                expected = oracle_overlapping(
                    plan.records, urn, version.refs, version.counts, kind=kind
                )
                got = plan.catalog.annotations_overlapping(urn, kind=kind)
                assert [r.record_key() for r in got] == [
                    r.record_key() for r in expected
                ], f"seed={seed} urn={urn} kind={kind}"

    def test_aggregation_matches_brute_force(self):
        for seed in range(40):
            plan = make_catalog_plan(seed, n_attributions=12)
            expected = oracle_attribution_counts(plan.attributions)
            got = {
                (row.role, row.contributor): row.count
                for row in plan.catalog.aggregate_attributions()
            }
            derived = {}
            for (role, person, org), count in expected.items():
                contributor = f"{person}, {org}" if org else person
                derived[(role, contributor)] = count
            assert got == derived, f"seed={seed}"

    def test_resolution_length_matches_expansion(self):
        for seed in range(40):
            plan = make_catalog_plan(seed)
            rng_refs = [v for v in plan.versions if v.refs]
            for version in rng_refs:
                first, last = version.refs[0], version.refs[-1]
                urn = parse_cts_urn(
                    "{}:{}-{}".format(
                        "urn:cts:genLit:" + version.urn.work_component(),
                        ".".join(first),
                        ".".join(last),
                    )
                )
                expanded = oracle_expand(urn.passage, version.refs)
                resolved = plan.catalog.resolve_passage(urn)
                assert isinstance(expanded, list)
                assert len(resolved) == len(expanded) == len(version.refs)
