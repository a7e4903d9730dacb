"""Shared fixtures: paths, URN constants, and catalog builders."""

from __future__ import annotations

from pathlib import Path

import pytest

from atlas.annotations import (
    parse_alignments,
    parse_attributions,
    parse_audio_tsv,
    parse_commentary,
    parse_conllu,
    parse_grammar_links,
    parse_subtoken_spans,
    parse_treebank_json,
)
from atlas.store import Catalog
from atlas.text import VersionMetadata, read_text_tsv
from atlas.urn import parse_cts_urn

FIXTURES = Path(__file__).parent / "fixtures"

# One line per acceptance criterion, printed after the run so the verdicts
# survive pytest's output capturing.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

GRC = "urn:cts:greekLit:tlg0012.tlg001.perseus-grc2"
ENG = "urn:cts:greekLit:tlg0012.tlg001.parrish-eng1"
MARLOWE = "urn:cts:engLit:mds822-32.tpsth1-1599.pdl-eng"
THUC = "urn:cts:greekLit:tlg0003.tlg001.perseus-grc2"


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def build_text_catalog() -> Catalog:
    """All four fixture versions, no annotations."""
    catalog = Catalog()
    catalog = catalog.register_version(
        VersionMetadata(parse_cts_urn(GRC), "grc", "Iliad (Greek)", ("book", "line")),
        read_text_tsv(fixture_bytes("iliad_grc.tsv")),
    )
    catalog = catalog.register_version(
        VersionMetadata(parse_cts_urn(ENG), "eng", "Iliad (Parrish)", ("book", "line")),
        read_text_tsv(fixture_bytes("iliad_parrish.tsv")),
    )
    catalog = catalog.register_version(
        VersionMetadata(
            parse_cts_urn(MARLOWE), "eng", "The Passionate Shepherd", ("poem", "line")
        ),
        read_text_tsv(fixture_bytes("marlowe.tsv")),
    )
    catalog = catalog.register_version(
        VersionMetadata(
            parse_cts_urn(THUC), "grc", "History of the Peloponnesian War",
            ("book", "chapter", "section"),
        ),
        read_text_tsv(fixture_bytes("thucydides.tsv")),
    )
    return catalog


def build_full_catalog() -> Catalog:
    """Texts plus every annotation fixture and the attribution records."""
    catalog = build_text_catalog()
    records = []
    records += parse_commentary(fixture_bytes("commentary.json"))
    records += parse_commentary(fixture_bytes("textual_notes.json"))
    records += parse_alignments(fixture_bytes("alignments.json"))
    records += parse_treebank_json(fixture_bytes("iliad_treebank.json"))
    records += parse_treebank_json(fixture_bytes("treebank.json"))
    records += [
        s.bound_to(parse_cts_urn(THUC))
        for s in parse_conllu(fixture_bytes("thucydides.conllu"))
    ]
    records += parse_audio_tsv(fixture_bytes("audio.tsv"))
    records += parse_subtoken_spans(fixture_bytes("metrical.json"))
    records += parse_grammar_links(fixture_bytes("grammar.json"))
    catalog = catalog.with_annotations(records)
    return catalog.with_attributions(
        parse_attributions(fixture_bytes("attributions.json"))
    )


@pytest.fixture()
def text_catalog() -> Catalog:
    return build_text_catalog()


@pytest.fixture()
def full_catalog() -> Catalog:
    return build_full_catalog()
