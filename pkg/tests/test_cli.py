"""The command line workflow: ingest, resolve, report, validate."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from atlas.cli import main
from atlas.store import load_catalog

from conftest import FIXTURES, GRC, THUC, fixture_bytes


@pytest.fixture()
def runner():
    return CliRunner()


def _ingest(runner, data_dir, kind, fixture, *extra):
    return runner.invoke(
        main,
        [
            "ingest",
            "--kind",
            kind,
            "--path",
            str(FIXTURES / fixture),
            "--data-dir",
            str(data_dir),
            *extra,
        ],
    )


class TestIngest:
    def test_audio_reports_record_count(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "audio", "audio.tsv")
        assert result.exit_code == 0
        assert result.stdout == "ingested 5 records\n"
        assert (tmp_path / "annotations" / "audio" / "audio.tsv").exists()

    def test_empty_annotation_file(self, runner, tmp_path):
        empty = tmp_path / "empty.json"
        empty.write_text("[]")
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "alignment",
                "--path",
                str(empty),
                "--data-dir",
                str(tmp_path / "data"),
            ],
        )
        assert result.exit_code == 0
        assert result.stdout == "ingested 0 records\n"

    def test_two_column_text_is_a_data_error(self, runner, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_bytes(b"1\tno text column\n")
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "text",
                "--path",
                str(bad),
                "--data-dir",
                str(tmp_path / "data"),
                "--urn",
                GRC,
            ],
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("BadColumnCount at line 1")

    def test_text_ingest_reports_rows(self, runner, tmp_path):
        result = _ingest(
            runner, tmp_path, "text", "thucydides.tsv", "--urn", THUC
        )
        assert result.exit_code == 0
        assert result.stdout == "ingested 6 rows into tlg0003.tlg001.perseus-grc2\n"

    def test_text_tsv_requires_urn(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "text", "thucydides.tsv")
        assert result.exit_code == 2
        assert "--urn is required" in result.stderr

    def test_tei_ingest(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "text", "thucydides_tei.xml")
        assert result.exit_code == 0
        assert result.stdout == "ingested 2 rows into tlg0003.tlg001.perseus-grc2\n"
        loaded = load_catalog(tmp_path)
        assert loaded.versions[THUC].meta.language == "grc"

    def test_dictionary_alias(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "dictionary", "dictionary.json")
        assert result.exit_code == 0
        assert result.stdout == "ingested 1 records\n"
        saved = tmp_path / "annotations" / "dictionary-citation" / "dictionary.json"
        assert saved.exists()

    def test_unknown_kind_is_usage_error(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "doodles", "audio.tsv")
        assert result.exit_code == 2

    def test_missing_path_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "audio",
                "--path",
                str(tmp_path / "missing.tsv"),
                "--data-dir",
                str(tmp_path),
            ],
        )
        assert result.exit_code == 2

    def test_invalid_json_is_a_data_error(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "grammar",
                "--path",
                str(bad),
                "--data-dir",
                str(tmp_path / "data"),
            ],
        )
        assert result.exit_code == 1

    def test_reingestion_is_idempotent_by_record_key(self, runner, tmp_path):
        twin = tmp_path / "commentary_copy.json"
        twin.write_bytes(fixture_bytes("commentary.json"))
        first = _ingest(runner, tmp_path / "data", "commentary", "commentary.json")
        assert first.exit_code == 0
        second = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "commentary",
                "--path",
                str(twin),
                "--data-dir",
                str(tmp_path / "data"),
            ],
        )
        assert second.exit_code == 0
        loaded = load_catalog(tmp_path / "data")
        assert len(loaded.annotations) == 1

    def test_conllu_with_binding_urn(self, runner, tmp_path):
        result = _ingest(
            runner, tmp_path, "conllu", "thucydides.conllu", "--urn", THUC
        )
        assert result.exit_code == 0
        assert result.stdout == "ingested 1 records\n"
        loaded = load_catalog(tmp_path)
        assert loaded.annotations[0].version is not None


class TestResolve:
    def _load_text(self, runner, data_dir):
        result = _ingest(runner, data_dir, "text", "thucydides.tsv", "--urn", THUC)
        assert result.exit_code == 0

    def test_full_version_bytes_match_transport_form(self, runner, tmp_path):
        self._load_text(runner, tmp_path)
        result = runner.invoke(
            main, ["resolve", THUC, "--data-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        assert result.stdout_bytes == fixture_bytes("thucydides.tsv")

    def test_range(self, runner, tmp_path):
        self._load_text(runner, tmp_path)
        result = runner.invoke(
            main,
            ["resolve", f"{THUC}:1.1.1-1.1.2", "--data-dir", str(tmp_path)],
        )
        expected = b"".join(fixture_bytes("thucydides.tsv").splitlines(keepends=True)[:2])
        assert result.stdout_bytes == expected

    def test_unknown_reference(self, runner, tmp_path):
        self._load_text(runner, tmp_path)
        result = runner.invoke(
            main, ["resolve", f"{THUC}:9.9.9", "--data-dir", str(tmp_path)]
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("UnknownReference")

    def test_inverted_range(self, runner, tmp_path):
        self._load_text(runner, tmp_path)
        result = runner.invoke(
            main,
            ["resolve", f"{THUC}:1.2.1-1.1.1", "--data-dir", str(tmp_path)],
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("InvertedRange")

    def test_malformed_urn(self, runner, tmp_path):
        result = runner.invoke(
            main, ["resolve", "urn:cts:greekLit", "--data-dir", str(tmp_path)]
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("MalformedUrn")

    def test_unknown_version(self, runner, tmp_path):
        result = runner.invoke(
            main, ["resolve", GRC, "--data-dir", str(tmp_path)]
        )
        assert result.exit_code == 1
        assert result.stderr.startswith("UnknownVersion")


class TestReport:
    def test_attribution_table(self, runner, tmp_path):
        result = _ingest(runner, tmp_path, "attribution", "attributions.json")
        assert result.exit_code == 0
        assert result.stdout == "ingested 2 records\n"
        report = runner.invoke(
            main, ["report", "attributions", "--data-dir", str(tmp_path)]
        )
        assert report.exit_code == 0
        assert report.stdout.splitlines() == [
            "Annotator\tAlex Lessie, University of Pennsylvania, Philadelphia, PA, USA\t8",
            "Annotator\tFarnoosh Shamsian, Universität Leipzig: Leipzig, Sachsen, DE\t3",
        ]

    def test_counts_use_thousands_separators(self, runner, tmp_path):
        big = tmp_path / "big.json"
        refs = [f"urn:cite2:x:tree.v1:obj{i}" for i in range(1500)]
        big.write_text(
            json.dumps(
                [
                    {
                        "role": "Annotator",
                        "person": {"name": "Prolific One"},
                        "data": {"references": refs},
                    }
                ]
            )
        )
        ingest = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "attribution",
                "--path",
                str(big),
                "--data-dir",
                str(tmp_path / "data"),
            ],
        )
        assert ingest.exit_code == 0
        report = runner.invoke(
            main, ["report", "attributions", "--data-dir", str(tmp_path / "data")]
        )
        assert report.stdout == "Annotator\tProlific One\t1,500\n"


class TestValidate:
    def test_clean_catalog(self, runner, tmp_path):
        _ingest(runner, tmp_path, "text", "thucydides.tsv", "--urn", THUC)
        result = runner.invoke(main, ["validate", "--data-dir", str(tmp_path)])
        assert result.exit_code == 0
        assert result.stdout == "no problems found\n"

    def test_findings_without_strict_still_exit_zero(self, runner, tmp_path):
        _ingest(runner, tmp_path, "syntax-tree", "treebank.json")
        result = runner.invoke(main, ["validate", "--data-dir", str(tmp_path)])
        assert result.exit_code == 0
        assert "DanglingHead 79" in result.stdout
        assert "1 problem(s) found" in result.stderr

    def test_strict_exits_two(self, runner, tmp_path):
        _ingest(runner, tmp_path, "syntax-tree", "treebank.json")
        result = runner.invoke(
            main, ["validate", "--strict", "--data-dir", str(tmp_path)]
        )
        assert result.exit_code == 2
        assert "DanglingHead 79" in result.stdout


class TestDataDirOption:
    def test_envvar_supplies_data_dir(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "audio",
                "--path",
                str(FIXTURES / "audio.tsv"),
            ],
            env={"ATLAS_DATA_DIR": str(tmp_path)},
        )
        assert result.exit_code == 0
        assert (tmp_path / "annotations" / "audio" / "audio.tsv").exists()

    def test_missing_data_dir_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "ingest",
                "--kind",
                "audio",
                "--path",
                str(FIXTURES / "audio.tsv"),
            ],
            env={"ATLAS_DATA_DIR": None},
        )
        assert result.exit_code == 2
