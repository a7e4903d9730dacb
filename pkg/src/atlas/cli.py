"""Command line entry points: ingest, resolve, report, validate, serve."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .annotations import ANNOTATION_KINDS, PARSERS, parse_attributions
from .store import (
    Catalog,
    load_catalog,
    save_annotation_file,
    save_attribution_file,
    save_version,
)
from .tei import flatten_tei_subset, parse_tei_subset
from .text import VersionMetadata, read_text_tsv, write_text_tsv
from .urn import parse_cts_urn

KIND_TEXT = "text"
KIND_ATTRIBUTION = "attribution"
# `dictionary` is accepted as shorthand for the canonical kind name.
KIND_ALIASES = {"dictionary": "dictionary-citation"}
INGEST_KINDS = (KIND_TEXT, KIND_ATTRIBUTION) + ANNOTATION_KINDS

_DATA_DIR_OPTION = click.option(
    "--data-dir",
    envvar="ATLAS_DATA_DIR",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Persistence directory (or set ATLAS_DATA_DIR).",
)


def _fail(err: Exception) -> None:
    """Report a data error and exit 1 (2 is reserved for usage errors)."""
    click.echo(f"{type(err).__name__} {err}", err=True)
    sys.exit(1)


def _text_version(
    path: Path,
    urn: str | None,
    language: str | None,
    label: str | None,
    scheme: str | None,
) -> tuple[VersionMetadata, list]:
    if path.suffix.lower() == ".xml":
        meta, rows = flatten_tei_subset(parse_tei_subset(path.read_bytes()))
    else:
        if not urn:
            raise click.UsageError("--urn is required when ingesting a TSV text")
        rows = read_text_tsv(path.read_bytes())
        depth = len(rows[0].ref) if rows else 0
        meta = VersionMetadata(
            urn=parse_cts_urn(urn),
            language="",
            label="",
            scheme=tuple(f"level-{n}" for n in range(1, depth + 1)),
        )
    if urn:
        meta = VersionMetadata(
            urn=parse_cts_urn(urn),
            language=meta.language,
            label=meta.label,
            scheme=meta.scheme,
        )
    if language:
        meta = VersionMetadata(meta.urn, language, meta.label, meta.scheme)
    if label:
        meta = VersionMetadata(meta.urn, meta.language, label, meta.scheme)
    if scheme:
        parts = tuple(s.strip() for s in scheme.split(","))
        meta = VersionMetadata(meta.urn, meta.language, meta.label, parts)
    return meta, rows


@click.group()
def main() -> None:
    """Text and annotation server toolkit."""


@main.command()
@click.option("--kind", required=True, type=click.Choice(INGEST_KINDS + tuple(KIND_ALIASES)))
@click.option("--path", "src", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_DATA_DIR_OPTION
@click.option("--urn", default=None, help="Version URN for TSV texts, or default binding for bare refs.")
@click.option("--language", default=None)
@click.option("--label", default=None)
@click.option("--scheme", default=None, help="Comma separated citation scheme labels.")
def ingest(
    kind: str,
    src: Path,
    data_dir: Path,
    urn: str | None,
    language: str | None,
    label: str | None,
    scheme: str | None,
) -> None:
    """Validate one source file and copy it into the data directory."""
    kind = KIND_ALIASES.get(kind, kind)
    try:
        if kind == KIND_TEXT:
            meta, rows = _text_version(src, urn, language, label, scheme)
            Catalog().register_version(meta, rows)
            save_version(data_dir, meta, rows)
            click.echo(f"ingested {len(rows)} rows into {meta.urn.work_component()}")
        elif kind == KIND_ATTRIBUTION:
            records = parse_attributions(src.read_bytes())
            save_attribution_file(data_dir, src.name, src.read_bytes())
            click.echo(f"ingested {len(records)} records")
        else:
            if urn:
                parse_cts_urn(urn)
            records = PARSERS[kind](src.read_bytes())
            save_annotation_file(data_dir, kind, src.name, src.read_bytes(), urn)
            click.echo(f"ingested {len(records)} records")
    except click.UsageError:
        raise
    except (ValueError, LookupError, OSError) as err:
        _fail(err)


@main.command()
@click.argument("urn")
@_DATA_DIR_OPTION
def resolve(urn: str, data_dir: Path) -> None:
    """Print the rows under a passage URN as TSV."""
    try:
        catalog = load_catalog(data_dir)
        resolved = catalog.resolve_passage(parse_cts_urn(urn))
        rows = [row for row, _tokens in resolved]
        sys.stdout.buffer.write(write_text_tsv(rows))
    except (ValueError, LookupError, OSError) as err:
        _fail(err)


@main.group()
def report() -> None:
    """Aggregated reports over the loaded catalog."""


@report.command()
@_DATA_DIR_OPTION
def attributions(data_dir: Path) -> None:
    """Contribution counts by role and contributor."""
    try:
        catalog = load_catalog(data_dir)
        for row in catalog.aggregate_attributions():
            click.echo(f"{row.role}\t{row.contributor}\t{row.count:,}")
    except (ValueError, LookupError, OSError) as err:
        _fail(err)


@main.command()
@click.option("--strict", is_flag=True, help="Exit 2 when any diagnostic is found.")
@_DATA_DIR_OPTION
def validate(strict: bool, data_dir: Path) -> None:
    """Cross-check annotation targets and credits against loaded texts."""
    try:
        catalog = load_catalog(data_dir)
    except (ValueError, LookupError, OSError) as err:
        _fail(err)
        return
    diagnostics = catalog.link_check()
    for line in diagnostics:
        click.echo(line)
    if diagnostics:
        click.echo(f"{len(diagnostics)} problem(s) found", err=True)
        if strict:
            sys.exit(2)
    else:
        click.echo("no problems found")


@main.command()
@click.option("--port", default=7000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--cors-origin", "cors_origins", multiple=True, default=("*",))
@_DATA_DIR_OPTION
def serve(port: int, host: str, cors_origins: tuple[str, ...], data_dir: Path) -> None:
    """Serve the catalog over HTTP."""
    import uvicorn

    from .server import SnapshotHolder, create_app

    try:
        catalog = load_catalog(data_dir)
    except (ValueError, LookupError, OSError) as err:
        _fail(err)
        return
    app = create_app(SnapshotHolder(catalog), cors_origins)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
