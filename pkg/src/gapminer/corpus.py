"""Bibliographic corpus ingestion, validation, and citation indexing.

The on-disk corpus is line-delimited JSON: a header line carrying the schema
version, then one record object per line. Ingestion is streaming; memory is
proportional to what is retained, not to file size. Records are either
accepted, rejected by a content filter (with an enumerated reason), or
counted as malformed when they are structurally broken.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import CorpusQualityError, DataError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_YEAR_MIN = 1900
DEFAULT_YEAR_MAX = 2020

# Rejection reasons (content filters, not structural errors).
REASON_YEAR = "out-of-range-year"
REASON_LEVEL0 = "no-positive-level0"
REASON_LEVEL3 = "insufficient-level3"


class _MalformedRecord(ValueError):
    """Structurally broken record; counted and skipped during ingestion."""


@dataclass(frozen=True, slots=True)
class PaperRecord:
    """One validated publication record.

    Concept fields hold only positive-confidence assignments, deduplicated by
    concept id (keeping the highest confidence) and sorted by id. References
    are deduplicated, self-references removed, sorted. Author order is
    preserved as given.
    """

    paper_id: str
    year: int
    level0_fields: tuple[tuple[str, float], ...]
    level3_fields: tuple[tuple[str, float], ...]
    references: tuple[str, ...]
    title: str | None = None
    venue_id: str | None = None
    authors: tuple[str, ...] = ()
    affiliations: tuple[tuple[str, float, float], ...] = ()

    @property
    def level0_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.level0_fields)

    @property
    def level3_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.level3_fields)


@dataclass(frozen=True, slots=True)
class Rejection:
    paper_id: str
    reason: str


@dataclass
class IngestReport:
    lines: int = 0
    accepted: int = 0
    malformed: int = 0
    duplicate_ids: int = 0
    rejections: list[Rejection] = field(default_factory=list)
    schema_version: int | None = None

    def rejection_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.rejections:
            counts[r.reason] = counts.get(r.reason, 0) + 1
        return counts


class ConceptInfo(NamedTuple):
    level: int
    first_year_seen: int


@dataclass
class CorpusStore:
    """Immutable-by-convention container for validated records plus indices.

    by_year ordering is deterministic: ascending (year, paper_id), with ids
    compared as strings (equivalent to UTF-8 byte order).
    """

    papers: dict[str, PaperRecord]
    by_year: dict[int, list[str]]
    concept_registry: dict[str, ConceptInfo]
    ingest_report: IngestReport = field(default_factory=IngestReport, compare=False)

    @classmethod
    def from_records(
        cls, records: Iterable[PaperRecord], report: IngestReport | None = None
    ) -> "CorpusStore":
        papers: dict[str, PaperRecord] = {}
        for rec in records:
            papers[rec.paper_id] = rec
        by_year: dict[int, list[str]] = {}
        for pid in sorted(papers):
            by_year.setdefault(papers[pid].year, []).append(pid)
        by_year = {year: by_year[year] for year in sorted(by_year)}
        registry: dict[str, ConceptInfo] = {}

        def register(concept: str, level: int, year: int) -> None:
            info = registry.get(concept)
            if info is None:
                registry[concept] = ConceptInfo(level, year)
            else:
                registry[concept] = ConceptInfo(
                    min(info.level, level), min(info.first_year_seen, year)
                )

        for year in by_year:
            for pid in by_year[year]:
                rec = papers[pid]
                for concept in rec.level0_ids:
                    register(concept, 0, rec.year)
                for concept in rec.level3_ids:
                    register(concept, 3, rec.year)
        registry = {c: registry[c] for c in sorted(registry)}
        return cls(papers, by_year, registry, report or IngestReport())

    def __len__(self) -> int:
        return len(self.papers)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.papers

    def years(self) -> list[int]:
        return list(self.by_year)

    def year_max(self) -> int | None:
        return max(self.by_year) if self.by_year else None

    def iter_papers(self) -> Iterator[PaperRecord]:
        """Yield records in the deterministic (year, paper_id) order."""
        for year in self.by_year:
            for pid in self.by_year[year]:
                yield self.papers[pid]

    def disciplines(self) -> list[str]:
        """Sorted ids of all level-0 concepts assigned to any paper."""
        return sorted(c for c, info in self.concept_registry.items() if info.level == 0)


def _coerce_concepts(raw: object, key: str) -> tuple[tuple[str, float], ...]:
    if not isinstance(raw, list):
        raise _MalformedRecord(f"{key} must be a list")
    best: dict[str, float] = {}
    for entry in raw:
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not entry[0]
            or isinstance(entry[1], bool)
            or not isinstance(entry[1], (int, float))
        ):
            raise _MalformedRecord(f"{key} entries must be [concept, confidence] pairs")
        concept, conf = entry[0], float(entry[1])
        if conf != conf or conf > 1.0:
            raise _MalformedRecord(f"{key} confidence outside (0, 1]")
        if conf <= 0.0:
            continue  # the positive-confidence threshold drops these
        if conf > best.get(concept, 0.0):
            best[concept] = conf
    return tuple(sorted(best.items()))


def _coerce_str(raw: object, key: str) -> str:
    if not isinstance(raw, str) or not raw:
        raise _MalformedRecord(f"{key} must be a non-empty string")
    return raw


def validate_record(
    raw: dict,
    *,
    year_min: int = DEFAULT_YEAR_MIN,
    year_max: int = DEFAULT_YEAR_MAX,
) -> Union[PaperRecord, Rejection]:
    """Validate one parsed record.

    Returns a PaperRecord when all content filters pass, or a Rejection naming
    the first failed filter. Structural problems (missing mandatory keys,
    wrong types) raise an internal error that load_corpus counts as malformed.
    """
    if not isinstance(raw, dict):
        raise _MalformedRecord("record must be an object")
    for key in ("id", "year", "l0", "l3", "refs"):
        if key not in raw:
            raise _MalformedRecord(f"missing mandatory key {key!r}")
    paper_id = _coerce_str(raw["id"], "id")
    year = raw["year"]
    if isinstance(year, bool) or not isinstance(year, int):
        raise _MalformedRecord("year must be an integer")
    level0 = _coerce_concepts(raw["l0"], "l0")
    level3 = _coerce_concepts(raw["l3"], "l3")
    refs_raw = raw["refs"]
    if not isinstance(refs_raw, list) or any(not isinstance(r, str) or not r for r in refs_raw):
        raise _MalformedRecord("refs must be a list of non-empty strings")
    references = tuple(sorted(set(refs_raw) - {paper_id}))

    title = raw.get("title")
    if title is not None:
        title = _coerce_str(title, "title")
    venue = raw.get("venue")
    if venue is not None:
        venue = _coerce_str(venue, "venue")
    authors_raw = raw.get("authors", [])
    if not isinstance(authors_raw, list) or any(
        not isinstance(a, str) or not a for a in authors_raw
    ):
        raise _MalformedRecord("authors must be a list of non-empty strings")
    affil_raw = raw.get("affil", [])
    if not isinstance(affil_raw, list):
        raise _MalformedRecord("affil must be a list")
    affiliations: list[tuple[str, float, float]] = []
    for entry in affil_raw:
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 3
            or not isinstance(entry[0], str)
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in entry[1:])
        ):
            raise _MalformedRecord("affil entries must be [author, lat, lon] triples")
        lat, lon = float(entry[1]), float(entry[2])
        if lat != lat or lon != lon:
            raise _MalformedRecord("affil coordinates must be finite")
        affiliations.append((entry[0], lat, lon))

    if not (year_min <= year <= year_max):
        return Rejection(paper_id, REASON_YEAR)
    if not level0:
        return Rejection(paper_id, REASON_LEVEL0)
    if len(level3) < 2:
        return Rejection(paper_id, REASON_LEVEL3)
    return PaperRecord(
        paper_id=paper_id,
        year=year,
        level0_fields=level0,
        level3_fields=level3,
        references=references,
        title=title,
        venue_id=venue,
        authors=tuple(authors_raw),
        affiliations=tuple(affiliations),
    )


def load_corpus(
    path: str | Path,
    *,
    year_min: int = DEFAULT_YEAR_MIN,
    year_max: int = DEFAULT_YEAR_MAX,
    schema_version: int = SCHEMA_VERSION,
) -> CorpusStore:
    """Stream a line-delimited corpus file into a validated store.

    The first non-blank line must be a header object with a matching
    "schema_version". Malformed lines are counted, logged at debug level, and
    skipped; if they exceed half of all data lines the load aborts.
    """
    path = Path(path)
    report = IngestReport()
    records: list[PaperRecord] = []
    seen: set[str] = set()
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus file {path}: {exc}") from exc
    with fh:
        header_seen = False
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if not header_seen:
                header_seen = True
                try:
                    header = json.loads(line)
                    version = header["schema_version"]
                except (json.JSONDecodeError, TypeError, KeyError) as exc:
                    raise DataError(
                        f"{path}: first line must be a schema header object"
                    ) from exc
                if version != schema_version:
                    raise DataError(
                        f"{path}: schema version {version!r} unsupported "
                        f"(expected {schema_version})"
                    )
                report.schema_version = version
                continue
            report.lines += 1
            try:
                parsed = json.loads(line)
                result = validate_record(parsed, year_min=year_min, year_max=year_max)
            except (json.JSONDecodeError, _MalformedRecord) as exc:
                report.malformed += 1
                logger.debug("%s:%d malformed line: %s", path, lineno, exc)
                continue
            if isinstance(result, Rejection):
                report.rejections.append(result)
                continue
            if result.paper_id in seen:
                report.duplicate_ids += 1
                report.malformed += 1
                logger.debug("%s:%d duplicate paper id %s", path, lineno, result.paper_id)
                continue
            seen.add(result.paper_id)
            records.append(result)
            report.accepted += 1
    if report.lines and report.malformed * 2 > report.lines:
        raise CorpusQualityError(
            f"{path}: {report.malformed} of {report.lines} lines malformed (>50%)"
        )
    logger.info(
        "loaded %d papers from %s (%d rejected, %d malformed)",
        report.accepted,
        path,
        len(report.rejections),
        report.malformed,
    )
    return CorpusStore.from_records(records, report)


def record_to_json(rec: PaperRecord) -> dict:
    """Canonical JSON form of a record; key order is fixed."""
    obj: dict = {
        "id": rec.paper_id,
        "year": rec.year,
        "l0": [[c, conf] for c, conf in rec.level0_fields],
        "l3": [[c, conf] for c, conf in rec.level3_fields],
        "refs": list(rec.references),
    }
    if rec.title is not None:
        obj["title"] = rec.title
    if rec.venue_id is not None:
        obj["venue"] = rec.venue_id
    if rec.authors:
        obj["authors"] = list(rec.authors)
    if rec.affiliations:
        obj["affil"] = [[a, lat, lon] for a, lat, lon in rec.affiliations]
    return obj


def save_corpus(store: CorpusStore, path: str | Path) -> None:
    """Write the canonical line-delimited form; load_corpus round-trips it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps({"schema_version": SCHEMA_VERSION}) + "\n")
        for rec in store.iter_papers():
            fh.write(json.dumps(record_to_json(rec), separators=(",", ":")) + "\n")


def write_rejection_report(store: CorpusStore, path: str | Path) -> None:
    from .util import write_csv

    write_csv(
        Path(path),
        ("paper_id", "reason"),
        [(r.paper_id, r.reason) for r in store.ingest_report.rejections],
    )


@dataclass
class CitationIndex:
    """Forward/backward citation maps over a store.

    forward has a key for every in-store paper and only for in-store papers;
    references to ids outside the store stay in backward and are tallied as
    external. Citing-year anomalies (citer earlier than cited) are counted,
    not repaired.
    """

    forward: dict[str, frozenset[str]]
    backward: dict[str, frozenset[str]]
    year_of: dict[str, int]
    external_references: int
    year_anomalies: int

    def citers(self, paper_id: str) -> frozenset[str]:
        return self.forward.get(paper_id, frozenset())

    def citation_count(self, paper_id: str) -> int:
        return len(self.forward.get(paper_id, ()))

    def citer_years(self, paper_id: str) -> list[int]:
        return sorted(self.year_of[c] for c in self.forward.get(paper_id, ()))


def build_citation_index(store: CorpusStore) -> CitationIndex:
    forward: dict[str, set[str]] = {pid: set() for pid in store.papers}
    backward: dict[str, frozenset[str]] = {}
    external = 0
    anomalies = 0
    for rec in store.iter_papers():
        backward[rec.paper_id] = frozenset(rec.references)
        for ref in rec.references:
            cited = store.papers.get(ref)
            if cited is None:
                external += 1
                continue
            forward[ref].add(rec.paper_id)
            if rec.year < cited.year:
                anomalies += 1
    if external:
        logger.info("citation index: %d references point outside the store", external)
    return CitationIndex(
        forward={pid: frozenset(c) for pid, c in forward.items()},
        backward=backward,
        year_of={pid: rec.year for pid, rec in store.papers.items()},
        external_references=external,
        year_anomalies=anomalies,
    )
