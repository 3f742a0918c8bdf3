"""Deterministic synthetic corpus generators for tests and benchmarks.

Three generators are built in:

* planted-cycle: per discipline, one or more concept cycles whose edges
  arrive one year at a time, so the paper contributing the closing edge is
  the unique gap opener of its cycle (a 3-cycle closes as a filled triangle
  and opens nothing). Optional filler papers either introduce a pair of
  brand-new concepts (novel, never a gap) or repeat an already-introduced
  pair (nothing novel).
* planted-clique: the edges of one complete graph per discipline, arriving in
  lexicographic order, one paper per year.
* random-pairs: a large random corpus with reference lists, venues, authors,
  and coordinates, used for scale runs.

Given the same parameters and seed, output files are byte-identical.
"""

from __future__ import annotations

import json
import random
from itertools import combinations
from pathlib import Path

from .corpus import SCHEMA_VERSION
from .errors import ConfigError

GENERATORS = ("planted-cycle", "planted-clique", "random-pairs")

_TITLE_VERBS = (
    "producing", "generating", "developing", "constructing", "confirming",
    "supporting", "improving", "enhancing", "exploiting", "launching",
)


def _shuffled_take(rng: random.Random, items: list, k: int) -> list:
    pool = list(items)
    rng.shuffle(pool)
    return pool[:k]


class _Emitter:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.records: list[dict] = []
        self._by_discipline: dict[str, list[str]] = {}

    def add(
        self,
        paper_id: str,
        year: int,
        discipline: str,
        concepts: list[str],
        *,
        extra_discipline: str | None = None,
        venue_pool: int = 3,
        author_pool: list[str] | None = None,
        max_refs: int = 3,
    ) -> None:
        rng = self.rng
        record: dict = {
            "id": paper_id,
            "year": year,
            "l0": [[discipline, 1.0]]
            + ([[extra_discipline, 1.0]] if extra_discipline else []),
            "l3": [[c, 1.0] for c in sorted(concepts)],
            "refs": [],
        }
        earlier = self._by_discipline.setdefault(discipline, [])
        if earlier and max_refs > 0:
            n_refs = rng.randrange(0, min(max_refs, len(earlier)) + 1)
            record["refs"] = sorted(_shuffled_take(rng, earlier, n_refs))
        record["title"] = (
            f"{_TITLE_VERBS[rng.randrange(len(_TITLE_VERBS))]} "
            f"{concepts[0]} with {concepts[-1]}"
        )
        record["venue"] = f"V{discipline}_{rng.randrange(venue_pool)}"
        if author_pool:
            team = _shuffled_take(self.rng, author_pool, 1 + rng.randrange(3))
            record["authors"] = team
            affil = []
            for author in team:
                if rng.random() < 0.7:
                    affil.append(
                        [author, round(rng.random() * 140 - 70, 4), round(rng.random() * 360 - 180, 4)]
                    )
            if affil:
                record["affil"] = affil
        earlier.append(paper_id)
        self.records.append(record)


def _write(records: list[dict], out_path: Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps({"schema_version": SCHEMA_VERSION}) + "\n")
        for record in records:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    return out_path


def planted_cycle(
    out_path: Path,
    seed: int,
    *,
    cycle_len: int = 5,
    cycles: int = 1,
    disciplines: int = 1,
    filler_fresh: int = 0,
    filler_dup: int = 0,
    start_year: int = 2000,
) -> Path:
    """One gap opener per planted cycle: the paper closing the loop.

    Cycle k of discipline d walks concepts D{d}K{k}C0..C{n-1}; edge i arrives
    in year start_year + i, so the wrap-around edge arrives last. Fresh
    fillers introduce two brand-new concepts; duplicate fillers re-state the
    first cycle edge a year after the cycle completed.
    """
    if cycle_len < 3:
        raise ConfigError("cycle length must be at least 3")
    if disciplines < 1 or cycles < 1:
        raise ConfigError("need at least one discipline and one cycle")
    rng = random.Random(seed)
    emit = _Emitter(rng)
    for d in range(disciplines):
        discipline = f"D{d}"
        authors = [f"A{d}_{i}" for i in range(8)]
        for k in range(cycles):
            concepts = [f"D{d}K{k}C{i}" for i in range(cycle_len)]
            for i in range(cycle_len):
                emit.add(
                    f"D{d}K{k}P{i:03d}",
                    start_year + i,
                    discipline,
                    [concepts[i], concepts[(i + 1) % cycle_len]],
                    author_pool=authors,
                )
    for j in range(filler_fresh):
        d = j % disciplines
        emit.add(
            f"F{j:05d}",
            start_year + (j % cycle_len),
            f"D{d}",
            [f"D{d}F{j}a", f"D{d}F{j}b"],
            author_pool=[f"A{d}_{i}" for i in range(8)],
        )
    for j in range(filler_dup):
        d = j % disciplines
        k = j % cycles
        emit.add(
            f"G{j:05d}",
            start_year + cycle_len,
            f"D{d}",
            [f"D{d}K{k}C0", f"D{d}K{k}C1"],
            author_pool=[f"A{d}_{i}" for i in range(8)],
        )
    return _write(emit.records, out_path)


def planted_clique(
    out_path: Path,
    seed: int,
    *,
    clique_size: int = 4,
    disciplines: int = 1,
    start_year: int = 2000,
) -> Path:
    """Edges of one complete graph per discipline, one paper per year."""
    if clique_size < 2:
        raise ConfigError("clique size must be at least 2")
    rng = random.Random(seed)
    emit = _Emitter(rng)
    for d in range(disciplines):
        discipline = f"D{d}"
        concepts = [f"D{d}C{i}" for i in range(clique_size)]
        authors = [f"A{d}_{i}" for i in range(8)]
        for i, (u, v) in enumerate(combinations(concepts, 2)):
            emit.add(
                f"D{d}Q{i:03d}", start_year + i, discipline, [u, v], author_pool=authors
            )
    return _write(emit.records, out_path)


def random_pairs(
    out_path: Path,
    seed: int,
    *,
    papers: int = 1000,
    concepts: int = 200,
    disciplines: int = 4,
    min_concepts: int = 2,
    max_concepts: int = 4,
    year_min: int = 1980,
    year_max: int = 2020,
    venues: int = 50,
    author_pool: int = 500,
    max_refs: int = 6,
    affil_prob: float = 0.5,
    dual_discipline_prob: float = 0.1,
) -> Path:
    """Uniform random corpus; concepts are partitioned across disciplines."""
    if papers < 0:
        raise ConfigError("papers must be non-negative")
    if concepts < disciplines * max_concepts:
        raise ConfigError("too few concepts for the requested paper width")
    rng = random.Random(seed)
    per_discipline = concepts // disciplines
    lines: list[dict] = []
    for j in range(papers):
        d = rng.randrange(disciplines)
        base = d * per_discipline
        k = min_concepts + rng.randrange(max_concepts - min_concepts + 1)
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.add(base + rng.randrange(per_discipline))
        l0 = [[f"D{d}", 1.0]]
        if disciplines > 1 and rng.random() < dual_discipline_prob:
            d2 = rng.randrange(disciplines - 1)
            if d2 >= d:
                d2 += 1
            l0.append([f"D{d2}", 1.0])
        record: dict = {
            "id": f"P{j:07d}",
            "year": year_min + rng.randrange(year_max - year_min + 1),
            "l0": sorted(l0),
            "l3": [[f"C{c:06d}", 1.0] for c in sorted(chosen)],
            "refs": [],
        }
        if j and max_refs:
            n_refs = rng.randrange(0, max_refs + 1)
            refs = {f"P{rng.randrange(j):07d}" for _ in range(n_refs)}
            record["refs"] = sorted(refs)
        record["venue"] = f"V{rng.randrange(venues):05d}"
        team_size = 1 + rng.randrange(5)
        team = sorted({f"A{rng.randrange(author_pool):06d}" for _ in range(team_size)})
        record["authors"] = team
        affil = []
        for author in team:
            if rng.random() < affil_prob:
                affil.append(
                    [author, round(rng.random() * 140 - 70, 4), round(rng.random() * 360 - 180, 4)]
                )
        if affil:
            record["affil"] = affil
        record["title"] = (
            f"{_TITLE_VERBS[rng.randrange(len(_TITLE_VERBS))]} topic {j % 97}"
        )
        lines.append(record)
    return _write(lines, out_path)


def make_synthetic(generator: str, out_path: Path, seed: int, **params) -> Path:
    """Dispatch to a named generator; unknown names are a config error."""
    if generator == "planted-cycle":
        return planted_cycle(out_path, seed, **params)
    if generator == "planted-clique":
        return planted_clique(out_path, seed, **params)
    if generator == "random-pairs":
        return random_pairs(out_path, seed, **params)
    raise ConfigError(
        f"unknown generator {generator!r}; available: {', '.join(GENERATORS)}"
    )
