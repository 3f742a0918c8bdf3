"""Shared test fixtures: record builders, random temporal graphs, and an
independent naive persistence reduction used to cross-check the engine."""

from __future__ import annotations

import json
import random
from pathlib import Path

from gapminer.concept_net import TemporalConceptNetwork, network_from_edge_times
from gapminer.corpus import SCHEMA_VERSION, CorpusStore, PaperRecord, validate_record
from gapminer.topology import FlagFiltration, facets, _xor_sorted


def raw_record(pid, year, l3, l0=("D",), refs=(), **extra):
    record = {
        "id": pid,
        "year": year,
        "l0": [[c, 1.0] for c in l0],
        "l3": [[c, 1.0] for c in l3],
        "refs": list(refs),
    }
    record.update(extra)
    return record


def build_store(raws) -> CorpusStore:
    records = []
    for raw in raws:
        result = validate_record(raw)
        assert isinstance(result, PaperRecord), f"unexpected rejection: {result}"
        records.append(result)
    return CorpusStore.from_records(records)


def write_corpus(path: Path, raws, header=True) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(json.dumps({"schema_version": SCHEMA_VERSION}) + "\n")
        for raw in raws:
            fh.write((raw if isinstance(raw, str) else json.dumps(raw)) + "\n")
    return path


def random_temporal_network(
    rng: random.Random,
    max_nodes: int = 12,
    max_edges: int = 30,
    year_lo: int = 2000,
    year_hi: int = 2006,
) -> TemporalConceptNetwork:
    n = rng.randrange(2, max_nodes + 1)
    nodes = [f"n{i:02d}" for i in range(n)]
    all_pairs = [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :]]
    rng.shuffle(all_pairs)
    m = rng.randrange(1, min(max_edges, len(all_pairs)) + 1)
    edges = [
        (u, v, rng.randrange(year_lo, year_hi + 1)) for u, v in all_pairs[:m]
    ]
    return network_from_edge_times("T", edges)


def full_reduction(filtration: FlagFiltration):
    """Standard left-to-right column reduction of the full boundary matrix.

    No clearing, no union-find shortcut; returns ({(birth, death)}, {essential})
    as order-index sets. Independent of compute_persistence.
    """
    simplices = filtration.simplices
    index_of = {s.vertices: s.order_index for s in simplices}
    columns = [sorted(index_of[f] for f in facets(s.vertices)) for s in simplices]
    low_owner: dict[int, int] = {}
    pairs: set[tuple[int, int]] = set()
    for j in range(len(columns)):
        col = columns[j]
        while col:
            owner = low_owner.get(col[-1])
            if owner is None:
                break
            col = _xor_sorted(col, columns[owner])
        columns[j] = col
        if col:
            low_owner[col[-1]] = j
            pairs.add((col[-1], j))
    births = {b for b, _ in pairs}
    essentials = {j for j in range(len(columns)) if not columns[j] and j not in births}
    return pairs, essentials


def engine_dim1_profile(diagram, years):
    """Net dimension-1 class count per year from the engine's diagram."""
    profile = {}
    for year in years:
        births = sum(
            1
            for p in diagram.pairs
            if p.dim == 1 and p.birth.filtration_value <= year
        ) + sum(
            1
            for e in diagram.essentials
            if e.dim == 1 and e.birth.filtration_value <= year
        )
        deaths = sum(
            1
            for p in diagram.pairs
            if p.dim == 1 and p.death.filtration_value <= year
        )
        profile[year] = births - deaths
    return profile
