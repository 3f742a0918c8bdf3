"""Per-discipline temporal concept co-occurrence networks and the label null model.

A network's nodes are fine-grained (level-3) concepts; an undirected edge
appears the first year any paper of the discipline co-assigns the two
concepts, and never leaves. All papers of that earliest year containing the
pair are recorded as introducers.
"""

from __future__ import annotations

import csv
import logging
import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable

from .corpus import CorpusStore, PaperRecord
from .errors import InfeasibleResamplingError, UnknownDisciplineError
from .util import derive_seed

logger = logging.getLogger(__name__)

Pair = tuple[str, str]


@dataclass(frozen=True, slots=True)
class EdgeBirth:
    """First occurrence of a concept pair: the year, who introduced it, and a
    deterministic ordinal among edges sharing the year."""

    time: int
    introducers: frozenset[str]
    tie_rank: int

    def min_introducer(self) -> str:
        return min(self.introducers)


@dataclass
class TemporalConceptNetwork:
    discipline: str
    nodes: set[str]
    edges: dict[Pair, EdgeBirth]
    tau_max: int | None

    def edge_time(self, pair: Pair) -> int:
        return self.edges[pair].time


def _canonical(u: str, v: str) -> Pair:
    return (u, v) if u < v else (v, u)


def _finish_network(discipline: str, raw: dict[Pair, tuple[int, frozenset[str]]]) -> TemporalConceptNetwork:
    """Assign tie ranks (ascending time, min introducer id, pair) and freeze."""
    ordered = sorted(raw.items(), key=lambda kv: (kv[1][0], min(kv[1][1]), kv[0]))
    edges = {
        pair: EdgeBirth(time, intro, rank)
        for rank, (pair, (time, intro)) in enumerate(ordered)
    }
    nodes = {u for u, _ in edges} | {v for _, v in edges}
    tau_max = max((eb.time for eb in edges.values()), default=None)
    return TemporalConceptNetwork(discipline, nodes, edges, tau_max)


def build_network(store: CorpusStore, discipline: str) -> TemporalConceptNetwork:
    """Build the discipline's cumulative co-occurrence network.

    Papers are visited in the deterministic (year, paper_id) order; an edge's
    introducers are all papers of its first year that contain the pair.
    """
    info = store.concept_registry.get(discipline)
    if info is None or info.level != 0:
        raise UnknownDisciplineError(f"unknown discipline id {discipline!r}")
    raw: dict[Pair, tuple[int, frozenset[str]]] = {}
    for year in store.by_year:
        batch: dict[Pair, set[str]] = {}
        for pid in store.by_year[year]:
            rec = store.papers[pid]
            if discipline not in rec.level0_ids:
                continue
            for u, v in combinations(rec.level3_ids, 2):
                pair = _canonical(u, v)
                if pair in raw:
                    continue
                batch.setdefault(pair, set()).add(pid)
        for pair, intro in batch.items():
            raw[pair] = (year, frozenset(intro))
    return _finish_network(discipline, raw)


def network_from_edge_times(
    discipline: str, edges: Iterable[tuple[str, str, int]]
) -> TemporalConceptNetwork:
    """Construct a network directly from (u, v, year) triples.

    Duplicate pairs keep the earliest year. Introducers are synthesized;
    useful for tests and for loading edge dumps without a corpus.
    """
    raw: dict[Pair, tuple[int, frozenset[str]]] = {}
    for u, v, year in edges:
        if u == v:
            raise ValueError(f"self-loop {u!r}")
        pair = _canonical(u, v)
        existing = raw.get(pair)
        if existing is None or year < existing[0]:
            raw[pair] = (year, frozenset({f"edge:{pair[0]}|{pair[1]}"}))
    return _finish_network(discipline, raw)


def novel_pairs(paper: PaperRecord, network: TemporalConceptNetwork) -> set[Pair]:
    """Concept pairs this paper introduced into the discipline's network."""
    if network.discipline not in paper.level0_ids:
        raise UnknownDisciplineError(
            f"paper {paper.paper_id} is not assigned to discipline {network.discipline!r}"
        )
    result: set[Pair] = set()
    for u, v in combinations(paper.level3_ids, 2):
        pair = _canonical(u, v)
        birth = network.edges.get(pair)
        if birth is not None and paper.paper_id in birth.introducers:
            result.add(pair)
    return result


def save_network(network: TemporalConceptNetwork, path: str | Path) -> None:
    """Dump edges as delimited text: u, v, time, introducers (';'-joined)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("u", "v", "time", "introducers"))
        for pair in sorted(network.edges):
            birth = network.edges[pair]
            writer.writerow(
                (pair[0], pair[1], birth.time, ";".join(sorted(birth.introducers)))
            )


def load_network(path: str | Path, discipline: str) -> TemporalConceptNetwork:
    raw: dict[Pair, tuple[int, frozenset[str]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for row in reader:
            u, v, time, introducers = row
            raw[(u, v)] = (int(time), frozenset(introducers.split(";")))
    return _finish_network(discipline, raw)


def _deal_hands(
    pool: list[str], sizes: list[int], rng: random.Random, max_attempts: int = 50
) -> list[list[str]]:
    """Deal the shuffled label pool into hands of the given sizes so that no
    hand contains a duplicate label; collisions are repaired by swapping."""
    distinct = len(set(pool))
    if max(sizes) > distinct:
        raise InfeasibleResamplingError(
            f"a paper needs {max(sizes)} distinct labels but the group has {distinct}"
        )
    for _ in range(max_attempts):
        rng.shuffle(pool)
        hands: list[list[str]] = []
        pos = 0
        for size in sizes:
            hands.append(pool[pos : pos + size])
            pos += size
        if _repair_collisions(hands, rng):
            return hands
    raise InfeasibleResamplingError("could not resolve duplicate labels after resampling")


def _repair_collisions(hands: list[list[str]], rng: random.Random) -> bool:
    n = len(hands)
    for _ in range(200):
        dirty = False
        for i, hand in enumerate(hands):
            counts = Counter(hand)
            if len(counts) == len(hand):
                continue
            dirty = True
            dup = next(label for label, c in counts.items() if c > 1)
            slot = max(k for k, label in enumerate(hand) if label == dup)
            start = rng.randrange(n)
            done = False
            for off in range(n):
                j = (start + off) % n
                if j == i:
                    continue
                other = hands[j]
                if dup in other:
                    continue
                hand_set = set(hand)
                for m, candidate in enumerate(other):
                    if candidate not in hand_set:
                        hand[slot], other[m] = candidate, dup
                        done = True
                        break
                if done:
                    break
            if not done:
                return False
        if not dirty:
            return True
    return False


def randomize_labels(store: CorpusStore, seed: int) -> CorpusStore:
    """Null model: permute level-3 labels across papers, per discipline.

    Each paper keeps its label count (and its confidence values); the label
    multiset of every discipline is preserved exactly. Papers sharing the same
    set of discipline memberships are shuffled together, which keeps the
    multiset invariant exact even for multi-discipline papers. Labels within a
    paper stay distinct (collisions are resampled).
    """
    groups: dict[tuple[str, ...], list[PaperRecord]] = {}
    for rec in store.iter_papers():
        groups.setdefault(rec.level0_ids, []).append(rec)
    new_records: list[PaperRecord] = []
    for key in sorted(groups):
        members = groups[key]  # already in (year, paper_id) order
        rng = random.Random(derive_seed(seed, "labels", *key))
        pool = [c for rec in members for c in rec.level3_ids]
        sizes = [len(rec.level3_ids) for rec in members]
        hands = _deal_hands(pool, sizes, rng)
        for rec, hand in zip(members, hands):
            confidences = [conf for _, conf in rec.level3_fields]
            fields = tuple(sorted(zip(sorted(hand), confidences)))
            new_records.append(
                PaperRecord(
                    paper_id=rec.paper_id,
                    year=rec.year,
                    level0_fields=rec.level0_fields,
                    level3_fields=fields,
                    references=rec.references,
                    title=rec.title,
                    venue_id=rec.venue_id,
                    authors=rec.authors,
                    affiliations=rec.affiliations,
                )
            )
    return CorpusStore.from_records(new_records)


def label_multiset(store: CorpusStore, discipline: str) -> Counter:
    """Multiset of level-3 labels over the discipline's papers (for checks)."""
    counts: Counter = Counter()
    for rec in store.iter_papers():
        if discipline in rec.level0_ids:
            counts.update(rec.level3_ids)
    return counts
