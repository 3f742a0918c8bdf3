"""Temporal network construction, novel-pair attribution, and the label null model."""

from __future__ import annotations

import random
import pytest

from gapminer.concept_net import (
    build_network,
    label_multiset,
    load_network,
    network_from_edge_times,
    novel_pairs,
    randomize_labels,
    save_network,
)
from gapminer.errors import InfeasibleResamplingError, UnknownDisciplineError

from helpers import build_store, raw_record


def test_first_occurrence_wins():
    store = build_store(
        [
            raw_record("P1", 2000, ("a", "b")),
            raw_record("P2", 2001, ("a", "b")),
        ]
    )
    net = build_network(store, "D")
    assert net.edges[("a", "b")].time == 2000
    assert net.edges[("a", "b")].introducers == frozenset({"P1"})
    assert net.tau_max == 2000


def test_same_year_tie_records_all_introducers():
    store = build_store(
        [
            raw_record("P1", 2000, ("a", "b")),
            raw_record("P2", 2000, ("a", "b")),
        ]
    )
    net = build_network(store, "D")
    assert net.edges[("a", "b")].introducers == frozenset({"P1", "P2"})


def test_pairwise_expansion():
    store = build_store([raw_record("P1", 2000, ("a", "b", "c"))])
    net = build_network(store, "D")
    assert set(net.edges) == {("a", "b"), ("a", "c"), ("b", "c")}
    assert all(e.time == 2000 and e.introducers == frozenset({"P1"}) for e in net.edges.values())


def test_unknown_discipline_raises():
    store = build_store([raw_record("P1", 2000, ("a", "b"))])
    with pytest.raises(UnknownDisciplineError):
        build_network(store, "NOPE")


def test_novel_pairs_cases():
    store = build_store(
        [
            raw_record("P1", 2000, ("a", "b")),
            raw_record("P2", 2001, ("a", "b")),
            raw_record("P3", 2002, ("a", "b", "c")),
        ]
    )
    net = build_network(store, "D")
    assert novel_pairs(store.papers["P2"], net) == set()
    assert novel_pairs(store.papers["P3"], net) == {("a", "c"), ("b", "c")}
    solo = build_store([raw_record("P1", 2000, ("a", "b", "c"))])
    assert len(novel_pairs(solo.papers["P1"], build_network(solo, "D"))) == 3


def test_novel_pairs_rejects_foreign_paper():
    store = build_store([raw_record("P1", 2000, ("a", "b"))])
    other = build_store([raw_record("Q1", 2000, ("a", "b"), l0=("E",))])
    net = build_network(store, "D")
    with pytest.raises(UnknownDisciplineError):
        novel_pairs(other.papers["Q1"], net)


def test_temporal_monotonicity_replay():
    rng = random.Random(11)
    for _ in range(20):
        raws = []
        for i in range(rng.randrange(2, 25)):
            year = 2000 + rng.randrange(6)
            concepts = rng.sample("abcdefgh", rng.randrange(2, 5))
            raws.append(raw_record(f"P{i:03d}", year, concepts))
        store = build_store(raws)
        net = build_network(store, "D")
        for year in store.years():
            partial = build_store([r for r in raws if r["year"] <= year])
            replayed = build_network(partial, "D")
            expected = {p for p, e in net.edges.items() if e.time <= year}
            assert set(replayed.edges) == expected


def test_insensitive_to_within_year_input_order():
    raws = [
        raw_record("P1", 2000, ("a", "b")),
        raw_record("P2", 2000, ("b", "c")),
        raw_record("P3", 2000, ("a", "c")),
        raw_record("P4", 2001, ("a", "d")),
    ]
    net1 = build_network(build_store(raws), "D")
    net2 = build_network(build_store(list(reversed(raws))), "D")
    assert net1 == net2  # times, introducers, and tie ranks all id-derived


def test_tie_rank_total_order():
    store = build_store(
        [
            raw_record("P2", 2000, ("c", "d")),
            raw_record("P1", 2000, ("a", "b")),
            raw_record("P3", 1999, ("e", "f")),
        ]
    )
    net = build_network(store, "D")
    ranked = sorted(net.edges.values(), key=lambda e: e.tie_rank)
    assert [e.tie_rank for e in ranked] == [0, 1, 2]
    assert ranked[0].time == 1999
    assert ranked[1].min_introducer() == "P1"


def test_network_dump_round_trip(tmp_path):
    store = build_store(
        [
            raw_record("P1", 2000, ("a", "b", "c")),
            raw_record("P2", 2001, ("a", "d")),
        ]
    )
    net = build_network(store, "D")
    path = tmp_path / "net.csv"
    save_network(net, path)
    assert load_network(path, "D") == net


def test_network_from_edge_times_keeps_earliest():
    net = network_from_edge_times("T", [("a", "b", 2003), ("b", "a", 2001)])
    assert net.edges[("a", "b")].time == 2001


def test_randomize_singleton_store_identical():
    store = build_store([raw_record("P1", 2000, ("a", "b", "c"))])
    assert randomize_labels(store, 5) == store


def test_randomize_preserves_counts_and_multiset():
    store = build_store(
        [
            raw_record("P1", 2000, ("a", "b")),
            raw_record("P2", 2001, ("c", "d")),
        ]
    )
    shuffled = randomize_labels(store, 123)
    for pid in store.papers:
        assert len(shuffled.papers[pid].level3_ids) == len(store.papers[pid].level3_ids)
        assert len(set(shuffled.papers[pid].level3_ids)) == len(
            shuffled.papers[pid].level3_ids
        )
    assert label_multiset(shuffled, "D") == label_multiset(store, "D")


def test_randomize_same_seed_identical():
    rng = random.Random(3)
    raws = []
    for i in range(40):
        concepts = rng.sample("abcdefghijkl", rng.randrange(2, 5))
        raws.append(raw_record(f"P{i:03d}", 2000 + i % 5, concepts, l0=(f"D{i % 2}",)))
    store = build_store(raws)
    assert randomize_labels(store, 42) == randomize_labels(store, 42)


def test_randomize_respects_discipline_boundaries():
    rng = random.Random(9)
    raws = []
    for i in range(60):
        d = f"D{i % 3}"
        concepts = rng.sample([f"{d}c{j}" for j in range(9)], rng.randrange(2, 5))
        raws.append(raw_record(f"P{i:03d}", 2000 + i % 4, concepts, l0=(d,)))
    store = build_store(raws)
    shuffled = randomize_labels(store, 7)
    for d in ("D0", "D1", "D2"):
        assert label_multiset(shuffled, d) == label_multiset(store, d)


def test_randomize_multi_discipline_papers_consistent():
    raws = [
        raw_record("P1", 2000, ("a", "b"), l0=("D", "E")),
        raw_record("P2", 2000, ("c", "d"), l0=("D", "E")),
        raw_record("P3", 2000, ("e", "f"), l0=("D",)),
    ]
    store = build_store(raws)
    shuffled = randomize_labels(store, 17)
    assert label_multiset(shuffled, "D") == label_multiset(store, "D")
    assert label_multiset(shuffled, "E") == label_multiset(store, "E")


def test_randomize_infeasible_raises():
    # Validation always dedupes labels, so infeasibility can only arise from
    # hand-built records; the guard still has to fire with a diagnostic.
    from gapminer.corpus import CorpusStore, PaperRecord

    degenerate = CorpusStore.from_records(
        [PaperRecord("P1", 2000, (("D", 1.0),), (("a", 1.0), ("a", 0.5)), ())]
    )
    with pytest.raises(InfeasibleResamplingError):
        randomize_labels(degenerate, 3)
