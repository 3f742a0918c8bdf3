"""Category assignment, share tables, and the null-model comparison."""

from __future__ import annotations

import random

import pytest

from gapminer.classify import (
    CATEGORIES,
    Category,
    analyze_store,
    classify_all,
    null_comparison,
    share_table,
)
from gapminer.errors import MissingDependencyError
from gapminer.topology import betti_oracle, build_flag_filtration

from helpers import build_store, raw_record


def cycle_corpus(n=4, discipline="D", start=2000, prefix="P"):
    """Papers introducing an n-cycle one edge per year; last paper closes it."""
    concepts = [f"{discipline}c{i}" for i in range(n)]
    return [
        raw_record(
            f"{prefix}{i:02d}",
            start + i,
            (concepts[i], concepts[(i + 1) % n]),
            l0=(discipline,),
        )
        for i in range(n)
    ]


def test_cycle_closer_is_gap_opener():
    store = build_store(cycle_corpus(4))
    topo = analyze_store(store)
    # Construction check via the oracle: the cycle exists only after the last edge.
    filt = build_flag_filtration(topo["D"].network, 2)
    assert betti_oracle(filt, 2002)[1] == 0
    assert betti_oracle(filt, 2003)[1] == 1
    classifications = classify_all(store, topo)
    assert classifications["P03"].category is Category.GAP_OPENER
    for pid in ("P00", "P01", "P02"):
        assert classifications[pid].category is Category.NOVEL_PAIR_NON_GAP


def test_tree_edge_and_duplicate_categories():
    raws = cycle_corpus(4) + [
        raw_record("leaf", 2010, ("Dc0", "fresh")),        # tree edge: novel, no gap
        raw_record("copy", 2010, ("Dc0", "Dc1")),          # pre-existing pair
    ]
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    assert classifications["leaf"].category is Category.NOVEL_PAIR_NON_GAP
    assert classifications["copy"].category is Category.NO_NOVEL_PAIR
    assert classifications["copy"].evidence == ()


def test_same_year_co_introducers_all_open_the_gap():
    raws = cycle_corpus(4)
    raws.append(raw_record("twin", 2003, ("Dc0", "Dc3")))  # same year as the closer
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    assert classifications["P03"].category is Category.GAP_OPENER
    assert classifications["twin"].category is Category.GAP_OPENER


def test_gap_anywhere_wins_across_disciplines():
    # The paper closes a cycle in D but only adds a tree edge in E.
    raws = cycle_corpus(4, discipline="D")
    raws[-1]["l0"] = [["D", 1.0], ["E", 1.0]]
    raws.append(raw_record("e1", 1999, ("Ec0", "Ec1"), l0=("E",)))
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    closer = classifications["P03"]
    assert closer.category is Category.GAP_OPENER
    kinds = {(d, kind) for d, _, kind in closer.evidence}
    assert ("D", "gap") in kinds
    assert ("E", "novel") in kinds


def test_missing_discipline_raises():
    store = build_store(cycle_corpus(4))
    with pytest.raises(MissingDependencyError):
        classify_all(store, {})


def test_partition_property():
    rng = random.Random(12)
    raws = []
    for i in range(80):
        d = f"D{i % 3}"
        concepts = rng.sample([f"{d}x{j}" for j in range(10)], rng.randrange(2, 5))
        raws.append(raw_record(f"P{i:03d}", 2000 + rng.randrange(6), concepts, l0=(d,)))
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    assert len(classifications) == len(store)
    by_category = {c: 0 for c in CATEGORIES}
    for cls in classifications.values():
        by_category[cls.category] += 1
    assert sum(by_category.values()) == len(store)


def test_share_table_overall():
    raws = cycle_corpus(4) + [
        raw_record(f"dup{i}", 2010, ("Dc0", "Dc1")) for i in range(6)
    ]
    store = build_store(raws)
    rows = share_table(classify_all(store, analyze_store(store)), store, "overall")
    shares = {r.category: r for r in rows}
    assert shares[Category.GAP_OPENER].count == 1
    assert shares[Category.GAP_OPENER].fraction == pytest.approx(0.10)
    assert sum(r.fraction for r in rows) == pytest.approx(1.0, abs=1e-9)


def test_share_table_all_no_novel():
    raws = [raw_record("p1", 2000, ("a", "b"))] + [
        raw_record(f"q{i}", 2001, ("a", "b")) for i in range(4)
    ]
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    rows = share_table(
        {pid: c for pid, c in classifications.items() if pid != "p1"}, store, "overall"
    )
    shares = {r.category: r.fraction for r in rows}
    assert shares[Category.NO_NOVEL_PAIR] == 1.0
    assert shares[Category.GAP_OPENER] == 0.0


def test_share_table_groupings_sum_to_one():
    rng = random.Random(8)
    raws = []
    for i in range(60):
        d = f"D{i % 2}"
        concepts = rng.sample([f"{d}x{j}" for j in range(8)], 2)
        l0 = (d,) if i % 5 else ("D0", "D1")
        raws.append(raw_record(f"P{i:03d}", 2000 + i % 4, concepts, l0=l0))
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    for grouping in ("overall", "discipline", "year"):
        rows = share_table(classifications, store, grouping)
        groups = {r.group for r in rows}
        for group in groups:
            total = sum(r.fraction for r in rows if r.group == group)
            assert total == pytest.approx(1.0, abs=1e-9)


def test_planted_cycles_three_disciplines_with_fillers():
    raws = []
    for d in range(3):
        raws.extend(cycle_corpus(5, discipline=f"D{d}", prefix=f"D{d}P"))
    for j in range(50):
        d = j % 3
        kind = j % 2
        if kind:
            raws.append(
                raw_record(f"F{j:03d}", 2006, (f"D{d}f{j}a", f"D{d}f{j}b"), l0=(f"D{d}",))
            )
        else:
            raws.append(
                raw_record(f"F{j:03d}", 2006, (f"D{d}c0", f"D{d}c1"), l0=(f"D{d}",))
            )
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    openers = [pid for pid, c in classifications.items() if c.category is Category.GAP_OPENER]
    assert sorted(openers) == ["D0P04", "D1P04", "D2P04"]


def test_classification_invariant_under_within_year_order():
    raws = cycle_corpus(5)
    store_fwd = build_store(raws)
    store_rev = build_store(list(reversed(raws)))
    a = classify_all(store_fwd, analyze_store(store_fwd))
    b = classify_all(store_rev, analyze_store(store_rev))
    assert {p: c.category for p, c in a.items()} == {p: c.category for p, c in b.items()}


def test_null_comparison_deterministic():
    raws = cycle_corpus(5) + [
        raw_record(f"F{j}", 2006, (f"f{j}a", f"f{j}b")) for j in range(10)
    ]
    store = build_store(raws)
    rows_a = null_comparison(store, seed=9, replicates=2)
    rows_b = null_comparison(store, seed=9, replicates=2)
    assert rows_a == rows_b
    assert all(r.source == "random" for r in rows_a)


def test_null_comparison_singleton_corpus_equals_real():
    store = build_store([raw_record("only", 2000, ("a", "b", "c"))])
    real = share_table(classify_all(store, analyze_store(store)), store, "overall")
    rand = [r for r in null_comparison(store, seed=1, replicates=3) if r.grouping == "overall"]
    real_fracs = {r.category: r.fraction for r in real}
    rand_fracs = {r.category: r.fraction for r in rand}
    assert real_fracs == rand_fracs
    assert all(r.stderr == 0.0 for r in rand)


def test_null_comparison_directional_on_planted_structure():
    # Many planted cycles plus fresh-pair fillers: shuffled labels give near
    # tree-like graphs, so the real gap share must exceed the random mean.
    raws = []
    for d in range(2):
        for k in range(4):
            concepts = [f"D{d}K{k}c{i}" for i in range(5)]
            for i in range(5):
                raws.append(
                    raw_record(
                        f"D{d}K{k}P{i}",
                        2000 + i,
                        (concepts[i], concepts[(i + 1) % 5]),
                        l0=(f"D{d}",),
                    )
                )
        for j in range(40):
            raws.append(
                raw_record(f"D{d}F{j:02d}", 2000 + j % 5, (f"D{d}f{j}a", f"D{d}f{j}b"), l0=(f"D{d}",))
            )
    store = build_store(raws)
    classifications = classify_all(store, analyze_store(store))
    real = {
        r.category: r.fraction
        for r in share_table(classifications, store, "overall")
    }
    rand = {
        r.category: r.fraction
        for r in null_comparison(store, seed=4, replicates=5)
        if r.grouping == "overall"
    }
    assert real[Category.GAP_OPENER] > rand[Category.GAP_OPENER]
