import random

import pytest

from effectsum import (INT_MIN, INT_SUM, PrioritySearchTree, RangeSumPst,
                       RangeSumTree, STR_CONCAT)
from effectsum import instrument
from effectsum.rangekit import Entry, beats, select_top


def brute_top_k(points, lo, hi, k):
    """points: list of (x, fid, w); the deterministic tie-break oracle."""
    qual = [(w, fid, x) for x, fid, w in points
            if (lo is None or x >= lo) and (hi is None or x <= hi)]
    qual.sort(key=lambda t: (-t[0], t[1]))
    return [(fid, w) for w, fid, _ in qual[:k]]


class TestPrioritySearchTree:
    def test_insert_then_delete_leaves_empty(self):
        pst = PrioritySearchTree()
        h = pst.insert(5, "only", 1)
        pst.delete(h)
        assert len(pst) == 0
        assert pst.top_k(0, 10, 3) == []

    def test_root_holds_max_priority(self):
        pst = PrioritySearchTree()
        pst.insert(1, "p", 5)
        pst.insert(2, "q", 9)
        pst.insert(3, "r", 1)
        assert pst.tree.root.held.weight == 9

    def test_top_k_examples(self):
        pst = PrioritySearchTree()
        pst.insert(1, "p", 5)
        pst.insert(2, "q", 9)
        pst.insert(3, "r", 1)
        assert pst.top_k(1, 2, 1) == [(2, "q", 9)]
        assert pst.top_k(1, 3, 0) == []
        with pytest.raises(ValueError):
            pst.top_k(3, 1, 1)

    def test_delete_absent_handle(self):
        pst = PrioritySearchTree()
        h = pst.insert(1, "a", 1)
        pst.delete(h)
        with pytest.raises(ValueError):
            pst.delete(h)

    def test_invariants_hold_through_random_churn(self):
        rng = random.Random(3)
        pst = PrioritySearchTree()
        handles = []
        for step in range(1000):
            if handles and rng.random() < 0.45:
                pst.delete(handles.pop(rng.randrange(len(handles))))
            else:
                handles.append(pst.insert(rng.randint(-30, 30), step, rng.randint(-99, 99)))
            pst.tree.check_invariants()

    def test_random_range_top_k_matches_sort_and_filter(self):
        rng = random.Random(10)
        pst = PrioritySearchTree()
        points = []
        for i in range(500):
            x, prio = rng.randint(-200, 200), rng.randint(-500, 500)
            pst.insert(x, f"pt{i}", prio)
            points.append((x, i, prio))  # insertion order is the tie-break
        for _ in range(100):
            a, b = sorted((rng.randint(-220, 220), rng.randint(-220, 220)))
            k = rng.randint(0, 8)
            want = sorted(((p, seq, x) for x, seq, p in points if a <= x <= b),
                          key=lambda t: (-t[0], t[1]))[:k]
            got = pst.top_k(a, b, k)
            assert [(p, x) for p, _, x in want] == [(p, x) for x, _, p in got]


class TestRangeSumTree:
    def test_empty_range_is_empty_marker(self):
        t = RangeSumTree(INT_SUM)
        t.insert(1, 10)
        assert t.range_sum(5, 9) is None

    def test_int_sum_example(self):
        t = RangeSumTree(INT_SUM)
        t.insert(1, 10)
        t.insert(4, 7)
        assert t.range_sum(0, 5) == 17

    def test_min_semigroup_example(self):
        t = RangeSumTree(INT_MIN)
        t.insert(1, 10)
        t.insert(4, 7)
        assert t.range_sum(0, 5) == 7

    def test_concat_folds_in_ascending_order(self):
        t = RangeSumTree(STR_CONCAT)
        for x, s in [(4, "d"), (1, "a"), (3, "c"), (2, "b")]:
            t.insert(x, s)
        assert t.range_sum(1, 4) == "abcd"
        assert t.range_sum(2, 3) == "bc"

    def test_random_against_fold_oracle(self):
        rng = random.Random(4)
        for sg in (INT_SUM, INT_MIN):
            t = RangeSumTree(sg)
            pts = []
            handles = []
            for i in range(300):
                x, w = rng.randint(-40, 40), rng.randint(-99, 99)
                handles.append((t.insert(x, w), x, w))
                pts.append((x, w))
            for _ in range(80):
                a, b = sorted((rng.randint(-45, 45), rng.randint(-45, 45)))
                vals = [w for x, w in pts if a <= x <= b]
                expect = None
                for w in vals if sg is INT_SUM else []:
                    expect = w if expect is None else expect + w
                if sg is INT_MIN:
                    expect = min(vals) if vals else None
                assert t.range_sum(a, b) == expect


class TestRangeSumPst:
    def test_suffix_boundary_inclusive(self):
        st = RangeSumPst(INT_SUM)
        st.add("f", 8, 3)
        assert st.suffix_sum(8) == 3
        assert st.suffix_sum(9) is None

    def test_duplicate_and_missing_ids(self):
        st = RangeSumPst(INT_SUM)
        st.add("f", 0, 1)
        with pytest.raises(ValueError):
            st.add("f", 2, 1)
        with pytest.raises(ValueError):
            st.remove("zzz")

    def test_duplicate_radii_allowed(self):
        st = RangeSumPst(INT_SUM)
        for i in range(10):
            st.add(f"f{i}", 7, i)
        assert st.suffix_sum(7) == sum(range(10))
        assert [e.fid for e in st.suffix_top_k(7, 2)] == ["f9", "f8"]

    def test_random_suffix_queries_match_oracle(self):
        rng = random.Random(6)
        st = RangeSumPst(INT_SUM)
        live = {}
        for i in range(300):
            fid = f"f{i}"
            r, w = rng.randint(-30, 30), rng.randint(-99, 99)
            st.add(fid, r, w)
            live[fid] = (r, w)
        for fid in list(live):
            if rng.random() < 0.35:
                st.remove(fid)
                del live[fid]
        for _ in range(100):
            q = rng.randint(-35, 35)
            vals = [w for r, w in live.values() if r >= q]
            assert st.suffix_sum(q) == (sum(vals) if vals else None)
            for k in (1, 3, 10):
                pts = [(r, fid, w) for fid, (r, w) in live.items()]
                want = brute_top_k(pts, q, None, k)
                got = [(e.fid, e.weight) for e in st.suffix_top_k(q, k)]
                assert got == want

    def test_heap_size_stays_within_seed_plus_k(self):
        rng = random.Random(7)
        st = RangeSumPst(INT_SUM)
        for i in range(500):
            st.add(f"f{i}", rng.randint(0, 400), rng.randint(0, 10_000))
        height = st.tree.height()
        for k in (1, 4, 16):
            with instrument.capture() as c:
                st.suffix_top_k(120, k)
            seeds = c.get("pst_seed_subtrees", 0)
            peak = c.get("pst_heap_peak", 0)
            assert peak <= k + 2 * height + seeds

    def test_index_bijection(self):
        rng = random.Random(8)
        st = RangeSumPst(INT_SUM)
        live = set()
        for i in range(200):
            if live and rng.random() < 0.4:
                fid = rng.choice(sorted(live))
                st.remove(fid)
                live.discard(fid)
            else:
                fid = f"f{i}"
                st.add(fid, rng.randint(0, 50), rng.randint(0, 50))
                live.add(fid)
            assert set(st.index.ids()) == live
            assert {e.fid for e in st.entries()} == live


class TestSelection:
    def test_select_top_orders_by_weight_then_id(self):
        entries = [Entry((0,), f, w) for f, w in
                   [("b", 5), ("a", 5), ("c", 9), ("d", 1)]]
        got = [(e.fid, e.weight) for e in select_top(entries, 3)]
        assert got == [("c", 9), ("a", 5), ("b", 5)]

    def test_select_top_large_list_uses_heap_path(self):
        rng = random.Random(9)
        entries = [Entry((0,), i, rng.randint(0, 10_000)) for i in range(3000)]
        got = select_top(entries, 7)
        want = sorted(entries, key=lambda e: (-e.weight, e.fid))[:7]
        assert [(e.fid, e.weight) for e in got] == [(e.fid, e.weight) for e in want]

    def test_beats_tie_break(self):
        a = Entry((0,), "a", 5)
        b = Entry((0,), "b", 5)
        assert beats(a, b) and not beats(b, a)
