import math
import random

import pytest

from effectsum import INT_MIN, INT_SUM, MultiDimStore
from effectsum import instrument


def brute_complement(points, q):
    """points: {fid: (coords, w)}; qualifying iff some coordinate >= corner."""
    return {fid: w for fid, (c, w) in points.items()
            if any(c[j] >= q[j] for j in range(len(q)))}


def ranked(d, k):
    order = sorted(((w, fid) for fid, w in d.items()), key=lambda t: (-t[0], t[1]))
    return [(fid, w) for w, fid in order[:k]]


class TestStructure:
    def test_insert_then_delete_leaves_empty(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((1, 2), "a", 5)
        st.remove("a")
        assert len(st) == 0
        assert st.complement_sum((0, 0)) is None

    def test_level2_trees_hold_their_subtree_points(self):
        from effectsum.rangekit import AUX_CUTOFF

        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((1, 5), "a", 1)
        st.add((2, 3), "b", 2)
        st.add((4, 0), "c", 3)
        assert st.tree.root.size == 3

        # grow past the companion-store cutoff and churn a little
        rng = random.Random(20)
        for i in range(60):
            st.add((rng.randint(-99, 99), rng.randint(-99, 99)), f"p{i}", i)
        for i in range(0, 60, 3):
            st.remove(f"p{i}")

        def _leaves(node):
            if node.left is None:
                return [node.entry]
            return _leaves(node.left) + _leaves(node.right)

        def walk(node):
            if node.left is None:
                return
            if node.aux is None:
                assert node.size < AUX_CUTOFF
            else:
                leaf_ids = {e.fid for e in _leaves(node)}
                aux_ids = {e.fid for e in node.aux.entries()}
                assert aux_ids == leaf_ids
            walk(node.left)
            walk(node.right)

        walk(st.tree.root)

    def test_duplicate_and_missing_ids(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((0, 0), "a", 1)
        with pytest.raises(ValueError):
            st.add((1, 1), "a", 1)
        with pytest.raises(ValueError):
            st.remove("b")

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            MultiDimStore(9, INT_SUM)

    def test_node_count_within_size_envelope(self):
        rng = random.Random(21)
        for dim in (1, 2, 3):
            st = MultiDimStore(dim, INT_SUM, track_ids=True)
            s = 220
            for i in range(s):
                st.add(tuple(rng.randint(0, 99) for _ in range(dim)), f"f{i}", i)
            bound = 6 * s * (1 + math.log2(s)) ** (dim - 1)
            assert st.node_count() <= bound

    def test_amortized_rebuild_work(self):
        rng = random.Random(22)
        st = MultiDimStore(3, INT_SUM, track_ids=True)
        live = []
        ops = 2000
        with instrument.capture() as c:
            for i in range(ops):
                if live and rng.random() < 0.35:
                    st.remove(live.pop(rng.randrange(len(live))))
                else:
                    fid = f"f{i}"
                    st.add(tuple(rng.randint(0, 999) for _ in range(3)), fid, i)
                    live.append(fid)
            rebuild = c.get("rebuild_entries", 0)
        per_op = rebuild / ops
        m = max(len(live), 2)
        assert per_op <= 12 * math.log2(m) ** 3


class TestBoxQueries:
    def test_empty_box(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((0, 0), "a", 1)
        assert st.box_sum([(5, 9), (5, 9)]) is None
        assert st.box_top_k([(5, 9), (5, 9)], 3) == []

    def test_box_sum_example(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((1, 1), "a", 5)
        st.add((2, 3), "b", 7)
        st.add((4, 0), "c", 2)
        assert st.box_sum([(1, 2), (0, 3)]) == 12
        assert st.box_top_k([(1, 4), (0, 3)], 2) == [("b", 7), ("a", 5)]

    def test_invalid_boxes(self):
        st = MultiDimStore(2, INT_SUM)
        with pytest.raises(ValueError):
            st.box_sum([(3, 1), (0, 1)])
        with pytest.raises(ValueError):
            st.box_sum([(0, 1)])

    def test_random_boxes_match_brute_force(self):
        rng = random.Random(23)
        for dim in (1, 2, 3):
            st = MultiDimStore(dim, INT_SUM, track_ids=True)
            pts = {}
            for i in range(150):
                coords = tuple(rng.randint(-12, 12) for _ in range(dim))
                w = rng.randint(-40, 40)
                st.add(coords, f"f{i}", w)
                pts[f"f{i}"] = (coords, w)
            for _ in range(60):
                box = []
                for _ in range(dim):
                    a, b = rng.randint(-14, 14), rng.randint(-14, 14)
                    box.append((min(a, b), max(a, b)))
                inside = {f: w for f, (c, w) in pts.items()
                          if all(box[j][0] <= c[j] <= box[j][1] for j in range(dim))}
                expect = sum(inside.values()) if inside else None
                assert st.box_sum(box) == expect
                k = rng.randint(0, 5)
                assert st.box_top_k(box, k) == ranked(inside, k)


class TestComplementQueries:
    def test_boundary_tuple_reported(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((2, 4), "f", 10)
        # both 2 >= 2 and 4 >= 4; either alone would suffice
        assert st.complement_sum((2, 4)) == 10
        assert st.complement_sum((2, 99)) == 10
        assert st.complement_sum((99, 4)) == 10
        assert st.complement_sum((3, 5)) is None

    def test_point_below_corner_excluded(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((0, 0), "z", 4)
        assert st.complement_sum((1, 1)) is None
        assert st.complement_sum_boxes((1, 1)) is None

    def test_boxes_example(self):
        st = MultiDimStore(2, INT_SUM, track_ids=True)
        st.add((3, 0), "x", 1)
        st.add((0, 3), "y", 2)
        st.add((0, 0), "z", 4)
        assert st.complement_sum_boxes((1, 1)) == 3
        assert st.complement_sum((1, 1)) == 3

    def test_dim1_reduces_to_suffix(self):
        st = MultiDimStore(1, INT_SUM, track_ids=True)
        st.add((5,), "a", 3)
        st.add((7,), "b", 4)
        assert st.complement_sum((6,)) == 4
        assert st.complement_sum_boxes((6,)) == 4
        assert st.complement_top_k((5,), 5) == [("b", 4), ("a", 3)]

    def test_decomposition_boxes_partition_the_complement(self):
        rng = random.Random(24)
        st = MultiDimStore(3, INT_SUM)
        for _ in range(200):
            p = tuple(rng.randint(-9, 9) for _ in range(3))
            q = tuple(rng.randint(-9, 9) for _ in range(3))
            boxes = st._complement_boxes(q)
            hits = 0
            for ivals in boxes:
                ok = True
                for c, (lo, hi, hi_open) in zip(p, ivals):
                    if lo is not None and c < lo:
                        ok = False
                    if hi is not None and (c >= hi if hi_open else c > hi):
                        ok = False
                hits += ok
            in_region = any(p[j] >= q[j] for j in range(3))
            assert hits == (1 if in_region else 0)

    def test_direct_equals_boxes_equals_brute(self):
        rng = random.Random(25)
        for dim in (1, 2, 3):
            st = MultiDimStore(dim, INT_SUM, track_ids=True)
            pts = {}
            for i in range(160):
                coords = tuple(rng.randint(-15, 15) for _ in range(dim))
                w = rng.randint(-40, 40)
                st.add(coords, f"f{i}", w)
                pts[f"f{i}"] = (coords, w)
            for fid in list(pts):
                if rng.random() < 0.3:
                    st.remove(fid)
                    del pts[fid]
            for _ in range(80):
                q = tuple(rng.randint(-18, 18) for _ in range(dim))
                qual = brute_complement(pts, q)
                expect = sum(qual.values()) if qual else None
                assert st.complement_sum(q) == expect
                assert st.complement_sum_boxes(q) == expect
                k = rng.randint(0, 5)
                want = ranked(qual, k)
                assert st.complement_top_k(q, k) == want
                assert st.complement_top_k_boxes(q, k) == want

    def test_min_semigroup_complement(self):
        st = MultiDimStore(2, INT_MIN, ordered=False)
        st.add((4, 0), "a", 9)
        st.add((0, 4), "b", 3)
        st.add((-1, -1), "c", 1)
        assert st.complement_sum((1, 1)) == 3
        assert st.complement_sum_boxes((1, 1)) == 3

    def test_node_visit_envelopes(self):
        rng = random.Random(27)
        m = 2000
        st = MultiDimStore(3, INT_SUM, track_ids=True)
        for i in range(m):
            st.add(tuple(rng.randint(0, 9999) for _ in range(3)), f"f{i}",
                   rng.randint(0, 999))
        direct_env = (1 + math.log2(m)) ** 3
        boxes_env = 3 * direct_env
        for _ in range(150):
            q = tuple(rng.randint(-500, 10500) for _ in range(3))
            with instrument.capture() as c:
                st.complement_sum(q)
            assert c.get("nodes", 0) <= direct_env
            with instrument.capture() as c:
                st.complement_sum_boxes(q)
            assert c.get("nodes", 0) <= boxes_env

    def test_direct_visits_fewer_nodes_than_boxes(self):
        rng = random.Random(26)
        st = MultiDimStore(3, INT_SUM, track_ids=True)
        for i in range(800):
            st.add(tuple(rng.randint(0, 999) for _ in range(3)), f"f{i}", rng.randint(0, 999))
        wins = 0
        trials = 200
        for _ in range(trials):
            q = tuple(rng.randint(0, 999) for _ in range(3))
            with instrument.capture() as c:
                st.complement_sum(q)
                direct = c.get("nodes", 0)
            with instrument.capture() as c:
                st.complement_sum_boxes(q)
                boxes = c.get("nodes", 0)
            wins += direct <= boxes
        assert wins >= 0.9 * trials
