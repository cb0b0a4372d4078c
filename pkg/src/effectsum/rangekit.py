"""One-dimensional range structures.

A single balancing engine backs everything: a leaf-oriented weight-balanced
tree (BB[alpha], alpha = 0.29) dynamized by partial rebuilding.  Depending on
configuration it acts as a priority search tree (points sifted up by weight),
a semigroup range-sum tree (subtree totals at every node), or both at once.
Rebuilt subtrees recompute the priority placement from scratch; update bounds
are therefore amortized.

Leaves are ordered by (x, id) so duplicate coordinates are fine.  Equal
priorities rank by smaller id, which makes every top-k output deterministic.
"""

from __future__ import annotations

import heapq
from typing import Any, Callable, List, Optional, Sequence, Tuple

from . import instrument
from .core import Semigroup

# A node is rebuilt when one child holds fewer than 29% of its leaves.
_BAL_NUM = 29
_BAL_DEN = 100

# Companion stores only exist for subtrees of at least this many leaves;
# queries scan the leaves of smaller subtrees directly.  Purely a constant
# factor: below the cutoff a scan beats a store lookup anyway.
AUX_CUTOFF = 8


class Entry:
    """One stored tuple: sort coordinates, owner id, semigroup weight.

    ``keys[i]`` is the (coordinate, id) pair the level-i tree sorts by.
    """

    __slots__ = ("coords", "fid", "weight", "keys")

    def __init__(self, coords: Sequence, fid, weight):
        self.coords = tuple(coords)
        self.fid = fid
        self.weight = weight
        self.keys = tuple((c, fid) for c in self.coords)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Entry({self.coords!r}, {self.fid!r}, {self.weight!r})"


def beats(a: Entry, b: Entry) -> bool:
    """Priority order: heavier weight wins, ties go to the smaller id."""
    if a.weight != b.weight:
        return a.weight > b.weight
    return a.fid < b.fid


def select_top(entries: List[Entry], k: int) -> List[Entry]:
    """The k best entries by priority order, best first.

    Candidate lists stay small (O(k log n)), so a plain sort suffices below
    1024 entries; larger lists go through heap selection instead.
    """
    if k <= 0 or not entries:
        return []
    if len(entries) <= 1024:
        return sorted(entries, key=_RankKey)[:k]
    return heapq.nsmallest(k, entries, key=_RankKey)


class _RankKey:
    __slots__ = ("e",)

    def __init__(self, e: Entry):
        self.e = e

    def __lt__(self, other: "_RankKey") -> bool:
        return beats(self.e, other.e)


class _Node:
    __slots__ = ("split", "left", "right", "size", "entry", "held", "total", "aux")

    def __init__(self, split, entry: Optional[Entry] = None):
        self.split = split          # max key in left subtree; for a leaf, its own key
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.size = 1               # leaf count
        self.entry = entry          # leaf payload
        self.held: Optional[Entry] = None   # sifted-up point (priority placement)
        self.total = None           # semigroup fold over subtree leaves, ascending x
        self.aux = None             # companion store over subtree entries (multidim)


class _Cand:
    __slots__ = ("entry", "node")

    def __init__(self, entry: Entry, node: Optional[_Node]):
        self.entry = entry
        self.node = node

    def __lt__(self, other: "_Cand") -> bool:
        return beats(self.entry, other.entry)


class WeightBalancedTree:
    """The shared engine.  See the module docstring.

    ``axis`` selects which coordinate of each entry the leaves sort by.
    ``semigroup`` enables subtree totals, ``priorities`` the heap placement,
    ``aux_factory`` builds a companion store over the entries of every
    internal node's subtree (maintained through inserts, deletes, rebuilds).
    """

    __slots__ = ("axis", "semigroup", "priorities", "aux_factory", "root")

    def __init__(self, axis: int = 0, semigroup: Optional[Semigroup] = None,
                 priorities: bool = True,
                 aux_factory: Optional[Callable[[List[Entry]], Any]] = None):
        self.axis = axis
        self.semigroup = semigroup
        self.priorities = priorities
        self.aux_factory = aux_factory
        self.root: Optional[_Node] = None

    def __len__(self) -> int:
        return self.root.size if self.root is not None else 0

    # -- construction ------------------------------------------------------

    def build_from(self, entries: List[Entry]) -> None:
        """Bulk-build from entries; sorts by this tree's axis."""
        if self.root is not None:
            raise ValueError("tree is not empty")
        if not entries:
            return
        axis = self.axis
        ordered = sorted(entries, key=lambda e: e.keys[axis])
        for a, b in zip(ordered, ordered[1:]):
            if a.keys[axis] == b.keys[axis]:
                raise ValueError(f"duplicate key for id {b.fid!r}")
        self.root = self._build(ordered, None)

    def _build(self, entries: List[Entry], avail: Optional[set]) -> _Node:
        """Perfectly balanced subtree over sorted entries.

        ``avail`` limits which entries get a priority slot (ids of entries not
        currently held above the rebuilt subtree); None means all of them.
        """
        if instrument.enabled:
            instrument.bump("rebuild_entries", len(entries))
        sg = self.semigroup
        fac = self.aux_factory
        prio = self.priorities
        axis = self.axis

        def rec(lo: int, hi: int) -> _Node:
            if hi - lo == 1:
                e = entries[lo]
                leaf = _Node(e.keys[axis], e)
                if sg is not None:
                    leaf.total = e.weight
                if prio and (avail is None or id(e) in avail):
                    leaf.held = e
                return leaf
            mid = (lo + hi) // 2
            v = _Node(entries[mid - 1].keys[axis])
            v.left = rec(lo, mid)
            v.right = rec(mid, hi)
            v.size = hi - lo
            if sg is not None:
                v.total = sg.plus(v.left.total, v.right.total)
            if fac is not None and v.size >= AUX_CUTOFF:
                v.aux = fac(entries[lo:hi])
            if prio:
                self._pull_up(v)
            return v

        return rec(0, len(entries))

    # -- updates -----------------------------------------------------------

    def insert(self, entry: Entry) -> None:
        key = entry.keys[self.axis]
        sg = self.semigroup
        if self.root is None:
            leaf = _Node(key, entry)
            if sg is not None:
                leaf.total = entry.weight
            if self.priorities:
                leaf.held = entry
            self.root = leaf
            return
        path: List[_Node] = []
        v = self.root
        while v.left is not None:
            if instrument.enabled:
                instrument.bump("nodes")
            path.append(v)
            v = v.left if key <= v.split else v.right
        if v.split == key:
            raise ValueError(f"duplicate key for id {entry.fid!r}")

        newleaf = _Node(key, entry)
        if sg is not None:
            newleaf.total = entry.weight
        if key < v.split:
            inner = _Node(key)
            inner.left, inner.right = newleaf, v
        else:
            inner = _Node(v.split)
            inner.left, inner.right = v, newleaf
        inner.size = 2
        if sg is not None:
            inner.total = sg.plus(inner.left.total, inner.right.total)
        if self.priorities and v.held is not None:
            # keep the no-hole shape: lift the old leaf's point into the new node
            inner.held, v.held = v.held, None

        if path:
            parent = path[-1]
            if parent.left is v:
                parent.left = inner
            else:
                parent.right = inner
        else:
            self.root = inner

        factory = self.aux_factory
        for a in reversed(path):
            a.size += 1
            if sg is not None:
                a.total = sg.plus(a.left.total, a.right.total)
            if a.aux is not None:
                a.aux.insert(entry)
            elif factory is not None and a.size >= AUX_CUTOFF:
                grown: List[Entry] = []
                _collect_entries(a, grown)
                a.aux = factory(grown)

        # The new point must sift from the root even when a rebuild fires:
        # placing it inside a rebuilt subtree could outrank helds above it.
        self._rebuild_first_unbalanced(path + [inner])
        if self.priorities:
            self._sift_down(self.root, entry)

    def delete(self, entry: Entry) -> None:
        key = entry.keys[self.axis]
        path: List[_Node] = []
        v = self.root
        while v is not None and v.left is not None:
            if instrument.enabled:
                instrument.bump("nodes")
            path.append(v)
            v = v.left if key <= v.split else v.right
        if v is None or v.split != key:
            raise ValueError(f"no stored tuple for id {entry.fid!r}")

        if self.priorities:
            holder = None
            for a in path:
                if a.held is not None and a.held.keys[self.axis] == key:
                    holder = a
                    break
            if holder is None:
                holder = v
            holder.held = None
            self._pull_up(holder)

        if not path:
            self.root = None
            return
        parent = path.pop()
        sib = parent.right if parent.left is v else parent.left
        displaced = parent.held
        if path:
            gp = path[-1]
            if gp.left is parent:
                gp.left = sib
            else:
                gp.right = sib
        else:
            self.root = sib

        sg = self.semigroup
        for a in reversed(path):
            a.size -= 1
            if sg is not None:
                a.total = sg.plus(a.left.total, a.right.total)
            if a.aux is not None:
                a.aux.delete(entry)

        if displaced is not None:
            self._sift_down(sib, displaced)
        self._rebuild_first_unbalanced(path)

    def _rebuild_first_unbalanced(self, chain: List[_Node]) -> bool:
        """Rebuild the highest out-of-balance node on the update path."""
        for i, a in enumerate(chain):
            if a.left is None:
                continue
            if min(a.left.size, a.right.size) * _BAL_DEN < _BAL_NUM * a.size:
                parent = chain[i - 1] if i else None
                self._rebuild(a, parent)
                return True
        return False

    def _rebuild(self, node: _Node, parent: Optional[_Node]) -> None:
        entries: List[Entry] = []
        _collect_entries(node, entries)
        avail: Optional[set] = None
        if self.priorities:
            avail = set()
            _collect_held_ids(node, avail)
        fresh = self._build(entries, avail)
        if parent is None:
            self.root = fresh
        elif parent.left is node:
            parent.left = fresh
        else:
            parent.right = fresh

    def _sift_down(self, v: _Node, entry: Entry) -> None:
        axis = self.axis
        while True:
            if v.held is None:
                v.held = entry
                return
            if beats(entry, v.held):
                entry, v.held = v.held, entry
            if v.left is None:
                raise AssertionError("priority placement overflow")
            v = v.left if entry.keys[axis] <= v.split else v.right

    @staticmethod
    def _pull_up(v: _Node) -> None:
        """Refill an emptied slot by cascading the best child point upward."""
        while v.left is not None:
            lh, rh = v.left.held, v.right.held
            if lh is None and rh is None:
                return
            c = v.left if (rh is None or (lh is not None and beats(lh, rh))) else v.right
            v.held = c.held
            c.held = None
            v = c

    # -- queries -----------------------------------------------------------

    def range_sum(self, lo, hi, hi_open: bool = False):
        """Semigroup fold, ascending x, over leaves with lo <= x <= hi.

        ``None`` bounds are open-ended; ``hi_open`` makes the upper bound
        exclusive.  Returns the empty marker ``None`` when nothing qualifies.
        """
        if self.root is None or self.semigroup is None:
            return None
        return self._fold(self.root, lo, hi, hi_open)

    def _fold(self, v: _Node, lo, hi, hi_open: bool):
        sg = self.semigroup
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if lo is None and hi is None:
                return v.total
            if v.left is None:
                x = v.split[0]
                if lo is not None and x < lo:
                    return None
                if hi is not None and (x >= hi if hi_open else x > hi):
                    return None
                return v.entry.weight
            sx = v.split[0]
            go_l = lo is None or lo <= sx
            go_r = hi is None or (sx < hi if hi_open else sx <= hi)
            if go_l and go_r:
                a = self._fold(v.left, lo, None, hi_open)
                b = self._fold(v.right, None, hi, hi_open)
                if a is None:
                    return b
                if b is None:
                    return a
                return sg.plus(a, b)
            if go_l:
                v = v.left
            elif go_r:
                v = v.right
            else:
                return None

    def suffix_sum(self, q):
        """Total weight over leaves with x >= q."""
        return self.range_sum(q, None)

    def top_k(self, lo, hi, k: int, hi_open: bool = False) -> List[Entry]:
        """The k best-priority entries with x in range, best first.

        Candidate heap per the priority-search-tree scheme: seed with points
        held on the two boundary paths (filtered by x) and at the roots of the
        maximal subtrees between them, then expand two children per
        extraction.
        """
        if k <= 0 or self.root is None or not self.priorities:
            return []
        seeds: List[_Cand] = []
        self._seed_top_k(self.root, lo, hi, hi_open, seeds)
        if instrument.enabled:
            instrument.bump("pst_seed_count", len(seeds))
        return _heap_top_k(seeds, k)

    def _seed_top_k(self, v: _Node, lo, hi, hi_open: bool, out: List[_Cand]) -> None:
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if lo is None and hi is None:
                if v.held is not None:
                    out.append(_Cand(v.held, v))
                if instrument.enabled:
                    instrument.bump("pst_seed_subtrees")
                return
            if v.held is not None:
                x = v.held.keys[self.axis][0]
                if (lo is None or x >= lo) and (
                    hi is None or (x < hi if hi_open else x <= hi)
                ):
                    out.append(_Cand(v.held, None))
            if v.left is None:
                return
            sx = v.split[0]
            go_l = lo is None or lo <= sx
            go_r = hi is None or (sx < hi if hi_open else sx <= hi)
            if go_l and go_r:
                self._seed_top_k(v.left, lo, None, hi_open, out)
                self._seed_top_k(v.right, None, hi, hi_open, out)
                return
            if go_l:
                v = v.left
            elif go_r:
                v = v.right
            else:
                return

    def suffix_top_k(self, q, k: int) -> List[Entry]:
        return self.top_k(q, None, k)

    def matches(self, lo, hi, hi_open: bool = False) -> List[Entry]:
        """Every stored entry with x in range, ascending (reporting version)."""
        out: List[Entry] = []
        if self.root is not None:
            self._collect_range(self.root, lo, hi, hi_open, out)
        return out

    def _collect_range(self, v: _Node, lo, hi, hi_open: bool, out: List[Entry]) -> None:
        if v.left is None:
            x = v.split[0]
            if lo is not None and x < lo:
                return
            if hi is not None and (x >= hi if hi_open else x > hi):
                return
            out.append(v.entry)
            return
        sx = v.split[0]
        if lo is None or lo <= sx:
            self._collect_range(v.left, lo, hi, hi_open, out)
        if hi is None or (sx < hi if hi_open else sx <= hi):
            self._collect_range(v.right, lo, hi, hi_open, out)

    def entries(self) -> List[Entry]:
        out: List[Entry] = []
        if self.root is not None:
            _collect_entries(self.root, out)
        return out

    def height(self) -> int:
        """Height in node levels (empty tree 0, single leaf 1)."""

        def rec(v: Optional[_Node]) -> int:
            if v is None:
                return 0
            if v.left is None:
                return 1
            return 1 + max(rec(v.left), rec(v.right))

        return rec(self.root)

    # -- debug checks ------------------------------------------------------

    def check_invariants(self) -> None:
        """Full structural audit; raises AssertionError on any violation."""
        if self.root is None:
            return
        leaves: List[Entry] = []
        _collect_entries(self.root, leaves)
        axis = self.axis
        keys = [e.keys[axis] for e in leaves]
        assert keys == sorted(keys) and len(set(keys)) == len(keys), "leaf order broken"

        held: List[Entry] = []

        def audit(v: _Node) -> Tuple[int, object, object]:
            if v.held is not None:
                held.append(v.held)
            if v.left is None:
                assert v.size == 1 and v.entry is not None
                assert v.held is None or v.held is v.entry
                if self.semigroup is not None:
                    assert v.total == v.entry.weight
                return 1, v.split, v.split
            lsize, lmin, lmax = audit(v.left)
            rsize, rmin, rmax = audit(v.right)
            assert v.size == lsize + rsize, "size mismatch"
            # splits may be stale after deletions but must still separate
            assert lmax <= v.split < rmin, "split key does not separate"
            assert min(lsize, rsize) * _BAL_DEN >= _BAL_NUM * v.size or v.size <= 3, (
                f"balance violated at size {v.size} ({lsize}/{rsize})"
            )
            if self.semigroup is not None:
                assert v.total == self.semigroup.plus(v.left.total, v.right.total)
            if self.priorities:
                for c in (v.left, v.right):
                    if v.held is None:
                        assert c.held is None, "hole above a held point"
                    elif c.held is not None:
                        assert not beats(c.held, v.held), "heap property violated"
            return v.size, lmin, rmax

        audit(self.root)
        if self.priorities:
            assert len(held) == len(leaves), "placement count mismatch"
            assert {id(e) for e in held} == {id(e) for e in leaves}, "placement set mismatch"
            # every held point sits at an ancestor of its own leaf
            self._check_placement(self.root)

    def _check_placement(self, v: _Node) -> None:
        if v.held is not None:
            w = v
            key = v.held.keys[self.axis]
            while w.left is not None:
                w = w.left if key <= w.split else w.right
            assert w.entry is v.held, "held point outside its leaf subtree"
        if v.left is not None:
            self._check_placement(v.left)
            self._check_placement(v.right)


def _heap_top_k(seeds: List[_Cand], k: int) -> List[Entry]:
    heapq.heapify(seeds)
    out: List[Entry] = []
    peak = len(seeds)
    while seeds and len(out) < k:
        c = heapq.heappop(seeds)
        out.append(c.entry)
        node = c.node
        if node is not None and node.left is not None:
            for ch in (node.left, node.right):
                if ch.held is not None:
                    heapq.heappush(seeds, _Cand(ch.held, ch))
            if len(seeds) > peak:
                peak = len(seeds)
    if instrument.enabled:
        instrument.peak("pst_heap_peak", peak)
    return out


def _collect_entries(v: _Node, out: List[Entry]) -> None:
    if v.left is None:
        out.append(v.entry)
        return
    _collect_entries(v.left, out)
    _collect_entries(v.right, out)


def _collect_held_ids(v: _Node, out: set) -> None:
    if v.held is not None:
        out.add(id(v.held))
    if v.left is not None:
        _collect_held_ids(v.left, out)
        _collect_held_ids(v.right, out)


class FacilityIndex:
    """Bijection facility id -> stored tuple; the deletion side-index.

    Backed by a dict: the contract is the id -> tuple cross-link, and the
    bijection with the companion range structure is what the tests check.
    """

    __slots__ = ("_by_id",)

    def __init__(self):
        self._by_id: dict = {}

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, fid) -> bool:
        return fid in self._by_id

    def link(self, fid, entry: Entry) -> None:
        if fid in self._by_id:
            raise ValueError(f"facility {fid!r} already stored here")
        self._by_id[fid] = entry

    def unlink(self, fid) -> Entry:
        entry = self._by_id.pop(fid, None)
        if entry is None:
            raise ValueError(f"facility {fid!r} not stored here")
        return entry

    def get(self, fid) -> Optional[Entry]:
        return self._by_id.get(fid)

    def ids(self) -> List:
        return list(self._by_id)


class PrioritySearchTree:
    """Generic priority search tree over (x, payload, priority) points.

    Range top-k reports the k highest priorities with x in [x1, x2]; equal
    priorities rank by insertion order.
    """

    def __init__(self):
        self._tree = WeightBalancedTree(axis=0, semigroup=None, priorities=True)
        self._seq = 0

    def __len__(self) -> int:
        return len(self._tree)

    def insert(self, x, payload, priority) -> Entry:
        handle = Entry((x,), (self._seq, payload), priority)
        self._seq += 1
        self._tree.insert(handle)
        return handle

    def delete(self, handle: Entry) -> None:
        self._tree.delete(handle)

    def top_k(self, x1, x2, k: int) -> List[Tuple[object, object, object]]:
        if x1 is not None and x2 is not None and x1 > x2:
            raise ValueError("x1 must be <= x2")
        got = self._tree.top_k(x1, x2, k)
        return [(e.coords[0], e.fid[1], e.weight) for e in got]

    @property
    def tree(self) -> WeightBalancedTree:
        return self._tree


class RangeSumTree:
    """Pairs (x, w) over a semigroup with range-sum queries."""

    def __init__(self, semigroup: Semigroup):
        self.semigroup = semigroup
        self._tree = WeightBalancedTree(axis=0, semigroup=semigroup, priorities=False)
        self._seq = 0

    def __len__(self) -> int:
        return len(self._tree)

    def insert(self, x, w) -> Entry:
        handle = Entry((x,), self._seq, w)
        self._seq += 1
        self._tree.insert(handle)
        return handle

    def delete(self, handle: Entry) -> None:
        self._tree.delete(handle)

    def range_sum(self, x1, x2):
        if x1 is not None and x2 is not None and x1 > x2:
            raise ValueError("x1 must be <= x2")
        return self._tree.range_sum(x1, x2)

    @property
    def tree(self) -> WeightBalancedTree:
        return self._tree


class RangeSumPst:
    """Facility store: radius-keyed range-sum priority search tree + id index.

    Holds triples (r, fid, w).  Suffix queries answer "all triples with
    r >= q": the total weight, the k heaviest, or the full match list.
    """

    __slots__ = ("semigroup", "tree", "index")

    def __init__(self, semigroup: Semigroup, ordered: Optional[bool] = None):
        self.semigroup = semigroup
        prio = semigroup.ordered if ordered is None else ordered
        self.tree = WeightBalancedTree(axis=0, semigroup=semigroup, priorities=prio)
        self.index = FacilityIndex()

    def __len__(self) -> int:
        return len(self.tree)

    def add(self, fid, r, w) -> Entry:
        entry = Entry((r,), fid, w)
        self.index.link(fid, entry)
        self.tree.insert(entry)
        return entry

    def remove(self, fid) -> Entry:
        entry = self.index.unlink(fid)
        self.tree.delete(entry)
        return entry

    def suffix_sum(self, q):
        return self.tree.range_sum(q, None)

    def suffix_top_k(self, q, k: int) -> List[Entry]:
        return self.tree.top_k(q, None, k)

    def suffix_matches(self, q) -> List[Entry]:
        return self.tree.matches(q, None)

    def entries(self) -> List[Entry]:
        return self.tree.entries()
