"""Multidimensional range-sum priority search trees.

A d-dimensional store is a range tree whose level-i tree is the rangekit
engine keyed on coordinate i; every internal level-i node owns a
(d-i)-dimensional store over the entries of its subtree.  Supported queries:
closed-box sum / top-k, and sum / top-k over the complement of an open
lower-left orthant (a point qualifies iff some coordinate meets its
threshold).  The complement comes in two interchangeable strategies:

* ``direct``  - one traversal: suffix query on the first coordinate, with the
  subtrees strictly below the threshold recursing into their suffix stores;
* ``boxes``   - the region split into d disjoint boxes, one per "first
  coordinate that meets its threshold", each answered as a normal box query.

Updates are amortized: the engine's partial rebuilding rebuilds the owned
sub-stores alongside each rebuilt subtree.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from . import instrument
from .core import Semigroup
from .rangekit import (Entry, FacilityIndex, WeightBalancedTree,
                       _collect_entries, select_top)

MAX_DIM = 8

# interval: (lo, hi, hi_open); lo inclusive or None, hi per flag or None
_FULL = (None, None, False)


class MultiDimStore:
    """Store of tuples (coords, id, weight) with orthogonal range queries.

    ``first_axis`` is the coordinate index this store's level tree sorts by;
    sub-stores shift it by one.  Only top-level stores keep the id index used
    for deletions by facility id.
    """

    __slots__ = ("dim", "first_axis", "semigroup", "ordered", "tree", "index")

    def __init__(self, dim: int, semigroup: Semigroup, ordered: Optional[bool] = None,
                 first_axis: int = 0, entries: Optional[List[Entry]] = None,
                 track_ids: bool = False):
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside 1..{MAX_DIM}")
        self.dim = dim
        self.first_axis = first_axis
        self.semigroup = semigroup
        self.ordered = semigroup.ordered if ordered is None else ordered
        factory = None
        if dim > 1:
            sg, ordd, ax = semigroup, self.ordered, first_axis

            def factory(ents: List[Entry], _sg=sg, _o=ordd, _ax=ax, _d=dim):
                return MultiDimStore(_d - 1, _sg, _o, _ax + 1, entries=ents)

        self.tree = WeightBalancedTree(axis=first_axis, semigroup=semigroup,
                                       priorities=self.ordered, aux_factory=factory)
        self.index = FacilityIndex() if track_ids else None
        if entries:
            self.tree.build_from(list(entries))
            if self.index is not None:
                for e in entries:
                    self.index.link(e.fid, e)

    def __len__(self) -> int:
        return len(self.tree)

    # -- updates -----------------------------------------------------------

    def add(self, coords: Sequence, fid, weight) -> Entry:
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        entry = Entry(coords, fid, weight)
        self.insert(entry)
        return entry

    def insert(self, entry: Entry) -> None:
        if self.index is not None:
            self.index.link(entry.fid, entry)
        self.tree.insert(entry)

    def delete(self, entry: Entry) -> None:
        if self.index is not None:
            self.index.unlink(entry.fid)
        self.tree.delete(entry)

    def remove(self, fid) -> Entry:
        if self.index is None:
            raise ValueError("store has no facility index")
        entry = self.index.get(fid)
        if entry is None:
            raise ValueError(f"facility {fid!r} not stored here")
        self.delete(entry)
        return entry

    def entries(self) -> List[Entry]:
        return self.tree.entries()

    def node_count(self) -> int:
        """Total engine nodes across all levels (size accounting)."""

        def count(node) -> int:
            if node is None:
                return 0
            c = 1
            if node.aux is not None:
                c += node.aux.node_count()
            if node.left is not None:
                c += count(node.left) + count(node.right)
            return c

        return count(self.tree.root)

    # -- box queries ---------------------------------------------------------

    def box_sum(self, box: Sequence[Tuple]) -> object:
        """Semigroup sum over the closed box [l_1,r_1] x ... x [l_d,r_d]."""
        return self._ival_sum([(lo, hi, False) for lo, hi in self._check_box(box)])

    def box_top_k(self, box: Sequence[Tuple], k: int) -> List[Tuple[object, object]]:
        """The k heaviest (id, weight) in the closed box, heaviest first."""
        ivals = [(lo, hi, False) for lo, hi in self._check_box(box)]
        cands = self._ival_candidates(ivals, k)
        return [(e.fid, e.weight) for e in select_top(cands, k)]

    def _check_box(self, box) -> List[Tuple]:
        if len(box) != self.dim:
            raise ValueError(f"expected {self.dim} intervals, got {len(box)}")
        for lo, hi in box:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
        return list(box)

    def _entry_in(self, e: Entry, ivals) -> bool:
        base = self.first_axis
        for j, (lo, hi, hi_open) in enumerate(ivals):
            c = e.coords[base + j]
            if lo is not None and c < lo:
                return False
            if hi is not None and (c >= hi if hi_open else c > hi):
                return False
        return True

    def _ival_sum(self, ivals) -> object:
        if self.tree.root is None:
            return None
        if self.dim == 1:
            lo, hi, hi_open = ivals[0]
            return self.tree.range_sum(lo, hi, hi_open)
        return self._box_walk_sum(self.tree.root, ivals)

    def _box_walk_sum(self, v, ivals):
        # only reached with dim > 1; the last dimension delegates to the engine
        sg = self.semigroup
        lo, hi, hi_open = ivals[0]
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if lo is None and hi is None:
                if v.left is None:
                    return v.entry.weight if self._suffix_in(v.entry, ivals) else None
                if v.aux is not None:
                    return v.aux._ival_sum(ivals[1:])
                return self._scan_sum(v, ivals)
            if v.left is None:
                return v.entry.weight if self._entry_in(v.entry, ivals) else None
            sx = v.split[0]
            go_l = lo is None or lo <= sx
            go_r = hi is None or (sx < hi if hi_open else sx <= hi)
            if go_l and go_r:
                a = self._box_walk_sum(v.left, [(lo, None, False)] + ivals[1:])
                b = self._box_walk_sum(v.right, [(None, hi, hi_open)] + ivals[1:])
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

    def _suffix_in(self, e: Entry, ivals) -> bool:
        # first interval already satisfied; check the remaining dimensions
        base = self.first_axis + 1
        for j, (lo, hi, hi_open) in enumerate(ivals[1:]):
            c = e.coords[base + j]
            if lo is not None and c < lo:
                return False
            if hi is not None and (c >= hi if hi_open else c > hi):
                return False
        return True

    def _ival_candidates(self, ivals, k: int) -> List[Entry]:
        if self.tree.root is None or k <= 0:
            return []
        if self.dim == 1:
            lo, hi, hi_open = ivals[0]
            return self.tree.top_k(lo, hi, k, hi_open)
        out: List[Entry] = []
        self._box_walk_top(self.tree.root, ivals, k, out)
        return out

    def _box_walk_top(self, v, ivals, k: int, out: List[Entry]) -> None:
        # only reached with dim > 1; the last dimension delegates to the engine
        lo, hi, hi_open = ivals[0]
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if lo is None and hi is None:
                if v.left is None:
                    if self._suffix_in(v.entry, ivals):
                        out.append(v.entry)
                elif v.aux is not None:
                    out.extend(v.aux._ival_candidates(ivals[1:], k))
                else:
                    self._scan_top(v, ivals, out)
                return
            if v.left is None:
                if self._entry_in(v.entry, ivals):
                    out.append(v.entry)
                return
            sx = v.split[0]
            go_l = lo is None or lo <= sx
            go_r = hi is None or (sx < hi if hi_open else sx <= hi)
            if go_l and go_r:
                self._box_walk_top(v.left, [(lo, None, False)] + ivals[1:], k, out)
                self._box_walk_top(v.right, [(None, hi, hi_open)] + ivals[1:], k, out)
                return
            if go_l:
                v = v.left
            elif go_r:
                v = v.right
            else:
                return

    # -- orthant-complement queries ----------------------------------------

    def complement_sum(self, q: Sequence) -> object:
        """Sum over entries with some coordinate j satisfying coord_j >= q_j.

        Direct strategy: one suffix walk on the first coordinate; subtrees
        entirely below q_1 recurse with the remaining corner coordinates.
        """
        self._check_corner(q)
        root = self.tree.root
        if root is None:
            return None
        if self.dim == 1:
            return self.tree.range_sum(q[0], None)
        sg = self.semigroup
        q1 = q[0]
        rest = q[1:]
        out = None
        v = root
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if v.left is None:
                if v.split[0] >= q1 or self._matches_rest(v.entry, rest):
                    out = v.entry.weight if out is None else sg.plus(out, v.entry.weight)
                return out
            if v.split[0] >= q1:
                part = v.right.total  # whole right side has coord >= q1
                out = part if out is None else sg.plus(out, part)
                v = v.left
            else:
                l = v.left
                if l.left is None:
                    if self._matches_rest(l.entry, rest):
                        out = l.entry.weight if out is None else sg.plus(out, l.entry.weight)
                elif l.aux is not None:
                    part = l.aux.complement_sum(rest)
                    if part is not None:
                        out = part if out is None else sg.plus(out, part)
                else:
                    part = self._scan_complement_sum(l, rest)
                    if part is not None:
                        out = part if out is None else sg.plus(out, part)
                v = v.right

    def complement_top_k(self, q: Sequence, k: int) -> List[Tuple[object, object]]:
        """The k heaviest (id, weight) in the complement region, heaviest first."""
        cands = self._complement_candidates(q, k)
        return [(e.fid, e.weight) for e in select_top(cands, k)]

    def _complement_candidates(self, q: Sequence, k: int) -> List[Entry]:
        self._check_corner(q)
        root = self.tree.root
        if root is None or k <= 0:
            return []
        if self.dim == 1:
            return self.tree.top_k(q[0], None, k)
        q1 = q[0]
        rest = q[1:]
        # the suffix [q1, inf) on this level is one ordinary 1-d top-k
        out: List[Entry] = list(self.tree.top_k(q1, None, k))
        v = root
        while True:
            if instrument.enabled:
                instrument.bump("nodes")
            if v.left is None:
                if v.split[0] < q1 and self._matches_rest(v.entry, rest):
                    out.append(v.entry)
                return out
            if v.split[0] >= q1:
                v = v.left
            else:
                l = v.left
                if l.left is None:
                    if self._matches_rest(l.entry, rest):
                        out.append(l.entry)
                elif l.aux is not None:
                    out.extend(l.aux._complement_candidates(rest, k))
                else:
                    for e in self._subtree_entries(l):
                        if self._matches_rest(e, rest):
                            out.append(e)
                v = v.right

    def _matches_rest(self, e: Entry, rest: Sequence) -> bool:
        base = self.first_axis + 1
        for j, qj in enumerate(rest):
            if e.coords[base + j] >= qj:
                return True
        return False

    def complement_matches(self, q: Sequence) -> List[Entry]:
        """Reporting version of the complement query (debug/trace support)."""
        self._check_corner(q)
        base = self.first_axis
        out = []
        for e in self.tree.entries():
            if any(e.coords[base + j] >= qj for j, qj in enumerate(q)):
                out.append(e)
        return out

    def _check_corner(self, q) -> None:
        if len(q) != self.dim:
            raise ValueError(f"expected {self.dim} corner coordinates, got {len(q)}")

    @staticmethod
    def _subtree_entries(node) -> List[Entry]:
        out: List[Entry] = []
        _collect_entries(node, out)
        if instrument.enabled:
            instrument.bump("nodes", len(out))
        return out

    def _scan_sum(self, node, ivals):
        out = None
        for e in self._subtree_entries(node):
            if self._suffix_in(e, ivals):
                out = e.weight if out is None else self.semigroup.plus(out, e.weight)
        return out

    def _scan_top(self, node, ivals, out: List[Entry]) -> None:
        for e in self._subtree_entries(node):
            if self._suffix_in(e, ivals):
                out.append(e)

    def _scan_complement_sum(self, node, rest):
        out = None
        for e in self._subtree_entries(node):
            if self._matches_rest(e, rest):
                out = e.weight if out is None else self.semigroup.plus(out, e.weight)
        return out

    # boxes strategy: the complement decomposed into dim disjoint boxes; box j
    # pins coordinate j as the first one meeting its threshold.
    def _complement_boxes(self, q: Sequence) -> List[List[Tuple]]:
        d = self.dim
        boxes = []
        for j in range(d):
            ivals = [(None, q[i], True) for i in range(j)]
            ivals.append((q[j], None, False))
            ivals.extend(_FULL for _ in range(d - j - 1))
            boxes.append(ivals)
        return boxes

    def complement_sum_boxes(self, q: Sequence) -> object:
        self._check_corner(q)
        out = None
        for ivals in self._complement_boxes(q):
            part = self._ival_sum(ivals)
            if part is not None:
                out = part if out is None else self.semigroup.plus(out, part)
        return out

    def complement_top_k_boxes(self, q: Sequence, k: int) -> List[Tuple[object, object]]:
        self._check_corner(q)
        cands: List[Entry] = []
        for ivals in self._complement_boxes(q):
            cands.extend(self._ival_candidates(ivals, k))
        return [(e.fid, e.weight) for e in select_top(cands, k)]
