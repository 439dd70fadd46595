"""Bipartite multigraph substrate and the controller-count construction.

Every directed network on n vertices is viewed as a bipartite network with
n "tail" copies on the left and n "head" copies on the right: a directed
edge u -> v becomes the bipartite edge (u, v).  An undirected network is
first read as a directed one with both orientations of every edge.

A matching of this bipartite view, mapped back onto the original vertex
set, decomposes into directed paths and cycles; the minimum number of
outside controllers needed to steer the network is max(1, n - |M|), one
per unmatched vertex (path start), with every cycle tapping one of the
already-present controllers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


class BipartiteNet:
    """Mutable bipartite multigraph with n vertices on each side.

    Parallel edges are retained and counted in degrees.  Vertex removal is
    lazy: edges stay in the immutable edge arrays, and liveness flags plus
    eagerly-maintained degree arrays define the current graph.  Removing a
    vertex costs O(its original incident edges).
    """

    def __init__(self, n: int, left_ids, right_ids):
        left_ids = np.asarray(left_ids, dtype=np.int64)
        right_ids = np.asarray(right_ids, dtype=np.int64)
        if left_ids.shape != right_ids.shape:
            raise InputError("left/right edge arrays differ in length")
        if left_ids.size:
            bad = np.nonzero(
                (left_ids < 0) | (left_ids >= n) | (right_ids < 0) | (right_ids >= n)
            )[0]
            if bad.size:
                i = int(bad[0])
                raise InputError(
                    f"edge {i}: vertex id out of range [0, {n}): "
                    f"({int(left_ids[i])}, {int(right_ids[i])})"
                )
        self.n = int(n)
        self.left_ids = left_ids
        self.right_ids = right_ids
        self.alive_left = np.ones(n, dtype=np.bool_)
        self.alive_right = np.ones(n, dtype=np.bool_)
        self.deg_left = np.bincount(left_ids, minlength=n).astype(np.int64)
        self.deg_right = np.bincount(right_ids, minlength=n).astype(np.int64)
        self.edge_count = int(left_ids.size)
        self._csr = None

    # -- structure queries ------------------------------------------------

    def csr(self):
        """(right_ptr, right_adj, left_ptr, left_adj) over the ORIGINAL edges.

        right_adj groups left endpoints by right vertex (and vice versa),
        rows in edge-array order, so traversal order is deterministic for
        a given net.  Cached; liveness flags are not baked in (kernels
        carry their own).
        """
        if self._csr is None:
            from . import _kernels
            right_ptr, right_adj = _kernels.build_csr(
                self.n, self.right_ids, self.left_ids)
            left_ptr, left_adj = _kernels.build_csr(
                self.n, self.left_ids, self.right_ids)
            self._csr = (right_ptr, right_adj, left_ptr, left_adj)
        return self._csr

    def neighbors_left(self, u: int) -> np.ndarray:
        """Right endpoints (with multiplicity) of live edges incident to left u."""
        rptr, radj, lptr, ladj = self.csr()
        if not self.alive_left[u]:
            return np.empty(0, dtype=np.int64)
        nb = ladj[lptr[u]:lptr[u + 1]]
        return nb[self.alive_right[nb]]

    def neighbors_right(self, v: int) -> np.ndarray:
        """Left endpoints (with multiplicity) of live edges incident to right v."""
        rptr, radj, lptr, ladj = self.csr()
        if not self.alive_right[v]:
            return np.empty(0, dtype=np.int64)
        nb = radj[rptr[v]:rptr[v + 1]]
        return nb[self.alive_left[nb]]

    def live_edges(self):
        """(left, right) arrays of the edges whose endpoints are both alive."""
        keep = self.alive_left[self.left_ids] & self.alive_right[self.right_ids]
        return self.left_ids[keep], self.right_ids[keep]

    # -- mutation ----------------------------------------------------------

    def remove_left(self, u: int) -> None:
        if not self.alive_left[u]:
            return
        rptr, radj, lptr, ladj = self.csr()
        for r in ladj[lptr[u]:lptr[u + 1]]:
            if self.alive_right[r]:
                self.deg_right[r] -= 1
                self.edge_count -= 1
        self.alive_left[u] = False
        self.deg_left[u] = 0

    def remove_right(self, v: int) -> None:
        if not self.alive_right[v]:
            return
        rptr, radj, lptr, ladj = self.csr()
        for l in radj[rptr[v]:rptr[v + 1]]:
            if self.alive_left[l]:
                self.deg_left[l] -= 1
                self.edge_count -= 1
        self.alive_right[v] = False
        self.deg_right[v] = 0

    def copy(self) -> "BipartiteNet":
        c = BipartiteNet(self.n, self.left_ids, self.right_ids)
        c.alive_left = self.alive_left.copy()
        c.alive_right = self.alive_right.copy()
        c.deg_left = self.deg_left.copy()
        c.deg_right = self.deg_right.copy()
        c.edge_count = self.edge_count
        return c

    def __repr__(self):
        return f"BipartiteNet(n={self.n}, edges={self.edge_count})"


def from_directed_edges(n: int, edges) -> BipartiteNet:
    """Build the bipartite view of a directed network.

    One bipartite edge (u, v) per directed edge u -> v; duplicate input
    edges are kept as parallel edges.  Self-loops are ordinary edges here.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return BipartiteNet(n, edges[:, 0], edges[:, 1])


def from_undirected_edges(n: int, edges) -> BipartiteNet:
    """Build the bipartite view of an undirected network.

    Each edge {i, j} with i != j contributes both orientations (i, j) and
    (j, i).  A self-loop {i, i} contributes a single bipartite edge (i, i):
    emitting "both" orientations would silently double it.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    a, b = edges[:, 0], edges[:, 1]
    loops = a == b
    left = np.concatenate([a, b[~loops]])
    right = np.concatenate([b, a[~loops]])
    return BipartiteNet(n, left, right)


@dataclass
class Matching:
    """A set of bipartite (left, right) pairs with distinct lefts and rights."""

    n: int
    left: np.ndarray
    right: np.ndarray

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "Matching":
        pairs = sorted(pairs)
        left = np.array([p[0] for p in pairs], dtype=np.int64)
        right = np.array([p[1] for p in pairs], dtype=np.int64)
        return cls(n, left, right)

    @property
    def size(self) -> int:
        return int(self.left.size)

    def __len__(self) -> int:
        return self.size

    @property
    def pairs(self) -> set:
        return set(zip(self.left.tolist(), self.right.tolist()))

    @property
    def matched_left(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.bool_)
        mask[self.left] = True
        return mask

    @property
    def matched_right(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.bool_)
        mask[self.right] = True
        return mask


def validate_matching(net: BipartiteNet, m: Matching) -> bool:
    """True iff m's pairs are live edges of net with no shared endpoint."""
    if m.n != net.n:
        return False
    if m.size == 0:
        return True
    if np.unique(m.left).size != m.size or np.unique(m.right).size != m.size:
        return False
    el, er = net.live_edges()
    present = set(zip(el.tolist(), er.tolist()))
    return all(p in present for p in zip(m.left.tolist(), m.right.tolist()))


@dataclass
class ControlConfig:
    """Controller placement extracted from a matching.

    driver_vertices are the unmatched vertices starting the directed paths
    of the matching decomposition; each gets its own controller (in list
    order: controller i drives driver_vertices[i]).  Each cycle of the
    decomposition attaches to an existing controller, assigned round-robin.
    b_structure lists every nonzero input-matrix position as
    (vertex, controller_index).
    """

    num_controllers: int
    driver_vertices: list = field(default_factory=list)
    cycle_attachments: list = field(default_factory=list)
    b_structure: list = field(default_factory=list)


def control_config(net: BipartiteNet, m: Matching) -> ControlConfig:
    """Decompose a matching into paths/cycles and place controllers.

    The matched pairs, read as original directed edges, form a partial
    function successor(u) = v.  Vertices whose head copy is unmatched start
    paths; what remains of the matched pairs is a disjoint union of cycles.
    Controllers: max(1, n - |m|); one per path start; cycles attach
    round-robin over the existing controllers (all to controller 0 when the
    matching is perfect), one attachment per cycle at its smallest vertex.
    """
    if not validate_matching(net, m):
        raise InputError("control_config requires a valid matching for this net")
    n = net.n
    succ = np.full(n, -1, dtype=np.int64)
    succ[m.left] = m.right
    head_matched = m.matched_right

    drivers = [v for v in range(n) if not head_matched[v]]
    on_path = np.zeros(n, dtype=np.bool_)
    for v in drivers:
        on_path[v] = True
        w = succ[v]
        while w != -1:
            on_path[w] = True
            w = succ[w]

    cycles = []
    seen = on_path.copy()
    for v in range(n):
        if seen[v] or succ[v] == -1:
            continue
        cyc = []
        w = v
        while not seen[w]:
            seen[w] = True
            cyc.append(w)
            w = succ[w]
        cycles.append(min(cyc))
    cycles.sort()

    k = max(1, n - m.size)
    b = [(v, i) for i, v in enumerate(drivers)]
    attachments = [(rep, i % k) for i, rep in enumerate(cycles)]
    b.extend(attachments)
    return ControlConfig(
        num_controllers=k,
        driver_vertices=drivers,
        cycle_attachments=attachments,
        b_structure=b,
    )


def degree_histogram(net: BipartiteNet, side: str) -> dict:
    """Map degree -> vertex count on one side ('left' or 'right').

    Only live vertices are counted; degrees include edge multiplicity.
    Counts sum to the number of live vertices on that side.
    """
    if side == "left":
        deg, alive = net.deg_left, net.alive_left
    elif side == "right":
        deg, alive = net.deg_right, net.alive_right
    else:
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    counts = np.bincount(deg[alive])
    return {int(k): int(c) for k, c in enumerate(counts) if c > 0}
