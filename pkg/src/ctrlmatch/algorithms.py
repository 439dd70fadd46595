"""Matching algorithms: three randomized heuristics, exact maximum
matching, and a small-instance exhaustive oracle.

All heuristics run in O(n + |E|).  Greedy processes the right side in a
uniformly random permutation and matches each vertex to a random live
neighbor.  Karp-Sipser instead always removes a minimum-degree vertex
(over both sides; the one-sided variant scans only the right side), which
is exact as long as a degree-one vertex exists when picked.

Randomized tie-breaking is seeded; identical (net, seed) reruns are
bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError
from .graph import BipartiteNet, ControlConfig, Matching, control_config
from .rng import derive


@dataclass
class RunStats:
    """Outcome of one heuristic run.

    Phase statistics are counted on the right side: phase1_unmatched and
    phase2_unmatched split the unmatched right vertices at the first
    instant the scanned side(s) hold no degree-one vertex while edges
    remain (phase flag frozen there; never reached => everything is
    phase 1).  core_size is the right-side vertex count remaining at that
    instant (0 if never reached), core_both the two-side count.
    iterations_no_deg1 counts match steps taken at scanned minimum degree
    >= 2; when it is 0 the run never risked a mistake.

    Greedy does not scan degrees, so for it phase1_unmatched carries all
    unmatched vertices and the other phase fields are zero.
    """

    matching: Matching
    unmatched_total: int
    phase1_unmatched: int
    phase2_unmatched: int
    core_size: int
    core_both: int
    iterations_no_deg1: int
    rng_seed: int

    @property
    def unmatched_right(self) -> int:
        return self.matching.n - self.matching.size


def _matching_from_array(net: BipartiteNet, match_of_right: np.ndarray) -> Matching:
    rights = np.nonzero(match_of_right >= 0)[0]
    return Matching(net.n, match_of_right[rights], rights.astype(np.int64))


def greedy(net: BipartiteNet, seed: int) -> RunStats:
    """Randomized greedy matching over a random right-vertex permutation."""
    rptr, radj, lptr, ladj = net.csr()
    arr = _kernels.greedy_kernel(
        net.n, rptr, radj, net.alive_left.copy(), net.alive_right.copy(),
        derive(seed, 0x47))
    m = _matching_from_array(net, arr)
    unmatched = int(np.count_nonzero(net.alive_right)) - m.size
    return RunStats(
        matching=m,
        unmatched_total=int(np.count_nonzero(net.alive_left))
        + int(np.count_nonzero(net.alive_right)) - 2 * m.size,
        phase1_unmatched=unmatched,
        phase2_unmatched=0,
        core_size=0,
        core_both=0,
        iterations_no_deg1=0,
        rng_seed=seed,
    )


def _ks_run(net: BipartiteNet, seed: int, two_sided: bool,
            snap_every: int = 0, snap_cap: int = 0):
    rptr, radj, lptr, ladj = net.csr()
    return _kernels.ks_kernel(
        net.n, rptr, radj, lptr, ladj,
        net.alive_left.copy(), net.alive_right.copy(),
        two_sided, derive(seed, 0x4B if two_sided else 0x4F),
        snap_every, snap_cap)


def _ks_stats(net: BipartiteNet, seed: int, two_sided: bool) -> RunStats:
    (arr, u1, u2, core_r, core_b, no_deg1, _transitioned,
     _snaps, _snap_t) = _ks_run(net, seed, two_sided)
    m = _matching_from_array(net, arr)
    return RunStats(
        matching=m,
        unmatched_total=int(np.count_nonzero(net.alive_left))
        + int(np.count_nonzero(net.alive_right)) - 2 * m.size,
        phase1_unmatched=int(u1),
        phase2_unmatched=int(u2),
        core_size=int(core_r),
        core_both=int(core_b),
        iterations_no_deg1=int(no_deg1),
        rng_seed=seed,
    )


def karp_sipser(net: BipartiteNet, seed: int) -> RunStats:
    """Karp-Sipser: minimum degree scanned over both sides."""
    return _ks_stats(net, seed, True)


def one_sided_karp_sipser(net: BipartiteNet, seed: int) -> RunStats:
    """Karp-Sipser variant scanning the right side only."""
    return _ks_stats(net, seed, False)


def max_matching(net: BipartiteNet) -> Matching:
    """Maximum-cardinality matching (Hopcroft-Karp), deterministic.

    Parallel edges are collapsed first; duplicates never change the
    maximum cardinality.
    """
    el, er = net.live_edges()
    if el.size == 0:
        return Matching(net.n, np.empty(0, np.int64), np.empty(0, np.int64))
    keys = np.unique(el * np.int64(net.n) + er)
    ul = keys // net.n
    ur = keys % net.n
    lptr, ladj = _kernels.build_csr(net.n, ul, ur)
    pair_v = _kernels.hopcroft_karp_kernel(net.n, lptr, ladj)
    return _matching_from_array(net, pair_v)


def brute_force_max(net: BipartiteNet, guard: int = 12) -> Matching:
    """Exhaustive maximum matching for tiny nets (oracle for tests).

    Branches over right vertices: leave unmatched or match to any live
    neighbor, memoizing on (next right vertex, used-left bitmask).
    """
    if net.n > guard:
        raise InputError(f"brute_force_max guard: n={net.n} > {guard}")
    n = net.n
    nbr_masks = []
    rows = []
    for v in range(n):
        if net.alive_right[v]:
            nbrs = sorted(set(net.neighbors_right(v).tolist()))
        else:
            nbrs = []
        rows.append(nbrs)
        m = 0
        for u in nbrs:
            m |= 1 << u
        nbr_masks.append(m)

    memo = {}

    def best(v: int, used: int) -> int:
        if v == n:
            return 0
        key = (v, used)
        got = memo.get(key)
        if got is not None:
            return got
        res = best(v + 1, used)  # leave v unmatched
        avail = nbr_masks[v] & ~used
        while avail:
            low = avail & -avail
            res = max(res, 1 + best(v + 1, used | low))
            avail ^= low
        memo[key] = res
        return res

    pairs = []
    used = 0
    for v in range(n):
        rest = best(v + 1, used)
        take = -1
        for u in rows[v]:
            bit = 1 << u
            if not (used & bit) and 1 + best(v + 1, used | bit) > rest:
                rest = 1 + best(v + 1, used | bit)
                take = u
        if take >= 0:
            pairs.append((take, v))
            used |= 1 << take
    return Matching.from_pairs(n, pairs)


_ALGOS = {
    "greedy": greedy,
    "ks": karp_sipser,
    "oks": one_sided_karp_sipser,
}


def run_algorithm(net: BipartiteNet, algo: str, seed: int = 0) -> RunStats:
    """Dispatch by name: greedy | ks | oks | max."""
    if algo == "max":
        m = max_matching(net)
        unmatched = int(np.count_nonzero(net.alive_right)) - m.size
        return RunStats(
            matching=m,
            unmatched_total=int(np.count_nonzero(net.alive_left))
            + int(np.count_nonzero(net.alive_right)) - 2 * m.size,
            phase1_unmatched=unmatched,
            phase2_unmatched=0,
            core_size=0,
            core_both=0,
            iterations_no_deg1=0,
            rng_seed=seed,
        )
    try:
        fn = _ALGOS[algo]
    except KeyError:
        raise InputError(f"unknown algorithm {algo!r}; expected greedy|ks|oks|max")
    return fn(net, seed)


def controllers(net: BipartiteNet, algo: str, seed: int = 0) -> ControlConfig:
    """Run the chosen matching algorithm and place controllers."""
    stats = run_algorithm(net, algo, seed)
    return control_config(net, stats.matching)
