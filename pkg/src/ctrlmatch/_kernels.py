"""Compiled inner loops for the matching algorithms.

Everything here operates on flat CSR arrays plus liveness flags so the
hot paths stay allocation-free.  Randomized choices draw from a
splitmix64 stream owned by the caller via a seed.

The min-degree structure for Karp-Sipser is a bucket queue: ``vert``
holds the scanned vertices grouped by current degree, ``start[d]`` marks
where bucket d begins, and ``pos`` inverts ``vert``.  Degrees only ever
decrease, so a decrement is one swap with the bucket front, and removing
a degree-d vertex cascades it down through d+1 bucket fronts into the
dead zone below ``start[0]``.  Both give O(1) uniform random picks from
the minimum bucket.
"""

import numpy as np
from numba import njit

from .rng import sm64_below

INF = np.int64(1 << 60)


@njit(cache=True)
def build_csr(n, group_ids, other_ids):
    """Counting-sort CSR: ptr/adj with adj grouped by group_ids (row order
    = input edge order)."""
    m = group_ids.shape[0]
    ptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        ptr[group_ids[e] + 1] += 1
    for i in range(n):
        ptr[i + 1] += ptr[i]
    adj = np.empty(m, dtype=np.int64)
    fill = ptr[:n].copy()
    for e in range(m):
        g = group_ids[e]
        adj[fill[g]] = other_ids[e]
        fill[g] += 1
    return ptr, adj


@njit(cache=True)
def live_degrees(n, rptr, radj, lptr, ladj, alive_l, alive_r):
    degL = np.zeros(n, dtype=np.int64)
    degR = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if alive_r[v]:
            c = 0
            for i in range(rptr[v], rptr[v + 1]):
                if alive_l[radj[i]]:
                    c += 1
            degR[v] = c
    for u in range(n):
        if alive_l[u]:
            c = 0
            for i in range(lptr[u], lptr[u + 1]):
                if alive_r[ladj[i]]:
                    c += 1
            degL[u] = c
    return degL, degR


@njit(cache=True)
def greedy_kernel(n, rptr, radj, alive_l, alive_r, seed):
    """Process right vertices in a random permutation; match each to a
    uniformly random live incident edge's left endpoint, if any remains.

    Returns match_of_right (left id or -1 per right vertex).
    """
    state = np.uint64(seed)
    left_avail = alive_l.copy()
    match_of_right = np.full(n, -1, dtype=np.int64)

    order = np.empty(n, dtype=np.int64)
    cnt = 0
    for v in range(n):
        if alive_r[v]:
            order[cnt] = v
            cnt += 1
    for i in range(cnt - 1, 0, -1):
        j, state = sm64_below(state, i + 1)
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp

    for i in range(cnt):
        v = order[i]
        navail = 0
        for k in range(rptr[v], rptr[v + 1]):
            if left_avail[radj[k]]:
                navail += 1
        if navail == 0:
            continue
        r, state = sm64_below(state, navail)
        for k in range(rptr[v], rptr[v + 1]):
            u = radj[k]
            if left_avail[u]:
                if r == 0:
                    match_of_right[v] = u
                    left_avail[u] = False
                    break
                r -= 1
    return match_of_right


@njit(cache=True)
def _bucket_dec(local, d, vert, pos, start):
    # move from bucket d to bucket d-1: one swap with the bucket-d front
    i = pos[local]
    j = start[d]
    o = vert[j]
    vert[i] = o
    pos[o] = i
    vert[j] = local
    pos[local] = j
    start[d] += 1


@njit(cache=True)
def _bucket_remove(local, d, vert, pos, start):
    # cascade below bucket 0 into the dead zone
    for b in range(d, -1, -1):
        i = pos[local]
        j = start[b]
        o = vert[j]
        vert[i] = o
        pos[o] = i
        vert[j] = local
        pos[local] = j
        start[b] += 1


@njit(cache=True)
def ks_kernel(n, rptr, radj, lptr, ladj, alive_l_in, alive_r_in, two_sided,
              seed, snap_every, snap_cap):
    """Karp-Sipser (two_sided=True) or its one-sided variant (False).

    Repeatedly removes a minimum-degree vertex from the scanned side(s)
    (ties and neighbor choice uniform at random): isolated vertices are
    dropped as unmatched, others matched to a random live incident edge.

    Phase instrumentation, all counted on the right side: u1/u2 split
    unmatched removals at the first instant the scanned side(s) hold no
    degree-one vertex while edges remain (the flag freezes there);
    core_right is the right-side live count at that instant, core_total
    the live count over both sides.  iters_no_deg1 counts match steps
    taken at scanned minimum degree >= 2 (the steps where a mistake is
    possible).

    When snap_every > 0, the right-side degree histogram (degrees clipped
    at snap_cap) is recorded every snap_every match steps.
    """
    state = np.uint64(seed)
    alive_l = alive_l_in.copy()
    alive_r = alive_r_in.copy()
    degL, degR = live_degrees(n, rptr, radj, lptr, ladj, alive_l, alive_r)

    S = 2 * n if two_sided else n  # locals: [0,n) left (two-sided), right after

    def_loc = n if two_sided else 0  # offset of right ids in local space
    sdeg = np.zeros(S, dtype=np.int64)
    live0 = np.zeros(S, dtype=np.bool_)
    maxdeg = 0
    nlive = 0
    for loc in range(S):
        if two_sided and loc < n:
            a, d = alive_l[loc], degL[loc]
        else:
            v = loc - def_loc
            a, d = alive_r[v], degR[v]
        if a:
            live0[loc] = True
            sdeg[loc] = d
            nlive += 1
            if d > maxdeg:
                maxdeg = d

    start = np.zeros(maxdeg + 2, dtype=np.int64)
    for loc in range(S):
        if live0[loc]:
            start[sdeg[loc] + 1] += 1
    for d in range(maxdeg + 1):
        start[d + 1] += start[d]
    vert = np.empty(nlive, dtype=np.int64)
    pos = np.full(S, -1, dtype=np.int64)
    fill = start[:maxdeg + 1].copy()
    for loc in range(S):
        if live0[loc]:
            d = sdeg[loc]
            vert[fill[d]] = loc
            pos[loc] = fill[d]
            fill[d] += 1

    alive_right_cnt = 0
    alive_left_cnt = 0
    for v in range(n):
        if alive_r[v]:
            alive_right_cnt += 1
        if alive_l[v]:
            alive_left_cnt += 1

    n_snap_rows = (n // snap_every + 3) if snap_every > 0 else 1
    snaps = np.zeros((n_snap_rows, snap_cap + 1), dtype=np.int64)
    snap_t = np.zeros(n_snap_rows, dtype=np.int64)
    hist = np.zeros(snap_cap + 1, dtype=np.int64)
    if snap_every > 0:
        for v in range(n):
            if alive_r[v]:
                d = degR[v]
                hist[d if d < snap_cap else snap_cap] += 1
        snaps[0] = hist
        snap_t[0] = 0
    n_snaps = 1 if snap_every > 0 else 0

    match_of_right = np.full(n, -1, dtype=np.int64)
    matches = np.int64(0)
    u1 = np.int64(0)
    u2 = np.int64(0)
    iters_no_deg1 = np.int64(0)
    transitioned = False
    core_right = np.int64(0)
    core_total = np.int64(0)
    live_scanned = nlive
    cur_min = 0

    while live_scanned > 0:
        while cur_min <= maxdeg and start[cur_min] == start[cur_min + 1]:
            cur_min += 1
        if cur_min > maxdeg:
            break
        d = cur_min
        if (not transitioned) and d >= 2:
            transitioned = True
            core_right = alive_right_cnt
            core_total = alive_right_cnt + alive_left_cnt
        r, state = sm64_below(state, start[d + 1] - start[d])
        loc = vert[start[d] + r]
        on_right = (not two_sided) or loc >= n
        if d == 0:
            _bucket_remove(loc, 0, vert, pos, start)
            live_scanned -= 1
            if on_right:
                v = loc - def_loc
                alive_r[v] = False
                alive_right_cnt -= 1
                if transitioned:
                    u2 += 1
                else:
                    u1 += 1
                if snap_every > 0:
                    hist[0] -= 1
            else:
                alive_l[loc] = False
                alive_left_cnt -= 1
            continue

        if d >= 2:
            iters_no_deg1 += 1

        if on_right:
            v = loc - def_loc
            r2, state = sm64_below(state, degR[v])
            u = np.int64(-1)
            for k in range(rptr[v], rptr[v + 1]):
                cand = radj[k]
                if alive_l[cand]:
                    if r2 == 0:
                        u = cand
                        break
                    r2 -= 1
        else:
            u = loc
            r2, state = sm64_below(state, degL[u])
            v = np.int64(-1)
            for k in range(lptr[u], lptr[u + 1]):
                cand = ladj[k]
                if alive_r[cand]:
                    if r2 == 0:
                        v = cand
                        break
                    r2 -= 1
        match_of_right[v] = u
        matches += 1

        dv = degR[v]
        du = degL[u]
        _bucket_remove(def_loc + v if two_sided else v, dv, vert, pos, start)
        live_scanned -= 1
        alive_r[v] = False
        alive_right_cnt -= 1
        if snap_every > 0:
            hist[dv if dv < snap_cap else snap_cap] -= 1
        alive_l[u] = False
        alive_left_cnt -= 1
        if two_sided:
            _bucket_remove(u, du, vert, pos, start)
            live_scanned -= 1

        # neighbors of v lose one edge each (parallel copies count twice)
        for k in range(rptr[v], rptr[v + 1]):
            z = radj[k]
            if alive_l[z]:
                dz = degL[z]
                degL[z] = dz - 1
                if two_sided:
                    _bucket_dec(z, dz, vert, pos, start)
                    if dz - 1 < cur_min:
                        cur_min = dz - 1
        # neighbors of u likewise
        for k in range(lptr[u], lptr[u + 1]):
            z = ladj[k]
            if alive_r[z]:
                dz = degR[z]
                degR[z] = dz - 1
                _bucket_dec(def_loc + z if two_sided else z, dz, vert, pos, start)
                if dz - 1 < cur_min:
                    cur_min = dz - 1
                if snap_every > 0:
                    hist[dz if dz < snap_cap else snap_cap] -= 1
                    hist[dz - 1 if dz - 1 < snap_cap else snap_cap] += 1

        if snap_every > 0 and matches % snap_every == 0:
            snaps[n_snaps] = hist
            snap_t[n_snaps] = matches
            n_snaps += 1

    return (match_of_right, u1, u2, core_right, core_total, iters_no_deg1,
            np.int64(1 if transitioned else 0), snaps[:n_snaps], snap_t[:n_snaps])


@njit(cache=True)
def hopcroft_karp_kernel(n, lptr, ladj):
    """Maximum bipartite matching on a deduplicated CSR (left -> rights).

    Deterministic: free left vertices are tried in ascending id, adjacency
    in CSR order.  Returns match_of_right.
    """
    pair_u = np.full(n, -1, dtype=np.int64)
    pair_v = np.full(n, -1, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    it = np.empty(n, dtype=np.int64)
    su = np.empty(n + 1, dtype=np.int64)
    sv = np.empty(n + 1, dtype=np.int64)

    while True:
        # BFS: layer the left side from its free vertices
        qh = 0
        qt = 0
        for u in range(n):
            if pair_u[u] == -1 and lptr[u] != lptr[u + 1]:
                dist[u] = 0
                queue[qt] = u
                qt += 1
            else:
                dist[u] = INF
        dist_nil = INF
        while qh < qt:
            u = queue[qh]
            qh += 1
            if dist[u] < dist_nil:
                for k in range(lptr[u], lptr[u + 1]):
                    w = pair_v[ladj[k]]
                    if w == -1:
                        if dist[u] + 1 < dist_nil:
                            dist_nil = dist[u] + 1
                    elif dist[w] == INF:
                        dist[w] = dist[u] + 1
                        queue[qt] = w
                        qt += 1
        if dist_nil == INF:
            break
        # DFS phase: vertex-disjoint shortest augmenting paths
        for k in range(n):
            it[k] = lptr[k]
        for u0 in range(n):
            if pair_u[u0] != -1 or lptr[u0] == lptr[u0 + 1]:
                continue
            depth = 0
            su[0] = u0
            while depth >= 0:
                u = su[depth]
                advanced = False
                while it[u] < lptr[u + 1]:
                    v = ladj[it[u]]
                    it[u] += 1
                    w = pair_v[v]
                    if w == -1:
                        if dist[u] + 1 == dist_nil:
                            # augment along the stack
                            pair_u[u] = v
                            pair_v[v] = u
                            for dd in range(depth - 1, -1, -1):
                                pair_u[su[dd]] = sv[dd]
                                pair_v[sv[dd]] = su[dd]
                            depth = -2  # success: exit stack loop
                            break
                    elif dist[w] == dist[u] + 1:
                        sv[depth] = v
                        depth += 1
                        su[depth] = w
                        advanced = True
                        break
                if depth == -2:
                    break
                if not advanced:
                    dist[u] = INF
                    depth -= 1
            # depth == -2 means augmented, -1 means exhausted
    return pair_v
