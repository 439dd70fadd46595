"""Seeded random-network generators, all returning bipartite views.

Models: Erdos-Renyi (independent edges), uniform fixed-size edge sets,
configuration-model half-edge pairing with prescribed degree draws
(undirected or separate in/out), Chung-Lu weighted independent edges, and
degree-preserving rewiring of an existing network.

Candidate edge sets include self-loops: all n^2 ordered pairs for
directed models, all n(n+1)/2 unordered pairs for undirected ones.

Determinism: a given (spec, seed) always produces the identical network.
Randomness comes from counter-based Philox streams keyed off the seed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .graph import BipartiteNet, from_directed_edges, from_undirected_edges
from .rng import stream

PMF_TAIL = 1e-14


@dataclass
class DegreeDist:
    """Probability mass function on {0, 1, 2, ...} with finite mean.

    kind is "poisson" (lam set; pmf truncated at tail mass < 1e-14 and
    renormalized) or "empirical".
    """

    pmf: np.ndarray
    kind: str = "empirical"
    lam: Optional[float] = None

    def __post_init__(self):
        self.pmf = np.asarray(self.pmf, dtype=np.float64)
        if self.pmf.ndim != 1 or self.pmf.size == 0:
            raise InputError("pmf must be a nonempty 1-d array")
        if np.any(self.pmf < 0):
            raise InputError("pmf entries must be nonnegative")
        s = float(self.pmf.sum())
        if abs(s - 1.0) > 1e-12:
            raise InputError(f"pmf must sum to 1 within 1e-12, got {s!r}")

    @property
    def mean(self) -> float:
        return float(np.arange(self.pmf.size) @ self.pmf)

    @classmethod
    def poisson(cls, lam: float) -> "DegreeDist":
        if lam < 0 or not np.isfinite(lam):
            raise InputError(f"poisson rate must be finite and >= 0, got {lam}")
        if lam == 0:
            return cls(np.array([1.0]), kind="poisson", lam=0.0)
        terms = [np.exp(-lam)]
        total = terms[0]
        k = 0
        while 1.0 - total >= PMF_TAIL:
            k += 1
            terms.append(terms[-1] * lam / k)
            total += terms[-1]
            if k > 2000:
                raise InputError(f"poisson({lam}) pmf did not truncate")
        pmf = np.array(terms)
        return cls(pmf / pmf.sum(), kind="poisson", lam=float(lam))

    @classmethod
    def point_mass(cls, k: int) -> "DegreeDist":
        pmf = np.zeros(k + 1)
        pmf[k] = 1.0
        return cls(pmf)

    @classmethod
    def empirical(cls, pmf) -> "DegreeDist":
        pmf = np.asarray(pmf, dtype=np.float64)
        s = pmf.sum()
        if s <= 0:
            raise InputError("empirical pmf must have positive mass")
        return cls(pmf / s)

    @classmethod
    def from_net(cls, net: BipartiteNet, side: str) -> "DegreeDist":
        """Empirical degree pmf of one side (multiplicity-counted) / n."""
        deg = net.deg_right if side == "right" else net.deg_left
        alive = net.alive_right if side == "right" else net.alive_left
        counts = np.bincount(deg[alive])
        return cls.empirical(counts.astype(np.float64))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. degree draws via inverse-cdf lookup."""
        cdf = np.cumsum(self.pmf)
        cdf[-1] = 1.0
        return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


_MODELS = (
    "er_directed", "er_undirected",
    "ufs_directed", "ufs_undirected",
    "dd_undirected", "dd_directed",
    "chung_lu",
)


@dataclass
class GenSpec:
    """Parameters of one random-network draw (model + size + seed)."""

    model: str
    n: int
    lam: float = 0.0
    dist: Optional[DegreeDist] = None
    dist_in: Optional[DegreeDist] = None
    dist_out: Optional[DegreeDist] = None
    weights: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in _MODELS:
            raise InputError(f"unknown model {self.model!r}; expected one of {_MODELS}")
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if self.lam < 0:
            raise InputError(f"lambda must be >= 0, got {self.lam}")

    def to_json(self) -> dict:
        out = {"model": self.model, "n": int(self.n), "lambda": float(self.lam),
               "seed": int(self.seed)}
        for name in ("dist", "dist_in", "dist_out"):
            d = getattr(self, name)
            if d is not None:
                if d.kind == "poisson":
                    out[name] = f"poisson:{d.lam}"
                else:
                    out[name] = {"pmf": d.pmf.tolist()}
        if self.weights is not None:
            out["weights"] = np.asarray(self.weights, dtype=float).tolist()
        return out

    @classmethod
    def from_json(cls, obj) -> "GenSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)

        def parse_dist(v):
            if v is None:
                return None
            if isinstance(v, str):
                if not v.startswith("poisson:"):
                    raise InputError(f"unknown dist spec {v!r}")
                return DegreeDist.poisson(float(v.split(":", 1)[1]))
            return DegreeDist.empirical(np.asarray(v["pmf"], dtype=float))

        return cls(
            model=obj["model"],
            n=int(obj["n"]),
            lam=float(obj.get("lambda", 0.0)),
            dist=parse_dist(obj.get("dist")),
            dist_in=parse_dist(obj.get("dist_in")),
            dist_out=parse_dist(obj.get("dist_out")),
            weights=None if obj.get("weights") is None
            else np.asarray(obj["weights"], dtype=float),
            seed=int(obj.get("seed", 0)),
        )


def _distinct_positions(total: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct uniform int64 positions in [0, total), as a uniform
    k-subset.

    Dense case: partial Fisher-Yates via permutation.  Sparse case: draw
    the current deficit each round and union (coupon-fill), which keeps
    the final set exchangeable; never truncate a sorted array, that would
    bias toward small positions.
    """
    if k < 0 or k > total:
        raise InputError(f"cannot draw {k} distinct positions from {total}")
    if k == 0:
        return np.empty(0, dtype=np.int64)
    if total <= max(4 * k, 1 << 22):
        return rng.permutation(total)[:k].astype(np.int64)
    have = np.empty(0, dtype=np.int64)
    while have.size < k:
        fresh = rng.integers(0, total, size=k - have.size, dtype=np.int64)
        have = np.unique(np.concatenate([have, fresh]))
    return have


def _tri_decode(pos: np.ndarray, n: int):
    """Decode linear indices over unordered pairs (i <= j), row-major by i."""
    # row i starts at offset i*n - i*(i-1)/2; invert the quadratic, then fix
    # rounding exactly.
    p = pos.astype(np.float64)
    i = np.floor((2 * n + 1 - np.sqrt((2 * n + 1) ** 2 - 8 * p)) / 2).astype(np.int64)
    row_start = i * n - i * (i - 1) // 2
    too_far = pos < row_start
    while np.any(too_far):
        i[too_far] -= 1
        row_start = i * n - i * (i - 1) // 2
        too_far = pos < row_start
    next_start = row_start + (n - i)
    overshoot = pos >= next_start
    while np.any(overshoot):
        i[overshoot] += 1
        row_start = i * n - i * (i - 1) // 2
        next_start = row_start + (n - i)
        overshoot = pos >= next_start
    j = i + (pos - row_start)
    return i, j


def gen_er(spec: GenSpec) -> BipartiteNet:
    """Erdos-Renyi: every candidate edge present independently with
    probability min(1, lambda/n)."""
    if spec.model not in ("er_directed", "er_undirected"):
        raise InputError(f"gen_er got model {spec.model!r}")
    n = spec.n
    p = min(1.0, spec.lam / n)
    rng = stream(spec.seed, 0xE2)
    directed = spec.model == "er_directed"
    total = n * n if directed else n * (n + 1) // 2
    m = int(rng.binomial(total, p))
    pos = _distinct_positions(total, m, rng)
    if directed:
        return from_directed_edges(n, np.column_stack([pos // n, pos % n]))
    i, j = _tri_decode(pos, n)
    return from_undirected_edges(n, np.column_stack([i, j]))


def gen_ufs(spec: GenSpec) -> BipartiteNet:
    """Uniform fixed-size model: exactly k_n distinct edges, uniform over
    all k_n-subsets; k_n = round(lambda*n) directed, round(lambda*n/2)
    undirected."""
    if spec.model not in ("ufs_directed", "ufs_undirected"):
        raise InputError(f"gen_ufs got model {spec.model!r}")
    n = spec.n
    directed = spec.model == "ufs_directed"
    total = n * n if directed else n * (n + 1) // 2
    k = int(round(spec.lam * n)) if directed else int(round(spec.lam * n / 2))
    if k > total:
        raise InputError(f"UFS wants {k} edges but only {total} candidates exist")
    rng = stream(spec.seed, 0xF5)
    pos = _distinct_positions(total, k, rng)
    if directed:
        return from_directed_edges(n, np.column_stack([pos // n, pos % n]))
    i, j = _tri_decode(pos, n)
    return from_undirected_edges(n, np.column_stack([i, j]))


def _pair_half_edges(d_out: np.ndarray, d_in: np.ndarray,
                     rng: np.random.Generator):
    """Uniform random pairing of out-half-edges to in-half-edges.

    Shuffling one side and pairing positionally is uniform over pairings,
    and the excess stubs of the longer side (dropped) are a uniform subset
    because of the shuffle.
    """
    out_stubs = np.repeat(np.arange(d_out.size, dtype=np.int64), d_out)
    in_stubs = np.repeat(np.arange(d_in.size, dtype=np.int64), d_in)
    rng.shuffle(out_stubs)
    rng.shuffle(in_stubs)
    m = min(out_stubs.size, in_stubs.size)
    return out_stubs[:m], in_stubs[:m]


def gen_dd(spec: GenSpec) -> BipartiteNet:
    """Configuration model: i.i.d. degree draws, half-edges paired
    uniformly at random; multi-edges and self-loops retained.

    Undirected: one half-edge dropped when the total is odd.  Directed:
    out-stubs paired to in-stubs, the longer side's excess dropped.
    """
    rng = stream(spec.seed, 0xDD)
    n = spec.n
    if spec.model == "dd_undirected":
        if spec.dist is None:
            raise InputError("dd_undirected requires dist")
        deg = spec.dist.sample(n, rng)
        stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
        rng.shuffle(stubs)
        m = stubs.size // 2
        return from_undirected_edges(n, np.column_stack([stubs[:2 * m:2], stubs[1:2 * m:2]]))
    if spec.model == "dd_directed":
        if spec.dist_in is None or spec.dist_out is None:
            raise InputError("dd_directed requires dist_in and dist_out")
        if not (np.isfinite(spec.dist_in.mean) and np.isfinite(spec.dist_out.mean)):
            raise InputError("dd_directed requires finite mean degrees")
        d_in = spec.dist_in.sample(n, rng)
        d_out = spec.dist_out.sample(n, rng)
        tails, heads = _pair_half_edges(d_out, d_in, rng)
        return from_directed_edges(n, np.column_stack([tails, heads]))
    raise InputError(f"gen_dd got model {spec.model!r}")


def gen_chung_lu(spec: GenSpec) -> BipartiteNet:
    """Weighted independent edges: pair {i, j} (i <= j) present with
    probability w_i * w_j / sum(w), clamped at 1 (clamps reported via a
    warning).  O(n^2) memory/time; intended for moderate n."""
    if spec.model != "chung_lu":
        raise InputError(f"gen_chung_lu got model {spec.model!r}")
    if spec.weights is None or len(spec.weights) == 0:
        raise InputError("chung_lu requires a nonempty weight vector")
    w = np.asarray(spec.weights, dtype=np.float64)
    if w.size != spec.n:
        raise InputError(f"weights length {w.size} != n {spec.n}")
    if np.any(w < 0):
        raise InputError("chung_lu weights must be >= 0")
    total = float(w.sum())
    rng = stream(spec.seed, 0xC1)
    if total == 0:
        return from_undirected_edges(spec.n, np.empty((0, 2), dtype=np.int64))
    rows_i = []
    rows_j = []
    clamped = 0
    for i in range(spec.n):
        prob = w[i] * w[i:] / total
        clamped += int(np.count_nonzero(prob > 1.0))
        keep = rng.random(prob.size) < prob
        j = np.nonzero(keep)[0]
        if j.size:
            rows_i.append(np.full(j.size, i, dtype=np.int64))
            rows_j.append(i + j.astype(np.int64))
    if clamped:
        warnings.warn(f"chung_lu: {clamped} pair probabilities clamped to 1",
                      stacklevel=2)
    if not rows_i:
        return from_undirected_edges(spec.n, np.empty((0, 2), dtype=np.int64))
    return from_undirected_edges(
        spec.n, np.column_stack([np.concatenate(rows_i), np.concatenate(rows_j)]))


def rewire_preserving_degrees(net: BipartiteNet, seed: int) -> BipartiteNet:
    """Fresh uniform half-edge pairing with the net's exact live degree
    sequences (out = left degrees, in = right degrees).  Vertex degrees
    are preserved exactly; only the attachment is randomized."""
    rng = stream(seed, 0x3E)
    d_out = np.where(net.alive_left, net.deg_left, 0)
    d_in = np.where(net.alive_right, net.deg_right, 0)
    tails, heads = _pair_half_edges(d_out, d_in, rng)
    return from_directed_edges(net.n, np.column_stack([tails, heads]))


def generate(spec: GenSpec) -> BipartiteNet:
    """Dispatch on spec.model."""
    if spec.model in ("er_directed", "er_undirected"):
        return gen_er(spec)
    if spec.model in ("ufs_directed", "ufs_undirected"):
        return gen_ufs(spec)
    if spec.model in ("dd_directed", "dd_undirected"):
        return gen_dd(spec)
    return gen_chung_lu(spec)
