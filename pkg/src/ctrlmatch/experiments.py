"""Experiment orchestration: per-network algorithm tables, degree-
preserving rewiring statistics, and seeded Monte Carlo batches.

Reports are plain dicts with a fixed key set ("schema": 1) so they
serialize stably to JSON; every report embeds the parameters and seeds
needed to regenerate it bit-identically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .algorithms import max_matching, run_algorithm
from .asymptotics import GenFunc, solve_fixed_point, solve_poisson_ks
from .errors import InputError
from .generators import DegreeDist, GenSpec, generate, rewire_preserving_degrees
from .graph import BipartiteNet
from .rng import derive

SCHEMA_VERSION = 1


def _controllers_count(n: int, matching_size: int) -> int:
    return max(1, n - matching_size)


def run_table(net: BipartiteNet, trials: int = 25, seed: int = 0,
              rewire_trials: int | None = None) -> dict:
    """Controller counts for one network under oks/ks/max, plus rewired
    baselines.

    Heuristic rows aggregate `trials` tie-break seeds (min/mean/max);
    the exact row is deterministic.  rewire_stats reruns max and oks on
    degree-preserving rewired copies (fresh half-edge pairings of the
    same degree sequences) and reports controller means and stddevs.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    if rewire_trials is None:
        rewire_trials = trials
    n = net.n
    rows = []
    for algo in ("oks", "ks", "max"):
        algo_seeds = list(range(trials)) if algo != "max" else [0]
        counts, sizes, u1s, u2s, cores = [], [], [], [], []
        t0 = time.perf_counter()
        for s in algo_seeds:
            st = run_algorithm(net, algo, derive(seed, 0x7A, s))
            sizes.append(st.matching.size)
            counts.append(_controllers_count(n, st.matching.size))
            u1s.append(st.phase1_unmatched)
            u2s.append(st.phase2_unmatched)
            cores.append(st.core_size)
        dt = time.perf_counter() - t0
        rows.append({
            "algo": algo,
            "controllers_min": int(min(counts)),
            "controllers_mean": float(np.mean(counts)),
            "controllers_max": int(max(counts)),
            "matching_size_mean": float(np.mean(sizes)),
            "u1_mean": float(np.mean(u1s)),
            "u2_mean": float(np.mean(u2s)),
            "core_size_mean": float(np.mean(cores)),
            "trials": len(algo_seeds),
            "runtime_s": dt,
        })

    rewired = {"max": [], "oks": []}
    for t in range(rewire_trials):
        rnet = rewire_preserving_degrees(net, derive(seed, 0x3E, t))
        rewired["max"].append(_controllers_count(n, max_matching(rnet).size))
        st = run_algorithm(rnet, "oks", derive(seed, 0x3F, t))
        rewired["oks"].append(_controllers_count(n, st.matching.size))
    rewire_stats = {
        algo: {
            "trials": rewire_trials,
            "mean": float(np.mean(v)),
            "stddev": float(np.std(v, ddof=1)) if len(v) > 1 else 0.0,
        }
        for algo, v in rewired.items()
    }

    gf_in = GenFunc(DegreeDist.from_net(net, "right"))
    gf_out = GenFunc(DegreeDist.from_net(net, "left"))
    predictions = {}
    try:
        sol = solve_fixed_point(gf_in, gf_out)
        predictions["u_star"] = sol.u_star
        predictions["controllers"] = max(1, int(round(n * sol.u_star)))
    except InputError as exc:  # unequal means (degree sequences differ)
        predictions["u_star_error"] = str(exc)

    return {
        "schema": SCHEMA_VERSION,
        "n": n,
        "edge_count": int(net.edge_count),
        "seed": int(seed),
        "rows": rows,
        "rewire_stats": rewire_stats,
        "predictions": predictions,
    }


@dataclass
class McSummary:
    genspec: dict
    algo: str
    trials: int
    master_seed: int
    values: list  # per-trial matching sizes
    mean: float
    stddev: float

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "genspec": self.genspec,
            "algo": self.algo,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "values": self.values,
            "mean": self.mean,
            "stddev": self.stddev,
        }


def monte_carlo(genspec: GenSpec, algo: str, trials: int,
                master_seed: int) -> McSummary:
    """Matching sizes over independent trials; trial t's network and
    tie-break streams derive from hash(master_seed, t), so the summary is
    identical no matter how the trials are scheduled."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    values = []
    for t in range(trials):
        gs = GenSpec(model=genspec.model, n=genspec.n, lam=genspec.lam,
                     dist=genspec.dist, dist_in=genspec.dist_in,
                     dist_out=genspec.dist_out, weights=genspec.weights,
                     seed=derive(master_seed, t, 1))
        net = generate(gs)
        st = run_algorithm(net, algo, derive(master_seed, t, 2))
        values.append(st.matching.size)
    arr = np.asarray(values, dtype=np.float64)
    return McSummary(
        genspec=genspec.to_json(),
        algo=algo,
        trials=trials,
        master_seed=int(master_seed),
        values=[int(v) for v in values],
        mean=float(arr.mean()),
        stddev=float(arr.std(ddof=1)) if trials > 1 else 0.0,
    )
