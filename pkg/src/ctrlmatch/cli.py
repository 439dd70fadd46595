"""Command-line interface.

Subcommands: generate, match, controllers, predict, dynamics, rewire,
table, mc.  Reports are JSON (default) or CSV.  Exit codes: 0 success,
2 input error, 3 convergence error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .algorithms import run_algorithm
from .asymptotics import GenFunc, solve_fixed_point, solve_poisson_ks
from .dynamics import OdeSpec, fraction_time_no_deg1, integrate
from .errors import ConvergenceError, InputError
from .generators import DegreeDist, GenSpec, generate, rewire_preserving_degrees
from .graph import control_config
from .ingest import EdgeListFile, parse_edge_list, write_edge_list
from .experiments import monte_carlo, run_table

SCHEMA = 1


def _parse_dist(text: str) -> DegreeDist:
    """poisson:<lam> or file:<path> (pmf file: 'p' or 'k p' per line)."""
    if text.startswith("poisson:"):
        return DegreeDist.poisson(float(text.split(":", 1)[1]))
    if text.startswith("file:"):
        path = text.split(":", 1)[1]
        rows = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                toks = line.replace(",", " ").split()
                if len(toks) == 1:
                    rows.append((len(rows), float(toks[0])))
                elif len(toks) == 2:
                    rows.append((int(toks[0]), float(toks[1])))
                else:
                    raise InputError(f"{path}:{lineno}: expected 'p' or 'k p'")
        if not rows:
            raise InputError(f"{path}: empty pmf file")
        pmf = np.zeros(max(k for k, _ in rows) + 1)
        for k, p in rows:
            pmf[k] += p
        return DegreeDist.empirical(pmf)
    raise InputError(f"unknown dist spec {text!r}; use poisson:<lam> or file:<path>")


def _edge_file(args) -> EdgeListFile:
    return EdgeListFile(path=args.input, directed=not args.undirected,
                        indexing=args.indexing)


def _emit(obj: dict, args) -> None:
    if getattr(args, "format", "json") == "csv":
        lines = []
        rows = obj.get("rows")
        if rows:
            keys = list(rows[0])
            lines.append(",".join(keys))
            for r in rows:
                lines.append(",".join(str(r[k]) for k in keys))
        else:
            lines.append(",".join(obj))
            lines.append(",".join(str(v) for v in obj.values()))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(obj, indent=2, default=float) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _genspec_from_args(args) -> GenSpec:
    weights = None
    if args.weights_path:
        weights = np.loadtxt(args.weights_path, dtype=np.float64).reshape(-1)
    return GenSpec(
        model=args.model,
        n=args.n,
        lam=args.lam,
        dist=_parse_dist(args.dist) if args.dist else None,
        dist_in=_parse_dist(args.dist_in) if args.dist_in else None,
        dist_out=_parse_dist(args.dist_out) if args.dist_out else None,
        weights=weights,
        seed=args.seed,
    )


def _add_gen_args(p):
    p.add_argument("--model", required=True,
                   choices=["er_directed", "er_undirected", "ufs_directed",
                            "ufs_undirected", "dd_undirected", "dd_directed",
                            "chung_lu"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--dist", default=None, help="poisson:<lam> or file:<path>")
    p.add_argument("--dist-in", default=None)
    p.add_argument("--dist-out", default=None)
    p.add_argument("--weights-path", default=None)
    p.add_argument("--seed", type=int, default=0)


def _add_input_args(p):
    p.add_argument("--input", required=True, help="edge list file")
    p.add_argument("--undirected", action="store_true",
                   help="treat input edges as undirected")
    p.add_argument("--indexing", default="auto", choices=["zero", "one", "auto"])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ctrlmatch",
        description="Minimum controller counts for structural controllability "
                    "via bipartite matchings, with analytic predictions.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("generate", help="sample a random network to an edge list")
    _add_gen_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("match", help="run one matching algorithm on a network")
    _add_input_args(p)
    p.add_argument("--algo", required=True, choices=["greedy", "ks", "oks", "max"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("controllers", help="controller placement for a network")
    _add_input_args(p)
    p.add_argument("--algo", default="max", choices=["greedy", "ks", "oks", "max"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true", help="include b_structure")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("predict", help="analytic unmatched fraction / controllers")
    p.add_argument("--dist", default=None, help="poisson:<lam> or file:<path>")
    p.add_argument("--dist-in", default=None)
    p.add_argument("--dist-out", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--input", default=None, help="edge list to take degrees from")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--indexing", default="auto", choices=["zero", "one", "auto"])
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("dynamics", help="integrate the degree-evolution ODEs")
    p.add_argument("--algo", required=True, choices=["oks", "ks", "greedy"])
    p.add_argument("--dist-in", required=True)
    p.add_argument("--dist-out", default=None)
    p.add_argument("--eps-stop", type=float, default=1e-8)
    p.add_argument("--dt", type=float, default=2e-4)
    p.add_argument("--trajectory-out", default=None, help="trajectory CSV path")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("rewire", help="degree-preserving rewiring of a network")
    _add_input_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("table", help="algorithm/controller table for a network")
    _add_input_args(p)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("mc", help="seeded Monte Carlo batch of one algorithm")
    _add_gen_args(p)
    p.add_argument("--algo", required=True, choices=["greedy", "ks", "oks", "max"])
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    if args.cmd == "generate":
        spec = _genspec_from_args(args)
        net = generate(spec)
        write_edge_list(net, args.out, header=json.dumps(spec.to_json()))
        print(f"wrote {net.edge_count} bipartite edges (n={net.n}) to {args.out}")
        return 0

    if args.cmd == "match":
        net, rep = parse_edge_list(_edge_file(args))
        st = run_algorithm(net, args.algo, args.seed)
        _emit({
            "schema": SCHEMA,
            "input": args.input,
            "n": rep.n,
            "bipartite_edges": rep.bipartite_edges,
            "algo": args.algo,
            "seed": args.seed,
            "matching_size": st.matching.size,
            "controllers": max(1, rep.n - st.matching.size),
            "unmatched_right": st.unmatched_right,
            "phase1_unmatched": st.phase1_unmatched,
            "phase2_unmatched": st.phase2_unmatched,
            "core_size": st.core_size,
            "iterations_no_deg1": st.iterations_no_deg1,
        }, args)
        return 0

    if args.cmd == "controllers":
        net, rep = parse_edge_list(_edge_file(args))
        st = run_algorithm(net, args.algo, args.seed)
        cfg = control_config(net, st.matching)
        out = {
            "schema": SCHEMA,
            "input": args.input,
            "n": rep.n,
            "algo": args.algo,
            "seed": args.seed,
            "matching_size": st.matching.size,
            "num_controllers": cfg.num_controllers,
            "num_driver_vertices": len(cfg.driver_vertices),
            "num_cycles": len(cfg.cycle_attachments),
        }
        if args.full:
            out["driver_vertices"] = cfg.driver_vertices
            out["cycle_attachments"] = cfg.cycle_attachments
            out["b_structure"] = cfg.b_structure
        _emit(out, args)
        return 0

    if args.cmd == "predict":
        if args.input:
            net, rep = parse_edge_list(_edge_file(args))
            gf_in = GenFunc(DegreeDist.from_net(net, "right"))
            gf_out = GenFunc(DegreeDist.from_net(net, "left"))
            n = rep.n
        else:
            if not args.dist and not args.dist_in:
                raise InputError("predict needs --input or --dist/--dist-in")
            din = _parse_dist(args.dist_in or args.dist)
            dout = _parse_dist(args.dist_out) if args.dist_out else \
                (_parse_dist(args.dist) if args.dist else din)
            gf_in, gf_out = GenFunc(din), GenFunc(dout)
            n = args.n
        sol = solve_fixed_point(gf_in, gf_out)
        out = {
            "schema": SCHEMA,
            "u_star": sol.u_star,
            "w": list(sol.w),
            "residual": sol.residual,
            "iterations": sol.iterations,
        }
        if n:
            out["n"] = n
            out["controllers"] = max(1, int(round(n * sol.u_star)))
        if args.dist and args.dist.startswith("poisson:"):
            ks = solve_poisson_ks(float(args.dist.split(":", 1)[1]))
            out["k_lambda"] = ks.k_lambda
            out["h_lambda"] = ks.h_lambda
        _emit(out, args)
        return 0

    if args.cmd == "dynamics":
        din = _parse_dist(args.dist_in)
        dout = _parse_dist(args.dist_out) if args.dist_out else din
        spec = OdeSpec(algo=args.algo, init_in=din, init_out=dout,
                       eps_stop=args.eps_stop, dt_base=args.dt)
        traj = integrate(spec)
        if args.trajectory_out:
            traj.to_csv(args.trajectory_out)
        _emit({
            "schema": SCHEMA,
            "algo": args.algo,
            "T": traj.T,
            "unmatched_fraction": traj.unmatched_fraction,
            "unmatched_fraction_left": traj.unmatched_fraction_left,
            "stopped_edge_mass": traj.stopped_edge_mass,
            "fraction_time_no_deg1": fraction_time_no_deg1(traj),
            "states_recorded": len(traj.states),
        }, args)
        return 0

    if args.cmd == "rewire":
        net, _rep = parse_edge_list(_edge_file(args))
        rnet = rewire_preserving_degrees(net, args.seed)
        write_edge_list(rnet, args.out,
                        header=f"rewired from {args.input} seed={args.seed}")
        print(f"wrote {rnet.edge_count} bipartite edges to {args.out}")
        return 0

    if args.cmd == "table":
        net, rep = parse_edge_list(_edge_file(args))
        report = run_table(net, trials=args.trials, seed=args.seed)
        report["input"] = args.input
        _emit(report, args)
        return 0

    if args.cmd == "mc":
        spec = _genspec_from_args(args)
        summary = monte_carlo(spec, args.algo, args.trials, args.master_seed)
        _emit(summary.to_dict(), args)
        return 0

    raise InputError(f"unknown command {args.cmd!r}")


if __name__ == "__main__":
    sys.exit(main())
