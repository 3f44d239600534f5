"""Command-line interface.

Every command prints one JSON document on stdout with the command name,
the parameters, the outputs, the wall time and the seed.  Bulk arrays go
to CSV files under the ``-o`` prefix.  Exit status: 0 on success, 1 on a
validation error, 2 when an internal invariant or convergence check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import diffusion, graph, io, local, resistance, sbm, solver, sparsify, spectra
from .errors import ConvergenceError, InvariantViolation, SpecGraphError, ValidationError

INLINE_MAX = 64


class CliError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _num(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_num(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return sorted(_num(v) for v in x)
    return x


def _vec(x: np.ndarray):
    return _num(x) if len(x) <= INLINE_MAX else None


def _load(args):
    g, names = io.read_edge_list(args.graph)
    return g, names


def _vertex_arg(tok: str, g, names) -> int:
    if names is not None:
        if tok in names:
            return names.index(tok)
        raise CliError(f"unknown vertex {tok!r}")
    try:
        v = int(tok)
    except ValueError:
        raise CliError(f"unknown vertex {tok!r}") from None
    if not 0 <= v < g.n:
        raise CliError(f"vertex {v} out of range")
    return v


def _vertex_list(toks, g, names):
    return [_vertex_arg(t, g, names) for t in toks]


def _label(names, i):
    return names[i] if names else int(i)


def _vector_csv(prefix, suffix, names, cols: dict):
    if not prefix:
        return None
    path = f"{prefix}{suffix}"
    keys = list(cols)
    n = len(cols[keys[0]])
    io.write_csv(path, ["vertex"] + keys, ([_label(names, i)] + [cols[k][i] for k in keys] for i in range(n)))
    return path


# --------------------------------------------------------------------------
# commands


def cmd_gen(args):
    names = None
    extra = {}
    if args.family:
        g = graph.gen_family(args.family, *args.size)
    elif args.random:
        params = {"n": args.n}
        if args.random == "gnp":
            params["p"] = args.p
        elif args.random == "d_regular":
            params["d"] = args.d
        g = graph.gen_random(args.random, args.seed, **params)
    elif args.sbm:
        if args.dcsbm:
            model = sbm.sparse_dcsbm(args.n, args.seed, min_expected_degree=args.min_degree)
            g = sbm.gen_dcsbm(model, args.seed)
            truth = model.model.z
        else:
            pb = sbm.gen_planted_bisection(args.n, args.p, args.q, args.seed)
            g, truth = pb.graph, pb.truth.labels
            extra = {"mu1": pb.mu1, "mu2": pb.mu2, "theory_void": pb.theory_void}
        if args.output:
            path = f"{args.output}.truth.csv"
            io.write_csv(path, ["vertex", "class"], ((i, int(c)) for i, c in enumerate(truth)))
            extra["truth_file"] = path
    else:
        raise CliError("choose one of --family, --random or --sbm")
    out = {"n": g.n, "m": g.m, "volume": g.volume, **extra}
    if args.output:
        io.write_edge_list(g, args.output, names)
        out["file"] = args.output
    else:
        out["edge_list"] = io.format_edge_list(g, names)
    return out


def cmd_eig(args):
    g, names = _load(args)
    m = graph.laplacian(g, args.kind) if args.kind != "adjacency" else g.adjacency()
    if args.kind == "random_walk":
        pair_vals, vecs = spectra.sym_eig(graph.laplacian(g, "normalized_symmetric"))
        vecs = vecs / np.sqrt(g.degree)[:, None]
        es = spectra.EigenSystem(pair_vals, vecs, 0.0)
    elif args.solver == "jacobi":
        es = spectra.eig_dense(m, tol=args.tol)
    else:
        vals, vecs = spectra.sym_eig(m)
        es = spectra.EigenSystem(vals, vecs, float(np.max(np.linalg.norm(m @ vecs - vecs * vals, axis=0))))
    k = g.n if args.k is None else min(args.k, g.n)
    out = {"values": _num(es.values[:k]), "residual": es.residual_tol}
    if args.output:
        cols = {f"v{i + 1}": es.vectors[:, i] for i in range(k)}
        out["vectors_file"] = _vector_csv(args.output, ".eigvecs.csv", names, cols)
    facts = spectra.spectral_facts(g)
    out["num_zero_normalized"] = facts.num_zero_eigs
    out["has_bipartite_component"] = facts.has_bipartite_component
    return out


def cmd_partition(args):
    g, names = _load(args)
    rep = spectra.cheeger_report(g)
    sw = rep.sweep
    out = {
        "lambda2": rep.lambda2,
        "best_conductance": sw.best_conductance,
        "cheeger_lower": rep.lower,
        "cheeger_upper": rep.upper,
        "best_set": [_label(names, i) for i in sorted(sw.best_set)],
        "best_index": sw.best_index,
    }
    if args.output:
        vec = spectra.fiedler(g, "random_walk").vector
        pos = np.empty(g.n, dtype=np.int64)
        pos[sw.order] = np.arange(g.n)
        prof = np.append(sw.profile, np.nan)
        io.write_csv(
            f"{args.output}.sweep.csv",
            ["vertex", "value", "prefix_conductance"],
            ((_label(names, v), float(vec[v]), float(prof[pos[v]])) for v in sw.order),
        )
        out["sweep_file"] = f"{args.output}.sweep.csv"
    return out


def cmd_ppr(args):
    g, names = _load(args)
    seeds = _vertex_list(args.seed_node, g, names)
    s = np.zeros(g.n)
    s[seeds] = 1.0 / len(seeds)
    pi = diffusion.pagerank_dense(g, args.alpha, s, lazy=not args.non_lazy)
    out = {"sum": float(pi.sum()), "pagerank": _vec(pi)}
    out["file"] = _vector_csv(args.output, ".ppr.csv", names, {"pagerank": pi})
    return out


def cmd_push(args):
    g, names = _load(args)
    seeds = _vertex_list(args.seed_node, g, names)
    if args.variant == "ppr":
        st = local.push_ppr(g, {v: 1.0 / len(seeds) for v in seeds}, args.alpha, args.eps, args.rho)
        out = {
            "p_l1": float(st.p.sum()),
            "r_l1": float(st.r.sum()),
            "mass_total": float(st.p.sum() + st.r.sum()),
            "support_volume": float(g.degree[st.support()].sum()),
            "support_volume_bound": local.support_volume_bound(args.alpha, args.eps, args.rho),
            "work": st.work,
        }
    else:
        st = local.push_l1(g, seeds, args.beta, args.tau, args.rho)
        rep = local.gm_optimality_check(g, st)
        out = {"x_l1": float(st.p.sum()), "r_l1": float(st.r.sum()), "optimality": rep.violations,
               "optimality_ok": rep.ok, "work": st.work}
    out["push_count"] = st.push_count
    sparse = st.as_sparse()
    out["p"] = {str(_label(names, k)): v for k, v in sparse["p"].items()}
    out["r"] = {str(_label(names, k)): v for k, v in sparse["r"].items()}
    if st.p.any():
        sw = local.push_sweep(g, st)
        out["sweep_conductance"] = sw.best_conductance
        out["sweep_set"] = [_label(names, i) for i in sorted(sw.best_set)]
        out["conductance_profile"] = _num(sw.profile)
    return out


def cmd_mov(args):
    g, names = _load(args)
    seed = local.seed_vector(g, _vertex_list(args.seed_set, g, names))
    sol = local.mov_solve(g, seed, args.kappa)
    out = {"gamma": sol.gamma, "kappa": sol.kappa, "correlation": sol.correlation_achieved,
           "constraint_active": sol.constraint_active, "steps": sol.steps,
           "residual": local.mov_residual(g, sol, seed), "x": _vec(sol.x)}
    out["file"] = _vector_csv(args.output, ".mov.csv", names, {"x": sol.x})
    sw = spectra.sweep_cut(g, sol.x)
    out["sweep_conductance"] = sw.best_conductance
    return out


def cmd_resistance(args):
    g, names = _load(args)
    out = {"total_resistance": resistance.total_resistance(g)}
    if args.pair:
        a, b = _vertex_list(args.pair, g, names)
        out["pair"] = [_label(names, a), _label(names, b)]
        out["resistance"] = resistance.effective_resistance(g, a, b)
    if args.metric_trials:
        rep = resistance.resistance_metric_check(g, args.metric_trials, args.seed)
        out["triangle_violation"] = rep.triangle_violation
        out["geodesic_excess"] = rep.geodesic_excess
    if args.output:
        r = resistance.resistance_matrix(g)
        path = f"{args.output}.resistance.csv"
        io.write_csv(path, ["vertex"] + [str(_label(names, j)) for j in range(g.n)],
                     ([_label(names, i)] + r[i].tolist() for i in range(g.n)))
        out["file"] = path
    return out


def cmd_leverage(args):
    g, names = _load(args)
    lev = resistance.leverage_scores(g)
    out = {"sum": float(lev.leverage.sum()), "n_minus_1": g.n - 1,
           "min": float(lev.leverage.min()), "max": float(lev.leverage.max())}
    if args.output:
        path = f"{args.output}.leverage.csv"
        io.write_csv(path, ["u", "v", "w", "R_e", "leverage", "probability"],
                     ([_label(names, u), _label(names, v), w, re, le, pe]
                      for _, u, v, w, re, le, pe in lev.rows()))
        out["file"] = path
    return out


def _sparsifier_config(args, g):
    r = args.r if args.r else sparsify.sample_size(g.n, args.eps_sparsify, args.C)
    beta = args.beta
    if args.source == "uniform" and beta is None:
        beta = min(1.0, (g.n - 1) / (g.m * resistance.leverage_scores(g).leverage.max()))
    return sparsify.SparsifierConfig(r, 1.0 if beta is None else beta, args.seed, args.source)


def cmd_sparsify(args):
    g, names = _load(args)
    cfg = _sparsifier_config(args, g)
    h = sparsify.sparsify(g, cfg)
    rep = sparsify.spectral_similarity(g, h)
    out = {"r": cfg.r, "beta": cfg.beta, "source": cfg.source, "m_in": g.m, "m_out": h.m,
           "weight_in": float(g.w.sum()), "weight_out": float(h.w.sum()), "sigma": rep.sigma,
           "embedding_norm": sparsify.embedding_check(g, cfg)}
    if args.output:
        io.write_edge_list(h, args.output, names)
        out["file"] = args.output
    return out


def cmd_similarity(args):
    g, names = _load(args)
    h, _ = io.read_edge_list(args.other, n=g.n)
    rep = sparsify.spectral_similarity(g, h, seed=args.seed)
    return {"sigma": rep.sigma, "ratio_min": _num(rep.ratios.min()) if len(rep.ratios) else None,
            "ratio_max": _num(rep.ratios.max()) if len(rep.ratios) else None}


def cmd_solve(args):
    g, names = _load(args)
    b = io.read_vector_csv(args.b, g.n, names)
    if args.method == "dense":
        rep = solver.solve_dense(g, b)
    elif args.method == "cg":
        rep = solver.solve_cg(g, b, args.eps, args.max_iter)
    else:
        cfg = sparsify.SparsifierConfig(
            args.r if args.r else sparsify.sample_size(g.n, 1.0), 1.0, args.seed, "leverage")
        rep = solver.solve_pcg(g, b, args.eps, sparsify.sparsify(g, cfg), args.max_iter)
    out = {"iterations": rep.iterations, "rel_error_L": rep.rel_error_L, "converged": rep.converged,
           "residual_norm": rep.residual_norm, "x": _vec(rep.x)}
    out["file"] = _vector_csv(args.output, ".solution.csv", names, {"x": rep.x})
    return out


def cmd_ssl(args):
    g, names = _load(args)
    labels = io.read_labels_csv(args.labels, g.n, names)
    scores, pred = solver.ssl_predict(g, labels, args.method, args.alpha)
    out = {"num_classes": scores.shape[1], "prediction": _vec(pred)}
    if args.output:
        cols = {f"score{j}": scores[:, j] for j in range(scores.shape[1])}
        cols["class"] = pred
        out["file"] = _vector_csv(args.output, ".ssl.csv", names, cols)
    return out


def cmd_sbm_recover(args):
    trials = []
    for t in range(args.trials):
        seed = args.seed + t
        start = time.perf_counter()
        if args.model == "bisection":
            pb = sbm.gen_planted_bisection(args.n, args.p, args.q, seed)
            g, truth = pb.graph, pb.truth
        else:
            model = sbm.sparse_dcsbm(args.n, seed, min_expected_degree=args.min_degree)
            g, truth = sbm.gen_dcsbm(model, seed), model.model.z
        if args.method == "adjacency":
            frac = sbm.misclassification_rate(sbm.recover_bisection_adjacency(g), truth)
            tau = None
        else:
            tau = float(g.degree.mean()) if args.tau is None else args.tau
            frac = sbm.rsc(g, args.k, tau, truth, seed=seed, isolated=args.isolated).misclassified_fraction
        row = {"seed": seed, "n": args.n, "tau": tau, "fraction": frac}
        if args.model == "bisection":
            row.update(p=args.p, q=args.q)
        row["runtime"] = time.perf_counter() - start
        trials.append(row)
    fr = [t["fraction"] for t in trials]
    return {"trials": trials, "mean_fraction": float(np.mean(fr)), "max_fraction": float(np.max(fr))}


def cmd_mixing_check(args):
    g, names = _load(args)
    p0 = np.zeros(g.n)
    p0[_vertex_arg(args.start, g, names)] = 1.0
    prof = diffusion.mixing_bound_check(g, p0, args.t_max, lazy=args.lazy)
    out = {"alpha": prof.alpha, "lazy": prof.lazy, "l1_dist": _num(prof.l1_dist), "bound": _num(prof.bound)}
    if args.emlemma_trials:
        out["expander_mixing_max_ratio"] = diffusion.expander_mixing_check(g, args.emlemma_trials, args.seed)
    return out


def cmd_diffusion_sdp_check(args):
    g, _ = _load(args)
    params = {"heat": {"t": args.t}, "pagerank": {"gamma": args.gamma},
              "lazy_power": {"alpha": args.alpha, "t": int(args.t)}}[args.kind]
    dm = diffusion.diffusion_kernel(g, args.kind, **params)
    rep = diffusion.verify_regularized_optimum(g, dm, args.trials, args.seed)
    if not rep.ok:
        raise InvariantViolation(f"regularized optimum check failed, margin {rep.margin}")
    return {"kind": args.kind, "regularizer": dm.regularizer, "eta": dm.eta, "p": dm.p,
            "objective": rep.objective, "margin": rep.margin, "ok": rep.ok}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="specgraph", description=__doc__,
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, graph_arg=True, help=None):
        p = sub.add_parser(name, help=help)
        if graph_arg:
            p.add_argument("graph", help="edge-list file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output", default=None, help="output path or prefix for CSV files")
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, graph_arg=False, help="generate a graph")
    p.add_argument("--family", choices=sorted(graph.FAMILIES))
    p.add_argument("--size", type=int, nargs="+", default=[])
    p.add_argument("--random", choices=["gnp", "d_regular", "ring_plus_matching"])
    p.add_argument("--sbm", action="store_true", help="planted bisection (or DC-SBM with --dcsbm)")
    p.add_argument("--dcsbm", action="store_true")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--q", type=float, default=0.01)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--min-degree", type=float, default=2.0)

    p = add("eig", cmd_eig, help="Laplacian or adjacency spectrum")
    p.add_argument("--kind", default="combinatorial",
                   choices=["combinatorial", "normalized_symmetric", "random_walk", "adjacency"])
    p.add_argument("--solver", choices=["jacobi", "lapack"], default="jacobi")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--k", type=int, default=None)

    add("partition", cmd_partition, help="Fiedler sweep cut and Cheeger check")

    p = add("ppr", cmd_ppr, help="dense personalized PageRank")
    p.add_argument("--seed-node", nargs="+", required=True)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--non-lazy", action="store_true")

    p = add("push", cmd_push, help="local push (ppr or l1 variant)")
    p.add_argument("--variant", choices=["ppr", "l1"], default="ppr")
    p.add_argument("--seed-node", nargs="+", required=True)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--tau", type=float, default=1e-4)

    p = add("mov", cmd_mov, help="locally biased spectral vector")
    p.add_argument("--seed-set", nargs="+", required=True)
    p.add_argument("--kappa", type=float, default=0.5)

    p = add("resistance", cmd_resistance, help="effective resistances")
    p.add_argument("--pair", nargs=2, default=None)
    p.add_argument("--metric-trials", type=int, default=0)

    add("leverage", cmd_leverage, help="edge leverage scores")

    p = add("sparsify", cmd_sparsify, help="leverage-sampled sparsifier")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--eps-sparsify", type=float, default=0.5)
    p.add_argument("--C", type=float, default=sparsify.SAMPLE_CONSTANT)
    p.add_argument("--source", choices=["leverage", "uniform"], default="leverage")
    p.add_argument("--beta", type=float, default=None)

    p = add("similarity", cmd_similarity, help="spectral similarity of two graphs")
    p.add_argument("other", help="second edge-list file")

    p = add("solve", cmd_solve, help="Laplacian solve")
    p.add_argument("--b", required=True, help="CSV vertex,value")
    p.add_argument("--method", choices=["dense", "cg", "pcg"], default="cg")
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--r", type=int, default=None)

    p = add("ssl", cmd_ssl, help="semi-supervised label propagation")
    p.add_argument("--labels", required=True, help="CSV vertex,class")
    p.add_argument("--method", choices=list(solver.SSL_METHODS), default="zgl")
    p.add_argument("--alpha", type=float, default=0.9)

    p = add("sbm-recover", cmd_sbm_recover, graph_arg=False, help="blockmodel recovery trials")
    p.add_argument("--model", choices=["bisection", "dcsbm"], default="bisection")
    p.add_argument("--method", choices=["adjacency", "rsc"], default="adjacency")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--isolated", choices=["error", "pinv"], default="error")
    p.add_argument("--min-degree", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=10)

    p = add("mixing-check", cmd_mixing_check, help="random-walk mixing bound")
    p.add_argument("--start", default="0")
    p.add_argument("--t-max", type=int, default=50)
    p.add_argument("--lazy", action="store_true")
    p.add_argument("--emlemma-trials", type=int, default=0)

    p = add("diffusion-sdp-check", cmd_diffusion_sdp_check, help="diffusion kernel SDP optimality")
    p.add_argument("--kind", choices=["heat", "pagerank", "lazy_power"], default="heat")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=200)
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "rho", "absent") is None:
            args.rho = 0.5 if args.variant == "ppr" else 1.0
        outputs = args.func(args)
    except InvariantViolation as exc:
        _fail(exc, 2)
        return 2
    except ConvergenceError as exc:
        _fail(exc, 2)
        return 2
    except (SpecGraphError, ValueError) as exc:
        _fail(exc, 1)
        return 1
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    doc = {
        "command": args.command,
        "params": _num(params),
        "outputs": _num(outputs),
        "wall_time": time.perf_counter() - start,
        "seed": args.seed,
    }
    stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    return 0


def _fail(exc, code):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
