"""Command line entry point: ``gfrsamp <command> ...``.

Commands::

    graph gen     --config CFG --out GRAPH.json [--seed S]
    graph info    --graph GRAPH.json | --config CFG [--out INFO.json]
    sample        --config CFG --out SELECTED.json [--seed S]
    reconstruct   --config CFG --out SIGNAL.csv [--seed S]
    experiment {sweep-size,sweep-alpha,runtime,cdf,single} --config CFG --out TABLE.csv [--seed S]

Configs are JSON objects whose keys are :class:`ExperimentConfig` field
names. ``graph gen`` also accepts a bare graph block such as
``{"model": "sensor", "n": 200, "k": 6}``.
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np
import scipy.sparse.linalg

from . import __version__, graph as gr
from .errors import GfrsampError, IllConditioned
from .experiments import (
    RUNNERS,
    SYNTHETIC_SIGNALS,
    ExperimentConfig,
    base_signal,
    build_graph,
    make_operator,
    write_cdfs,
)
from .gfrft import IndexSet
from .reconstruct import build_reconstructor, reconstruct
from .sampling import greedy_select

EXPERIMENT_NAMES = {
    "sweep-size": "SweepSize",
    "sweep-alpha": "SweepAlpha",
    "runtime": "Runtime",
    "cdf": "CdfCompare",
    "single": "SingleRun",
}


def _load_json(path):
    return json.loads(Path(path).read_text())


def _config(args, experiment=None):
    d = _load_json(args.config)
    if experiment is not None:
        d["experiment"] = experiment
    if getattr(args, "seed", None) is not None:
        d["seed"] = args.seed
    return ExperimentConfig.from_dict(d)


def _signal_for(cfg, n):
    if cfg.signal is None or cfg.signal in SYNTHETIC_SIGNALS:
        return base_signal(cfg.signal, n, cfg.seed)
    return gr.load_signal(cfg.signal)


def cmd_graph_gen(args):
    d = _load_json(args.config)
    spec = d.get("graph", d)
    seed = args.seed if args.seed is not None else d.get("seed", 0)
    signal = gr.load_signal(d["signal"]) if d.get("signal") and Path(d["signal"]).is_file() else None
    g = build_graph(spec, seed, signal=signal)
    gr.save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.edge_count}")


def graph_info(g):
    deg = g.weights.sum(axis=1)
    info = {
        "n": g.n,
        "edges": g.edge_count,
        "connected": bool(g.is_connected()),
        "min_degree": float(deg.min()),
        "max_degree": float(deg.max()),
        "has_coords": g.coords is not None,
    }
    lap = gr.laplacian(g).matrix
    w = np.linalg.eigvalsh(lap) if g.n <= 2000 else scipy.sparse.linalg.eigsh(lap, 2, which="SA")[0]
    info["algebraic_connectivity"] = float(np.sort(w)[1]) if g.n > 1 else 0.0
    info["max_laplacian_eigenvalue"] = float(np.max(w))
    return info


def cmd_graph_info(args):
    if args.graph:
        g = gr.load_graph(args.graph)
    else:
        d = _load_json(args.config)
        g = build_graph(d.get("graph", d), args.seed if args.seed is not None else d.get("seed", 0))
    info = graph_info(g)
    text = json.dumps(info, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    print(text)


def _setup(cfg):
    signal = None
    if cfg.graph.get("model") == "gaussian_kernel":
        signal = _signal_for(cfg, cfg.graph["n"])
    g = build_graph(cfg.graph, cfg.seed, signal=signal)
    op = make_operator(g, cfg.alpha, cfg.shift)
    return g, op, IndexSet.first(cfg.bandwidth, op.n)


def cmd_sample(args):
    cfg = _config(args)
    _, op, f = _setup(cfg)
    m = int(cfg.sample_sizes[0])
    out = {"alpha": cfg.alpha, "bandwidth": cfg.bandwidth, "sample_size": m, "seed": cfg.seed, "selections": {}}
    for strat in cfg.strategies:
        res = greedy_select(op, f, m, strat)
        out["selections"][strat.kind] = {
            "selected": res.selected,
            "objective_trace": res.objective_trace,
            "seconds": res.seconds,
            "fallback_iterations": res.fallback_iterations,
        }
    Path(args.out).write_text(json.dumps(out, indent=2))
    print(f"wrote {args.out}")


def cmd_reconstruct(args):
    cfg = _config(args)
    _, op, f = _setup(cfg)
    x = _signal_for(cfg, op.n)
    if len(x) != op.n:
        raise GfrsampError(f"signal has {len(x)} entries, graph has {op.n}")
    if cfg.sample_set is not None:
        s = IndexSet.of(cfg.sample_set, op.n)
    else:
        res = greedy_select(op, f, int(cfg.sample_sizes[0]), cfg.strategies[0])
        s = IndexSet.of(res.selected, op.n)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IllConditioned)
        r = build_reconstructor(op, s, f)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    est = reconstruct(r, np.asarray(x)[s.array])
    gr.save_signal(est, args.out)
    print(f"wrote {args.out}: |S|={len(s)} cond={r.cond:.3g} recovering={r.recovering}")


def cmd_experiment(args):
    name = EXPERIMENT_NAMES[args.name]
    cfg = _config(args, name)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if name == "CdfCompare":
        table = RUNNERS[name](cfg)
        table.metadata["cdf_files"] = write_cdfs(table.cdfs, out.parent, out.name)
    else:
        table = RUNNERS[name](cfg)
    if name == "SingleRun":
        dumped = []
        for (kind, trial), est in sorted(table.estimates.items()):
            p = out.with_name(f"{out.stem}.signal.{kind}.t{trial}.csv")
            gr.save_signal(est, p)
            dumped.append(p.name)
        table.metadata["signal_files"] = dumped
    csv_path, meta_path = table.write(out)
    failed = [r for r in table.rows if r.get("error")]
    print(f"wrote {csv_path} ({len(table)} rows, {len(failed)} failed) and {meta_path}")


def build_parser():
    p = argparse.ArgumentParser(prog="gfrsamp", description="Fractional-spectrum graph sampling experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", required=out_required, help="output path")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")

    g = sub.add_parser("graph", help="generate or inspect graphs")
    gsub = g.add_subparsers(dest="graph_command", required=True)
    gen = gsub.add_parser("gen", help="generate a graph file")
    common(gen)
    gen.set_defaults(func=cmd_graph_gen)
    info = gsub.add_parser("info", help="summarize a graph")
    src = info.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph JSON file")
    src.add_argument("--config", help="config with a graph block")
    info.add_argument("--out", help="write the summary as JSON")
    info.add_argument("--seed", type=int, default=None)
    info.set_defaults(func=cmd_graph_info)

    s = sub.add_parser("sample", help="select sampling sets for every configured strategy")
    common(s)
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("reconstruct", help="reconstruct a signal from its samples")
    common(r)
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("experiment", help="run an experiment family")
    e.add_argument("name", choices=sorted(EXPERIMENT_NAMES))
    common(e)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (GfrsampError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
