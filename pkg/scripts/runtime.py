"""Selection wall time per strategy as the community graph grows (|S| = N/10)."""

from _common import load, parse, pivot, save

from gfrsamp.experiments import run_runtime


def main():
    p = parse("runtime.json", "runtime.csv", __doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=None, help="graph sizes to time")
    args = p.parse_args()
    cfg = load(args, graph_sizes=args.sizes)
    table = run_runtime(cfg)
    print(f"selection seconds (min over {cfg.trials} trials), alpha={cfg.alpha}, |F|={cfg.bandwidth}")
    pivot(table, "n", "select_seconds", fmt="{:.4f}", agg=min)
    save(table, args.out)


if __name__ == "__main__":
    main()
