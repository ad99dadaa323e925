"""Median reconstruction MSE against the number of samples on a sensor graph."""

from _common import load, parse, pivot, save

from gfrsamp.experiments import run_sweep_size


def main():
    args = parse("sweep_size.json", "sweep_size.csv", __doc__).parse_args()
    cfg = load(args)
    table = run_sweep_size(cfg)
    print(f"median MSE over {cfg.trials} trials, N={cfg.graph.get('n')}, alpha={cfg.alpha}, |F|={cfg.bandwidth}")
    pivot(table, "sample_size", "mse")
    save(table, args.out)


if __name__ == "__main__":
    main()
