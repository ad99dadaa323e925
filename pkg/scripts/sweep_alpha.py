"""Reconstruction SNR when the sampling order differs from the order that generated the signal."""

from _common import load, parse, pivot, save

from gfrsamp.experiments import run_sweep_alpha

MODELS = {
    "erdos_renyi": {"model": "erdos_renyi", "n": 200, "p": 0.05},
    "sensor": {"model": "sensor", "n": 200, "k": 6},
}


def main():
    p = parse("sweep_alpha.json", "sweep_alpha.csv", __doc__)
    p.add_argument("--model", choices=sorted(MODELS), default=None, help="replace the config's graph")
    args = p.parse_args()
    cfg = load(args, graph=MODELS.get(args.model))
    table = run_sweep_alpha(cfg)
    print(f"SNR (dB), signal generated at alpha*={table.metadata['alpha_star']}, |S|={cfg.sample_sizes[0]}")
    pivot(table, "alpha", "snr_db", fmt="{:.1f}")
    save(table, args.out)


if __name__ == "__main__":
    main()
