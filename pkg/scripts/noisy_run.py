"""Median MSE per strategy for a noisy bandlimited signal on a 200-vertex sensor graph."""

import numpy as np
from _common import load, parse, save

from gfrsamp.experiments import single_run


def main():
    args = parse("single.json", "single.csv", __doc__).parse_args()
    cfg = load(args)
    table = single_run(cfg)
    print(f"spectral noise variance {cfg.noise_variance}, |S|={cfg.sample_sizes[0]}, alpha={cfg.alpha}")
    for kind in dict.fromkeys(r["strategy"] for r in table.sorted_rows()):
        mse = table.column("mse", strategy=kind)
        print(f"{kind:10s} median {np.median(mse):.3e}  min {mse.min():.3e}  max {mse.max():.3e}")
    save(table, args.out)


if __name__ == "__main__":
    main()
