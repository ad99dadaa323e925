"""Best transform order per strategy on a surrogate (or user-supplied) signal, with magnitude CDFs."""

from pathlib import Path

from _common import load, parse, save

from gfrsamp.experiments import run_cdf_compare


def main():
    p = parse("cdf.json", "cdf.csv", __doc__)
    p.add_argument("--signal", default=None, help="signal CSV to use instead of the AR(1) surrogate")
    args = p.parse_args()
    cfg = load(args, signal=args.signal, output=Path(args.out).stem)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table = run_cdf_compare(cfg, out_dir=out.parent)
    print(f"{'strategy':10s} {'alpha':>7s} {'SNR dB':>8s} {'KS':>6s}")
    for r in table.sorted_rows():
        print(f"{r['strategy']:10s} {r['alpha']:7.3f} {r['snr_db']:8.2f} {r['ks']:6.3f}")
    save(table, out)


if __name__ == "__main__":
    main()
