"""Shared helpers for the experiment scripts: config loading and plain-text pivots."""

import argparse
from pathlib import Path

import numpy as np

from gfrsamp.experiments import ExperimentConfig

ROOT = Path(__file__).resolve().parents[1]


def parse(default_config, default_out, description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", default=str(ROOT / "configs" / default_config))
    p.add_argument("--out", default=str(ROOT / "results" / default_out))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None, help="override the trial count (quick runs)")
    return p


def load(args, **overrides):
    d = ExperimentConfig.load(args.config).to_dict()
    if args.seed is not None:
        d["seed"] = args.seed
    if args.trials is not None:
        d["trials"] = args.trials
    d.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(d)


def pivot(table, col_key, value, fmt="{:.2e}", agg=np.median):
    """Print one line per strategy with ``agg(value)`` for every distinct ``col_key``."""
    kinds = list(dict.fromkeys(r["strategy"] for r in table.sorted_rows()))
    cols = sorted({r[col_key] for r in table.rows if r.get(col_key) is not None})
    print(f"{'':10s}" + "".join(f"{c!s:>11}" for c in cols))
    for kind in kinds:
        cells = []
        for c in cols:
            vals = table.column(value, strategy=kind, **{col_key: c})
            cells.append(fmt.format(agg(vals)) if vals.size else "-")
        print(f"{kind:10s}" + "".join(f"{c:>11}" for c in cells))


def save(table, out):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path, meta = table.write(out)
    print(f"wrote {csv_path} and {meta.name}")
