"""Recompute the reference values in tests/data/oracle_values.json.

Every number comes from tests/oracles.py (independent of the package) on
explicit small graphs, so the frozen file only changes if the oracle or the
graphs below change.
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles as O  # noqa: E402


def path_weights(n):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = 1
    return w


def cycle_weights(n):
    w = path_weights(n)
    w[0, -1] = w[-1, 0] = 1
    return w


def random_weights(n, seed, density=0.6):
    rng = np.random.default_rng(seed)
    while True:
        w = np.triu(rng.uniform(0.2, 1.0, (n, n)) * (rng.random((n, n)) < density), 1)
        w = w + w.T
        lap = O.laplacian(w)
        if np.sort(np.linalg.eigvalsh(lap))[1] > 1e-6:
            return w


def main():
    out = {}

    # MaxSigMin marginal values on the 6-vertex path, alpha = 0.5, |F| = 2, S = {0}
    d, u = O.gft(O.laplacian(path_weights(6)))
    fa = O.frft(u, 0.5)
    out["path6_maxsigmin"] = {
        "alpha": 0.5,
        "band": [0, 1],
        "current": [0],
        "values": {str(y): float(O.objective("MaxSigMin", fa, [0, 1], [0, y])) for y in range(1, 6)},
    }

    # MaxVol greedy trajectory on the 8-cycle, alpha = 1, |F| = 2, m = 2
    d, u = O.gft(O.laplacian(cycle_weights(8)))
    fa = O.frft(u, 1.0)
    out["cycle8_maxvol"] = {"alpha": 1.0, "band": [0, 1], "selected": O.greedy("MaxVol", fa, [0, 1], 2)}

    # exhaustive det argmax on a weighted 8-vertex graph, alpha = 0.7, |F| = 3
    w = random_weights(8, 7)
    d, u = O.gft(O.laplacian(w))
    fa = O.frft(u, 0.7)
    a = fa.conj().T[:, :3]
    dets = {s: float(np.real(np.linalg.det(a[list(s)].conj().T @ a[list(s)]))) for s in O.subsets(8, 3)}
    best = max(dets, key=lambda s: dets[s])
    out["weighted8_det"] = {"alpha": 0.7, "weights": w.tolist(), "band": [0, 1, 2], "argmax": list(best),
                            "max_det": dets[best]}

    # k-th order cutoff estimates on a weighted 12-vertex graph
    w = random_weights(12, 3, density=0.4)
    d, u = O.gft(O.laplacian(w))
    alpha, s = 0.8, [0, 3, 7]
    fa = O.frft(u, alpha)
    comp = [i for i in range(12) if i not in s]
    dscaled = O.principal_power(np.where(d > 0, d / d.max(), 1), alpha) * (d > 0)
    lal = fa.conj().T @ np.diag(dscaled) @ fa
    omegas = {}
    for k in (2, 4, 6, 8):
        sv = np.linalg.svd(np.linalg.matrix_power(lal, k)[:, comp], compute_uv=False)
        omegas[str(k)] = float(d.max() ** alpha * sv[-1] ** (1 / k))
    out["weighted12_cutoff"] = {"alpha": alpha, "weights": w.tolist(), "sample_set": s, "omega": omegas}

    path = ROOT / "tests" / "data" / "oracle_values.json"
    path.write_text(json.dumps(out, indent=1))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
