"""Graph models, shift operators, and graph/signal file formats.

Every random generator is a pure function of its parameters and seed. A
generated graph that is not connected is regenerated with ``seed + 1``,
``seed + 2``, ... and generation gives up after ``MAX_ATTEMPTS`` tries.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .errors import DisconnectedAfterRetries
from .rng import make_rng

MAX_ATTEMPTS = 100

ADJACENCY = "adjacency"
LAPLACIAN = "laplacian"


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph on vertices ``0 .. n-1``."""

    n: int
    weights: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.n < 1 or w.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}, got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if np.any(np.diag(w) != 0) or not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric with zero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.coords is not None:
            c = np.asarray(self.coords, dtype=float)
            if c.shape != (self.n, 2):
                raise ValueError("coords must be n x 2")
            object.__setattr__(self, "coords", c)

    @property
    def edges(self):
        i, j = np.nonzero(np.triu(self.weights, 1))
        return [(int(a), int(b), float(self.weights[a, b])) for a, b in zip(i, j)]

    @property
    def edge_count(self):
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def is_connected(self):
        if self.n == 1:
            return True
        ncomp, _ = scipy.sparse.csgraph.connected_components(
            scipy.sparse.csr_matrix(self.weights), directed=False
        )
        return ncomp == 1


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    kind: str
    matrix: np.ndarray

    def __post_init__(self):
        if self.kind not in (ADJACENCY, LAPLACIAN):
            raise ValueError(f"unknown shift kind {self.kind!r}")


def _symmetric_from_upper(n, upper_weights):
    w = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    w[iu] = upper_weights
    return w + w.T


def _retry(build, seed, what):
    for attempt in range(MAX_ATTEMPTS):
        g = build(make_rng(seed + attempt))
        if g.is_connected():
            return g
    raise DisconnectedAfterRetries(f"{what}: no connected graph after {MAX_ATTEMPTS} attempts")


def _planted(n, block_of, p_in, p_out, seed, what):
    iu = np.triu_indices(n, 1)
    same = block_of[iu[0]] == block_of[iu[1]]
    p = np.where(same, p_in, p_out)

    def build(rng):
        keep = rng.random(len(p)) < p
        return Graph(n, _symmetric_from_upper(n, keep.astype(float)))

    return _retry(build, seed, what)


def erdos_renyi(n, p, seed=0):
    """G(n, p) with unit weights."""
    if n < 1 or not 0 <= p <= 1:
        raise ValueError("need n >= 1 and 0 <= p <= 1")
    return _planted(n, np.zeros(n, dtype=int), p, p, seed, f"erdos_renyi(n={n}, p={p})")


def community_graph(n, communities=None, p_in=0.3, p_out=0.01, seed=0):
    """Planted partition with equal-size blocks (the first ``n % c`` blocks get one extra vertex).

    The default number of communities is ``round(sqrt(n) / 2)``.
    """
    if communities is None:
        communities = max(1, int(round(np.sqrt(n) / 2)))
    if not 1 <= communities <= n:
        raise ValueError("need 1 <= communities <= n")
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    sizes = np.full(communities, n // communities)
    sizes[: n % communities] += 1
    block_of = np.repeat(np.arange(communities), sizes)
    return _planted(n, block_of, p_in, p_out, seed, f"community_graph(n={n}, c={communities})")


def random_sensor(n, k=6, seed=0):
    """Symmetrized k-nearest-neighbour graph on uniform points in the unit square.

    Weights are ``exp(-d^2 / (2 s^2))`` where ``s`` is the mean distance from a
    point to its k nearest neighbours.
    """
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")

    def build(rng):
        pts = rng.random((n, 2))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        nbrs = np.argsort(d, axis=1, kind="stable")[:, :k]
        rows = np.repeat(np.arange(n), k)
        knn_d = d[rows, nbrs.ravel()]
        sigma = knn_d.mean()
        adj = np.zeros((n, n), dtype=bool)
        adj[rows, nbrs.ravel()] = True
        adj |= adj.T
        np.fill_diagonal(d, 0)
        w = np.where(adj, np.exp(-(d**2) / (2 * sigma**2)), 0.0)
        return Graph(n, w, coords=pts)

    return _retry(build, seed, f"random_sensor(n={n}, k={k})")


def gaussian_kernel_graph(signal, sigma=1.0, density=0.05, seed=0):
    """Random pairs (probability ``density``) weighted by a Gaussian kernel on signal differences."""
    s = np.asarray(signal)
    n = len(s)
    if sigma <= 0 or not 0 < density <= 1:
        raise ValueError("need sigma > 0 and 0 < density <= 1")
    iu = np.triu_indices(n, 1)
    kern = np.exp(-np.abs(s[iu[0]] - s[iu[1]]) ** 2 / (2 * sigma**2))

    def build(rng):
        keep = rng.random(len(kern)) < density
        return Graph(n, _symmetric_from_upper(n, np.where(keep, kern, 0.0)))

    return _retry(build, seed, f"gaussian_kernel_graph(n={n})")


def path_graph(n):
    w = np.zeros((n, n))
    i = np.arange(n - 1)
    w[i, i + 1] = w[i + 1, i] = 1
    return Graph(n, w)


def cycle_graph(n):
    w = path_graph(n).weights.copy()
    if n > 2:
        w[0, n - 1] = w[n - 1, 0] = 1
    return Graph(n, w)


def star_graph(n):
    w = np.zeros((n, n))
    w[0, 1:] = w[1:, 0] = 1
    return Graph(n, w)


def complete_graph(n):
    return Graph(n, np.ones((n, n)) - np.eye(n))


def laplacian(g):
    w = g.weights
    return ShiftOperator(LAPLACIAN, np.diag(w.sum(axis=1)) - w)


def adjacency(g):
    return ShiftOperator(ADJACENCY, g.weights.copy())


def shift_operator(g, kind=LAPLACIAN):
    return laplacian(g) if kind == LAPLACIAN else adjacency(g)


# --- file formats ---------------------------------------------------------


def graph_to_dict(g):
    out = {"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges]}
    if g.coords is not None:
        out["coords"] = g.coords.tolist()
    return out


def graph_from_dict(d):
    n = int(d["n"])
    w = np.zeros((n, n))
    for i, j, wt in d["edges"]:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError(f"self loop at vertex {i}")
        w[i, j] = w[j, i] = float(wt)
    return Graph(n, w, coords=d.get("coords"))


def save_graph(g, path):
    Path(path).write_text(json.dumps(graph_to_dict(g)))


def load_graph(path):
    return graph_from_dict(json.loads(Path(path).read_text()))


def load_signal(path):
    """Read a signal CSV: one row per vertex, one column (real) or two (real, imag)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if rows:
                    raise
                continue  # header line
            if len(vals) not in (1, 2):
                raise ValueError(f"signal rows need 1 or 2 columns, got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise ValueError(f"no signal rows in {path}")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValueError("signal rows have inconsistent column counts")
    a = np.array(rows)
    return a[:, 0] if a.shape[1] == 1 else a[:, 0] + 1j * a[:, 1]


def save_signal(x, path):
    x = np.asarray(x)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        if np.iscomplexobj(x) and np.any(x.imag != 0):
            for v in x:
                wr.writerow([repr(float(v.real)), repr(float(v.imag))])
        else:
            for v in np.real(x):
                wr.writerow([repr(float(v))])
