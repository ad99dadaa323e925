"""Greedy sampling-set selection in the fractional spectral domain.

All strategies run through one greedy loop: at every iteration each unselected
vertex ``y`` is scored by :func:`marginal_objective` and the best one joins
the set. Scores are oriented so the loop always maximizes; objectives that
the method minimizes are returned negated. Ties (values within ``TIE_RTOL``
relative of the best) go to the lowest vertex index.

The spectral strategies only depend on the singular values of
``G = F^alpha[F, S]`` (equivalently of ``F^-alpha[S, F]``):

========== ====================================== ==========================
strategy   score for ``S + y``                    design criterion
========== ====================================== ==========================
MaxSigMin  ``sigma_min(G)``                       E-optimal
MinTrac    ``-tr[(G G^H)^-1]`` (Gram inverse)     A-optimal
MinPinv    ``-||G^+||_F^2 = -sum 1/sigma_i^2``    A-optimal
MaxSig     ``sum sigma_i``                        T-optimal
MaxVol     ``log det[T_S] = sum log sigma_i^2``   D-optimal
========== ====================================== ==========================

MaxCut scores vertices by the energy of the smoothest fractional mode that
the current set cannot see, and MaxCov by weighted coverage of the columns of
a localization operator.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import linalg
from .errors import SingularSubproblem
from .gfrft import (
    Ideal,
    IndexSet,
    LocalizationOperator,
    PolyLowpass,
    fractional_spectrum,
    gfrft_operator,
    localization_operator,
)
from .linalg import EPS
from .rng import SAMPLING_STREAM, make_rng

STRATEGIES = ("MaxCut", "MaxSigMin", "MinTrac", "MinPinv", "MaxSig", "MaxVol", "MaxCov", "Random")
GREEDY = STRATEGIES[:-1]
OPTIMAL_DESIGN = STRATEGIES[:6]

TIE_RTOL = 1e-9
SPARSE_RTOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice for MaxCov: ``"ideal"`` (indicator of the band) or ``"polylowpass"``."""

    name: str = "ideal"
    p: int = 5

    def __post_init__(self):
        if self.name not in ("ideal", "polylowpass"):
            raise ValueError(f"unknown kernel {self.name!r}")

    def resolve(self, band):
        return Ideal(band) if self.name == "ideal" else PolyLowpass(self.p)


@dataclass(frozen=True)
class StrategyConfig:
    kind: str
    k: int = 6
    kernel: KernelSpec | None = None
    seed: int | None = None
    incremental: bool = False

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {STRATEGIES}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.kind == "MaxCov" and self.kernel is None:
            object.__setattr__(self, "kernel", KernelSpec())
        if self.kind != "MaxCov" and self.kernel is not None:
            raise ValueError("kernel only applies to MaxCov")
        if self.kind == "Random" and self.seed is None:
            object.__setattr__(self, "seed", 0)
        if self.kind != "Random" and self.seed is not None:
            raise ValueError("seed only applies to Random")

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, str):
            return cls(d)
        d = dict(d)
        if isinstance(d.get("kernel"), dict):
            d["kernel"] = KernelSpec(**d["kernel"])
        elif isinstance(d.get("kernel"), str):
            d["kernel"] = KernelSpec(d["kernel"])
        return cls(**d)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "MaxCut":
            out["k"] = self.k
        if self.kernel is not None:
            out["kernel"] = {"name": self.kernel.name, "p": self.kernel.p}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.incremental:
            out["incremental"] = True
        return out


@dataclass
class SamplingResult:
    strategy: str
    selected: list
    objective_trace: list
    elapsed: list
    setup_seconds: float = 0.0
    fallback_iterations: list = field(default_factory=list)

    @property
    def seconds(self):
        return self.setup_seconds + float(sum(self.elapsed))

    def index_set(self, universe, size=None):
        return IndexSet.of(self.selected[:size], universe)


@dataclass(frozen=True)
class CutoffEstimate:
    omega: float
    psi: np.ndarray
    phi: np.ndarray


def argbest(values):
    """Position of the largest value; near-ties resolve to the first position."""
    v = np.where(np.isnan(values), -np.inf, np.asarray(values, dtype=float))
    best = v.max()
    if not np.isfinite(best):
        return 0
    return int(np.flatnonzero(v >= best - TIE_RTOL * abs(best))[0])


def _as_index_set(s, n):
    return IndexSet.of(s, n)


def _trace_inv(grams):
    """Trace of the inverse of each Hermitian matrix in a stack; singular ones give inf."""
    try:
        inv = np.linalg.inv(grams)
        tr = np.real(np.trace(inv, axis1=-2, axis2=-1))
    except np.linalg.LinAlgError:
        tr = np.empty(len(grams))
        for i, g in enumerate(grams):
            try:
                tr[i] = np.real(np.trace(np.linalg.inv(g)))
            except np.linalg.LinAlgError:
                tr[i] = np.inf
    return np.where(np.isfinite(tr) & (tr > 0), tr, np.inf)


def _logdet(grams):
    sign, ld = np.linalg.slogdet(grams)
    return np.where(np.real(sign) > 0, ld, -np.inf)


def _inv_sq_sum(s):
    with np.errstate(divide="ignore"):
        return np.where(s > 0, 1.0 / s**2, np.inf).sum(axis=-1)


class _Scorer:
    """Precomputed operators for one (transform, band, strategy) triple."""

    def __init__(self, op, f, cfg):
        self.op = op
        self.f = f
        self.cfg = cfg
        self.n = op.n
        kind = cfg.kind
        if kind in ("MaxSigMin", "MinTrac", "MinPinv", "MaxSig", "MaxVol"):
            self.g_all = op.forward_matrix[f.array, :]
        elif kind == "MaxCut":
            self.rows = _cutoff_rows(op, cfg.k)
        elif kind == "MaxCov":
            t = localization_operator(op, cfg.kernel.resolve(f)).matrix
            a = np.abs(t)
            a[a < SPARSE_RTOL * a.max()] = 0.0
            density = np.count_nonzero(a) / a.size
            self.abs_t = scipy.sparse.csr_matrix(a) if density < 0.25 else a
            self.total = a.sum()
            self._covered, self._cover = [], np.zeros(self.n)

    # -- spectral strategies -------------------------------------------

    def _stack(self, current, cand):
        """Per-candidate matrices with the singular values of ``G[:, S + y]``.

        Once ``|S| > |F|`` the selected block is replaced by ``diag(s)`` from
        its SVD and each candidate column by ``U^H g``; this leaves ``X X^H``
        (hence every singular value) unchanged and shrinks each matrix to
        ``|F| x (|F| + 1)``.
        """
        gs = self.g_all[:, current]
        g = self.g_all[:, cand]
        nf = gs.shape[0]
        if gs.shape[1] > nf:
            u, sv, _ = np.linalg.svd(gs, full_matrices=False)
            gs = np.diag(sv).astype(complex)
            g = u.conj().T @ g
        x = np.empty((len(cand), nf, gs.shape[1] + 1), dtype=complex)
        x[:, :, :-1] = gs
        x[:, :, -1] = g.T
        return x

    def _spectral(self, current, cand, strict):
        kind = self.cfg.kind
        size = len(current) + 1
        nf = len(self.f)
        short = size < nf  # |S + y| < |F|: A-optimal inverses do not exist
        over = size > nf  # |S + y| > |F|: T_S is singular, det = 0
        if kind == "MaxVol" and over or kind in ("MinTrac", "MinPinv") and short:
            if strict:
                raise SingularSubproblem(
                    f"{kind}: |S|={size} vs |F|={nf} makes the objective matrix singular"
                )
            fallback = True
        else:
            fallback = False
        x = self._stack(current, cand)
        if kind == "MinTrac":
            xh = np.conj(np.swapaxes(x, 1, 2))
            grams = x @ xh if not short else xh @ x
            return -_trace_inv(grams), fallback
        if kind == "MaxVol":
            xh = np.conj(np.swapaxes(x, 1, 2))
            grams = xh @ x if not over else x @ xh
            return _logdet(grams), fallback
        s = np.linalg.svd(x, compute_uv=False)
        if kind == "MaxSigMin":
            return s[:, -1], False
        if kind == "MaxSig":
            return s.sum(axis=1), False
        return -_inv_sq_sum(s), fallback  # MinPinv

    # -- rank-one / bordering updates for MinTrac and MaxVol -----------

    def _incremental(self, current, cand):
        kind = self.cfg.kind
        nf = len(self.f)
        m = len(current)
        g = self.g_all[:, cand]
        gs = self.g_all[:, current]
        if m < nf:
            # bordered |S|x|S| Gram K = Gs^H Gs, grows by one row/column
            k = gs.conj().T @ g
            c = np.real(np.einsum("ij,ij->j", g.conj(), g))
            if m:
                kmat = gs.conj().T @ gs
                kinv = np.linalg.inv(kmat)
                u = kinv @ k
                schur = c - np.real(np.einsum("ij,ij->j", k.conj(), u))
                base_tr = np.real(np.trace(kinv))
                base_ld = _logdet(kmat[None])[0]
                extra = np.real(np.einsum("ij,ij->j", u.conj(), u))
            else:
                schur, base_tr, base_ld, extra = c, 0.0, 0.0, 0.0
            ok = schur > EPS * np.maximum(c, EPS)
            with np.errstate(divide="ignore", invalid="ignore"):
                if kind == "MaxVol":
                    return np.where(ok, base_ld + np.log(np.where(ok, schur, 1)), -np.inf), False
                tr = base_tr + (extra + 1) / schur
                return np.where(ok, -tr, -np.inf), m + 1 < nf
        mmat = gs @ gs.conj().T
        minv = np.linalg.inv(mmat)
        v = minv @ g
        q = np.real(np.einsum("ij,ij->j", g.conj(), v))
        if kind == "MaxVol":
            return _logdet(mmat[None])[0] + np.log1p(q), True
        tr = np.real(np.trace(minv)) - np.real(np.einsum("ij,ij->j", v.conj(), v)) / (1 + q)
        return -tr, False

    # -- MaxCut / MaxCov -------------------------------------------------

    def _maxcut(self, current, cand):
        comp = np.setdiff1d(np.arange(self.n), current)
        _, psi = _smallest_restricted(self.rows, comp)
        energy = np.zeros(self.n)
        energy[comp] = np.abs(psi) ** 2
        return energy[cand]

    def _row(self, j):
        a = self.abs_t
        return a.getrow(j).toarray().ravel() if scipy.sparse.issparse(a) else a[j]

    def coverage_weights(self, current):
        """``(eps - sum_{j in S} |T[:, j]|)_+`` with ``eps`` the mean coverage.

        Coverage is accumulated row by row (``|T|`` is symmetric) and cached
        while ``current`` only grows, so the greedy loop pays O(N) per step.
        """
        current = list(current)
        done = self._covered
        if current[: len(done)] != done:
            done, self._cover = [], np.zeros(self.n)
        for j in current[len(done):]:
            self._cover = self._cover + self._row(j)
        self._covered = current
        return _clamped_weights(self._cover, self.total, bool(current))

    def _maxcov(self, current, cand):
        w = self.coverage_weights(current)
        return np.asarray(self.abs_t @ w).ravel()[cand]  # |T| is symmetric

    def scores(self, current, cand, strict=False):
        kind = self.cfg.kind
        current = list(current)
        cand = np.asarray(cand, dtype=int)
        if kind == "MaxCut":
            return self._maxcut(current, cand), False
        if kind == "MaxCov":
            return self._maxcov(current, cand), False
        if self.cfg.incremental and kind in ("MinTrac", "MaxVol") and not strict:
            try:
                return self._incremental(current, cand)
            except np.linalg.LinAlgError:
                pass
        return self._spectral(current, cand, strict)


def _clamped_weights(cover, total, nonempty, eps=None):
    n = len(cover)
    if eps is None:
        eps = cover.sum() / n if nonempty else total / n**2
    w = np.clip(eps - cover, 0, None)
    if not np.any(w > 0):
        w = np.ones(n)
    return w


def coverage_weights(abs_t, current, eps=None):
    """MaxCov weights ``(eps 1 - sum_{j in S} |T[:, j]|)_+`` from scratch.

    ``eps`` defaults to the mean coverage ``(1/N) sum_i sum_{j in S} |T(i, j)|``
    (``(1/N^2) sum |T|`` for an empty set). When every entry clamps to zero
    the weights fall back to all ones, i.e. unweighted column sums.
    """
    a = np.asarray(abs_t)
    current = list(current)
    cover = a[:, current].sum(axis=1) if current else np.zeros(a.shape[0])
    return _clamped_weights(cover, a.sum(), bool(current), eps)


def _cutoff_rows(op, k):
    """``diag(d^k) F^alpha`` with ``d = (delta / delta_max)^alpha``.

    Its Gram matrix is ``(L^alpha)^{2k}`` up to the unitary ``F^-alpha`` and the
    scale ``delta_max^{2k alpha}``, so restricting columns to ``S^c`` gives the
    restricted power without ever forming it. Working with singular values of
    this factor instead of eigenvalues of the power keeps the low end of the
    spectrum above round-off for large ``k``.
    """
    delta = op.basis.eigenvalues
    if np.any(delta < 0):
        raise ValueError("MaxCut needs a shift with nonnegative spectrum (a Laplacian)")
    top = delta.max()
    if top <= 0:
        raise ValueError("shift operator is zero")
    d = linalg.fractional_power_diag(delta / top, k * op.alpha)
    return d[:, None] * op.forward_matrix


def _smallest_restricted(rows, comp):
    """Smallest eigenvalue of ``(rows^H rows)[comp, comp]`` and its phase-fixed eigenvector."""
    _, sv, vh = np.linalg.svd(rows[:, comp], full_matrices=False)
    psi = linalg.normalize_phases(vh[-1].conj()[:, None])[:, 0]
    return float(sv[-1]) ** 2, psi


def cutoff_frequency(basis, alpha, s, k=6, op=None):
    """k-th order cutoff estimate ``Omega_k(S) = lambda_min((L^alpha)^{2k}_{S^c})^{1/2k}``.

    Returns ``omega = inf`` (with empty vectors) when ``S`` is every vertex.
    ``psi`` is the minimizing eigenvector on ``S^c`` and ``phi`` its zero
    padding to all vertices.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _as_index_set(s, basis.n)
    comp = s.complement().array
    if comp.size == 0:
        return CutoffEstimate(np.inf, np.zeros(0, complex), np.zeros(basis.n, complex))
    if op is None:
        op = gfrft_operator(basis, alpha)
    lam, psi = _smallest_restricted(_cutoff_rows(op, k), comp)
    phi = np.zeros(op.n, dtype=complex)
    phi[comp] = psi
    scale = op.basis.eigenvalues.max() ** op.alpha
    omega = scale * max(lam, 0.0) ** (1.0 / (2 * k))
    return CutoffEstimate(float(omega), psi, phi)


def marginal_objective(op, f, current, y, cfg):
    """Score of adding vertex ``y`` to ``current`` under ``cfg`` (larger is better).

    Raises :class:`SingularSubproblem` when the strategy's inverse or
    determinant is undefined for ``current + y`` (the greedy loop instead
    falls back to pseudo-inverse / pseudo-determinant forms).
    """
    f = _as_index_set(f, op.n)
    current = list(current)
    if y in current:
        raise ValueError(f"vertex {y} already selected")
    if cfg.kind == "Random":
        raise ValueError("Random has no objective")
    values, _ = _Scorer(op, f, cfg).scores(current, [y], strict=True)
    return float(values[0])


def greedy_select(op, f, m, cfg):
    """Select ``m`` vertices with the strategy in ``cfg``.

    Returns a :class:`SamplingResult` whose ``selected`` list keeps selection
    order, so prefixes of one run are the greedy sets of every smaller size.
    """
    n = op.n
    f = _as_index_set(f, n)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= N, got m={m}")
    if len(f) < 1:
        raise ValueError("band must be nonempty")
    if cfg.kind == "Random":
        t0 = time.perf_counter()
        order = make_rng(cfg.seed, SAMPLING_STREAM).permutation(n)[:m]
        dt = time.perf_counter() - t0
        return SamplingResult("Random", [int(v) for v in order], [float("nan")] * m, [dt / m] * m)
    t0 = time.perf_counter()
    scorer = _Scorer(op, f, cfg)
    setup = time.perf_counter() - t0
    chosen = np.zeros(n, dtype=bool)
    selected, trace, elapsed, fallbacks = [], [], [], []
    for it in range(m):
        t0 = time.perf_counter()
        cand = np.flatnonzero(~chosen)
        values, fell_back = scorer.scores(selected, cand)
        j = argbest(values)
        y = int(cand[j])
        selected.append(y)
        chosen[y] = True
        elapsed.append(time.perf_counter() - t0)
        trace.append(float(values[j]))
        if fell_back:
            fallbacks.append(it)
    return SamplingResult(cfg.kind, selected, trace, elapsed, setup, fallbacks)


LOCALIZED_KINDS = ("MinTrac", "MinPinv", "MaxSig", "MaxVol", "MaxSigMin", "MaxCut")


def localized_objective(t, s, kind, pseudo=True, k=6, rtol=1e-10):
    """Evaluate a strategy's localization-operator form on the principal submatrix ``T_S``.

    ``tr[(T_S)^-1]`` for MinTrac/MinPinv, ``tr[T_S]`` for MaxSig, ``det[T_S]``
    for MaxVol, ``||(T_VS)^+||_2`` for MaxSigMin and
    ``||((T^{2k})_{S^c})^-1||_2`` for MaxCut (with ``T`` built from the
    fractional spectrum itself). With ``pseudo=True`` inverses are
    pseudo-inverses that drop eigenvalues below ``rtol`` times the largest.
    """
    mat = t.matrix if isinstance(t, LocalizationOperator) else np.asarray(t)
    n = mat.shape[0]
    s = _as_index_set(s, n)
    if len(s) == 0:
        raise ValueError("sampling set must be nonempty")
    idx = s.array
    ts = mat[np.ix_(idx, idx)]
    if kind == "MaxSig":
        return float(np.real(np.trace(ts)))
    if kind == "MaxVol":
        return float(np.real(np.linalg.det(ts)))
    if kind == "MaxSigMin":
        sv = np.linalg.svd(mat[:, idx], compute_uv=False)
        keep = sv[sv > rtol * sv[0]] if pseudo else sv
        if keep[-1] == 0:
            raise SingularSubproblem("T_VS has a zero singular value")
        return float(1.0 / keep[-1])
    if kind in ("MinTrac", "MinPinv"):
        w = np.linalg.eigvalsh((ts + ts.conj().T) / 2)
        top = w.max()
        if pseudo:
            w = w[w > rtol * top]
        elif w.min() <= rtol * top:
            raise SingularSubproblem("T_S is singular")
        return float(np.sum(1.0 / w))
    if kind == "MaxCut":
        comp = s.complement().array
        if comp.size == 0:
            return 0.0
        p = np.linalg.matrix_power(mat, 2 * k)
        w = np.linalg.eigvalsh(p[np.ix_(comp, comp)])
        if w[0] <= 0:
            raise SingularSubproblem("restricted power is singular")
        return float(1.0 / w[0])
    raise ValueError(f"no localized form for {kind!r}")


def spectrum_operator(op):
    """Localization operator with kernel ``h(delta^alpha) = delta^alpha`` (the fractional shift)."""
    d = fractional_spectrum(op.basis, op.alpha)
    t = (op.inverse_matrix * d) @ op.forward_matrix
    return LocalizationOperator(op.alpha, np.real(d), (t + t.conj().T) / 2)
