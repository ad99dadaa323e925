"""Reconstruction from samples, error covariance and error metrics."""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, IllConditioned, NotPSD
from .gfrft import IndexSet, LocalizationOperator

COND_WARN = 1e8
SNR_CAP_DB = 320.0
PSD_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class Reconstructor:
    """``R = F^-alpha[:, F] pinv(F^-alpha[S, F])``; columns follow ``sample_set`` order."""

    alpha: float
    sample_set: IndexSet
    band_set: IndexSet
    matrix: np.ndarray
    cond: float
    recovering: bool


@dataclass(frozen=True)
class ErrorReport:
    mse: float
    snr_db: float
    residual_norm: float


def _cond(a):
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[-1] == 0 or a.shape[0] < a.shape[1]:
        return np.inf
    return float(s[0] / s[-1])


def build_reconstructor(op, s, f):
    """Least-squares reconstructor for signals bandlimited to ``f`` sampled on ``s``.

    ``recovering`` is False when ``|s| < |f|``; the operator is then the
    minimum-norm least-squares fit and cannot recover every bandlimited signal.
    Warns :class:`IllConditioned` when ``cond(F^-alpha[S, F]) > 1e8``.
    """
    n = op.n
    s = IndexSet.of(s, n)
    f = IndexSet.of(f, n)
    if len(s) < 1 or len(f) < 1:
        raise ValueError("sample and band sets must be nonempty")
    w = op.inverse_matrix[:, f.array]
    a = w[s.array]
    cond = _cond(a)
    recovering = len(s) >= len(f) and np.isfinite(cond)
    if len(s) >= len(f) and cond > COND_WARN:
        warnings.warn(f"sampling submatrix condition number {cond:.3g}", IllConditioned, stacklevel=2)
    r = w @ linalg.pinv(a)
    return Reconstructor(op.alpha, s, f, r, cond, bool(recovering))


def reconstruct(r, samples):
    samples = np.asarray(samples)
    if samples.shape != (len(r.sample_set),):
        raise DimensionMismatch(f"expected {len(r.sample_set)} samples, got shape {samples.shape}")
    return r.matrix @ samples


def localization_reconstruct(t, s, samples, rtol=1e-10):
    """``T[:, S] pinv(T[S, S]) x_S``.

    Singular values of ``T_S`` below ``rtol`` times the largest are treated
    as zero; for an ideal kernel ``T_S`` has rank ``min(|S|, |F|)`` and the
    remaining spectrum is round-off.
    """
    mat = t.matrix if isinstance(t, LocalizationOperator) else np.asarray(t)
    s = IndexSet.of(s, mat.shape[0])
    samples = np.asarray(samples)
    if samples.shape != (len(s),):
        raise DimensionMismatch(f"expected {len(s)} samples, got shape {samples.shape}")
    idx = s.array
    ts = mat[np.ix_(idx, idx)]
    sv = np.linalg.svd(ts, compute_uv=False)
    kept = sv[sv > rtol * sv[0]] if sv.size and sv[0] > 0 else sv[:0]
    if kept.size and kept[0] / kept[-1] > COND_WARN:
        warnings.warn(f"T_S condition number {kept[0] / kept[-1]:.3g}", IllConditioned, stacklevel=2)
    return mat[:, idx] @ (linalg.pinv(ts, rtol=rtol) @ samples)


def _psd_sqrt(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    top = max(w.max(initial=0.0), 0.0)
    if w.size and w.min() < -PSD_CLAMP * max(1.0, top):
        raise NotPSD(f"matrix has eigenvalue {w.min():.3g}")
    w = np.where(w < PSD_CLAMP * top, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def error_covariance(t, s):
    """``E = T^{1/2} pinv(T^{1/2} D_S T^{1/2}) T^{1/2}`` for a PSD localization operator."""
    mat = t.matrix if isinstance(t, LocalizationOperator) else np.asarray(t)
    n = mat.shape[0]
    s = IndexSet.of(s, n)
    root = _psd_sqrt(mat)
    rows = root[s.array]  # T^{1/2}_{SV}
    k = rows.conj().T @ rows
    e = root @ linalg.pinv((k + k.conj().T) / 2, rtol=1e-10) @ root
    return (e + e.conj().T) / 2


def metrics(truth, estimate):
    truth = np.asarray(truth)
    estimate = np.asarray(estimate)
    if truth.shape != estimate.shape or truth.ndim != 1:
        raise DimensionMismatch(f"shapes differ: {truth.shape} vs {estimate.shape}")
    res = float(np.linalg.norm(truth - estimate))
    mse = res**2 / len(truth)
    power = float(np.linalg.norm(truth)) ** 2
    if res == 0:
        snr = SNR_CAP_DB
    elif power == 0:
        snr = -np.inf
    else:
        snr = min(10 * np.log10(power / res**2), SNR_CAP_DB)
    return ErrorReport(mse, float(snr), res)
