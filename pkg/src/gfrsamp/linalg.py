"""Dense complex linear algebra used by the transform and sampling layers.

Matrices are plain ``numpy`` arrays. Eigendecompositions come back as
:class:`EigenPair` with a fixed ordering and a fixed phase convention so that
repeated runs produce identical bases:

* Hermitian eigenvalues ascend; unitary eigenvalues ascend by principal
  argument in ``(-pi, pi]``.
* Each eigenvector is scaled so that its largest-magnitude entry is real and
  positive (lowest index wins among entries of equal magnitude).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BranchPole, NoConvergence, NonHermitian, NonUnitary

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenPair:
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        v = self.vectors
        return (v * self.values) @ v.conj().T


def as_matrix(m):
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def normalize_phases(vectors):
    """Rotate each column so its dominant entry is real positive."""
    v = np.array(vectors, copy=True)
    if v.size == 0:
        return v
    mag = np.abs(v)
    peak = mag.max(axis=0)
    # first index within round-off of the column maximum
    lead = np.argmax(mag >= peak * (1 - 1e-8), axis=0)
    cols = np.arange(v.shape[1])
    ref = v[lead, cols]
    if np.iscomplexobj(v):
        phase = np.where(np.abs(ref) > 0, ref.conj() / np.where(ref == 0, 1, np.abs(ref)), 1)
    else:
        phase = np.where(ref < 0, -1.0, 1.0)
    return v * phase


def _check_hermitian(m):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonHermitian(f"matrix is not square: {m.shape}")
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > 1e-10 * scale:
        raise NonHermitian("matrix is not Hermitian within 1e-10 relative")
    return (m + m.conj().T) / 2


def jacobi_eigh(m, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Parameters
    ----------
    m : (N, N) array
        Hermitian input (not checked here).
    tol : float
        Sweeps stop once the off-diagonal Frobenius mass is at most
        ``tol * ||m||_F``.
    max_sweeps : int
        Sweep budget; exceeding it raises :class:`NoConvergence`.

    Returns
    -------
    values, vectors : unsorted eigenvalues (real) and unitary eigenvectors.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    x = np.eye(n, dtype=complex)
    target = tol * max(np.linalg.norm(a), np.finfo(float).tiny)

    def off(b):
        return np.sqrt(max(np.linalg.norm(b) ** 2 - np.sum(np.abs(np.diag(b)) ** 2), 0.0))

    for _ in range(max_sweeps):
        if off(a) <= target:
            return np.real(np.diag(a)).copy(), x
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b <= EPS * target:
                    continue
                w = apq / b
                zeta = (a[q, q].real - a[p, p].real) / (2 * b)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1 + zeta * zeta)) if zeta != 0 else 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # phase to make a[p, q] real, then a real 2x2 rotation
                rot = np.array([[c, s], [-s * w.conjugate(), c * w.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                x[:, idx] = x[:, idx] @ rot
                a[p, q] = a[q, p] = 0
    if off(a) <= target:
        return np.real(np.diag(a)).copy(), x
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eig(m, method="lapack"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    the cyclic Jacobi solver above (slow, but independent of LAPACK).
    """
    h = _check_hermitian(m)
    if not np.iscomplexobj(m):
        h = h.real
    if method == "lapack":
        try:
            w, v = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc
    elif method == "jacobi":
        w, v = jacobi_eigh(h)
        if not np.iscomplexobj(h):
            v = v.real if np.abs(v.imag).max(initial=0) < 1e-12 else v
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")
    return EigenPair(w[order], normalize_phases(v[:, order]))


def smallest_eigpair(m):
    """Smallest eigenvalue of a Hermitian matrix and its (phase-fixed) eigenvector."""
    h = _check_hermitian(m)
    if not np.iscomplexobj(m):
        h = h.real
    w, v = scipy.linalg.eigh(h, subset_by_index=[0, 0])
    return float(w[0]), normalize_phases(v)[:, 0]


def principal_arg(z):
    """Argument in (-pi, pi]; a negative real with signed-zero imaginary part maps to pi."""
    ang = np.angle(np.asarray(z, dtype=complex))
    return np.where(ang <= -np.pi, np.pi, ang)


def unitary_eig(m, group_tol=1e-8):
    """Eigendecomposition of a unitary matrix through its commuting Hermitian parts.

    ``m = H1 + i H2`` with ``H1 = (m + m^H)/2`` and ``H2 = (m - m^H)/(2i)``.
    ``H1`` is diagonalized first; inside each cluster of ``H1`` eigenvalues
    closer than ``group_tol`` the restriction of ``H2`` is diagonalized.
    Eigenvalues are snapped to exactly -1 or 1 when their imaginary part is
    below 1e-12, so the branch choice for real negative eigenvalues is stable.
    """
    m = as_matrix(m).astype(complex)
    n = m.shape[0]
    if m.shape[1] != n:
        raise NonUnitary(f"matrix is not square: {m.shape}")
    if np.linalg.norm(m.conj().T @ m - np.eye(n)) > 1e-8 * max(n, 1):
        raise NonUnitary("matrix is not unitary within 1e-8 * N")
    h1 = (m + m.conj().T) / 2
    h2 = (m - m.conj().T) / 2j
    try:
        c, v = np.linalg.eigh(h1)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    v = v.astype(complex)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and c[stop] - c[stop - 1] <= group_tol * max(1.0, abs(c[stop])):
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            k = block.conj().T @ h2 @ block
            _, w = np.linalg.eigh((k + k.conj().T) / 2)
            v[:, start:stop] = block @ w
        start = stop
    lam = np.einsum("ij,ij->j", v.conj(), m @ v)
    lam = lam / np.abs(lam)
    near_real = np.abs(lam.imag) <= 1e-12
    lam = np.where(near_real, np.sign(lam.real) + 0j, lam)
    order = np.argsort(principal_arg(lam), kind="stable")
    return EigenPair(lam[order], normalize_phases(v[:, order]))


def svd(m):
    """Thin SVD ``m = left @ diag(singulars) @ right^H``, singulars descending."""
    m = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return u, s, vh.conj().T


def pinv(m, rtol=None):
    """Moore-Penrose pseudo-inverse; singular values below ``rtol * s_max`` are dropped."""
    m = as_matrix(m)
    if rtol is None:
        rtol = max(m.shape) * EPS
    if rtol <= 0:
        raise ValueError("rtol must be positive")
    if m.size == 0:
        return np.zeros(m.shape[::-1], dtype=m.dtype)
    u, s, r = svd(m)
    keep = s > rtol * s[0] if s.size else s.astype(bool)
    return (r[:, keep] / s[keep]) @ u[:, keep].conj().T


def fractional_power_diag(values, alpha):
    """Principal-branch power ``exp(alpha * Log(v))`` of each entry, with ``0**alpha = 0`` for alpha > 0."""
    v = np.asarray(values, dtype=complex)
    zero = v == 0
    if np.any(zero) and alpha <= 0:
        raise BranchPole(f"zero eigenvalue raised to non-positive power {alpha}")
    safe = np.where(zero, 1, v)
    out = np.exp(alpha * (np.log(np.abs(safe)) + 1j * principal_arg(safe)))
    return np.where(zero, 0, out)
