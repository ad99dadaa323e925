"""Graph fractional Fourier transform and the operators built on it.

The order-``alpha`` transform of a Hermitian shift ``S = U diag(delta) U^H``
is ``F^alpha = Q diag(lambda^alpha) Q^H`` where ``U^H = Q diag(lambda) Q^H``.
Frequency index ``l`` of ``F^alpha`` (its ``l``-th row) inherits the ordering
of ``delta``, so index sets over frequencies mean "the lowest ``|F|``
Laplacian frequencies" at ``alpha = 1``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch
from .graph import LAPLACIAN, ShiftOperator


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing 0-based indices drawn from ``range(universe)``."""

    indices: tuple
    universe: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.universe):
            raise ValueError(f"indices must lie in [0, {self.universe})")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items, universe):
        """Build from any iterable of distinct indices (order ignored)."""
        if isinstance(items, IndexSet):
            if items.universe != universe:
                raise DimensionMismatch(f"index set universe {items.universe} != {universe}")
            return items
        items = [int(i) for i in items]
        if len(set(items)) != len(items):
            raise ValueError("duplicate indices")
        return cls(tuple(sorted(items)), universe)

    @classmethod
    def first(cls, count, universe):
        return cls(tuple(range(count)), universe)

    @property
    def array(self):
        return np.array(self.indices, dtype=int)

    @property
    def mask(self):
        m = np.zeros(self.universe, dtype=bool)
        m[list(self.indices)] = True
        return m

    def complement(self):
        return IndexSet(tuple(np.flatnonzero(~self.mask)), self.universe)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in set(self.indices)


@dataclass(frozen=True, eq=False)
class GftBasis:
    shift: ShiftOperator
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return len(self.eigenvalues)

    @property
    def gft_matrix(self):
        return self.eigenvectors.conj().T


@dataclass(frozen=True, eq=False)
class GfrftOperator:
    alpha: float
    basis: GftBasis
    q: np.ndarray
    lam: np.ndarray
    forward_matrix: np.ndarray
    inverse_matrix: np.ndarray

    @property
    def n(self):
        return self.basis.n


@dataclass(frozen=True)
class Ideal:
    """Indicator kernel ``h = 1_F`` on a frequency index set."""

    band: IndexSet


@dataclass(frozen=True)
class PolyLowpass:
    """``h(x) = (1 - x / x_max)^p`` evaluated on the fractional spectrum ``delta^alpha``."""

    p: int = 5


@dataclass(frozen=True, eq=False)
class LocalizationOperator:
    alpha: float
    kernel_values: np.ndarray
    matrix: np.ndarray


def gft_basis(shift, method="lapack"):
    """Eigenbasis of a Hermitian shift operator.

    Eigenvalues within ``N * eps * ||S||`` of zero are set to exactly zero, so
    the Laplacian's null eigenvalue is not pushed across the branch cut by
    round-off when raised to fractional powers.
    """
    pair = linalg.hermitian_eig(shift.matrix, method=method)
    delta = np.real(pair.values).copy()
    scale = max(np.abs(delta).max(initial=0.0), 1.0)
    delta[np.abs(delta) <= shift.matrix.shape[0] * linalg.EPS * scale * 10] = 0.0
    if shift.kind == LAPLACIAN:
        delta = np.maximum(delta, 0.0)
    return GftBasis(shift, delta, pair.vectors)


def gfrft_operator(basis, alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    pair = linalg.unitary_eig(basis.gft_matrix)
    q = pair.vectors
    powered = linalg.fractional_power_diag(pair.values, alpha)
    fwd = (q * powered) @ q.conj().T
    return GfrftOperator(alpha, basis, q, pair.values, fwd, fwd.conj().T)


def _vector(op, x):
    x = np.asarray(x)
    if x.shape != (op.n,):
        raise DimensionMismatch(f"expected a length-{op.n} vector, got shape {x.shape}")
    return x


def forward(op, x):
    return op.forward_matrix @ _vector(op, x)


def inverse(op, xhat):
    return op.inverse_matrix @ _vector(op, xhat)


def vertex_projector(s):
    return np.diag(s.mask.astype(float))


def band_projector(op, f):
    """``F^-alpha diag(1_F) F^alpha``, formed as ``W W^H`` with ``W`` the F-columns of ``F^-alpha``."""
    f = IndexSet.of(f, op.n)
    w = op.inverse_matrix[:, f.array]
    b = w @ w.conj().T
    return (b + b.conj().T) / 2


def fractional_spectrum(basis, alpha):
    """``delta^alpha`` on the principal branch."""
    return linalg.fractional_power_diag(basis.eigenvalues, alpha)


def fractional_shift(basis, alpha, op=None):
    """``S^alpha = F^-alpha diag(delta^alpha) F^alpha`` (the fractional Laplacian for a Laplacian shift)."""
    if op is None:
        op = gfrft_operator(basis, alpha)
    d = fractional_spectrum(basis, alpha)
    return (op.inverse_matrix * d) @ op.forward_matrix


def kernel_values(op, kernel):
    n = op.n
    if isinstance(kernel, Ideal):
        return IndexSet.of(kernel.band, n).mask.astype(float)
    if isinstance(kernel, PolyLowpass):
        x = fractional_spectrum(op.basis, op.alpha)
        if np.abs(x.imag).max(initial=0) > 1e-12 * max(np.abs(x).max(initial=0), 1):
            raise ValueError("PolyLowpass needs a real fractional spectrum (nonnegative shift eigenvalues)")
        x = x.real
        xmax = x.max()
        if xmax <= 0:
            return np.ones(n)
        return np.clip(1 - x / xmax, 0, None) ** kernel.p
    raise TypeError(f"unsupported kernel {kernel!r}")


def localization_operator(op, kernel):
    """``T^alpha = F^-alpha diag(h) F^alpha`` for a real spectral kernel ``h``."""
    h = kernel_values(op, kernel)
    if isinstance(kernel, Ideal):
        t = band_projector(op, kernel.band)
    else:
        t = (op.inverse_matrix * h) @ op.forward_matrix
    defect = np.linalg.norm(t - t.conj().T)
    if defect > 1e-9 * max(np.linalg.norm(t), 1.0):
        raise ValueError(f"localization operator is not Hermitian (defect {defect:.2e})")
    return LocalizationOperator(op.alpha, h, (t + t.conj().T) / 2)


def _spectral_norm(m):
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def perfect_localization_gap(d, b):
    """``||B D||_2``; equals 1 exactly when some signal is both vertex- and band-limited."""
    if d.shape != b.shape:
        raise DimensionMismatch("projectors do not conform")
    return _spectral_norm(b @ d)


def recoverability_margin(d_comp, b):
    """``1 - ||B (I - D)||_2``; positive iff every bandlimited signal is recoverable from its samples."""
    if d_comp.shape != b.shape:
        raise DimensionMismatch("projectors do not conform")
    return 1.0 - _spectral_norm(b @ d_comp)
