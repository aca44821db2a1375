"""Dense spectral machinery for small complex matrices (dim <= 64).

Eigendecomposition, characteristic and adjugate polynomials through the
Faddeev-LeVerrier recursion, first-order perturbation of the characteristic
polynomial, numerical rank, Jordan structure of nilpotent matrices, pure
state trace distance and the matrix exponential.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _backend
from .errors import NumericError, PreconditionError

DEFAULT_RANK_TOL = 1e-10
# relative gap under which two eigenvalue components count as tied
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residual_norms.max()) if self.residual_norms.size else 0.0


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial; ``coeffs[i]`` multiplies ``lam**i``.

    ``adjugate`` optionally keeps the Faddeev-LeVerrier matrix sequence:
    ``adjugate[k]`` multiplies ``lam**(dim-1-k)`` in ``adj(lam*I - A)``.
    """

    coeffs: np.ndarray
    adjugate: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return np.polynomial.polynomial.polyval(lam, self.coeffs)


@dataclass(frozen=True)
class EpsLinearCharPoly:
    """det(lam*I - (h0 + eps*b)) = base(lam) + eps*linear(lam) + O(eps**2)."""

    base: Polynomial
    linear: np.ndarray

    def evaluate(self, lam, eps):
        lin = np.polynomial.polynomial.polyval(lam, self.linear)
        return self.base(lam) + eps * lin

    def lowest_power(self, rel_tol: float = 1e-8) -> int | None:
        """Smallest power of lam with a non-negligible eps-linear coefficient."""
        mags = np.abs(self.linear)
        peak = mags.max() if mags.size else 0.0
        if peak == 0.0:
            return None
        return int(np.flatnonzero(mags > rel_tol * peak)[0])


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def sort_order(values, extra_keys=None, tol: float = _TIE_TOL) -> np.ndarray:
    """Indices ordering ``values`` by descending real part, then imaginary part.

    Components closer than ``tol`` (relative to the largest magnitude) are
    treated as tied; remaining ties fall through to ``extra_keys`` (ascending).
    """
    values = np.asarray(values, dtype=complex)
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    atol = tol * scale

    def clusters(x, idx):
        # group indices whose sorted coordinate values chain within atol
        idx = sorted(idx, key=lambda i: -x[i])
        groups, cur = [], [idx[0]]
        for i in idx[1:]:
            if x[cur[-1]] - x[i] <= atol:
                cur.append(i)
            else:
                groups.append(cur)
                cur = [i]
        groups.append(cur)
        return groups

    order = []
    if values.size == 0:
        return np.array([], dtype=int)
    for g in clusters(values.real, range(len(values))):
        for h in clusters(values.imag, g):
            if extra_keys is not None:
                h = sorted(h, key=lambda i: extra_keys[i])
            order.extend(h)
    return np.array(order, dtype=int)


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Normalize and rotate so the first largest-magnitude entry is real positive."""
    vec = vec / np.linalg.norm(vec)
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
    return vec * (abs(vec[k]) / vec[k])


def eigendecompose(a) -> SpectrumResult:
    """Eigenpairs of a general complex matrix.

    Uses LAPACK ``zgeev`` (Hessenberg reduction + shifted QR). Residuals are
    reported, not enforced: near an exceptional point eigenvectors are
    nearly parallel and eigenvalues carry ~eps**(1/k) errors.
    """
    a = _as_square(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver did not converge: {exc}", partial=None) from exc
    return _finish(a, vals, vecs)


def _finish(a, vals, vecs, order=None) -> SpectrumResult:
    if order is None:
        order = sort_order(vals)
    vals = vals[order]
    vecs = np.column_stack([fix_phase(vecs[:, i]) for i in order]) if len(order) else vecs
    residuals = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    return SpectrumResult(vals, vecs, residuals)


def characteristic_polynomial(a) -> Polynomial:
    """Monic det(lam*I - a) via Faddeev-LeVerrier; keeps the adjugate sequence.

    Accuracy envelope: inputs with small Gaussian-integer entries (H0 at the
    exceptional point, Pauli words) are handled exactly up to dim 64, since
    every intermediate stays an exactly representable integer. For general
    floating-point input the recursion loses digits with dimension: against
    exact integer arithmetic, a perturbed H0 keeps about 1e-10 absolute
    accuracy at dim 32 but has O(1) errors at dim 64. Use eigenvalues for
    generic matrices above dim 32.
    """
    a = _as_square(a)
    coeffs, mats = _backend.faddeev_leverrier(a)
    return Polynomial(np.asarray(coeffs), np.asarray(mats))


def adjugate_polynomial(a) -> np.ndarray:
    """Stack ``M`` with ``adj(lam*I - a) = sum_k M[k] lam**(dim-1-k)``."""
    return characteristic_polynomial(a).adjugate


def epsilon_linear_term(h0, b) -> EpsLinearCharPoly:
    """First-order expansion in eps of det(lam*I - (h0 + eps*b)).

    By Jacobi's formula the eps-linear part is ``-Tr[adj(lam*I - h0) b]``,
    which is linear in ``b`` by construction.
    """
    h0 = _as_square(h0)
    b = _as_square(b)
    if h0.shape != b.shape:
        raise ValueError(f"dimension mismatch: {h0.shape} vs {b.shape}")
    base = characteristic_polynomial(h0)
    dim = h0.shape[0]
    # Tr(M_k b) for every k at once; M_k multiplies lam**(dim-1-k)
    traces = np.einsum("kij,ji->k", base.adjugate, b)
    linear = -traces[::-1].copy()
    return EpsLinearCharPoly(base, linear)


def numeric_rank(a, rel_tol: float = DEFAULT_RANK_TOL, reference: float | None = None) -> int:
    """Singular values above ``rel_tol`` times the largest one.

    ``reference`` replaces the largest singular value as the scale, for
    matrices (such as powers of a nilpotent matrix) that may be pure noise.
    """
    if not 0 < rel_tol < 1:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    scale = s[0] if reference is None else reference
    if scale == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * scale))


def jordan_structure_at_zero(a, rel_tol: float = DEFAULT_RANK_TOL, nilpotency_tol: float = 1e-8):
    """Jordan block sizes of a nilpotent matrix, largest first.

    Uses the rank ladder r_k = rank(a**k): there are r_{k-1} - r_k blocks of
    size at least k. The nilpotency check requires
    ``||a**dim|| <= nilpotency_tol * max(1, ||a||)**dim``, which bounds the
    spectral radius without trusting a defective eigensolve.
    """
    a = _as_square(a)
    dim = a.shape[0]
    norm = max(1.0, float(np.linalg.norm(a, 2)))
    top = np.linalg.matrix_power(a, dim)
    if np.linalg.norm(top, 2) > nilpotency_tol * norm ** dim:
        raise PreconditionError("matrix is not nilpotent; spectral radius check failed")

    ranks = [dim]
    power = np.eye(dim, dtype=complex)
    k = 0
    while ranks[-1] > 0:
        power = power @ a
        k += 1
        r = numeric_rank(power, rel_tol, reference=norm ** k)
        if r >= ranks[-1]:
            raise NumericError("rank ladder stalled; tolerance too loose for this matrix",
                               partial=ranks)
        ranks.append(r)
    ranks.append(0)
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    parts = []
    for k in range(1, len(at_least) + 1):
        exactly = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        parts.extend([k] * exactly)
    return sorted(parts, reverse=True)


def trace_distance(v1, v2) -> float:
    """Trace distance of two pure states, sqrt(1 - |<v1|v2>|^2) after normalizing."""
    v1 = np.asarray(v1, dtype=complex).ravel()
    v2 = np.asarray(v2, dtype=complex).ravel()
    if v1.shape != v2.shape:
        raise ValueError(f"state dimensions differ: {v1.shape} vs {v2.shape}")
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        raise ValueError("trace distance of a zero vector is undefined")
    overlap = abs(np.vdot(v1, v2)) / (n1 * n2)
    return float(np.sqrt(min(1.0, max(0.0, 1.0 - overlap ** 2))))


def trace_distance_matrix(vecs: np.ndarray) -> np.ndarray:
    """All pairwise trace distances between the columns of ``vecs``."""
    unit = vecs / np.linalg.norm(vecs, axis=0)
    overlap = np.abs(unit.conj().T @ unit)
    out = np.sqrt(np.clip(1.0 - overlap ** 2, 0.0, 1.0))
    np.fill_diagonal(out, 0.0)
    return out


def matrix_exponential(a) -> np.ndarray:
    """exp(a) by scaling and squaring with a Pade core (scipy's expm)."""
    a = _as_square(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise NumericError("matrix exponential overflowed", partial=out)
    return out
