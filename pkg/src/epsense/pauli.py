"""Operator construction for n identical PT-symmetric qubits.

Basis convention: qubit 1 is the leftmost (most significant) Kronecker
factor and spin-up is the first basis vector of each factor. Operators are
plain dense ``complex128`` numpy arrays of shape ``(2**n, 2**n)``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import _backend

PAULI_LABELS = "0xyz"

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class QubitSystemParams:
    """n identical qubits with coupling ``J`` and dissipation rate ``gamma``."""

    n: int
    J: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"qubit count must be a positive integer, got {self.n!r}")
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J!r}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma!r}")

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def eps0(self) -> complex:
        """sqrt(1 - gamma**2); purely imaginary in the PT-broken regime."""
        return cmath.sqrt(1.0 - self.gamma ** 2)

    def replace(self, **changes) -> "QubitSystemParams":
        fields = {"n": self.n, "J": self.J, "gamma": self.gamma}
        fields.update(changes)
        return QubitSystemParams(**fields)


@dataclass(frozen=True)
class PauliString:
    """``coefficient`` times the tensor product of Paulis named by ``labels``.

    ``labels`` is a word over ``{0, x, y, z}``, one letter per qubit.
    """

    labels: str
    coefficient: complex = 1.0

    def __post_init__(self):
        labels = self.labels.lower()
        bad = set(labels) - set(PAULI_LABELS)
        if bad:
            raise ValueError(f"invalid Pauli labels {sorted(bad)} in {self.labels!r}")
        object.__setattr__(self, "labels", labels)

    @property
    def weight(self) -> int:
        """Number of non-identity factors (the body count)."""
        return sum(1 for c in self.labels if c != "0")

    def permuted(self, order) -> "PauliString":
        return PauliString("".join(self.labels[i] for i in order), self.coefficient)

    def __str__(self):
        return self.labels


def _check_finite(op):
    if not np.all(np.isfinite(op)):
        raise ValueError("operator has non-finite entries")
    return op


def _check_dim(op, n):
    dim = 2 ** n
    if op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} does not match {n} qubits (dim {dim})")


def pauli_string_operator(ps: PauliString | str, n: int) -> np.ndarray:
    """Dense matrix of a Pauli string on ``n`` qubits."""
    if isinstance(ps, str):
        ps = PauliString(ps)
    if len(ps.labels) != n:
        raise ValueError(f"Pauli word {ps.labels!r} has length {len(ps.labels)}, expected {n}")
    codes = [PAULI_LABELS.index(c) for c in ps.labels]
    return _check_finite(_backend.pauli_word_matrix(codes, complex(ps.coefficient)))


def site_operator(label: str, site: int, n: int) -> np.ndarray:
    """Single Pauli ``label`` on qubit ``site`` (0-based), identity elsewhere."""
    word = ["0"] * n
    word[site] = label
    return pauli_string_operator(PauliString("".join(word)), n)


def noninteracting_hamiltonian(params: QubitSystemParams) -> np.ndarray:
    """H0 = sum_j J (sigma_x^j + i gamma sigma_z^j) as a Kronecker sum."""
    n = params.n
    h = params.J * (SIGMA_X + 1j * params.gamma * SIGMA_Z)
    out = np.zeros((params.dim, params.dim), dtype=complex)
    for j in range(n):
        out += np.kron(np.kron(np.eye(2 ** j), h), np.eye(2 ** (n - j - 1)))
    return _check_finite(out)


def dissipative_shift(op: np.ndarray, params: QubitSystemParams) -> np.ndarray:
    """Map to the purely dissipative form: subtract ``i gamma J`` per qubit."""
    op = np.asarray(op, dtype=complex)
    _check_dim(op, params.n)
    shift = 1j * params.gamma * params.J * params.n
    return _check_finite(op - shift * np.eye(params.dim))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def collective_interaction(kind: str, n: int) -> np.ndarray:
    """Sum over ordered pairs k != l of sigma_a^k sigma_b^l.

    ``kind`` is ``"xy"`` or ``"zx"``. Both (k, l) and (l, k) are included.
    """
    if kind not in ("xy", "zx"):
        raise ValueError(f"kind must be 'xy' or 'zx', got {kind!r}")
    if n < 2:
        raise ValueError(f"collective interaction needs n >= 2, got {n}")
    a, b = kind
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            word = ["0"] * n
            word[k] = a
            word[l] = b
            out += pauli_string_operator(PauliString("".join(word)), n)
    return out


def pt_conjugate(op: np.ndarray, n: int) -> np.ndarray:
    """P conj(op) P with parity P = sigma_x on every qubit."""
    p = pauli_string_operator(PauliString("x" * n), n)
    return p @ np.conj(op) @ p


def pauli_decompose(op: np.ndarray, n: int, tol: float = 1e-12) -> dict[str, complex]:
    """Expand ``op`` in the Pauli-string basis via trace inner products.

    Returns the words whose coefficient magnitude exceeds ``tol``, in
    lexicographic order over ``0xyz``.
    """
    from itertools import product

    _check_dim(op, n)
    dim = 2 ** n
    out = {}
    for letters in product(PAULI_LABELS, repeat=n):
        word = "".join(letters)
        c = np.vdot(pauli_string_operator(PauliString(word), n), op) / dim
        if abs(c) > tol:
            out[word] = complex(c)
    return out
