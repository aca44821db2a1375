"""Total-spin (S, M) basis for n spin-1/2 qubits.

Built by coupling qubit n onto the coupled states of qubits 1..n-1 with
the closed-form spin-1/2 Clebsch-Gordan coefficients (Condon-Shortley
phases). The result is a real orthogonal change of basis in which the
non-interacting Hamiltonian is block diagonal, one tridiagonal
(2S+1)x(2S+1) block per irreducible copy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError
from .pauli import QubitSystemParams, noninteracting_hamiltonian
from .spectral import SpectrumResult, _finish, sort_order

HALF = Fraction(1, 2)
_UP = np.array([1.0, 0.0])
_DOWN = np.array([0.0, 1.0])


@dataclass(frozen=True)
class SpinCopy:
    """One irreducible spin-S copy; ``states[i]`` has projection M = S - i."""

    S: Fraction
    index: int
    states: np.ndarray  # shape (2**n, 2S+1), real orthonormal columns


@dataclass(frozen=True)
class SpinSector:
    S: Fraction
    fold: int
    sector_dim: int
    block: np.ndarray
    copies: tuple[SpinCopy, ...]


def _couple(parent: dict, S_parent: Fraction, S: Fraction) -> dict:
    """Couple a spin-1/2 (new rightmost qubit) onto a parent copy {M: vec}."""
    denom = 2 * S_parent + 1
    out = {}
    M = S
    while M >= -S:
        lo, hi = parent.get(M - HALF), parent.get(M + HALF)
        v = 0.0
        if S == S_parent + HALF:
            if lo is not None:
                v = v + math.sqrt((S_parent + M + HALF) / denom) * np.kron(lo, _UP)
            if hi is not None:
                v = v + math.sqrt((S_parent - M + HALF) / denom) * np.kron(hi, _DOWN)
        else:
            if lo is not None:
                v = v - math.sqrt((S_parent - M + HALF) / denom) * np.kron(lo, _UP)
            if hi is not None:
                v = v + math.sqrt((S_parent + M + HALF) / denom) * np.kron(hi, _DOWN)
        out[M] = v
        M -= 1
    return out


@lru_cache(maxsize=None)
def coupled_copies(n: int) -> tuple[SpinCopy, ...]:
    """All irreducible copies for n qubits, ordered by S descending then copy index."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    sectors = {HALF: [{HALF: _UP.copy(), -HALF: _DOWN.copy()}]}
    for _ in range(1, n):
        grown: dict[Fraction, list] = {}
        for S_parent in sorted(sectors, reverse=True):
            for parent in sectors[S_parent]:
                for S in (S_parent + HALF, S_parent - HALF):
                    if S >= 0:
                        grown.setdefault(S, []).append(_couple(parent, S_parent, S))
        sectors = grown
    copies = []
    for S in sorted(sectors, reverse=True):
        for idx, states in enumerate(sectors[S]):
            cols = np.column_stack([states[M] for M in sorted(states, reverse=True)])
            cols.setflags(write=False)
            copies.append(SpinCopy(S, idx, cols))
    return tuple(copies)


def coupled_basis(n: int) -> np.ndarray:
    """Orthogonal matrix whose columns are the coupled states, copy by copy."""
    return np.column_stack([c.states for c in coupled_copies(n)])


def sector_fold(n: int, S: Fraction) -> int:
    """Number of spin-S copies: C(n, k-1) - C(n, k-2) with k = n/2 - S + 1."""
    k = int(Fraction(n, 2) - S) + 1
    return math.comb(n, k - 1) - (math.comb(n, k - 2) if k >= 2 else 0)


def spin_sector_blocks(n: int, params: QubitSystemParams | None = None,
                       atol: float = 1e-10) -> list[SpinSector]:
    """Block-diagonalize H0 in the total-spin basis.

    Every copy of the same S must give the same block to ``atol`` and all
    entries between different copies must vanish; otherwise
    ``ConsistencyError``.
    """
    if n > 6:
        raise ValueError(f"spin sector construction is limited to n <= 6, got {n}")
    params = params if params is not None else QubitSystemParams(n)
    if params.n != n:
        raise ValueError(f"params describe {params.n} qubits, asked for {n}")
    h0 = noninteracting_hamiltonian(params)
    copies = coupled_copies(n)
    w = coupled_basis(n)
    full = w.T @ h0 @ w
    sizes = [c.states.shape[1] for c in copies]
    offsets = np.cumsum([0] + sizes)
    mask = np.zeros(full.shape, dtype=bool)
    for a, b in zip(offsets[:-1], offsets[1:]):
        mask[a:b, a:b] = True
    leak = np.abs(full[~mask]).max(initial=0.0)
    if leak > atol:
        raise ConsistencyError(f"H0 couples different spin copies (max entry {leak:.3e})")

    sectors = []
    by_S: dict[Fraction, list] = {}
    for c, a, b in zip(copies, offsets[:-1], offsets[1:]):
        by_S.setdefault(c.S, []).append((c, full[a:b, a:b]))
    for S in sorted(by_S, reverse=True):
        group = by_S[S]
        ref = group[0][1]
        for c, blk in group[1:]:
            diff = np.abs(blk - ref).max()
            if diff > atol:
                raise ConsistencyError(
                    f"spin-{S} copies {group[0][0].index} and {c.index} differ by {diff:.3e}")
        fold = len(group)
        if fold != sector_fold(n, S):
            raise ConsistencyError(f"spin-{S} has {fold} copies, expected {sector_fold(n, S)}")
        sectors.append(SpinSector(S, fold, int((2 * S + 1) * fold), ref.copy(),
                                  tuple(c for c, _ in group)))
    return sectors


def spin_adapted_eigendecompose(params: QubitSystemParams) -> tuple[SpectrumResult, list]:
    """Eigenpairs of H0 obtained block by block in the total-spin basis.

    Inside each degenerate eigenspace the eigenvectors are the spin
    eigenstates, which is what keeps trace distances meaningful close to
    the exceptional point. Ties in the eigenvalue ordering are broken by
    ascending S, then copy index. Returns the spectrum and per-eigenvalue
    ``(S, copy_index)`` labels.
    """
    h0 = noninteracting_hamiltonian(params)
    vals, vecs, labels = [], [], []
    for c in coupled_copies(params.n):
        block = c.states.T @ h0 @ c.states
        w, v = np.linalg.eig(block)
        vals.extend(w)
        vecs.append(c.states @ v)
        labels.extend([(c.S, c.index)] * len(w))
    vals = np.asarray(vals)
    vecs = np.column_stack(vecs)
    order = sort_order(vals, [(float(S), idx) for S, idx in labels])
    return _finish(h0, vals, vecs, order), [labels[i] for i in order]
