"""Exceptional-point analysis of the non-interacting qubit Hamiltonian.

Sweeps over the dissipation rate, the EP decomposition and its numerical
cross-check, the non-coalescing eigenstates at the EP, perturbation
response sweeps with log-log fits, and the exact eps-linear audit of the
response order of Ising-type (Pauli-string) perturbations.

Sweeps accept a ``mapper`` with the semantics of the builtin ``map``
(e.g. ``ThreadPoolExecutor().map``); results come back in input order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, FitError, NumericError
from .pauli import (
    PAULI_LABELS,
    PauliString,
    QubitSystemParams,
    noninteracting_hamiltonian,
    pauli_string_operator,
)
from .spectral import (
    eigendecompose,
    epsilon_linear_term,
    jordan_structure_at_zero,
    trace_distance_matrix,
)
from .spin_sectors import coupled_copies, spin_adapted_eigendecompose

DEFAULT_EPS_GRID = np.logspace(-8, -3, 11)
NOISE_MARGIN = 1e2


# ---------------------------------------------------------------- gamma sweep

@dataclass(frozen=True)
class GammaSweepRow:
    gamma: float
    eigenvalues: np.ndarray
    distances: np.ndarray  # D[k, l] between eigenvectors k and l
    labels: list           # (S, copy) per eigenvalue


def _sweep_point(args):
    template, gamma = args
    params = template.replace(gamma=float(gamma))
    try:
        spec, labels = spin_adapted_eigendecompose(params)
    except NumericError as exc:
        raise NumericError(f"gamma={gamma}: {exc}", partial=exc.partial) from exc
    return GammaSweepRow(float(gamma), spec.eigenvalues,
                         trace_distance_matrix(spec.eigenvectors), labels)


def gamma_sweep(template: QubitSystemParams, gamma_grid, mapper=map) -> list[GammaSweepRow]:
    """Spectrum and pairwise trace distances of H0 along a grid of gamma.

    Eigenvectors come from the spin-adapted decomposition so that states in
    a degenerate eigenspace are spin eigenstates rather than an arbitrary
    mix chosen by the eigensolver.
    """
    grid = [float(g) for g in gamma_grid]
    if any(g < 0 for g in grid):
        raise ValueError("gamma grid values must be non-negative")
    return list(mapper(_sweep_point, [(template, g) for g in grid]))


def expected_spectrum(params: QubitSystemParams) -> np.ndarray:
    """(n - 2m) J eps0 with multiplicity C(n, m), in descending-m order."""
    n = params.n
    return np.array([(n - 2 * m) * params.J * params.eps0
                     for m in range(n + 1) for _ in range(math.comb(n, m))])


# ------------------------------------------------------------ EP decomposition

@dataclass(frozen=True)
class EPDecomposition:
    parts: tuple[tuple[int, int], ...]  # (EP order, fold), largest order first
    independent_states: int

    def partition(self) -> list[int]:
        return [order for order, fold in self.parts for _ in range(fold)]

    def describe(self) -> str:
        body = ", ".join(f"EP{order} ×{fold}" for order, fold in self.parts)
        return f"{body}; independent states: {self.independent_states}"


def ep_decomposition_formula(n: int) -> EPDecomposition:
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    parts = []
    for m in range(n // 2 + 1):
        fold = math.comb(n, m) - (math.comb(n, m - 1) if m >= 1 else 0)
        if fold:
            parts.append((n - 2 * m + 1, fold))
    return EPDecomposition(tuple(parts), sum(f for _, f in parts))


def ep_decomposition(n: int, validate: bool = True) -> EPDecomposition:
    """Closed-form EP decomposition at gamma = 1, checked against the Jordan form."""
    dec = ep_decomposition_formula(n)
    if dec.independent_states != math.comb(n, n // 2):
        raise ConsistencyError("fold total differs from C(n, n//2)")
    if validate:
        numeric = jordan_structure_at_zero(noninteracting_hamiltonian(QubitSystemParams(n, gamma=1.0)))
        if numeric != dec.partition():
            raise ConsistencyError(
                f"formula partition {dec.partition()} != numerical Jordan partition {numeric}")
    return dec


# ------------------------------------------------------- non-coalescing states

def _x0():
    return np.array([1j, 1.0]) / math.sqrt(2)


def _series_limit(spin_state: np.ndarray, n: int, tol: float = 1e-10):
    """Lowest nonvanishing eps0-order of V(eps0)^{(x)n} applied to ``spin_state``.

    Single-qubit eigenvectors at gamma -> 1 are x0 +/- eps0 e with
    e = (1, 0)/sqrt(2); spin-up maps to the + branch and spin-down to the
    - branch. Returns ``(order, normalized_vector)``.
    """
    x0 = _x0()
    e = np.array([1.0, 0.0]) / math.sqrt(2)
    dim = 2 ** n
    support = [(idx, spin_state[idx]) for idx in range(dim) if abs(spin_state[idx]) > 1e-14]
    for order in range(n + 1):
        acc = np.zeros(dim, dtype=complex)
        for sub in itertools.combinations(range(n), order):
            chosen = set(sub)
            for idx, amp in support:
                vec = np.ones(1, dtype=complex)
                for q in range(n):
                    if q in chosen:
                        down = (idx >> (n - 1 - q)) & 1
                        factor = -e if down else e
                    else:
                        factor = x0
                    vec = np.kron(vec, factor)
                acc += amp * vec
        norm = np.linalg.norm(acc)
        if norm > tol:
            return order, acc / norm
    raise NumericError("series expansion vanished to all orders")


def noncoalescing_states(n: int, residual_tol: float = 1e-8) -> list[np.ndarray]:
    """The C(n, n//2) linearly independent eigenstates of H0 at gamma = 1.

    One state per irreducible spin copy: the top (M = S) state of the copy,
    mapped to the product eigenbasis and taken to the gamma -> 1 limit
    through its leading eps0 order.
    """
    h0 = noninteracting_hamiltonian(QubitSystemParams(n, gamma=1.0))
    states = []
    for copy in coupled_copies(n):
        _, vec = _series_limit(copy.states[:, 0], n)
        res = np.linalg.norm(h0 @ vec)
        if res > residual_tol:
            raise NumericError(f"spin-{copy.S} copy {copy.index}: residual {res:.3e}",
                               partial=states)
        states.append(vec)
    return states


# ------------------------------------------------------------ response sweeps

@dataclass(frozen=True)
class ResponseFit:
    epsilons: np.ndarray
    lambdas: np.ndarray      # tracked complex eigenvalue per eps
    lambda_mags: np.ndarray
    used: np.ndarray         # bool mask of points entering the fit
    slope: float
    intercept: float
    r_squared: float

    @property
    def response_order(self) -> float:
        return 1.0 / self.slope


def fit_loglog_slope(xs, ys) -> tuple[float, float, float]:
    """Ordinary least squares of ln y on ln x: ``(slope, intercept, r_squared)``."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need at least two (x, y) pairs of matching length")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive coordinates")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_res = float(np.sum((ly - A @ np.array([slope, intercept])) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(intercept), r2


def noise_floor(n: int, J: float = 1.0) -> float:
    """Eigenvalue noise of a defective eigensolve near an EP of order n + 1."""
    return J * np.finfo(float).eps ** (1.0 / (n + 1))


def _largest(eigenvalues):
    return eigenvalues[int(np.argmax(np.abs(eigenvalues)))]


def fit_tracked_branch(epsilons, lambdas, floor, min_points=5) -> ResponseFit:
    """Fit |lambda| vs eps, dropping points below ``NOISE_MARGIN * floor``."""
    eps = np.asarray(epsilons, dtype=float)
    lam = np.asarray(lambdas, dtype=complex)
    mags = np.abs(lam)
    used = mags > NOISE_MARGIN * floor
    if used.sum() < min_points:
        raise FitError(f"only {int(used.sum())} points above the noise floor "
                       f"({NOISE_MARGIN * floor:.3e}); need {min_points}")
    slope, intercept, r2 = fit_loglog_slope(eps[used], mags[used])
    return ResponseFit(eps, lam, mags, used, slope, intercept, r2)


def _check_eps_grid(eps_grid):
    eps = np.asarray(eps_grid, dtype=float)
    if eps.ndim != 1 or eps.size == 0 or np.any(eps <= 0):
        raise ValueError("eps grid must be a non-empty list of positive values")
    if np.any(np.diff(eps) <= 0):
        raise ValueError("eps grid must be strictly increasing")
    return eps


def _perturbation_matrix(perturbation, n):
    if isinstance(perturbation, (PauliString, str)):
        return pauli_string_operator(perturbation, n)
    b = np.asarray(perturbation, dtype=complex)
    if b.shape != (2 ** n, 2 ** n):
        raise ValueError(f"perturbation shape {b.shape} does not fit {n} qubits")
    return b


def response_sweep(n: int, perturbation, eps_grid=DEFAULT_EPS_GRID, gamma: float = 1.0,
                   J: float = 1.0, mapper=map) -> ResponseFit:
    """Largest-|lambda| eigenvalue of H0 + eps B along ``eps_grid`` and its log-log slope."""
    eps = _check_eps_grid(eps_grid)
    h0 = noninteracting_hamiltonian(QubitSystemParams(n, J=J, gamma=gamma))
    b = _perturbation_matrix(perturbation, n)

    def point(e):
        return _largest(eigendecompose(h0 + e * b).eigenvalues)

    lambdas = list(mapper(point, eps))
    return fit_tracked_branch(eps, lambdas, noise_floor(n, J))


# --------------------------------------------------- eps-linear order audit

def special_term(n: int, perturbation, rel_tol: float = 1e-8):
    """``(power, coefficient)`` of the lowest eps-linear monomial, or None.

    Computed at gamma = 1 with J = 1.
    """
    h0 = noninteracting_hamiltonian(QubitSystemParams(n, gamma=1.0))
    poly = epsilon_linear_term(h0, _perturbation_matrix(perturbation, n))
    k = poly.lowest_power(rel_tol)
    if k is None:
        return None
    return k, complex(poly.linear[k])


def lowest_epsilon_power(n: int, perturbation, rel_tol: float = 1e-8) -> int | None:
    """Lowest power of lambda carrying an eps-linear term; None if there is none.

    The response order is ``2**n - power``.
    """
    term = special_term(n, perturbation, rel_tol)
    return None if term is None else term[0]


@dataclass(frozen=True)
class AuditRow:
    word: str
    body_count: int
    power: int | None
    bound: int

    @property
    def ok(self) -> bool:
        return self.power is None or self.power >= self.bound


@dataclass(frozen=True)
class AuditReport:
    n: int
    rows: tuple[AuditRow, ...]

    @property
    def violations(self) -> list[AuditRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def passed(self) -> bool:
        return not self.violations


def mbody_bound_audit(n: int, mapper=map) -> AuditReport:
    """Check power >= 2**n - m - 1 for every Pauli word on n <= 4 qubits."""
    if not 1 <= n <= 4:
        raise ValueError(f"exhaustive audit is limited to 1 <= n <= 4, got {n}")
    words = ["".join(w) for w in itertools.product(PAULI_LABELS, repeat=n)]

    def row(word):
        ps = PauliString(word)
        return AuditRow(word, ps.weight, lowest_epsilon_power(n, ps), 2 ** n - ps.weight - 1)

    return AuditReport(n, tuple(mapper(row, words)))


