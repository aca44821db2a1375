"""Step-function Floquet drive that synthesizes a three-body interaction.

Within one period T the drive amplitude follows (+J, -J, -J, +J) on four
quarter-period segments and the perturbation eps*H2 is switched on for the
second half. Segments are half-open intervals, so Heaviside values at the
jump instants never matter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ep_analysis import (
    DEFAULT_EPS_GRID,
    ResponseFit,
    _check_eps_grid,
    _largest,
    fit_tracked_branch,
    noise_floor,
)
from .pauli import QubitSystemParams, collective_interaction, commutator, noninteracting_hamiltonian
from .spectral import eigendecompose, matrix_exponential


@dataclass(frozen=True)
class DriveProtocol:
    segments: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("protocol needs at least one segment")
        shape = self.segments[0][1].shape
        for dt, h in self.segments:
            if not dt > 0:
                raise ValueError(f"segment durations must be positive, got {dt}")
            if h.shape != shape:
                raise ValueError("all segment Hamiltonians must share one dimension")

    @property
    def period(self) -> float:
        return float(sum(dt for dt, _ in self.segments))

    @property
    def dim(self) -> int:
        return self.segments[0][1].shape[0]

    def time_reversed(self) -> "DriveProtocol":
        """Reverse segment order and negate each Hamiltonian."""
        return DriveProtocol(tuple((dt, -h) for dt, h in reversed(self.segments)))


@dataclass(frozen=True)
class MagnusResult:
    omega1: np.ndarray
    omega2: np.ndarray
    h_eff: np.ndarray


def build_drive_protocol(params: QubitSystemParams, eps: float, T: float) -> DriveProtocol:
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    n, J = params.n, params.J
    h0 = noninteracting_hamiltonian(params)
    h1 = collective_interaction("xy", n)
    h2 = collective_interaction("zx", n)
    q = T / 4
    return DriveProtocol((
        (q, h0 + J * h1),
        (q, h0 - J * h1),
        (q, h0 - J * h1 + eps * h2),
        (q, h0 + J * h1 + eps * h2),
    ))


def exact_period_propagator(protocol: DriveProtocol) -> np.ndarray:
    """Ordered product of segment exponentials, later segments on the left."""
    u = np.eye(protocol.dim, dtype=complex)
    for dt, h in protocol.segments:
        u = matrix_exponential(-1j * dt * h) @ u
    return u


def magnus_terms(protocol: DriveProtocol) -> MagnusResult:
    """First two Magnus terms of a piecewise-constant drive, in closed form.

    With A = -iH, the first term is sum_s A_s dt_s. In the second term the
    within-segment commutators vanish and each ordered pair s > r gives
    dt_s dt_r [A_s, A_r] / 2.
    """
    amps = [(dt, -1j * h) for dt, h in protocol.segments]
    omega1 = sum(dt * a for dt, a in amps)
    omega2 = np.zeros_like(omega1)
    for s in range(len(amps)):
        for r in range(s):
            (ds, a_s), (dr, a_r) = amps[s], amps[r]
            omega2 = omega2 + 0.5 * ds * dr * commutator(a_s, a_r)
    h_eff = 1j * (omega1 + omega2) / protocol.period
    return MagnusResult(omega1, omega2, h_eff)


def effective_hamiltonian(params: QubitSystemParams, eps: float, T: float) -> np.ndarray:
    """Closed-form second-order effective Hamiltonian of the four-step drive."""
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    n, J = params.n, params.J
    h0 = noninteracting_hamiltonian(params)
    h1 = collective_interaction("xy", n)
    h2 = collective_interaction("zx", n)
    return (h0 + 0.5 * eps * h2) + 1j * eps * (T / 8) * (
        commutator(h0, h2) + 0.5 * J * commutator(h2, h1))


def magnus_error_scaling(params: QubitSystemParams, eps: float, T_list):
    """Per-period error of the second-order Magnus propagator for each T.

    Returns ``[(T, error, ratio)]`` with ``ratio = error(T) / error(T/2)``
    (None for the last entry, nan when both errors are zero). ``T_list`` must halve at every step.
    """
    Ts = [float(t) for t in T_list]
    for a, b in zip(Ts, Ts[1:]):
        if not np.isclose(b, a / 2, rtol=1e-12):
            raise ValueError("T_list must be descending with each entry half the previous")
    errors = []
    for T in Ts:
        protocol = build_drive_protocol(params, eps, T)
        exact = exact_period_propagator(protocol)
        approx = matrix_exponential(-1j * T * magnus_terms(protocol).h_eff)
        errors.append(float(np.linalg.norm(exact - approx, 2)))
    out = []
    for i, (T, err) in enumerate(zip(Ts, errors)):
        ratio = None
        if i + 1 < len(errors):
            nxt = errors[i + 1]
            ratio = err / nxt if nxt > 0 else (math.inf if err > 0 else math.nan)
        out.append((T, err, ratio))
    return out


def floquet_eigenphases(params: QubitSystemParams, eps: float, T: float) -> np.ndarray:
    """Quasi-energies i*log(mu)/T from the exact period propagator (principal branch)."""
    mu = eigendecompose(exact_period_propagator(build_drive_protocol(params, eps, T))).eigenvalues
    return 1j * np.log(mu) / T


def floquet_response_sweep(params: QubitSystemParams, T: float, eps_grid=DEFAULT_EPS_GRID,
                           oracle: str = "magnus", mapper=map) -> ResponseFit:
    """Largest-|lambda| response of the driven system and its log-log slope.

    ``oracle="magnus"`` eigendecomposes the closed-form effective Hamiltonian;
    ``oracle="exact"`` uses quasi-energies of the exact period propagator.
    """
    eps = _check_eps_grid(eps_grid)
    if oracle == "magnus":
        def point(e):
            return _largest(eigendecompose(effective_hamiltonian(params, e, T)).eigenvalues)
    elif oracle == "exact":
        def point(e):
            return _largest(floquet_eigenphases(params, e, T))
    else:
        raise ValueError(f"oracle must be 'magnus' or 'exact', got {oracle!r}")
    lambdas = list(mapper(point, eps))
    return fit_tracked_branch(eps, lambdas, noise_floor(params.n, params.J))
