"""Acceptance checks with pinned tolerances.

Each check returns one or more ``CheckResult`` rows. ``run_all`` is what
the ``verify`` command executes; the test suite calls the same functions.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .ep_analysis import (
    DEFAULT_EPS_GRID,
    ep_decomposition,
    expected_spectrum,
    gamma_sweep,
    mbody_bound_audit,
    noncoalescing_states,
    response_sweep,
    special_term,
)
from .floquet import (
    build_drive_protocol,
    effective_hamiltonian,
    floquet_response_sweep,
    magnus_error_scaling,
    magnus_terms,
)
from .pauli import PAULI_LABELS, PauliString, QubitSystemParams, noninteracting_hamiltonian, pauli_string_operator
from .spectral import characteristic_polynomial, epsilon_linear_term, jordan_structure_at_zero
from .spin_sectors import spin_sector_blocks


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured={self.measured:.6g} threshold={self.threshold}"


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)


def check_nilpotency(n_max=6, tol=1e-9):
    worst = 0.0
    for n in range(1, n_max + 1):
        coeffs = characteristic_polynomial(noninteracting_hamiltonian(QubitSystemParams(n))).coeffs
        worst = max(worst, float(np.abs(coeffs[:-1]).max()))
    return [CheckResult(f"C1 nilpotent char poly at EP, n=1..{n_max}", worst < tol, worst, f"< {tol:g}")]


def check_special_term(ns=(2, 3, 4, 5), rtol=1e-8):
    out = []
    for variant in ("all-x word", "corner element"):
        worst = 0.0
        powers_ok = True
        for n in ns:
            if variant == "all-x word":
                b, expect = PauliString("x" * n), -(2 ** n) * math.factorial(n)
            else:
                b = np.zeros((2 ** n, 2 ** n), dtype=complex)
                b[-1, 0] = 1.0
                expect = -math.factorial(n)
            power, coeff = special_term(n, b)
            powers_ok &= power == 2 ** n - n - 1
            worst = max(worst, abs(coeff - expect) / abs(expect))
        out.append(CheckResult(f"C2 special term ({variant}) power 2^n-n-1, n={min(ns)}..{max(ns)}",
                               powers_ok and worst <= rtol, worst, f"rel <= {rtol:g}"))
    return out


def check_mbody_audit(ns=(2, 3)):
    out = []
    for n in ns:
        report = mbody_bound_audit(n)
        out.append(CheckResult(f"C3 m-body bound audit n={n} ({len(report.rows)} words)",
                               report.passed, len(report.violations), "== 0 violations"))
    return out


def check_summation_rule(n=3, pairs=100, tol=1e-10, seed=20240617):
    rng = np.random.default_rng(seed)
    h0 = noninteracting_hamiltonian(QubitSystemParams(n))
    worst = 0.0
    for _ in range(pairs):
        ops = []
        for _ in range(2):
            word = "".join(rng.choice(list(PAULI_LABELS), size=n))
            coeff = complex(rng.normal(), rng.normal())
            ops.append(pauli_string_operator(PauliString(word, coeff), n))
        joint = epsilon_linear_term(h0, ops[0] + ops[1]).linear
        parts = epsilon_linear_term(h0, ops[0]).linear + epsilon_linear_term(h0, ops[1]).linear
        worst = max(worst, float(np.abs(joint - parts).max()))
    return [CheckResult(f"C4 summation rule, {pairs} random Ising pairs n={n}", worst < tol, worst, f"< {tol:g}")]


def check_response_slopes(tol=0.03):
    out = []
    for word, target in (("xx0", 1 / 3), ("xxx", 1 / 4)):
        fit = response_sweep(3, PauliString(word), DEFAULT_EPS_GRID)
        err = abs(fit.slope - target)
        out.append(CheckResult(f"C5 response slope word {word} (target {target:.4f}, got {fit.slope:.4f})",
                               err <= tol, err, f"|slope-target| <= {tol}"))
    return out


def spectrum_gamma_grid():
    """Linear grid on [0, 2] with the exact EP replaced by 1 -/+ 1e-4."""
    grid = list(np.linspace(0.0, 2.0, 201))
    grid = [g for g in grid if abs(g - 1.0) > 1e-9]
    return sorted(grid + [1.0 - 1e-4, 1.0 + 1e-4])


def _matched_error(computed, expected):
    cost = np.abs(computed[:, None] - expected[None, :])
    rows, cols = linear_sum_assignment(cost)
    diff = computed[rows] - expected[cols]
    return float(max(np.abs(diff.real).max(), np.abs(diff.imag).max()))


def check_trace_distances(gamma=0.9999, far=0.95, near=0.1, spec_tol=1e-8):
    row = gamma_sweep(QubitSystemParams(3), [gamma])[0]
    d1 = row.distances[0, 1:]
    counts_ok = int(np.sum(d1 > far)) == 4 and int(np.sum(d1 < near)) == 3
    out = [CheckResult("C6 D_1k: 4 values > 0.95 and 3 values < 0.1",
                       counts_ok, float(np.sum(d1 < near)), "exactly 3 below / 4 above")]

    # degenerate subspaces E = +J eps0 (indices 1..3) and -J eps0 (4..6)
    plus, minus = [1, 2, 3], [4, 5, 6]
    cross = row.distances[np.ix_(plus, minus)]
    partners_ok = all(int(np.sum(r < near)) == 1 and int(np.sum(r > far)) == 2 for r in cross) and \
        all(int(np.sum(c < near)) == 1 for c in cross.T)
    out.append(CheckResult("C6 each +eps0 state has exactly one coalescing -eps0 partner",
                           partners_ok, float(np.sum(cross < near)), "one per state (3 pairs)"))

    worst = 0.0
    rows = gamma_sweep(QubitSystemParams(3), spectrum_gamma_grid())
    for r in rows:
        worst = max(worst, _matched_error(r.eigenvalues, expected_spectrum(QubitSystemParams(3, gamma=r.gamma))))
    out.append(CheckResult("C6 spectrum matches (n-2m)J eps0 over gamma in [0, 2]",
                           worst <= spec_tol, worst, f"<= {spec_tol:g}"))
    return out


def check_ep_decomposition(ns=(2, 3, 4, 5)):
    ok = True
    for n in ns:
        dec = ep_decomposition(n, validate=False)
        numeric = jordan_structure_at_zero(noninteracting_hamiltonian(QubitSystemParams(n)))
        ok &= numeric == dec.partition()
        ok &= dec.independent_states == math.comb(n, n // 2) == len(numeric)
    return [CheckResult(f"C7 EP decomposition formula == Jordan partition, n={min(ns)}..{max(ns)}",
                        bool(ok), float(ok), "exact partition match")]


def reference_spin_three_halves_block(J, gamma):
    s3 = math.sqrt(3) * J
    return np.array([
        [3j * J * gamma, s3, 0, 0],
        [s3, 1j * J * gamma, 2 * J, 0],
        [0, 2 * J, -1j * J * gamma, s3],
        [0, 0, s3, -3j * J * gamma],
    ])


def check_spin_blocks(J=1.3, gamma=0.7, tol=1e-10):
    params = QubitSystemParams(3, J=J, gamma=gamma)
    sectors = {s.S: s for s in spin_sector_blocks(3, params)}
    top = sectors[max(sectors)]
    err = float(np.abs(top.block - reference_spin_three_halves_block(J, gamma)).max())
    out = [CheckResult("C8 S=3/2 block equals reference matrix", err <= tol, err, f"<= {tol:g}")]

    half = sectors[min(sectors)]
    eig = np.sort_complex(np.linalg.eigvals(half.block))
    expect = np.sort_complex(np.array([-1, 1]) * J * params.eps0)
    eig_err = float(np.abs(eig - expect).max())
    ok = half.fold == 2 and len(half.copies) == 2 and eig_err <= tol
    out.append(CheckResult("C8 S=1/2 sector: 2 identical copies, eigenvalues ±J eps0",
                           ok, eig_err, f"fold == 2, eig err <= {tol:g}"))

    states = noncoalescing_states(3)
    h0 = noninteracting_hamiltonian(QubitSystemParams(3))
    residual = max(float(np.linalg.norm(h0 @ v)) for v in states)
    smin = float(np.linalg.svd(np.column_stack(states), compute_uv=False).min())
    out.append(CheckResult("C8 non-coalescing states: residual <= 1e-8", residual <= 1e-8, residual, "<= 1e-08"))
    out.append(CheckResult("C8 non-coalescing states: smallest singular value > 0.1", smin > 0.1, smin, "> 0.1"))
    return out


def check_floquet_closed_form(eps=1e-3, T=0.2, tol=1e-10):
    params = QubitSystemParams(3)
    closed = effective_hamiltonian(params, eps, T)
    integral = magnus_terms(build_drive_protocol(params, eps, T)).h_eff
    err = float(np.abs(closed - integral).max())
    zero = magnus_terms(build_drive_protocol(params, 0.0, T)).h_eff
    err0 = float(np.abs(zero - noninteracting_hamiltonian(params)).max())
    return [
        CheckResult("C9 closed-form H_eff == Magnus h_eff (n=3, eps=1e-3, TJ=0.2)", err <= tol, err, f"<= {tol:g}"),
        CheckResult("C9 Magnus h_eff at eps=0 equals H0", err0 <= tol, err0, f"<= {tol:g}"),
    ]


def check_magnus_scaling(eps=1e-3, T_list=(0.2, 0.1, 0.05), lo=6.0, hi=10.0):
    rows = magnus_error_scaling(QubitSystemParams(3), eps, T_list)
    ratios = [r for _, _, r in rows if r is not None]
    ok = all(lo <= r <= hi for r in ratios)
    worst = max(ratios, key=lambda r: max(lo - r, r - hi))
    return [CheckResult(f"C10 Magnus error ratios per halving {[round(r, 3) for r in ratios]}",
                        ok, worst, f"in [{lo:g}, {hi:g}]")]


def check_floquet_response(T=0.2, tol=0.05):
    params = QubitSystemParams(3)
    out = []
    for oracle in ("magnus", "exact"):
        fit = floquet_response_sweep(params, T, DEFAULT_EPS_GRID, oracle=oracle)
        err = abs(fit.slope - 0.25)
        out.append(CheckResult(f"C11 Floquet response slope ({oracle}, got {fit.slope:.4f}) vs 1/4",
                               err <= tol, err, f"|slope-0.25| <= {tol}"))
    return out


CHECKS = (
    check_nilpotency,
    check_special_term,
    check_mbody_audit,
    check_summation_rule,
    check_response_slopes,
    check_trace_distances,
    check_ep_decomposition,
    check_spin_blocks,
    check_floquet_closed_form,
    check_magnus_scaling,
    check_floquet_response,
)


def run_all(checks=CHECKS) -> VerifyReport:
    start = time.perf_counter()
    report = VerifyReport()
    for check in checks:
        try:
            report.checks.extend(check())
        except Exception as exc:  # a crashing check is a failing check
            report.checks.append(CheckResult(f"{check.__name__} raised {type(exc).__name__}: {exc}",
                                             False, float("nan"), "no exception"))
    report.elapsed = time.perf_counter() - start
    return report
