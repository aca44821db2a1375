import itertools

import numpy as np
import pytest
import scipy.linalg

from epsense import (
    QubitSystemParams,
    build_drive_protocol,
    characteristic_polynomial,
    collective_interaction,
    commutator,
    effective_hamiltonian,
    exact_period_propagator,
    magnus_error_scaling,
    magnus_terms,
    noninteracting_hamiltonian,
)
from epsense.pauli import pauli_decompose
from epsense.floquet import DriveProtocol, floquet_eigenphases, floquet_response_sweep
from epsense.ep_analysis import DEFAULT_EPS_GRID

P3 = QubitSystemParams(3)


# --------------------------------------------------------------- protocol

def test_segment_durations():
    p = build_drive_protocol(P3, 1e-3, 0.2)
    assert len(p.segments) == 4
    assert all(dt == pytest.approx(0.05) for dt, _ in p.segments)
    assert p.period == pytest.approx(0.2)


def test_first_segment_assembled_from_pauli_layer():
    h = noninteracting_hamiltonian(P3) + collective_interaction("xy", 3)
    assert np.array_equal(build_drive_protocol(P3, 1e-3, 0.2).segments[0][1], h)


def test_no_h2_without_eps():
    p0 = build_drive_protocol(P3, 0.0, 0.2)
    h0 = noninteracting_hamiltonian(P3)
    h1 = collective_interaction("xy", 3)
    assert np.array_equal(p0.segments[2][1], h0 - h1)
    assert np.array_equal(p0.segments[3][1], h0 + h1)


@pytest.mark.parametrize("T", [0.0, -1.0])
def test_nonpositive_period(T):
    with pytest.raises(ValueError):
        build_drive_protocol(P3, 1e-3, T)
    with pytest.raises(ValueError):
        effective_hamiltonian(P3, 1e-3, T)


def test_protocol_validation():
    with pytest.raises(ValueError):
        DriveProtocol(())
    with pytest.raises(ValueError):
        DriveProtocol(((0.1, np.eye(2)), (0.1, np.eye(4))))
    with pytest.raises(ValueError):
        DriveProtocol(((0.0, np.eye(2)),))


# ------------------------------------------------------------ propagator

@pytest.mark.parametrize("T", [1e-3, 1e-4])
def test_small_period_propagator_near_identity(T):
    p = build_drive_protocol(P3, 1e-3, T)
    hmax = max(np.linalg.norm(h, 2) for _, h in p.segments)
    assert np.linalg.norm(exact_period_propagator(p) - np.eye(8), 2) <= 10 * hmax * T


def test_single_segment_propagator(rng):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u = exact_period_propagator(DriveProtocol(((0.3, h),)))
    assert np.allclose(u, scipy.linalg.expm(-0.3j * h), atol=1e-12)


def test_hermitian_drive_is_unitary():
    u = exact_period_propagator(build_drive_protocol(P3.replace(gamma=0.0), 1e-2, 0.5))
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-10)


def test_time_reversal_inverts_propagator():
    p = build_drive_protocol(P3, 1e-2, 0.4)
    u = exact_period_propagator(p)
    v = exact_period_propagator(p.time_reversed())
    assert np.allclose(v @ u, np.eye(8), atol=1e-8)


def test_segment_ordering_matters():
    # later segments on the left: compare with an explicit product
    p = build_drive_protocol(P3, 1e-2, 0.4)
    expect = np.eye(8)
    for dt, h in p.segments:
        expect = scipy.linalg.expm(-1j * dt * h) @ expect
    assert np.allclose(exact_period_propagator(p), expect, atol=1e-12)


# ----------------------------------------------------------------- Magnus

def test_constant_protocol(rng):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    res = magnus_terms(DriveProtocol(((0.7, h),)))
    assert np.allclose(res.omega1, -0.7j * h)
    assert np.allclose(res.omega2, 0)
    assert np.allclose(res.h_eff, h)


def test_split_constant_protocol_has_no_second_term(rng):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    res = magnus_terms(DriveProtocol(((0.2, h), (0.5, h))))
    assert np.allclose(res.omega2, 0, atol=1e-14)


def test_two_segment_omega2_against_bch():
    # for small dt, log(e^B e^A) = A + B + [B, A]/2 + O(dt^3)
    rng = np.random.default_rng(5)
    ha, hb = (rng.normal(size=(3, 3)) for _ in range(2))
    dt = 1e-3
    res = magnus_terms(DriveProtocol(((dt, ha), (dt, hb))))
    log = scipy.linalg.logm(scipy.linalg.expm(-1j * dt * hb) @ scipy.linalg.expm(-1j * dt * ha))
    assert np.allclose(res.omega1 + res.omega2, log, atol=1e-8)


def test_drive_needs_two_qubits():
    with pytest.raises(ValueError):
        build_drive_protocol(QubitSystemParams(1), 1e-3, 0.2)


@pytest.mark.parametrize("n", [2, 3])
def test_zero_eps_gives_h0(n):
    params = QubitSystemParams(n)
    for T in (0.05, 0.2, 0.5):
        h_eff = magnus_terms(build_drive_protocol(params, 0.0, T)).h_eff
        assert np.abs(h_eff - noninteracting_hamiltonian(params)).max() <= 1e-10


@pytest.mark.parametrize("n,eps,T", list(itertools.product([2, 3], [1e-6, 1e-3, 1e-2], [0.05, 0.2, 0.5])))
def test_closed_form_matches_magnus(n, eps, T):
    params = QubitSystemParams(n)
    closed = effective_hamiltonian(params, eps, T)
    integral = magnus_terms(build_drive_protocol(params, eps, T)).h_eff
    assert np.abs(closed - integral).max() <= 1e-10


@pytest.mark.parametrize("J,gamma", [(0.7, 1.0), (1.3, 0.4)])
def test_closed_form_with_other_couplings(J, gamma):
    params = QubitSystemParams(3, J=J, gamma=gamma)
    closed = effective_hamiltonian(params, 5e-3, 0.3)
    integral = magnus_terms(build_drive_protocol(params, 5e-3, 0.3)).h_eff
    assert np.abs(closed - integral).max() <= 1e-10


# ---------------------------------------------------- effective Hamiltonian

def test_effective_zero_eps():
    assert np.array_equal(effective_hamiltonian(P3, 0.0, 0.2), noninteracting_hamiltonian(P3))


def test_effective_small_period_limit():
    eps = 1e-2
    h = effective_hamiltonian(P3, eps, 1e-12)
    expect = noninteracting_hamiltonian(P3) + 0.5 * eps * collective_interaction("zx", 3)
    assert np.allclose(h, expect, atol=1e-12)


def test_three_body_strings_in_drive_commutator():
    c = commutator(collective_interaction("zx", 3), collective_interaction("xy", 3))
    terms = pauli_decompose(c, 3)
    three_body = {w: v for w, v in terms.items() if "0" not in w}
    assert three_body
    # both drives are symmetric under qubit relabeling, so the commutator is too
    for word, coeff in terms.items():
        for perm in itertools.permutations(range(3)):
            other = "".join(word[p] for p in perm)
            assert terms.get(other) == pytest.approx(coeff)


# ------------------------------------------------------------ error scaling

def test_error_ratios_near_eight():
    rows = magnus_error_scaling(P3, 1e-3, [0.2, 0.1, 0.05])
    ratios = [r for _, _, r in rows if r is not None]
    assert rows[-1][2] is None
    assert all(6 <= r <= 10 for r in ratios)


def test_errors_decrease_with_period():
    rows = magnus_error_scaling(P3, 1e-3, [0.4, 0.2, 0.1, 0.05, 0.025])
    errs = [e for _, e, _ in rows]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_zero_eps_hermitian_still_cubic():
    rows = magnus_error_scaling(P3.replace(gamma=0.0), 0.0, [0.2, 0.1, 0.05])
    assert all(6 <= r <= 10 for _, _, r in rows if r is not None)


def test_error_scaling_rejects_bad_grid():
    with pytest.raises(ValueError):
        magnus_error_scaling(P3, 1e-3, [0.2, 0.15])


def test_constant_drive_has_no_magnus_error(rng, monkeypatch):
    # substitute a one-segment protocol through the module-level builder
    import epsense.floquet as fl
    h = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    monkeypatch.setattr(fl, "build_drive_protocol", lambda params, eps, T: DriveProtocol(((T, h / 8),)))
    for _, err, ratio in fl.magnus_error_scaling(P3, 0.0, [1.0, 0.5, 0.25]):
        assert err <= 1e-12


# --------------------------------------------------------------- response

def test_zero_eps_spectrum_is_nilpotent():
    # eig of a defective matrix is unreliable; the characteristic polynomial is exact
    poly = characteristic_polynomial(effective_hamiltonian(P3, 0.0, 0.2))
    assert np.abs(poly.coeffs[:-1]).max() <= 1e-8


def test_magnus_response_is_fourth_order():
    fit = floquet_response_sweep(P3, 0.2, DEFAULT_EPS_GRID)
    assert abs(fit.slope - 0.25) <= 0.05


def test_exact_and_magnus_agree_for_large_eps():
    # at eps well above the drive-induced detuning both oracles see the same branch magnitude
    lam_m = np.abs(np.linalg.eigvals(effective_hamiltonian(P3, 1e-1, 0.02))).max()
    lam_x = np.abs(floquet_eigenphases(P3, 1e-1, 0.02)).max()
    assert lam_x == pytest.approx(lam_m, rel=0.05)


def test_exact_generator_detuned_from_ep_at_zero_eps():
    # the stroboscopic generator carries J-only O(T^2) terms that second-order Magnus drops
    diffs = []
    for T in (0.2, 0.1, 0.05):
        u = exact_period_propagator(build_drive_protocol(P3, 0.0, T))
        h_f = 1j * scipy.linalg.logm(u) / T
        diffs.append(np.linalg.norm(h_f - noninteracting_hamiltonian(P3), 2))
    assert diffs[0] > 1e-2
    for a, b in zip(diffs, diffs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_unknown_oracle():
    with pytest.raises(ValueError):
        floquet_response_sweep(P3, 0.2, DEFAULT_EPS_GRID, oracle="rk4")
