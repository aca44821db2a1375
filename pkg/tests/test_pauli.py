import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsense import (
    PauliString,
    QubitSystemParams,
    collective_interaction,
    commutator,
    dissipative_shift,
    noninteracting_hamiltonian,
    pauli_string_operator,
)
from epsense.pauli import SIGMA_X, SIGMA_Y, SIGMA_Z, pauli_decompose, pt_conjugate, site_operator

from conftest import h0_at

words = st.integers(1, 4).flatmap(lambda n: st.text("0xyz", min_size=n, max_size=n))


def test_single_x():
    assert np.array_equal(pauli_string_operator(PauliString("x"), 1), SIGMA_X)


def test_xx_is_antidiagonal():
    eps = 0.37
    got = pauli_string_operator(PauliString("xx", eps), 2)
    assert np.array_equal(got, eps * np.fliplr(np.eye(4)))


def test_x0_hand_expansion():
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    assert np.array_equal(pauli_string_operator("x0", 2), expected)


def test_word_length_mismatch():
    with pytest.raises(ValueError):
        pauli_string_operator(PauliString("xy"), 3)


def test_invalid_label():
    with pytest.raises(ValueError):
        PauliString("xq")


@given(words, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_word_equals_product_of_site_embeddings(word, coeff):
    n = len(word)
    product = coeff * np.eye(2 ** n, dtype=complex)
    for site, label in enumerate(word):
        product = product @ site_operator(label, site, n)
    assert np.allclose(pauli_string_operator(PauliString(word, coeff), n), product, atol=1e-12)


def test_label_products_follow_pauli_phases():
    # sigma_x sigma_y = i sigma_z on each site
    xy = pauli_string_operator("x0", 2) @ pauli_string_operator("y0", 2)
    assert np.allclose(xy, 1j * pauli_string_operator("z0", 2))


def test_h0_single_qubit_at_ep():
    assert np.array_equal(h0_at(1, gamma=1.0), np.array([[1j, 1], [1, -1j]]))


def test_h0_single_qubit_eigenvalues():
    vals = np.sort(np.linalg.eigvals(h0_at(1, gamma=0.6)).real)
    assert np.allclose(vals, [-0.8, 0.8], atol=1e-14)


def test_h0_hermitian_three_qubits():
    vals = np.sort(np.linalg.eigvalsh(h0_at(3, gamma=0.0)))[::-1]
    assert np.allclose(vals, [3, 1, 1, 1, -1, -1, -1, -3], atol=1e-12)


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("gamma", [0.0, 0.3, 0.8])
def test_h0_spectrum_formula(n, gamma):
    params = QubitSystemParams(n, J=1.7, gamma=gamma)
    vals = np.sort(np.linalg.eigvals(noninteracting_hamiltonian(params)).real)
    expect = np.sort([(n - 2 * m) * 1.7 * params.eps0.real
                      for m in range(n + 1) for _ in range(math.comb(n, m))])
    assert np.allclose(vals, expect, atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0, 1.5])
def test_h0_is_pt_symmetric(n, gamma):
    h = h0_at(n, gamma)
    assert np.allclose(pt_conjugate(h, n), h, atol=1e-14)


def test_eps0_is_complex_above_ep():
    assert QubitSystemParams(1, gamma=1.25).eps0 == pytest.approx(0.75j)
    assert QubitSystemParams(1, gamma=0.6).eps0 == pytest.approx(0.8)


@pytest.mark.parametrize("kwargs", [{"n": 0}, {"n": 2, "J": 0.0}, {"n": 2, "gamma": -0.1}, {"n": 1.5}])
def test_params_invariants(kwargs):
    with pytest.raises(ValueError):
        QubitSystemParams(**kwargs)


def test_dissipative_shift_single_qubit():
    params = QubitSystemParams(1, gamma=1.0)
    got = dissipative_shift(noninteracting_hamiltonian(params), params)
    assert np.allclose(got, [[0, 1], [1, -2j]])


def test_dissipative_shift_translates_spectrum():
    params = QubitSystemParams(2, gamma=0.5)
    h = noninteracting_hamiltonian(params)
    before = np.linalg.eigvals(h)
    after = np.linalg.eigvals(dissipative_shift(h, params))
    assert np.allclose(after.imag, -1.0, atol=1e-12)
    assert np.allclose(np.sort_complex(after), np.sort_complex(before - 1j), atol=1e-12)


def test_dissipative_shift_keeps_eigenvectors():
    params = QubitSystemParams(2, gamma=0.5)
    h = noninteracting_hamiltonian(params)
    _, vecs = np.linalg.eig(h)
    shifted = dissipative_shift(h, params)
    # every eigenvector of h is an eigenvector of the shifted operator
    for v in vecs.T:
        w = shifted @ v
        lam = np.vdot(v, w) / np.vdot(v, v)
        assert np.linalg.norm(w - lam * v) < 1e-12


def test_dissipative_shift_dimension_mismatch():
    with pytest.raises(ValueError):
        dissipative_shift(np.eye(4), QubitSystemParams(1))


def test_commutator_paulis():
    assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)


def test_self_commutator_vanishes(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.array_equal(commutator(a, a), np.zeros((4, 4)))


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(4))


def test_collective_two_qubits():
    xy = pauli_string_operator("xy", 2) + pauli_string_operator("yx", 2)
    zx = pauli_string_operator("zx", 2) + pauli_string_operator("xz", 2)
    assert np.array_equal(collective_interaction("xy", 2), xy)
    assert np.array_equal(collective_interaction("zx", 2), zx)


def test_collective_three_qubits_six_terms():
    terms = pauli_decompose(collective_interaction("xy", 3), 3)
    assert sorted(terms) == sorted(["xy0", "yx0", "x0y", "y0x", "0xy", "0yx"])
    assert all(c == pytest.approx(1.0) for c in terms.values())


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("kind", ["xy", "zx"])
def test_collective_hermitian(n, kind):
    h = collective_interaction(kind, n)
    assert np.array_equal(h, h.conj().T)


def test_collective_rejects_single_qubit():
    with pytest.raises(ValueError):
        collective_interaction("xy", 1)
    with pytest.raises(ValueError):
        collective_interaction("yy", 3)


def test_commutator_of_collective_terms_has_three_body_strings():
    c = commutator(collective_interaction("zx", 3), collective_interaction("xy", 3))
    terms = pauli_decompose(c, 3)
    three_body = [w for w in terms if "0" not in w]
    assert three_body
    # projection is exact: reassembling the terms gives the commutator back
    rebuilt = sum(coeff * pauli_string_operator(w, 3) for w, coeff in terms.items())
    assert np.allclose(rebuilt, c, atol=1e-12)
