"""The compiled kernels and the numpy fallback must agree."""
import itertools

import numpy as np
import pytest

from epsense import _backend, _fallback

kernels = pytest.importorskip("epsense._kernels")


def test_backend_selected():
    assert _backend.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pauli_kernels_agree(n):
    for codes in itertools.product(range(4), repeat=n):
        a = _fallback.pauli_word_matrix(codes, 0.5 - 1.5j)
        b = kernels.pauli_word_matrix(list(codes), 0.5 - 1.5j)
        assert np.array_equal(a, b), codes


def test_pauli_kernel_rejects_bad_code():
    with pytest.raises(ValueError):
        kernels.pauli_word_matrix([0, 4], 1.0)


@pytest.mark.parametrize("dim", [1, 2, 5, 16])
def test_faddeev_leverrier_kernels_agree(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    c1, m1 = _fallback.faddeev_leverrier(a)
    c2, m2 = kernels.faddeev_leverrier(a)
    scale = np.abs(c1).max()
    assert np.abs(c1 - c2).max() <= 1e-12 * scale
    assert np.abs(m1 - m2).max() <= 1e-12 * np.abs(m1).max()


def test_pure_python_switch(monkeypatch):
    import importlib

    monkeypatch.setenv("EPSENSE_PURE_PYTHON", "1")
    mod = importlib.reload(_backend)
    try:
        assert mod.BACKEND == "python"
        assert mod.faddeev_leverrier is _fallback.faddeev_leverrier
    finally:
        monkeypatch.delenv("EPSENSE_PURE_PYTHON")
        importlib.reload(_backend)
