"""Permanent kernels against the naive reference and algebraic identities."""

import numpy as np
import pytest

from sis import permanent, permanent_naive, submatrix, three_pump_matrix
from sis._ryser_py import permanent_kernel as kernel_py
from sis.permanent import BACKEND, DIMENSION_CAP, abs_squared_matrix, count_nonzero_permutations

ROOT2 = np.sqrt(2.0)

KERNELS = [pytest.param(kernel_py, id="python")]
try:
    from sis._ryser import permanent_kernel as kernel_cy

    KERNELS.append(pytest.param(kernel_cy, id="cython"))
except ImportError:  # pragma: no cover - extension always builds in CI
    pass


def _as_c128(m):
    return np.ascontiguousarray(m, dtype=np.complex128)


@pytest.mark.parametrize("kernel", KERNELS)
def test_two_by_two_integer_case_exact(kernel):
    assert kernel(_as_c128([[2, 1], [1, 2]])) == 5 + 0j


@pytest.mark.parametrize("kernel", KERNELS)
def test_one_by_one(kernel):
    assert kernel(_as_c128([[3 - 4j]])) == 3 - 4j


@pytest.mark.parametrize("kernel", KERNELS)
def test_center_pair_submatrix(kernel):
    m = np.array([[2 * ROOT2 * 1j, 2 * ROOT2 * 1j], [-2, -3]], dtype=np.complex128)
    assert kernel(m) == pytest.approx(-10 * ROOT2 * 1j, rel=1e-12)


@pytest.mark.parametrize("kernel", KERNELS)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_matches_naive_expansion(kernel, n):
    rng = np.random.default_rng(1000 + n)
    for _ in range(30):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ref = permanent_naive(m)
        got = complex(kernel(_as_c128(m)))
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_backends_agree():
    if len(KERNELS) < 2:
        pytest.skip("compiled kernel unavailable")
    rng = np.random.default_rng(77)
    for n in (2, 4, 7):
        m = _as_c128(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        assert complex(kernel_py(m)) == pytest.approx(complex(kernel_cy(m)), rel=1e-13)


def test_backend_reports_its_kernel():
    assert BACKEND in ("cython", "python")


def test_permanent_is_transpose_invariant():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert permanent(m) == pytest.approx(permanent(m.T), rel=1e-12)


def test_permanent_row_multilinearity():
    rng = np.random.default_rng(6)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    mx = m.copy()
    mx[1] = x
    msum = m.copy()
    msum[1] = m[1] + x
    assert permanent(msum) == pytest.approx(permanent(m) + permanent(mx), rel=1e-12)


def test_permanent_row_swap_invariant():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    swapped = m[[1, 0, 2, 3]]
    assert permanent(m) == pytest.approx(permanent(swapped), rel=1e-12)


def test_diagonal_matrix_permanent_is_product():
    d = np.diag([2.0, 3.0, -1.5 + 1j])
    assert permanent(d) == pytest.approx(2.0 * 3.0 * (-1.5 + 1j), rel=1e-14)


def test_shape_and_cap_validation():
    with pytest.raises(ValueError, match="square"):
        permanent(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="at least one row"):
        permanent(np.zeros((0, 0)))
    with pytest.raises(ValueError, match="dimension cap"):
        permanent(np.zeros((DIMENSION_CAP + 1, DIMENSION_CAP + 1)))


def test_naive_expansion_guard():
    with pytest.raises(ValueError, match="too large"):
        permanent_naive(np.zeros((11, 11)))


def test_submatrix_selection():
    m = three_pump_matrix(1.0, 2.0, 3.0)
    sub = submatrix(m, ["i1", "i2"], ["s2", "s3"])
    assert np.array_equal(sub, m.entries[np.ix_([0, 1], [1, 2])])
    sub_swapped = submatrix(m, ["i2", "i1"], ["s3", "s2"])
    assert np.array_equal(sub_swapped, m.entries[np.ix_([1, 0], [2, 1])])
    with pytest.raises(ValueError, match="duplicate idler"):
        submatrix(m, ["i1", "i1"], ["s1", "s2"])
    with pytest.raises(ValueError, match="duplicate signal"):
        submatrix(m, ["i1", "i2"], ["s1", "s1"])


def test_submatrix_returns_a_copy():
    m = three_pump_matrix(1.0, 2.0, 3.0)
    sub = submatrix(m, ["i1"], ["s1"])
    sub[0, 0] = 99.0
    assert m.entries[0, 0] != 99.0


def test_abs_squared_matrix():
    m = np.array([[3 + 4j, 1j], [0, -2]], dtype=complex)
    assert np.array_equal(abs_squared_matrix(m), np.array([[25.0, 1.0], [0.0, 4.0]]))


def test_count_nonzero_permutations():
    # identity-like sparsity leaves a single permutation
    assert count_nonzero_permutations(np.array([[1.0, 0.0], [0.0, 2.0]])) == 1
    assert count_nonzero_permutations(np.array([[1.0, 1.0], [1.0, 1.0]])) == 2
    assert count_nonzero_permutations(np.zeros((2, 2))) == 0
    assert count_nonzero_permutations(np.ones((4, 4))) == 24
