import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from speccount.mmio import load_matrix_market, write_matrix_market
from speccount.sparse import (ClusterSpec, Pencil, SparseMatrix, gen_diag_spectrum,
                              gen_laplacian, matvec, pencil_shift_apply)


def random_sparse(rng, n, density=0.1, symmetric=False, complex_=False):
    M = sp.random(n, n, density=density, random_state=rng, format="csr")
    if complex_:
        M = M + 1j * sp.random(n, n, density=density, random_state=rng, format="csr")
    if symmetric:
        M = M + (M.conj().T if complex_ else M.T)
    kind = ("hermitian" if complex_ else "symmetric") if symmetric else "general"
    return SparseMatrix(M, kind)


def test_csr_invariants(rng):
    A = random_sparse(rng, 40)
    assert A.row_ptr.shape == (41,)
    assert np.all(np.diff(A.row_ptr) >= 0)
    assert A.row_ptr[-1] == A.nnz == len(A.col_idx) == len(A.values)
    assert A.col_idx.min() >= 0 and A.col_idx.max() < A.n


def test_arrays_are_frozen(rng):
    A = random_sparse(rng, 10, 0.5)
    with pytest.raises(ValueError):
        A.values[0] = 1.0


def test_from_csr_arrays_validation():
    A = SparseMatrix.from_csr_arrays(2, [0, 1, 2], [0, 1], [1.0, 2.0])
    np.testing.assert_array_equal(A.toarray(), np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        SparseMatrix.from_csr_arrays(2, [0, 2, 1], [0, 1], [1.0, 2.0])
    with pytest.raises(ValueError):
        SparseMatrix.from_csr_arrays(2, [0, 1, 2], [0, 2], [1.0, 2.0])
    with pytest.raises(ValueError):
        SparseMatrix(np.ones((2, 3)))


def test_matvec_small_cases():
    v = np.array([3.0, -1.0, 2.5])
    np.testing.assert_array_equal(matvec(SparseMatrix(sp.identity(3)), v), v)
    np.testing.assert_array_equal(matvec(SparseMatrix.from_diagonal([1.0, 2.0, 3.0]),
                                         np.ones(3)), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        matvec(SparseMatrix(sp.identity(3)), np.ones(4))


def test_matvec_against_dense(rng):
    A = random_sparse(rng, 50, 0.2)
    v = rng.standard_normal(50)
    err = np.abs(matvec(A, v) - A.toarray() @ v).max()
    assert err <= 1e-13 * np.linalg.norm(A.toarray(), 2) * np.linalg.norm(v)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-1e3, 1e3), beta=st.floats(-1e3, 1e3), seed=st.integers(0, 10**6))
def test_matvec_linearity(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    A = random_sparse(rng, 30, 0.2)
    u, v = rng.standard_normal(30), rng.standard_normal(30)
    lhs = matvec(A, alpha * u + beta * v)
    rhs = alpha * matvec(A, u) + beta * matvec(A, v)
    scale = np.linalg.norm(A.toarray(), 2) * (abs(alpha) * np.linalg.norm(u)
                                              + abs(beta) * np.linalg.norm(v)) + 1e-300
    assert np.linalg.norm(lhs - rhs) <= 1e-13 * scale


@pytest.mark.parametrize("complex_", [False, True])
def test_symmetry_defect_small_for_symmetric_storage(rng, complex_):
    A = random_sparse(rng, 60, 0.1, symmetric=True, complex_=complex_)
    assert A.is_hermitian
    assert A.symmetry_defect(rng) < 1e-12


def test_symmetry_of_generators(rng):
    for A in (gen_laplacian(7), gen_laplacian(5, 4), gen_laplacian(3, 3, 3),
              gen_diag_spectrum(ClusterSpec(50, (0, 1), ((0.5, 0.01, 5),)), seed=3)):
        assert A.symmetry_defect(rng) < 1e-12


def test_pencil_shift_apply():
    A = SparseMatrix.from_diagonal([2.0])
    B = SparseMatrix.from_diagonal([1.0])
    np.testing.assert_array_equal(pencil_shift_apply(Pencil(A, B), 2.0, [1.0]), [0.0])
    v = np.array([4.0])
    np.testing.assert_array_equal(pencil_shift_apply(Pencil(A, B), 0.0, v), A.matvec(v))
    np.testing.assert_array_equal(pencil_shift_apply(Pencil(A), 0.5, v), [6.0])
    with pytest.raises(ValueError):
        Pencil(A, SparseMatrix(sp.identity(2)))


def test_pencil_shift_apply_against_dense(rng):
    A = random_sparse(rng, 30, 0.2, symmetric=True)
    B = random_sparse(rng, 30, 0.2, symmetric=True)
    v = rng.standard_normal(30)
    ref = (A.toarray() - 0.7 * B.toarray()) @ v
    out = pencil_shift_apply(Pencil(A, B), 0.7, v)
    assert np.linalg.norm(out - ref) <= 1e-13 * np.linalg.norm(ref)
    op = Pencil(A, B).shifted(0.7)
    np.testing.assert_allclose(op.matvec(v), ref, rtol=1e-13)


def test_laplacian_1d_small():
    A = gen_laplacian(3)
    np.testing.assert_array_equal(A.toarray(), [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])


def test_laplacian_1d_spectrum():
    N = 20
    lam = np.linalg.eigvalsh(gen_laplacian(N).toarray())
    k = np.arange(1, N + 1)
    np.testing.assert_allclose(lam, np.sort(2 - 2 * np.cos(k * np.pi / (N + 1))), atol=1e-12)


def test_laplacian_2d_stencil_and_count():
    A = gen_laplacian(8, 8)
    D = A.toarray()
    assert np.all(np.diag(D) == 4)
    assert set(np.unique(D)) <= {-1.0, 0.0, 4.0}
    lam = np.linalg.eigvalsh(D)
    # eigenvalues of the 5-point stencil are sums of two 1D spectra
    k = np.arange(1, 9)
    one = 2 - 2 * np.cos(k * np.pi / 9)
    closed = np.add.outer(one, one).ravel()
    inside = lambda x: int(np.count_nonzero((x >= 1) & (x <= 3)))
    assert inside(lam) == inside(closed)


def test_laplacian_cap():
    with pytest.raises(ValueError):
        gen_laplacian(100, 100, 100, cap=10**5)


def test_diag_spectrum_uniform():
    A = gen_diag_spectrum(ClusterSpec(10, (0.0, 1.0)))
    np.testing.assert_array_equal(A.diagonal(), np.linspace(0, 1, 10))


def test_diag_spectrum_cluster():
    spec = ClusterSpec(200, (0.0, 1.0), ((0.5, 1e-4, 20),))
    lam = gen_diag_spectrum(spec, seed=5).diagonal()
    assert np.all(np.diff(lam) >= 0)
    cluster = np.count_nonzero((lam >= 0.5 - 5e-5) & (lam <= 0.5 + 5e-5))
    background = np.count_nonzero(np.isclose(np.linspace(0, 1, 180), 0.5, atol=5e-5))
    assert cluster == 20 + background


def test_diag_spectrum_deterministic():
    spec = ClusterSpec(100, (0.0, 2.0), ((1.0, 0.1, 30), (1.7, 0.05, 10)))
    a = gen_diag_spectrum(spec, seed=11).diagonal()
    b = gen_diag_spectrum(spec, seed=11).diagonal()
    np.testing.assert_array_equal(a, b)


def test_diag_spectrum_errors():
    with pytest.raises(ValueError):
        gen_diag_spectrum(ClusterSpec(10, (0, 1), ((0.5, 0.1, 11),)))
    with pytest.raises(ValueError):
        gen_diag_spectrum(ClusterSpec(10, (0, 1), ((0.99, 0.1, 3),)))
    with pytest.raises(ValueError):
        gen_diag_spectrum(ClusterSpec(10, (0, 1), ((0.5, 0.1, 5),), d_lambda=1e-6))


def test_diag_spectrum_relative_gap():
    spec = ClusterSpec(100, (1.0, 2.0), ((1.5, 0.001, 10),), d_lambda=1e-3)
    lam = gen_diag_spectrum(spec, seed=1).diagonal()
    pts = lam[(lam >= 1.5 - 5e-4) & (lam <= 1.5 + 5e-4)]
    assert np.all(np.diff(pts) / pts[:-1] <= 1e-3)


def test_generated_roundtrip_bit_exact(tmp_path):
    for i, A in enumerate((gen_laplacian(6, 5),
                           gen_diag_spectrum(ClusterSpec(40, (0, 3), ((1.0, 0.3, 7),)), seed=2))):
        path = tmp_path / f"m{i}.mtx"
        write_matrix_market(path, A)
        B = load_matrix_market(path)
        assert (A.csr != B.csr).nnz == 0
        np.testing.assert_array_equal(A.values, B.values)
        np.testing.assert_array_equal(A.col_idx, B.col_idx)
