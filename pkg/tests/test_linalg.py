import numpy as np
import pytest

from qrs.entropy import DeterministicPrng
from qrs.errors import DimensionMismatch, NotHermitian, NotPsd, NotSquare, RankDeficient
from qrs.linalg import conj_transpose, hermitian_eig, kron, partial_trace, qr_unitary, sqrt_psd, trace
from qrs.randkit import ginibre_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_conj_transpose(rng):
    assert np.array_equal(conj_transpose(np.eye(3)), np.eye(3))
    assert conj_transpose([[1j]])[0, 0] == -1j
    a = cgauss(rng, 3, 4)
    assert conj_transpose(a).shape == (4, 3)
    assert np.array_equal(conj_transpose(conj_transpose(a)), a)


def test_trace(rng):
    assert trace(np.eye(5)) == 5
    a, b = cgauss(rng, 3, 3), cgauss(rng, 3, 3)
    assert abs(trace(a @ b) - trace(b @ a)) < 1e-10
    g = ginibre_matrix(DeterministicPrng(1), 3, 3)
    t = trace(g @ g.conj().T)
    assert t.real >= 0 and abs(t.imag) < 1e-12
    with pytest.raises(NotSquare):
        trace(np.ones((2, 3)))


class TestEig:
    def test_diagonal(self):
        assert np.allclose(hermitian_eig(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])

    def test_pauli_x(self):
        assert np.allclose(hermitian_eig([[0, 1], [1, 0]]).eigenvalues, [-1, 1])

    def test_normalised_gram_spectrum_sums_to_one(self):
        g = ginibre_matrix(DeterministicPrng(5), 4, 4)
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        assert abs(hermitian_eig(rho).eigenvalues.sum() - 1) < 1e-10

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig([[0, 1], [0, 0]])

    def test_reconstruction_and_orthonormality(self, rng):
        for i in range(1000):
            n = 2 + i % 15
            x = cgauss(rng, n, n)
            a = x + x.conj().T
            w, v = hermitian_eig(a)
            assert np.all(np.diff(w) >= 0)
            assert np.linalg.norm(a @ v - v * w) <= 1e-10 * np.linalg.norm(a)
            assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-10


class TestQr:
    def test_identity(self):
        q, r = qr_unitary(np.eye(4))
        assert np.allclose(np.abs(q), np.eye(4)) and np.allclose(np.abs(r), np.eye(4))

    def test_random_ginibre(self):
        a = ginibre_matrix(DeterministicPrng(8), 8, 8)
        q, r = qr_unitary(a)
        assert np.linalg.norm(q @ r - a) / np.linalg.norm(a) <= 1e-10
        assert np.max(np.abs(q.conj().T @ q - np.eye(8))) <= 1e-10
        assert np.allclose(np.tril(r, -1), 0)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            qr_unitary([[1, 2], [2, 4]])


class TestSqrt:
    def test_diagonal(self):
        assert np.allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_identity(self):
        assert np.allclose(sqrt_psd(np.eye(3)), np.eye(3))

    def test_reconstruction(self):
        g = ginibre_matrix(DeterministicPrng(9), 4, 4)
        a = g @ g.conj().T
        s = sqrt_psd(a)
        assert np.max(np.abs(s - s.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(s)[0] >= -1e-12
        assert np.linalg.norm(s @ s - a) <= 1e-9 * (1 + np.linalg.norm(a))

    def test_exact_zero_eigenvalue(self):
        assert hermitian_eig(sqrt_psd(np.diag([0.0, 1.0]))).eigenvalues[0] == 0.0

    def test_clamps_rounding_noise(self):
        s = sqrt_psd(np.diag([-5e-11, 1.0]))
        assert s[0, 0] == 0.0

    def test_not_psd(self):
        with pytest.raises(NotPsd):
            sqrt_psd(np.diag([-1e-6, 1.0]))


class TestKron:
    def test_identities(self):
        assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_block_layout(self):
        assert np.array_equal(kron(np.diag([2.0, 5.0]), np.eye(2)), np.diag([2.0, 2.0, 5.0, 5.0]))
        assert kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)

    def test_trace_multiplicative(self, rng):
        a, b = cgauss(rng, 2, 2), cgauss(rng, 2, 2)
        assert abs(trace(kron(a, b)) - trace(a) * trace(b)) < 1e-12


class TestPartialTrace:
    def test_product_factorisation(self, rng):
        a, b = cgauss(rng, 2, 2), cgauss(rng, 2, 2)
        ab = kron(a, b)
        assert np.max(np.abs(partial_trace(ab, (2, 2), 2) - np.trace(b) * a)) < 1e-10
        assert np.max(np.abs(partial_trace(ab, (2, 2), 1) - np.trace(a) * b)) < 1e-10

    @pytest.mark.parametrize("dims", [(2, 3), (3, 2), (1, 6), (6, 1)])
    def test_trace_preserving(self, rng, dims):
        a = cgauss(rng, 6, 6)
        for which in (1, 2):
            assert abs(np.trace(partial_trace(a, dims, which)) - np.trace(a)) < 1e-10

    def test_linear(self, rng):
        a, b = cgauss(rng, 6, 6), cgauss(rng, 6, 6)
        lhs = partial_trace(2 * a + 3j * b, (2, 3), 2)
        rhs = 2 * partial_trace(a, (2, 3), 2) + 3j * partial_trace(b, (2, 3), 2)
        assert np.allclose(lhs, rhs)

    def test_coefficient_matrix(self, rng):
        # |psi> = sum_ij X_ij |i>|j>; reduced states are X X^dag and (X^dag X)^T
        for _ in range(50):
            x = cgauss(rng, 2, 3)
            psi = x.reshape(-1)
            proj = np.outer(psi, psi.conj())
            r2 = partial_trace(proj, (2, 3), 2)
            r1 = partial_trace(proj, (2, 3), 1)
            assert np.max(np.abs(r2 - x @ x.conj().T)) < 1e-10
            assert np.max(np.abs(r1 - (x.conj().T @ x).T)) < 1e-10
            sv2 = np.linalg.svd(x, compute_uv=False) ** 2
            sv2 /= sv2.sum()
            lam = np.linalg.eigvalsh(r2) / np.trace(r2).real
            assert np.allclose(np.sort(lam), np.sort(sv2), atol=1e-10)
            lam1 = np.linalg.eigvalsh(r1) / np.trace(r1).real
            assert np.allclose(np.sort(lam1)[-2:], np.sort(sv2), atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(5), (2, 3), 1)
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(6), (2, 3), 3)
