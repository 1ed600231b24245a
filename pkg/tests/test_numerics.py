import numpy as np
import pytest

from belltool.errors import InfeasibleError, UnboundedError, ValidationError
from belltool.numerics import (
    LPProblem,
    hermitian_eig,
    lp_solve,
    power_iteration_norm,
    singular_values,
    spectral_norm,
)


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.conj().T)


def test_eig_identity():
    res = hermitian_eig(np.eye(4))
    assert np.allclose(res.eigenvalues, np.ones(4))


def test_eig_diagonal():
    res = hermitian_eig(np.diag([3.0, 1.0, -2.0]))
    assert np.allclose(res.eigenvalues, [3.0, 1.0, -2.0])


def test_eig_pauli_x():
    res = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(res.eigenvalues, [1.0, -1.0])


def test_eig_rejects_non_square():
    with pytest.raises(ValidationError):
        hermitian_eig(np.ones((2, 3)))


def test_eig_rejects_nan():
    m = np.eye(3)
    m[0, 0] = np.nan
    with pytest.raises(ValidationError):
        hermitian_eig(m)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13, 20])
def test_eig_matches_numpy_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        m = random_hermitian(rng, n)
        res = hermitian_eig(m)
        expected = np.sort(np.linalg.eigvalsh(m))[::-1]
        assert np.allclose(res.eigenvalues, expected, atol=1e-9)
        # residual and orthonormality invariants
        scale = spectral_norm(m)
        for i in range(n):
            v = res.eigenvectors[:, i]
            assert np.linalg.norm(m @ v - res.eigenvalues[i] * v) <= 1e-8 * max(scale, 1.0)
        gram = res.eigenvectors.conj().T @ res.eigenvectors
        assert np.max(np.abs(gram - np.eye(n))) < 1e-8


def test_spectral_norm_chsh_matrix():
    phi = 0.25 * np.array([[1.0, 1.0], [1.0, -1.0]])
    # oracle: sqrt(lambda_max(phi^T phi)) for a 2x2 computed by hand
    assert spectral_norm(phi) == pytest.approx(np.sqrt(2.0) / 4.0, abs=1e-12)


def test_spectral_norm_zero():
    assert spectral_norm(np.zeros((3, 4))) == 0.0


def test_spectral_norm_rectangular_matches_numpy():
    rng = np.random.default_rng(5)
    for shape in [(3, 7), (7, 3), (5, 5)]:
        a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), abs=1e-10)
        assert np.allclose(
            singular_values(a), np.linalg.svd(a, compute_uv=False), atol=1e-9
        )


def test_norm_invariances():
    rng = np.random.default_rng(9)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    n = spectral_norm(a)
    assert abs(spectral_norm(a.conj().T) - n) < 1e-10
    assert abs(spectral_norm(a.T) - n) < 1e-10


def test_norm_submultiplicative_and_kron():
    rng = np.random.default_rng(10)
    for _ in range(5):
        a = rng.normal(size=(5, 5))
        b = rng.normal(size=(5, 5))
        assert spectral_norm(a @ b) <= spectral_norm(a) * spectral_norm(b) + 1e-9
        assert spectral_norm(np.kron(a, b)) == pytest.approx(
            spectral_norm(a) * spectral_norm(b), abs=1e-9
        )


def test_power_iteration_agrees():
    rng = np.random.default_rng(2)
    for n in (2, 5, 11, 20):
        for trial in range(25):
            m = random_hermitian(rng, n)
            assert power_iteration_norm(m, seed=trial) == pytest.approx(
                spectral_norm(m), abs=1e-7
            )


def test_power_iteration_zero():
    assert power_iteration_norm(np.zeros((3, 3))) == 0.0


def test_lp_simple_box():
    sol = lp_solve(LPProblem(c=np.array([1.0]), a_ub=np.array([[1.0]]), b_ub=np.array([1.0])))
    assert sol.optimum == pytest.approx(1.0)
    assert sol.duality_gap <= 1e-8


def test_lp_two_variable():
    sol = lp_solve(
        LPProblem(
            c=np.array([1.0, 1.0]),
            a_ub=np.array([[1.0, 1.0], [1.0, 0.0]]),
            b_ub=np.array([2.0, 1.0]),
        )
    )
    assert sol.optimum == pytest.approx(2.0)
    assert sol.duality_gap <= 1e-8


def test_lp_equality_and_min():
    # min x+2y st x+y = 1, x,y >= 0  -> 1 at (1,0)
    sol = lp_solve(
        LPProblem(
            c=np.array([1.0, 2.0]),
            a_eq=np.array([[1.0, 1.0]]),
            b_eq=np.array([1.0]),
            sense="min",
        )
    )
    assert sol.optimum == pytest.approx(1.0)
    assert np.allclose(sol.x, [1.0, 0.0], atol=1e-9)


def test_lp_infeasible():
    with pytest.raises(InfeasibleError):
        lp_solve(
            LPProblem(
                c=np.array([1.0]),
                a_eq=np.array([[1.0], [1.0]]),
                b_eq=np.array([0.0, 1.0]),
            )
        )


def test_lp_unbounded():
    with pytest.raises(UnboundedError):
        lp_solve(LPProblem(c=np.array([1.0, -1.0]), a_ub=np.array([[0.0, 1.0]]), b_ub=np.array([1.0])))


def test_lp_lower_bounds():
    # max x st x <= 4, x >= 2
    sol = lp_solve(
        LPProblem(
            c=np.array([1.0]),
            a_ub=np.array([[1.0]]),
            b_ub=np.array([4.0]),
            lower_bounds=np.array([2.0]),
        )
    )
    assert sol.optimum == pytest.approx(4.0)
    assert sol.x[0] == pytest.approx(4.0)


def test_lp_random_against_enumeration():
    # random small LPs with box constraints; oracle enumerates the vertices of
    # [0,1]^3 intersected with one extra halfspace by LP over segment endpoints
    rng = np.random.default_rng(31)
    for _ in range(20):
        c = rng.normal(size=3)
        a = rng.normal(size=(1, 3))
        b = np.array([rng.uniform(0.5, 2.0)])
        cube = np.vstack([np.eye(3)])
        sol = lp_solve(
            LPProblem(c=c, a_ub=np.vstack([cube, a]), b_ub=np.concatenate([np.ones(3), b]))
        )
        # oracle: dense grid over the cube corners plus projections on the cut
        best = -np.inf
        for corner in np.ndindex(2, 2, 2):
            x = np.array(corner, float)
            if a @ x <= b + 1e-12:
                best = max(best, c @ x)
        # corners cut off by the halfspace: scan fine grid (adequate at this size)
        grid = np.linspace(0.0, 1.0, 21)
        for x0 in grid:
            for x1 in grid:
                for x2 in grid:
                    x = np.array([x0, x1, x2])
                    if a @ x <= b + 1e-12:
                        v = c @ x
                        if v > best:
                            best = v
        assert sol.optimum >= best - 1e-6
        assert sol.duality_gap <= 1e-8
