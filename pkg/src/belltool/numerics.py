"""Dense linear-algebra and LP kernels used by every value engine.

Matrices are plain numpy arrays (dense, complex or real).  The eigensolver is
a cyclic Jacobi iteration with 2x2 unitary rotations; the LP solver is a
two-phase dense simplex with Bland's anti-cycling rule and a reduced-cost
optimality certificate.  Problem sizes in this package stay below a few
hundred rows, so dense updates are the right trade.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, InfeasibleError, UnboundedError, ValidationError


def _check_matrix(m) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of ndim {arr.ndim}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag if np.iscomplexobj(arr) else arr.real)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return arr


@dataclass
class EigResult:
    """Full spectrum of a Hermitian matrix, eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]


def hermitian_eig(m, tol: float = 1e-13, max_sweeps: int = 64) -> EigResult:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized internally but must be Hermitian within 1e-10.
    Convergence: off-diagonal Frobenius mass below tol * ||M||_F.
    """
    arr = _check_matrix(m).astype(complex)
    n, nc = arr.shape
    if n != nc:
        raise ValidationError(f"hermitian_eig needs a square matrix, got {arr.shape}")
    if n == 0:
        return EigResult(np.zeros(0), np.zeros((0, 0), complex))
    if np.max(np.abs(arr - arr.conj().T)) > 1e-10 * max(1.0, float(np.max(np.abs(arr)))):
        raise ValidationError("matrix is not Hermitian within 1e-10")
    a = 0.5 * (arr + arr.conj().T)
    v = np.eye(n, dtype=complex)
    fro = np.sqrt(np.sum(np.abs(a) ** 2))
    if fro == 0.0:
        return EigResult(np.zeros(n), v)
    threshold = tol * fro
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                beta = abs(b)
                if beta <= threshold / n:
                    continue
                phase = b / beta
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * beta)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U acts on columns (p,q); phase folds the complex off-diagonal
                # into the real 2x2 rotation.
                u = np.array([[c, s * phase], [-s * np.conj(phase), c]], dtype=complex)
                a[:, [p, q]] = a[:, [p, q]] @ u
                a[[p, q], :] = u.conj().T @ a[[p, q], :]
                v[:, [p, q]] = v[:, [p, q]] @ u
    else:
        raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")
    vals = np.diag(a).real.copy()
    order = np.argsort(-vals, kind="stable")
    return EigResult(vals[order], v[:, order])


def spectral_norm(a) -> float:
    """Largest singular value: sqrt of the top eigenvalue of the smaller Gram."""
    arr = _check_matrix(a).astype(complex)
    if arr.size == 0:
        return 0.0
    rows, cols = arr.shape
    gram = arr @ arr.conj().T if rows <= cols else arr.conj().T @ arr
    top = hermitian_eig(gram).eigenvalues[0]
    return float(np.sqrt(max(top, 0.0)))


def singular_values(a) -> np.ndarray:
    """All singular values, descending (sqrt of the smaller Gram's spectrum)."""
    arr = _check_matrix(a).astype(complex)
    rows, cols = arr.shape
    gram = arr @ arr.conj().T if rows <= cols else arr.conj().T @ arr
    vals = hermitian_eig(gram).eigenvalues
    return np.sqrt(np.clip(vals, 0.0, None))


def power_iteration_norm(a, tol: float = 1e-12, max_iter: int = 200_000, seed: int = 0) -> float:
    """Spectral norm by power iteration on the smaller Gram matrix.

    Independent cross-check for spectral_norm; converges when the Rayleigh
    estimate moves less than tol * max(1, estimate) on three consecutive steps.
    """
    arr = _check_matrix(a).astype(complex)
    if arr.size == 0 or not np.any(arr):
        return 0.0
    rows, cols = arr.shape
    gram = arr @ arr.conj().T if rows <= cols else arr.conj().T @ arr
    n = gram.shape[0]
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    vec /= np.linalg.norm(vec)
    est = float(np.real(vec.conj() @ gram @ vec))
    quiet = 0
    for _ in range(max_iter):
        nxt = gram @ vec
        norm = np.linalg.norm(nxt)
        if norm == 0.0:
            return 0.0
        vec = nxt / norm
        new_est = float(np.real(vec.conj() @ gram @ vec))
        if abs(new_est - est) <= tol * max(1.0, abs(new_est)):
            quiet += 1
            if quiet >= 3:
                return float(np.sqrt(max(new_est, 0.0)))
        else:
            quiet = 0
        est = new_est
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


# ---------------------------------------------------------------------------
# linear programming
# ---------------------------------------------------------------------------


@dataclass
class LPProblem:
    """min/max c.x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= lower_bounds."""

    c: np.ndarray
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    a_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    sense: str = "max"
    lower_bounds: Optional[np.ndarray] = None


@dataclass
class LPSolution:
    optimum: float
    x: np.ndarray
    duality_gap: float
    dual_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    dual_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))


_PIVOT_EPS = 1e-8  # pivots below this are treated as structural zeros


def _simplex(tableau, basis, costs, forbidden, max_iter, n_cols):
    """Minimize costs over the tableau in place.

    The tableau carries two right-hand sides: column n_cols holds a seeded
    positive perturbation of the true rhs (column n_cols + 1).  Ratio tests
    run on the perturbed column, which makes ties measure-zero and keeps
    every pivot strictly improving, so degenerate stalling cannot occur; the
    exact column rides along and supplies the reported solution.  Pricing is
    steepest-coefficient, switching to Bland's smallest-index rule after a
    run of degenerate pivots as the anti-cycling backstop.  The reduced-cost
    row is refreshed periodically so elimination error cannot accumulate.
    """
    m = tableau.shape[0]
    n = n_cols
    in_basis = np.zeros(n, dtype=bool)
    in_basis[basis] = True
    reduced = costs - costs[basis] @ tableau[:, :n]
    bland = False
    stall = 0
    stall_limit = 100
    for it in range(max_iter):
        if it and it % 128 == 0:
            reduced = costs - costs[basis] @ tableau[:, :n]
            if float(np.min(tableau[:, n])) < -1e-7:
                raise ConvergenceError("simplex basis lost feasibility (numerical breakdown)")
        allowed = (reduced < -1e-9) & ~forbidden & ~in_basis
        candidates = np.nonzero(allowed)[0]
        if candidates.size == 0:
            return
        if bland:
            entering = int(candidates[0])
        else:
            entering = int(candidates[np.argmin(reduced[candidates])])
        col = tableau[:, entering]
        best_ratio = None
        leaving = -1
        for i in range(m):
            if col[i] > _PIVOT_EPS:
                ratio = tableau[i, n] / col[i]
                if (
                    best_ratio is None
                    or ratio < best_ratio - 1e-15
                    or (abs(ratio - best_ratio) <= 1e-15 and basis[leaving] > basis[i])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise UnboundedError("LP is unbounded")
        pivot = tableau[leaving, entering]
        tableau[leaving, :] /= pivot
        factor = tableau[:, entering].copy()
        factor[leaving] = 0.0
        tableau -= np.outer(factor, tableau[leaving, :])
        reduced = reduced - reduced[entering] * tableau[leaving, :n]
        in_basis[basis[leaving]] = False
        in_basis[entering] = True
        basis[leaving] = entering
        if best_ratio > 1e-15:
            stall = 0
        else:
            stall += 1
            if stall >= stall_limit:
                bland = True
    raise ConvergenceError("simplex exceeded its iteration limit")


def lp_solve(problem: LPProblem, max_iter: int = 200_000) -> LPSolution:
    """Two-phase simplex.  Returns the optimum, a basic solution, and the
    duality gap recomputed from the final reduced costs (<= 1e-8 at optimum).
    """
    c = np.asarray(problem.c, dtype=float).ravel()
    nvar = c.size
    sense = problem.sense.lower()
    if sense not in ("max", "min"):
        raise ValidationError(f"sense must be 'max' or 'min', got {problem.sense!r}")
    obj = -c if sense == "max" else c.copy()

    a_eq = np.zeros((0, nvar)) if problem.a_eq is None else np.atleast_2d(np.asarray(problem.a_eq, float))
    b_eq = np.zeros(0) if problem.b_eq is None else np.asarray(problem.b_eq, float).ravel()
    a_ub = np.zeros((0, nvar)) if problem.a_ub is None else np.atleast_2d(np.asarray(problem.a_ub, float))
    b_ub = np.zeros(0) if problem.b_ub is None else np.asarray(problem.b_ub, float).ravel()
    if a_eq.shape[0] != b_eq.size or (a_eq.size and a_eq.shape[1] != nvar):
        raise ValidationError("equality constraint shapes are inconsistent")
    if a_ub.shape[0] != b_ub.size or (a_ub.size and a_ub.shape[1] != nvar):
        raise ValidationError("inequality constraint shapes are inconsistent")
    for block in (c, a_eq, b_eq, a_ub, b_ub):
        if block.size and not np.all(np.isfinite(block)):
            raise ValidationError("LP data contains NaN or Inf")

    lb = np.zeros(nvar) if problem.lower_bounds is None else np.asarray(problem.lower_bounds, float).ravel()
    if lb.size != nvar:
        raise ValidationError("lower_bounds length mismatch")
    # substitute x = x' + lb so that x' >= 0
    b_eq = b_eq - a_eq @ lb if a_eq.size else b_eq
    b_ub = b_ub - a_ub @ lb if a_ub.size else b_ub
    shift = float(obj @ lb)

    n_eq, n_ub = a_eq.shape[0], a_ub.shape[0]
    m = n_eq + n_ub
    n_total = nvar + n_ub + m  # structural + slacks + artificials
    rows = np.hstack([a_eq, np.zeros((n_eq, n_ub))]) if n_eq else np.zeros((0, nvar + n_ub))
    if n_ub:
        slack_block = np.hstack([a_ub, np.eye(n_ub)])
        rows = np.vstack([rows, slack_block]) if rows.size else slack_block
    rhs = np.concatenate([b_eq, b_ub])
    if m == 0:
        raise ValidationError("LP needs at least one constraint")
    # normalize rows to nonnegative rhs, then give every row an artificial
    neg = rhs < 0
    rows[neg] *= -1
    rhs = np.abs(rhs)
    # two rhs columns: a seeded positive perturbation drives the ratio tests
    # (degeneracy becomes measure-zero), the exact value rides along
    pert_rng = np.random.default_rng(987654321)
    scale = 1e-9 * max(1.0, float(np.max(rhs)) if rhs.size else 1.0)
    rhs_pert = rhs + scale * pert_rng.uniform(0.5, 1.5, size=m)
    tableau = np.zeros((m, n_total + 2))
    tableau[:, : nvar + n_ub] = rows
    tableau[:, nvar + n_ub : n_total] = np.eye(m)
    tableau[:, n_total] = rhs_pert
    tableau[:, n_total + 1] = rhs
    basis = list(range(nvar + n_ub, n_total))
    identity_col = list(range(nvar + n_ub, n_total))  # per-row dual readout column

    # phase 1: drive artificials to zero
    phase1 = np.zeros(n_total)
    phase1[nvar + n_ub :] = 1.0
    forbidden = np.zeros(n_total, dtype=bool)
    _simplex(tableau, basis, phase1, forbidden, max_iter, n_total)
    if float(phase1[basis] @ tableau[:, n_total + 1]) > 1e-9:
        raise InfeasibleError("LP is infeasible")
    # pivot lingering artificials out of the basis when their row has support
    basis_set = set(basis)
    for i in range(m):
        if basis[i] >= nvar + n_ub:
            row = tableau[i, : nvar + n_ub]
            for j in np.nonzero(np.abs(row) > _PIVOT_EPS)[0]:
                if j not in basis_set:
                    pivot = tableau[i, j]
                    tableau[i, :] /= pivot
                    factor = tableau[:, j].copy()
                    factor[i] = 0.0
                    tableau -= np.outer(factor, tableau[i, :])
                    basis_set.discard(basis[i])
                    basis_set.add(int(j))
                    basis[i] = int(j)
                    break
    # rows still basic in an artificial are linearly dependent: drop them so
    # phase 2 cannot churn (and corrupt) hundreds of redundant zero rows
    keep = [i for i in range(m) if basis[i] < nvar + n_ub]
    dropped = [i for i in range(m) if basis[i] >= nvar + n_ub]
    if dropped:
        if float(np.max(np.abs(tableau[dropped, n_total + 1]))) > 1e-7:
            raise ConvergenceError("redundant row carries a nonzero value; breakdown")
        tableau = tableau[keep]
        basis = [basis[i] for i in keep]
        identity_col = [identity_col[i] for i in keep]

    # phase 2: original objective, artificials barred from re-entering
    phase2 = np.zeros(n_total)
    phase2[:nvar] = obj
    forbidden = np.zeros(n_total, dtype=bool)
    forbidden[nvar + n_ub :] = True
    _simplex(tableau, basis, phase2, forbidden, max_iter, n_total)

    full = np.zeros(n_total)
    full[basis] = tableau[:, n_total + 1]
    x = full[:nvar] + lb
    primal = float(phase2[basis] @ tableau[:, n_total + 1]) + shift

    # duals: for row i with initial identity column j (cost 0), y_i = -reduced_j;
    # rows dropped as redundant carry dual 0
    cb = phase2[basis]
    y_row = cb @ tableau[:, :n_total]
    reduced = phase2 - y_row
    duals = np.zeros(m)
    for pos in range(len(basis)):
        orig = identity_col[pos] - (nvar + n_ub)
        duals[orig] = -reduced[identity_col[pos]]
    dual_obj = float(duals @ rhs) + shift
    # certificate: reduced costs of structural+slack columns must be >= 0 at a
    # minimum (within tolerance); gap is primal vs dual objective
    if np.min(reduced[: nvar + n_ub]) < -1e-7:
        raise ConvergenceError("simplex returned a non-optimal basis (negative reduced cost)")
    gap = abs(primal - dual_obj)
    optimum = -primal if sense == "max" else primal
    duals = duals.copy()
    duals[neg] *= -1.0  # undo the row sign normalization
    if sense == "max":
        duals *= -1.0
    return LPSolution(optimum=optimum, x=x, duality_gap=gap, dual_eq=duals[:n_eq], dual_ub=duals[n_eq:])
