"""Game-value engines: exact classical optimum, no-signaling LP, quantum XOR
bias by low-rank ascent, spectral-norm upper bounds, no-quantum-advantage
certificates, triviality tests and biseparable (DIEW) bounds.

Deterministic strategies are per-player output tables holding flat group
indices; ties in the classical search break toward the lexicographically
smallest concatenated table, so certificates are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import AbelianGroup, character_table
from .errors import ResourceError, ValidationError
from .games import (
    Box,
    GameMatrixSet,
    LinearGame,
    Partition,
    game_matrices,
    product,
    unflatten_index,
)
from .numerics import LPProblem, hermitian_eig, lp_solve, spectral_norm


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per player, one output (flat group index) per input."""

    outputs: Tuple[Tuple[int, ...], ...]

    def flat(self) -> Tuple[int, ...]:
        return tuple(v for player in self.outputs for v in player)

    def output_of(self, player: int, x: int) -> int:
        return self.outputs[player][x]


def _group_index_tables(group: AbelianGroup):
    """ADD[a,b], NEG[a] acting on flat group indices."""
    size = group.size
    coords = [group.element_from_index(i) for i in range(size)]
    add = np.zeros((size, size), dtype=int)
    neg = np.zeros(size, dtype=int)
    for i, a in enumerate(coords):
        neg[i] = group.element_index(tuple((-x) % d for x, d in zip(a, group.orders)))
        for j, b in enumerate(coords):
            add[i, j] = group.element_index(
                tuple((x + y) % d for x, y, d in zip(a, b, group.orders))
            )
    return add, neg


def _player_input_digits(game: LinearGame) -> List[np.ndarray]:
    """digits[i][flat_input] = the input of player i."""
    digits = [np.zeros(game.n_inputs, dtype=int) for _ in range(game.n_players)]
    for idx in range(game.n_inputs):
        xs = unflatten_index(idx, game.input_sizes)
        for i, x in enumerate(xs):
            digits[i][idx] = x
    return digits


def strategy_success(game: LinearGame, strategy: DeterministicStrategy) -> float:
    """Success probability of a deterministic strategy (exact weighted count)."""
    add, neg = _group_index_tables(game.group)
    digits = _player_input_digits(game)
    acc = np.zeros(game.n_inputs, dtype=int)
    for i in range(game.n_players):
        outs = np.asarray(strategy.outputs[i], dtype=int)
        acc = add[acc, outs[digits[i]]]
    return float(game.dist[acc == game.f].sum())


def deterministic_box(game: LinearGame, strategy: DeterministicStrategy) -> Box:
    """The product box realized by a deterministic strategy."""
    size = game.group.size
    n = game.n_players
    table = np.zeros((size ** n, game.n_inputs))
    digits = _player_input_digits(game)
    for idx in range(game.n_inputs):
        a_flat = 0
        for i in range(n):
            a_flat = a_flat * size + strategy.outputs[i][digits[i][idx]]
        table[a_flat, idx] = 1.0
    return Box(game.input_sizes, size, table)


def classical_value(
    game: LinearGame,
    budget: int = 10 ** 9,
    workers: int = 1,
) -> Tuple[float, DeterministicStrategy]:
    """Exact maximum over deterministic strategies, with reproducible tie-break.

    Enumerates the joint strategies of players 2..n and best-responds player 1;
    that evaluates the full strategy space while touching only
    prod_{i>=2} |G|^(m_i) explicit assignments.  Ties break toward the
    lexicographically smallest concatenated output table.
    """
    size = game.group.size
    total = 1
    for m in game.input_sizes:
        total *= size ** m
        if total > budget:
            raise ResourceError(
                f"strategy space {total}+ exceeds budget {budget}; "
                "reduce the game by symmetry or raise the budget"
            )
    add, neg = _group_index_tables(game.group)
    digits = _player_input_digits(game)
    rest_count = product([size ** m for m in game.input_sizes[1:]])

    if game.n_players == 1:
        w = np.zeros((game.input_sizes[0], size))
        np.add.at(w, (digits[0], game.f), game.dist)
        best_vec = tuple(int(np.argmax(w[x])) for x in range(game.input_sizes[0]))
        value = float(w.max(axis=1).sum())
        return value, DeterministicStrategy((best_vec,))

    if game.n_players == 2:
        return _classical_two_player(game, add, neg, digits, workers)

    # n >= 3: plain loop over the rest players' strategy tuples (lex order)
    m0 = game.input_sizes[0]
    best_val = -1.0
    best_flat: Optional[Tuple[int, ...]] = None
    spaces = [
        itertools.product(range(size), repeat=game.input_sizes[i])
        for i in range(1, game.n_players)
    ]
    for rest in itertools.product(*spaces):
        acc = np.zeros(game.n_inputs, dtype=int)
        for i, outs in enumerate(rest, start=1):
            acc = add[acc, np.asarray(outs, dtype=int)[digits[i]]]
        target = add[game.f, neg[acc]]
        w = np.zeros((m0, size))
        np.add.at(w, (digits[0], target), game.dist)
        val = float(w.max(axis=1).sum())
        if val > best_val + 1e-12:
            lead = tuple(int(np.argmax(w[x])) for x in range(m0))
            best_val = val
            best_flat = lead + tuple(v for outs in rest for v in outs)
        elif val > best_val - 1e-12:
            lead = tuple(int(np.argmax(w[x])) for x in range(m0))
            cand = lead + tuple(v for outs in rest for v in outs)
            if best_flat is None or cand < best_flat:
                best_flat = cand
    return best_val, _strategy_from_flat(game, best_flat)


def _strategy_from_flat(game: LinearGame, flat: Sequence[int]) -> DeterministicStrategy:
    outputs = []
    pos = 0
    for m in game.input_sizes:
        outputs.append(tuple(int(v) for v in flat[pos : pos + m]))
        pos += m
    return DeterministicStrategy(tuple(outputs))


def _classical_two_player(game, add, neg, digits, workers):
    size = game.group.size
    m_a, m_b = game.input_sizes
    n_bob = size ** m_b
    # contrib[y, b][x, a]: probability weight toward Alice answering a on x
    contrib = np.zeros((m_b, size, m_a, size))
    p = game.dist.reshape(m_a, m_b)
    f = game.f.reshape(m_a, m_b)
    for y in range(m_b):
        for b in range(size):
            targets = add[f[:, y], neg[b]]
            contrib[y, b, np.arange(m_a), targets] = p[:, y]

    chunks = _chunk_ranges(n_bob, workers)
    if len(chunks) == 1:
        results = [_two_player_chunk(contrib, size, m_a, m_b, chunks[0])]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _two_player_chunk,
                    itertools.repeat(contrib),
                    itertools.repeat(size),
                    itertools.repeat(m_a),
                    itertools.repeat(m_b),
                    chunks,
                )
            )
    best_val, best_flat = -1.0, None
    for val, flat in results:  # chunks arrive in index order: deterministic
        if val > best_val + 1e-12 or (val > best_val - 1e-12 and (best_flat is None or flat < best_flat)):
            best_val, best_flat = max(best_val, val), flat
    return best_val, _strategy_from_flat(game, best_flat)


def _chunk_ranges(n, workers):
    if workers <= 1 or n < 4096:
        return [(0, n)]
    pieces = min(workers * 4, max(1, n // 1024))
    bounds = np.linspace(0, n, pieces + 1, dtype=int)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(pieces) if bounds[i] < bounds[i + 1]]


def _two_player_chunk(contrib, size, m_a, m_b, bounds):
    lo, hi = bounds
    count = hi - lo
    idx = np.arange(lo, hi)
    bob = np.zeros((count, m_b), dtype=int)
    rem = idx.copy()
    for y in range(m_b - 1, -1, -1):
        bob[:, y] = rem % size
        rem //= size
    w = np.zeros((count, m_a, size))
    for y in range(m_b):
        w += contrib[y, bob[:, y]]
    values = w.max(axis=2).sum(axis=1)
    best = values.max()
    cand = np.nonzero(values >= best - 1e-12)[0]
    best_flat = None
    best_val = -1.0
    for i in cand:
        alice = tuple(int(np.argmax(w[i, x])) for x in range(m_a))
        flat = alice + tuple(int(v) for v in bob[i])
        val = float(values[i])
        if val > best_val + 1e-12 or (val > best_val - 1e-12 and (best_flat is None or flat < best_flat)):
            best_val = max(best_val, val)
            best_flat = flat
    return best_val, best_flat


# ---------------------------------------------------------------------------
# no-signaling value (LP)
# ---------------------------------------------------------------------------


def ns_value(game: LinearGame, budget: int = 2_000_000) -> float:
    """LP optimum over no-signaling boxes; equals 1 for every linear game."""
    size = game.group.size
    n = game.n_players
    n_out = size ** n
    n_in = game.n_inputs
    nvar = n_out * n_in
    if nvar > budget:
        raise ResourceError(f"LP with {nvar} variables exceeds budget {budget}")

    def var(a_flat, x_flat):
        return a_flat * n_in + x_flat

    from .games import _output_sum_indices

    sums = _output_sum_indices(game.group, n)
    c = np.zeros(nvar)
    for x in range(n_in):
        for a in np.nonzero(sums == game.f[x])[0]:
            c[var(a, x)] = game.dist[x]

    rows = []
    rhs = []
    # normalization per input
    for x in range(n_in):
        row = np.zeros(nvar)
        for a in range(n_out):
            row[var(a, x)] = 1.0
        rows.append(row)
        rhs.append(1.0)
    # no-signaling: subset marginals match the reference complementary input
    out_sizes = (size,) * n
    in_digits = _player_input_digits(game)
    out_digits = [np.zeros(n_out, dtype=int) for _ in range(n)]
    for a_flat in range(n_out):
        avec = unflatten_index(a_flat, out_sizes)
        for i, a in enumerate(avec):
            out_digits[i][a_flat] = a
    for r in range(1, n):
        for members in itertools.combinations(range(n), r):
            others = tuple(i for i in range(n) if i not in members)
            out_groups: Dict[Tuple[int, ...], List[int]] = {}
            for a_flat in range(n_out):
                key = tuple(out_digits[i][a_flat] for i in members)
                out_groups.setdefault(key, []).append(a_flat)
            in_groups: Dict[Tuple[int, ...], List[int]] = {}
            for x_flat in range(n_in):
                key = tuple(in_digits[i][x_flat] for i in members)
                in_groups.setdefault(key, []).append(x_flat)
            for a_key, a_list in out_groups.items():
                for x_key, x_list in in_groups.items():
                    ref = x_list[0]
                    for x_flat in x_list[1:]:
                        row = np.zeros(nvar)
                        for a_flat in a_list:
                            row[var(a_flat, x_flat)] = 1.0
                            row[var(a_flat, ref)] -= 1.0
                        rows.append(row)
                        rhs.append(0.0)
    sol = lp_solve(
        LPProblem(c=c, a_eq=np.array(rows), b_eq=np.array(rhs), sense="max")
    )
    if sol.duality_gap > 1e-8:
        raise ValidationError(f"LP certificate gap {sol.duality_gap} exceeds 1e-8")
    return float(sol.optimum)


# ---------------------------------------------------------------------------
# quantum XOR bias
# ---------------------------------------------------------------------------


@dataclass
class VectorStrategy:
    """Unit-vector strategy for the XOR bias program, plus its certificates."""

    u: np.ndarray  # rows: one unit vector per Alice input
    v: np.ndarray
    bias: float
    converged: bool
    dual_bound: float
    gap: float


def xor_quantum_bias(
    phi: np.ndarray,
    restarts: int = 8,
    seed: int = 0,
    tol: float = 1e-10,
    max_sweeps: int = 100_000,
) -> Tuple[float, VectorStrategy]:
    """Optimal quantum bias of an XOR game by alternating vector ascent.

    Maximizes sum_xy phi[x,y] <u_x, v_y> over unit vectors in dimension
    m_A + m_B.  The objective is monotone per half-sweep; the converged point
    yields a feasible dual candidate from its row/column norms, and the
    reported gap certifies closeness to the true SDP optimum.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise ValidationError("game matrix must be two-dimensional")
    m_a, m_b = phi.shape
    dim = m_a + m_b
    rng = np.random.default_rng(seed)
    best: Optional[VectorStrategy] = None
    for _ in range(max(1, restarts)):
        u = rng.normal(size=(m_a, dim))
        v = rng.normal(size=(m_b, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        prev = -np.inf
        converged = False
        for _ in range(max_sweeps):
            w = phi @ v
            norms = np.linalg.norm(w, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            u = w / norms
            w2 = phi.T @ u
            norms2 = np.linalg.norm(w2, axis=1, keepdims=True)
            norms2[norms2 == 0] = 1.0
            v = w2 / norms2
            val = float(np.sum(phi * (u @ v.T)))
            if val < prev - 1e-9:
                raise ValidationError("ascent objective decreased; numerical fault")
            if val - prev < tol:
                converged = True
                break
            prev = val
        cand = _certify_bias(phi, u, v, val, converged)
        if best is None or cand.bias > best.bias:
            best = cand
    return best.bias, best


def _certify_bias(phi, u, v, bias, converged):
    m_a, m_b = phi.shape
    y = np.concatenate(
        [0.5 * np.linalg.norm(phi @ v, axis=1), 0.5 * np.linalg.norm(phi.T @ u, axis=1)]
    )
    phi_s = np.zeros((m_a + m_b, m_a + m_b))
    phi_s[:m_a, m_a:] = phi / 2.0
    phi_s[m_a:, :m_a] = phi.T / 2.0
    slack = np.diag(y) - phi_s
    lam_min = hermitian_eig(slack).eigenvalues[-1]
    bump = max(0.0, -float(lam_min))
    dual = float(y.sum() + (m_a + m_b) * bump)
    return VectorStrategy(
        u=u,
        v=v,
        bias=float(bias),
        converged=converged,
        dual_bound=dual,
        gap=max(0.0, dual - float(bias)),
    )


# ---------------------------------------------------------------------------
# norm bounds
# ---------------------------------------------------------------------------


def xor_norm_bound(phi: np.ndarray) -> float:
    """omega_q <= (1 + sqrt(m_A m_B) ||phi||) / 2 for a 2-player XOR matrix."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise ValidationError("game matrix must be two-dimensional")
    m_a, m_b = phi.shape
    return 0.5 * (1.0 + np.sqrt(m_a * m_b) * spectral_norm(phi))


def linear_norm_bound(game: LinearGame, partition: Partition) -> float:
    """omega_q <= (1 + sqrt(prod m_i) * sum_k ||Phi_k^S||) / |G|."""
    mats = game_matrices(game, partition)
    scale = np.sqrt(product(game.input_sizes))
    return (1.0 + scale * mats.norm_sum()) / game.group.size


def linear_norm_bound_best(game: LinearGame) -> Tuple[float, Partition]:
    """Minimum of the norm bound over all 2^(n-1)-1 input bipartitions."""
    n = game.n_players
    if n > 12:
        raise ResourceError(f"{2 ** (n - 1) - 1} partitions at n={n} exceeds the n<=12 guard")
    best = None
    best_part = None
    for r in range(1, n):
        for members in itertools.combinations(range(n), r):
            if 0 not in members:
                continue  # S and its complement give the same bound
            part = Partition(members)
            val = linear_norm_bound(game, part)
            if best is None or val < best - 1e-15:
                best, best_part = val, part
    return best, best_part


def chshd_bound(d: int) -> float:
    """Closed form 1/d + (d-1)/(d sqrt(d)), valid for d prime or prime power."""
    from .games import _prime_power

    _prime_power(d)  # validates
    return 1.0 / d + (d - 1) / (d * np.sqrt(d))


# ---------------------------------------------------------------------------
# no-quantum-advantage certificates
# ---------------------------------------------------------------------------


@dataclass
class NoAdvantageCertificate:
    sigma_diag: np.ndarray
    lambda_diag: np.ndarray
    spectral_radius: Optional[float]
    verdict: bool


def strategy_sign_vectors(strategy: DeterministicStrategy) -> Tuple[np.ndarray, np.ndarray]:
    """(-1)^output vectors of a 2-player binary strategy."""
    if len(strategy.outputs) != 2:
        raise ValidationError("sign vectors need a 2-player strategy")
    sa = np.array([1.0 - 2.0 * v for v in strategy.outputs[0]])
    sb = np.array([1.0 - 2.0 * v for v in strategy.outputs[1]])
    if not np.all(np.isin(sa, (1.0, -1.0))) or not np.all(np.isin(sb, (1.0, -1.0))):
        raise ValidationError("strategy outputs must be binary for sign conversion")
    return sa, sb


def no_advantage_iff(
    phi: np.ndarray,
    strategy: DeterministicStrategy,
    tol: float = 1e-8,
) -> NoAdvantageCertificate:
    """Exact test: a classically optimal strategy is quantum-optimal iff the
    induced Sigma, Lambda are positive and the similar-matrix spectral radius
    is exactly 1.

    The caller supplies a classical optimum (e.g. from classical_value); the
    result is meaningless for suboptimal strategies.
    """
    phi = np.asarray(phi, dtype=float)
    if np.any(np.max(np.abs(phi), axis=1) == 0) or np.any(np.max(np.abs(phi), axis=0) == 0):
        raise ValidationError("game matrix has an all-zero row or column")
    sa, sb = strategy_sign_vectors(strategy)
    if sa.size != phi.shape[0] or sb.size != phi.shape[1]:
        raise ValidationError("strategy shape does not match the game matrix")
    sigma = (phi @ sb) * sa
    lam = sb * (phi.T @ sa)
    if np.min(sigma) <= tol or np.min(lam) <= tol:
        return NoAdvantageCertificate(sigma, lam, None, False)
    mid = np.diag(lam ** -0.5) @ phi.T @ np.diag(1.0 / sigma) @ phi @ np.diag(lam ** -0.5)
    rho = float(hermitian_eig(0.5 * (mid + mid.T)).eigenvalues[0])
    verdict = abs(rho - 1.0) <= tol
    return NoAdvantageCertificate(sigma, lam, rho, verdict)


def no_advantage_sufficient(
    phi: np.ndarray, tol: float = 1e-8
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Search +-1 vectors a, b with a^T phi b = sqrt(m_A m_B) ||phi||.

    Returns the first such pair (a fixed to +1 in its leading entry), or None.
    Absence does not imply quantum advantage.
    """
    phi = np.asarray(phi, dtype=float)
    m_a, m_b = phi.shape
    if m_a > 20 or m_b > 20:
        raise ResourceError(f"sign search guard: inputs {phi.shape} exceed 20")
    target = np.sqrt(m_a * m_b) * spectral_norm(phi)
    count = 2 ** (m_a - 1)  # leading entry pinned to +1: global sign is free
    chunk = 1 << 16
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        idx = np.arange(lo, hi)
        bits = (idx[:, None] >> np.arange(m_a - 1)) & 1
        a = np.concatenate([np.ones((hi - lo, 1)), 1.0 - 2.0 * bits], axis=1)
        scores = np.abs(a @ phi).sum(axis=1)
        good = np.nonzero(scores >= target - tol)[0]
        if good.size:
            a_vec = a[good[0]]
            proj = phi.T @ a_vec
            b_vec = np.where(proj >= 0, 1.0, -1.0)
            return a_vec, b_vec
    return None


def triviality_check(
    game: LinearGame, tol: float = 1e-8
) -> Optional[DeterministicStrategy]:
    """Perfect-strategy extraction for uniform-input games.

    If every single-player game matrix saturates the uniform norm ceiling
    1/sqrt(prod m_i) for every nontrivial character, the winning function is
    additively separable and the separating strategy is returned (verified to
    win with probability 1); otherwise None.
    """
    if not game.is_uniform():
        raise ValidationError("triviality check requires uniformly distributed inputs")
    ceiling = 1.0 / np.sqrt(game.n_inputs)
    for i in range(game.n_players):
        mats = game_matrices(game, Partition((i,)))
        for mat in mats.matrices.values():
            if abs(spectral_norm(mat) - ceiling) > tol * max(1.0, ceiling):
                return None
    add, neg = _group_index_tables(game.group)
    sizes = game.input_sizes
    f0 = int(game.f[0])  # f at the all-zero input
    outputs = []
    for i in range(game.n_players):
        outs = []
        for x in range(sizes[i]):
            probe = [0] * game.n_players
            probe[i] = x
            fx = int(game.f[game.input_index(probe)])
            delta = int(add[fx, neg[f0]])
            outs.append(int(add[delta, f0]) if i == 0 else delta)
        outputs.append(tuple(outs))
    strategy = DeterministicStrategy(tuple(outputs))
    if abs(strategy_success(game, strategy) - 1.0) > 1e-9:
        return None
    return strategy


# ---------------------------------------------------------------------------
# biseparable / DIEW bounds
# ---------------------------------------------------------------------------


def biseparable_bound(game: LinearGame, cut_player: int, budget: int = 10 ** 7) -> float:
    """Norm bound on tripartite play when ``cut_player`` holds no entanglement.

    For each deterministic assignment of the cut player, the other two play
    the induced bipartite game; the bound is the worst case over assignments.
    """
    if game.n_players != 3:
        raise ValidationError("biseparable bound is defined for 3-player games")
    if cut_player not in (0, 1, 2):
        raise ValidationError(f"cut player must be 0, 1 or 2, got {cut_player}")
    size = game.group.size
    m_cut = game.input_sizes[cut_player]
    if size ** m_cut > budget:
        raise ResourceError(f"{size ** m_cut} cut assignments exceed budget {budget}")
    rest = [i for i in range(3) if i != cut_player]
    m_i, m_j = (game.input_sizes[i] for i in rest)
    chars = character_table(game.group)
    add, neg = _group_index_tables(game.group)
    digits = _player_input_digits(game)
    scale = np.sqrt(m_i * m_j)
    worst = 0.0
    for assign in itertools.product(range(size), repeat=m_cut):
        assign_arr = np.asarray(assign, dtype=int)
        shifted = add[game.f, neg[assign_arr[digits[cut_player]]]]
        total = 0.0
        for k in range(1, size):
            mat = np.zeros((m_i, m_j), dtype=complex)
            np.add.at(
                mat,
                (digits[rest[0]], digits[rest[1]]),
                game.dist * chars[k, shifted],
            )
            total += spectral_norm(mat)
        worst = max(worst, (1.0 + scale * total) / size)
    return worst


def diew_bound(game: LinearGame) -> float:
    """Biseparable ceiling: the worst bound over the three possible cuts."""
    return max(biseparable_bound(game, cut) for cut in range(3))


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------


@dataclass
class ValueReport:
    """Bundle of computed values and certificates for one game."""

    classical: Optional[float] = None
    classical_strategy: Optional[DeterministicStrategy] = None
    ns: Optional[float] = None
    quantum_bias: Optional[float] = None
    quantum_value: Optional[float] = None
    quantum_converged: Optional[bool] = None
    quantum_dual_gap: Optional[float] = None
    norm_bound: Optional[float] = None
    norm_bound_partition: Optional[Tuple[int, ...]] = None
    norm_bound_exceeds_one: Optional[bool] = None
    no_advantage: Optional[bool] = None
    no_advantage_spectral_radius: Optional[float] = None
    trivial: Optional[bool] = None

    def validate(self) -> None:
        if self.ns is not None and self.ns > 1.0 + 1e-9:
            raise ValidationError(f"no-signaling value {self.ns} exceeds 1")
        if self.classical is not None and self.quantum_value is not None:
            if self.classical > self.quantum_value + 1e-7:
                raise ValidationError("classical value exceeds the quantum value")
        if self.quantum_value is not None and self.norm_bound is not None:
            if self.quantum_value > self.norm_bound + 1e-7:
                raise ValidationError("quantum value exceeds its norm bound")

    def to_dict(self) -> dict:
        out: dict = {}
        if self.classical is not None:
            out["classical"] = self.classical
            out["classical_strategy"] = list(self.classical_strategy.flat())
        if self.ns is not None:
            out["ns"] = self.ns
        if self.quantum_value is not None:
            out["quantum_bias"] = self.quantum_bias
            out["quantum_value"] = self.quantum_value
            out["quantum_converged"] = self.quantum_converged
            out["quantum_dual_gap"] = self.quantum_dual_gap
        if self.norm_bound is not None:
            out["norm_bound"] = self.norm_bound
            out["norm_bound_partition"] = list(self.norm_bound_partition)
            out["norm_bound_exceeds_one"] = self.norm_bound_exceeds_one
        if self.no_advantage is not None:
            out["no_advantage"] = self.no_advantage
            out["no_advantage_spectral_radius"] = self.no_advantage_spectral_radius
        if self.trivial is not None:
            out["trivial"] = self.trivial
        return out


def analyze(
    game: LinearGame,
    analyses: Sequence[str],
    seed: int = 0,
    restarts: int = 8,
    tol: float = 1e-10,
    budget: int = 10 ** 9,
    workers: int = 1,
) -> ValueReport:
    """Run the requested analyses and assemble a validated ValueReport."""
    report = ValueReport()
    wanted = set(analyses)
    unknown = wanted - {"classical", "ns", "quantum-xor", "bound", "no-advantage", "trivial"}
    if unknown:
        raise ValidationError(f"unknown analyses: {sorted(unknown)}")
    is_xor = game.n_players == 2 and game.group.size == 2
    if "classical" in wanted or "no-advantage" in wanted:
        report.classical, report.classical_strategy = classical_value(
            game, budget=budget, workers=workers
        )
    if "ns" in wanted:
        report.ns = ns_value(game)
    if "quantum-xor" in wanted:
        if not is_xor:
            raise ValidationError("quantum-xor analysis needs a 2-player binary game")
        phi = _xor_matrix(game)
        bias, strat = xor_quantum_bias(phi, restarts=restarts, seed=seed, tol=tol)
        report.quantum_bias = bias
        report.quantum_value = 0.5 * (1.0 + bias)
        report.quantum_converged = strat.converged
        report.quantum_dual_gap = strat.gap
    if "bound" in wanted:
        bound, part = linear_norm_bound_best(game)
        report.norm_bound = bound
        report.norm_bound_partition = part.members
        report.norm_bound_exceeds_one = bound > 1.0 + 1e-12
    if "no-advantage" in wanted:
        if not is_xor:
            raise ValidationError("no-advantage analysis needs a 2-player binary game")
        cert = no_advantage_iff(_xor_matrix(game), report.classical_strategy)
        report.no_advantage = cert.verdict
        report.no_advantage_spectral_radius = cert.spectral_radius
    if "trivial" in wanted:
        report.trivial = triviality_check(game) is not None
    report.validate()
    return report


def _xor_matrix(game: LinearGame) -> np.ndarray:
    return np.real(game_matrices(game, Partition((0,))).matrices[1])
