"""Linear nonlocal games over finite Abelian groups, boxes, and game matrices.

A game holds n players, per-player input counts, the common output group, the
referee's input distribution and the winning target f(x_vec) as a dense table
of group-element indices.  All dense tables use the frozen flat codec: tuples
are flattened in C-order (first player is the most significant digit, the last
player varies fastest), matching numpy's reshape order.

Promise games are encoded by zero-probability inputs; every value engine
weights by p(x_vec), so forbidden inputs drop out automatically.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    AbelianGroup,
    character_table,
    cyclic,
    field_make,
    field_mul,
    is_prime,
)
from .errors import ValidationError


def flatten_index(tup: Sequence[int], sizes: Sequence[int]) -> int:
    idx = 0
    for t, s in zip(tup, sizes):
        idx = idx * s + t
    return idx


def unflatten_index(idx: int, sizes: Sequence[int]) -> Tuple[int, ...]:
    out = []
    for s in reversed(sizes):
        out.append(idx % s)
        idx //= s
    return tuple(reversed(out))


def product(values: Sequence[int]) -> int:
    return reduce(lambda a, b: a * b, values, 1)


@dataclass(frozen=True)
class Partition:
    """A proper nonempty subset of the players (0-based indices)."""

    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        object.__setattr__(self, "members", members)

    def validate(self, n_players: int) -> None:
        if not self.members or len(self.members) >= n_players:
            raise ValidationError(
                f"partition must pick between 1 and {n_players - 1} players, got {self.members}"
            )
        if any(i < 0 or i >= n_players for i in self.members):
            raise ValidationError(f"partition {self.members} has out-of-range players")

    def complement(self, n_players: int) -> "Partition":
        return Partition(tuple(i for i in range(n_players) if i not in self.members))


@dataclass(frozen=True, eq=False)
class LinearGame:
    """n-player linear game: win iff the group sum of outputs equals f(inputs)."""

    input_sizes: Tuple[int, ...]
    group: AbelianGroup
    dist: np.ndarray  # flat over joint inputs, C-order
    f: np.ndarray  # flat group-element indices over joint inputs

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.input_sizes)
        if not sizes or any(m < 1 for m in sizes):
            raise ValidationError(f"input sizes must be positive, got {self.input_sizes}")
        object.__setattr__(self, "input_sizes", sizes)
        total = product(sizes)
        dist = np.asarray(self.dist, dtype=float).ravel()
        fvals = np.asarray(self.f, dtype=int).ravel()
        if dist.size != total:
            raise ValidationError(f"distribution has {dist.size} entries, expected {total}")
        if fvals.size != total:
            raise ValidationError(f"f table has {fvals.size} entries, expected {total}")
        if np.any(dist < 0):
            raise ValidationError("input distribution has negative entries")
        if abs(dist.sum() - 1.0) > 1e-12:
            raise ValidationError(f"input distribution sums to {dist.sum()}, expected 1")
        if np.any(fvals < 0) or np.any(fvals >= self.group.size):
            raise ValidationError("f table contains invalid group-element indices")
        dist.setflags(write=False)
        fvals.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "f", fvals)

    @property
    def n_players(self) -> int:
        return len(self.input_sizes)

    @property
    def n_inputs(self) -> int:
        return product(self.input_sizes)

    def input_index(self, xs: Sequence[int]) -> int:
        if len(xs) != self.n_players or any(
            not 0 <= x < m for x, m in zip(xs, self.input_sizes)
        ):
            raise ValidationError(f"invalid input tuple {tuple(xs)} for sizes {self.input_sizes}")
        return flatten_index(xs, self.input_sizes)

    def inputs(self):
        return itertools.product(*(range(m) for m in self.input_sizes))

    def f_at(self, xs: Sequence[int]) -> Tuple[int, ...]:
        return self.group.element_from_index(int(self.f[self.input_index(xs)]))

    def p_at(self, xs: Sequence[int]) -> float:
        return float(self.dist[self.input_index(xs)])

    def is_uniform(self) -> bool:
        return bool(np.allclose(self.dist, 1.0 / self.n_inputs, atol=1e-12))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearGame):
            return NotImplemented
        return (
            self.input_sizes == other.input_sizes
            and self.group.orders == other.group.orders
            and np.array_equal(self.dist, other.dist)
            and np.array_equal(self.f, other.f)
        )


@dataclass
class Box:
    """Conditional probability table P(a_vec | x_vec), flat outputs x flat inputs."""

    input_sizes: Tuple[int, ...]
    output_size: int  # |G|: outputs per player
    table: np.ndarray  # shape (output_size**n, prod(input_sizes))

    def __post_init__(self):
        self.input_sizes = tuple(int(m) for m in self.input_sizes)
        table = np.asarray(self.table, dtype=float)
        n_out = self.output_size ** len(self.input_sizes)
        n_in = product(self.input_sizes)
        if table.shape != (n_out, n_in):
            raise ValidationError(
                f"box table has shape {table.shape}, expected {(n_out, n_in)}"
            )
        if np.any(table < -1e-12):
            raise ValidationError("box table has negative probabilities")
        col_sums = table.sum(axis=0)
        if np.max(np.abs(col_sums - 1.0)) > 1e-10:
            raise ValidationError("box columns must each sum to 1 within 1e-10")
        self.table = table

    @property
    def n_players(self) -> int:
        return len(self.input_sizes)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_chsh_d(d: int) -> LinearGame:
    """Two players, d inputs and d outputs each, win iff a + b = x * y in F_d."""
    fld = field_make(*_prime_power(d))
    group = fld.additive_group()
    m = d
    f = np.zeros(m * m, dtype=int)
    for x in range(m):
        xe = fld.element_from_index(x)
        for y in range(m):
            ye = fld.element_from_index(y)
            f[x * m + y] = fld.element_index(field_mul(fld, xe, ye))
    dist = np.full(m * m, 1.0 / (m * m))
    return LinearGame((m, m), group, dist, f)


def build_chshn_d(n: int, d: int) -> LinearGame:
    """n players over F_d; win iff the output sum equals sum_{i<j} x_i * x_j."""
    if n < 2:
        raise ValidationError(f"need at least 2 players, got {n}")
    fld = field_make(*_prime_power(d))
    group = fld.additive_group()
    sizes = (d,) * n
    total = d ** n
    f = np.zeros(total, dtype=int)
    elems = [fld.element_from_index(i) for i in range(d)]
    for idx in range(total):
        xs = unflatten_index(idx, sizes)
        acc = fld.zero
        for i in range(n):
            for j in range(i + 1, n):
                term = field_mul(fld, elems[xs[i]], elems[xs[j]])
                acc = tuple((u + v) % fld.p for u, v in zip(acc, term))
        f[idx] = fld.element_index(acc)
    dist = np.full(total, 1.0 / total)
    return LinearGame(sizes, group, dist, f)


def _prime_power(d: int) -> Tuple[int, int]:
    d = int(d)
    if d < 2:
        raise ValidationError(f"field size must be >= 2, got {d}")
    for p in range(2, d + 1):
        if is_prime(p) and d % p == 0:
            r = 0
            q = d
            while q % p == 0:
                q //= p
                r += 1
            if q != 1:
                raise ValidationError(f"{d} is not a prime power")
            return p, r
    raise ValidationError(f"{d} is not a prime power")


def build_nlc_d(
    d: int,
    n: int,
    h: np.ndarray,
    ptilde: np.ndarray,
) -> LinearGame:
    """Nonlocal-computation game: a + b = h(x_head + y_head) * (x_last + y_last).

    Both players receive n-dit strings over Z_d (d prime); ``h`` and ``ptilde``
    are dense tables over Z_d^(n-1) (0-dim arrays for n = 1).  The referee's
    distribution is ptilde(x_head + y_head) / d^(n+1).
    """
    if not is_prime(d):
        raise ValidationError(f"nonlocal computation requires prime d, got {d}")
    if n < 1:
        raise ValidationError(f"string length must be >= 1, got {n}")
    h = np.asarray(h, dtype=int)
    ptilde = np.asarray(ptilde, dtype=float)
    head_shape = (d,) * (n - 1)
    if h.shape != head_shape or ptilde.shape != head_shape:
        raise ValidationError(f"h and ptilde must have shape {head_shape}")
    if np.any(ptilde < 0) or abs(ptilde.sum() - 1.0) > 1e-9:
        raise ValidationError("ptilde must be a probability distribution")
    ptilde = ptilde / ptilde.sum()
    m = d ** n
    sizes = (m, m)
    f = np.zeros(m * m, dtype=int)
    dist = np.zeros(m * m)
    strings = list(itertools.product(range(d), repeat=n))
    for i, xs in enumerate(strings):
        for j, ys in enumerate(strings):
            head = tuple((a + b) % d for a, b in zip(xs[:-1], ys[:-1]))
            hv = int(h[head]) % d
            f[i * m + j] = (hv * (xs[-1] + ys[-1])) % d
            dist[i * m + j] = float(ptilde[head]) / d ** (n + 1)
    return LinearGame(sizes, cyclic(d), dist, f)


def build_mermin3() -> LinearGame:
    """Three players over Z_3 with the promise x+y+z = 0; win iff a+b+c = xyz."""
    sizes = (3, 3, 3)
    f = np.zeros(27, dtype=int)
    dist = np.zeros(27)
    for idx in range(27):
        x, y, z = unflatten_index(idx, sizes)
        if (x + y + z) % 3 == 0:
            dist[idx] = 1.0 / 9.0
            f[idx] = (x * y * z) % 3
    return LinearGame(sizes, cyclic(3), dist, f)


def build_xor_from_signs(signs: np.ndarray, dist="uniform") -> LinearGame:
    """Binary-output two-player game from a +-1 matrix: f = 0 where +1, 1 where -1."""
    signs = np.asarray(signs)
    if signs.ndim != 2:
        raise ValidationError("sign matrix must be two-dimensional")
    if not np.all(np.isin(signs, (1, -1))):
        raise ValidationError("sign matrix entries must be +1 or -1")
    m_a, m_b = signs.shape
    f = (signs.ravel() < 0).astype(int)
    if isinstance(dist, str):
        if dist != "uniform":
            raise ValidationError(f"unknown distribution spec {dist!r}")
        p = np.full(m_a * m_b, 1.0 / (m_a * m_b))
    else:
        p = np.asarray(dist, dtype=float).ravel()
    return LinearGame((m_a, m_b), cyclic(2), p, f)


def game_signs(game: LinearGame) -> np.ndarray:
    """Recover the +-1 matrix of a two-player binary game."""
    if game.n_players != 2 or game.group.size != 2:
        raise ValidationError("sign matrices exist only for 2-player binary games")
    m_a, m_b = game.input_sizes
    return (1 - 2 * game.f.reshape(m_a, m_b)).astype(int)


def game_sum(g1: LinearGame, g2: LinearGame) -> LinearGame:
    """Sum of two 2-player XOR games: product inputs, product dist, f1 xor f2."""
    for g in (g1, g2):
        if g.n_players != 2 or g.group.size != 2:
            raise ValidationError("game_sum is defined for 2-player binary-output games")
    ma1, mb1 = g1.input_sizes
    ma2, mb2 = g2.input_sizes
    sizes = (ma1 * ma2, mb1 * mb2)
    f1 = g1.f.reshape(ma1, mb1)
    f2 = g2.f.reshape(ma2, mb2)
    p1 = g1.dist.reshape(ma1, mb1)
    p2 = g2.dist.reshape(ma2, mb2)
    # joint input (x1,x2),(y1,y2); flat order pairs (x1 major, x2 minor)
    f = np.zeros((sizes[0], sizes[1]), dtype=int)
    p = np.zeros((sizes[0], sizes[1]))
    for x1 in range(ma1):
        for x2 in range(ma2):
            for y1 in range(mb1):
                for y2 in range(mb2):
                    f[x1 * ma2 + x2, y1 * mb2 + y2] = (f1[x1, y1] + f2[x2, y2]) % 2
                    p[x1 * ma2 + x2, y1 * mb2 + y2] = p1[x1, y1] * p2[x2, y2]
    return LinearGame(sizes, cyclic(2), p.ravel(), f.ravel())


# ---------------------------------------------------------------------------
# game matrices
# ---------------------------------------------------------------------------


@dataclass
class GameMatrixSet:
    """Phi_k matrices for one input bipartition, keyed by character index != e."""

    partition: Partition
    matrices: Dict[int, np.ndarray] = field(default_factory=dict)

    def norm_sum(self) -> float:
        from .numerics import spectral_norm

        return sum(spectral_norm(m) for m in self.matrices.values())


def game_matrices(game: LinearGame, partition: Partition) -> GameMatrixSet:
    """Phi_k[x_S, x_Sc] = p(x) * chi_k(f(x)) for every nontrivial character k."""
    partition.validate(game.n_players)
    members = partition.members
    others = partition.complement(game.n_players).members
    row_sizes = [game.input_sizes[i] for i in members]
    col_sizes = [game.input_sizes[i] for i in others]
    n_rows = product(row_sizes)
    n_cols = product(col_sizes)
    chars = character_table(game.group)

    rows = np.zeros(game.n_inputs, dtype=int)
    cols = np.zeros(game.n_inputs, dtype=int)
    for idx in range(game.n_inputs):
        xs = unflatten_index(idx, game.input_sizes)
        rows[idx] = flatten_index([xs[i] for i in members], row_sizes)
        cols[idx] = flatten_index([xs[i] for i in others], col_sizes)

    out = GameMatrixSet(partition=partition)
    for k in range(1, game.group.size):
        vals = game.dist * chars[k, game.f]
        mat = np.zeros((n_rows, n_cols), dtype=complex)
        np.add.at(mat, (rows, cols), vals)
        out.matrices[k] = mat
    return out


# ---------------------------------------------------------------------------
# boxes
# ---------------------------------------------------------------------------


def _output_sum_indices(group: AbelianGroup, n_players: int) -> np.ndarray:
    """Flat output tuple index -> group index of the sum of the players' outputs."""
    size = group.size
    coords = np.array([group.element_from_index(i) for i in range(size)])
    total = size ** n_players
    sums = np.zeros(total, dtype=int)
    for idx in range(total):
        parts = unflatten_index(idx, (size,) * n_players)
        s = np.zeros(group.rank, dtype=int)
        for a in parts:
            s = (s + coords[a]) % np.array(group.orders)
        sums[idx] = group.element_index(tuple(s))
    return sums


def box_functional(game: LinearGame) -> Box:
    """The no-signaling box that wins the game with certainty.

    P(a_vec|x_vec) = 1/|G|^(n-1) when the outputs sum to f(x_vec), else 0.
    """
    size = game.group.size
    n = game.n_players
    sums = _output_sum_indices(game.group, n)
    table = np.zeros((size ** n, game.n_inputs))
    weight = 1.0 / size ** (n - 1)
    for x in range(game.n_inputs):
        table[sums == game.f[x], x] = weight
    return Box(game.input_sizes, size, table)


def uniform_box(game: LinearGame) -> Box:
    size = game.group.size
    n = game.n_players
    table = np.full((size ** n, game.n_inputs), 1.0 / size ** n)
    return Box(game.input_sizes, size, table)


def success_probability(game: LinearGame, box: Box) -> float:
    """sum_x p(x) P(outputs sum to f(x) | x)."""
    if box.input_sizes != game.input_sizes or box.output_size != game.group.size:
        raise ValidationError("box shape does not match the game")
    sums = _output_sum_indices(game.group, game.n_players)
    win = np.zeros(game.n_inputs)
    for x in range(game.n_inputs):
        win[x] = box.table[sums == game.f[x], x].sum()
    return float(np.dot(game.dist, win))


def validate_no_signaling(box: Box, tol: float = 1e-10) -> Tuple[bool, float]:
    """Check marginal consistency for every proper subset of the players.

    Returns (ok, worst violation): the largest deviation of a subset marginal
    P(a_S|x_S) across the complementary inputs.
    """
    n = box.n_players
    d = box.output_size
    shaped = box.table.reshape((d,) * n + box.input_sizes)
    worst = 0.0
    for r in range(1, n):
        for members in itertools.combinations(range(n), r):
            others = tuple(i for i in range(n) if i not in members)
            marg = shaped.sum(axis=others)  # axes: outputs of S, then all inputs
            # the marginal must not depend on the complementary inputs: compare
            # against the slice with those inputs pinned to 0
            sl = [slice(None)] * marg.ndim
            for player in others:
                sl[r + player] = slice(0, 1)
            base = marg[tuple(sl)]
            worst = max(worst, float(np.max(np.abs(marg - base))))
    return worst <= tol, worst


# ---------------------------------------------------------------------------
# communication-complexity protocol
# ---------------------------------------------------------------------------


@dataclass
class CCResult:
    ok: bool
    dits_communicated: int
    boxes_used: int


def _mod_inverse_matrix(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of a square matrix over Z_d (d prime) by Gaussian elimination."""
    n = v.shape[0]
    aug = np.concatenate([v % d, np.eye(n, dtype=int)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] % d), None)
        if pivot is None:
            raise ValidationError("matrix is singular modulo d")
        aug[[col, pivot]] = aug[[pivot, col]]
        inv = pow(int(aug[col, col]), -1, d)
        aug[col] = (aug[col] * inv) % d
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % d
    return aug[:, n:] % d


def monomial_coefficients(d: int, n: int, f: np.ndarray) -> np.ndarray:
    """Coefficients mu_alpha with f(x) = sum_alpha mu_alpha prod x_i^alpha_i (mod d)."""
    if not is_prime(d):
        raise ValidationError(f"monomial expansion requires prime d, got {d}")
    f = np.asarray(f, dtype=int).reshape((d,) * n) % d
    vander = np.zeros((d, d), dtype=int)
    for x in range(d):
        for a in range(d):
            vander[x, a] = pow(x, a, d) if not (x == 0 and a == 0) else 1
    vinv = _mod_inverse_matrix(vander, d)
    mu = f
    for axis in range(n):
        mu = np.moveaxis(np.tensordot(vinv, np.moveaxis(mu, axis, 0), axes=(1, 0)), 0, axis) % d
    # internal consistency: re-evaluate the polynomial on every input
    for xs in itertools.product(range(d), repeat=n):
        total = 0
        for alphas in itertools.product(range(d), repeat=n):
            term = int(mu[alphas])
            if term == 0:
                continue
            for x, a in zip(xs, alphas):
                term = (term * (pow(x, a, d) if not (x == 0 and a == 0) else 1)) % d
            total = (total + term) % d
        if total != int(f[xs]):
            raise ValidationError("polynomial interpolation failed to reproduce f")
    return mu


def cc_protocol_run(d: int, n: int, f: np.ndarray, trials: int, seed: int = 0) -> CCResult:
    """Simulate the distributed-computation protocol backed by perfect boxes.

    Each of the n players holds one input dit.  Every trial runs the protocol
    on every input tuple: one shared box per nonconstant monomial, then each
    player except the first sends a single dit.  ok is True only if the first
    player reconstructs f exactly every time.
    """
    if not is_prime(d):
        raise ValidationError(f"protocol requires prime d, got {d}")
    if n < 2:
        raise ValidationError("protocol needs at least 2 players")
    f = np.asarray(f, dtype=int).reshape((d,) * n) % d
    mu = monomial_coefficients(d, n, f)
    monomials = [alpha for alpha in itertools.product(range(d), repeat=n) if mu[alpha] and any(alpha)]
    constant = int(mu[(0,) * n])
    rng = np.random.default_rng(seed)
    boxes = 0
    ok = True
    dits_per_round = 0
    for _ in range(trials):
        for xs in itertools.product(range(d), repeat=n):
            shares = [0] * n
            shares[0] = constant
            for alpha in monomials:
                boxes += 1
                target = 1
                for x, a in zip(xs, alpha):
                    target = (target * (pow(x, a, d) if not (x == 0 and a == 0) else 1)) % d
                outs = [int(v) for v in rng.integers(0, d, size=n - 1)]
                outs = [(target - sum(outs)) % d] + outs
                coeff = int(mu[alpha])
                for i in range(n):
                    shares[i] = (shares[i] + coeff * outs[i]) % d
            # players 2..n each send their share to player 1
            dits_per_round = n - 1
            value = sum(shares) % d
            if value != int(f[xs]):
                ok = False
    return CCResult(ok=ok, dits_communicated=dits_per_round, boxes_used=boxes)


def cc_protocol_simulate(d: int, n: int, f: np.ndarray, trials: int, seed: int = 0) -> bool:
    result = cc_protocol_run(d, n, f, trials, seed)
    return result.ok and result.dits_communicated == n - 1


# ---------------------------------------------------------------------------
# game files
# ---------------------------------------------------------------------------


def _group_from_spec(spec, path: str) -> AbelianGroup:
    if not isinstance(spec, dict):
        raise ValidationError(f"{path}: group spec must be an object")
    if "cyclic" in spec:
        orders = spec["cyclic"]
        if not isinstance(orders, list) or not orders:
            raise ValidationError(f"{path}.cyclic: expected a nonempty list of orders")
        return AbelianGroup(tuple(int(d) for d in orders))
    if "field" in spec:
        fs = spec["field"]
        if not isinstance(fs, dict) or "p" not in fs or "r" not in fs:
            raise ValidationError(f"{path}.field: expected an object with `p` and `r`")
        return field_make(int(fs["p"]), int(fs["r"])).additive_group()
    raise ValidationError(f"{path}: group spec needs `cyclic` or `field`")


def parse_game_file(text: str) -> LinearGame:
    """Parse the JSON game format; schema errors carry a path to the offender."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"game file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("$: game file must be a JSON object")
    for key in ("players", "inputs", "group", "distribution", "f"):
        if key not in data:
            raise ValidationError(f"$.{key}: missing required key")
    players = data["players"]
    inputs = data["inputs"]
    if not isinstance(players, int) or players < 1:
        raise ValidationError("$.players: must be a positive integer")
    if not isinstance(inputs, list) or len(inputs) != players:
        raise ValidationError("$.inputs: must list one input count per player")
    sizes = []
    for i, m in enumerate(inputs):
        if not isinstance(m, int) or m < 1:
            raise ValidationError(f"$.inputs[{i}]: must be a positive integer")
        sizes.append(m)
    group = _group_from_spec(data["group"], "$.group")
    total = product(sizes)
    rawdist = data["distribution"]
    if rawdist == "uniform":
        dist = np.full(total, 1.0 / total)
    else:
        if not isinstance(rawdist, list) or len(rawdist) != total:
            raise ValidationError(f"$.distribution: expected {total} probabilities or 'uniform'")
        dist = np.zeros(total)
        for i, v in enumerate(rawdist):
            if not isinstance(v, (int, float)) or v < 0:
                raise ValidationError(f"$.distribution[{i}]: must be a nonnegative number")
            dist[i] = float(v)
        s = dist.sum()
        if abs(s - 1.0) > 1e-9:
            raise ValidationError(f"$.distribution: sums to {s!r}, expected 1 within 1e-9")
        dist = dist / s
    rawf = data["f"]
    if not isinstance(rawf, list) or len(rawf) != total:
        raise ValidationError(f"$.f: expected {total} group-element indices")
    fvals = np.zeros(total, dtype=int)
    for i, v in enumerate(rawf):
        if not isinstance(v, int) or v < 0 or v >= group.size:
            raise ValidationError(f"$.f[{i}]: must be an integer in [0, {group.size})")
        fvals[i] = v
    return LinearGame(tuple(sizes), group, dist, fvals)


def serialize_game(game: LinearGame) -> str:
    """Serialize to the JSON game format with full-precision probabilities."""
    payload = {
        "players": game.n_players,
        "inputs": list(game.input_sizes),
        "group": {"cyclic": list(game.group.orders)},
        "distribution": [float(p) for p in game.dist],
        "f": [int(v) for v in game.f],
    }
    return json.dumps(payload, indent=2)
