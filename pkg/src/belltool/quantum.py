"""Explicit quantum strategies: states, projective measurements, Born-rule
boxes, the GHZ construction for the promise game over Z_3, the optimal CHSH
strategy, and noisy-state sweeps.

Everything is dense (global dimension <= 27 in this package), with Kronecker
products materialized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import AbelianGroup, character_table, cyclic
from .errors import ValidationError
from .games import Box, LinearGame, product, success_probability, unflatten_index
from .numerics import hermitian_eig
from .values import diew_bound


@dataclass
class PureState:
    """Normalized state vector over a tensor product of local dimensions."""

    dims: Tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != product(self.dims):
            raise ValidationError(
                f"state has {amps.size} amplitudes, dims {self.dims} need {product(self.dims)}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValidationError("state vector must have unit norm within 1e-12")
        self.amplitudes = amps

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass
class DensityMatrix:
    """Positive unit-trace operator over a tensor product of local dimensions."""

    dims: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        total = product(self.dims)
        if mat.shape != (total, total):
            raise ValidationError(f"density matrix shape {mat.shape}, expected {(total, total)}")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValidationError("density matrix must be Hermitian within 1e-10")
        if abs(np.trace(mat).real - 1.0) > 1e-10:
            raise ValidationError("density matrix must have unit trace within 1e-10")
        if hermitian_eig(mat).eigenvalues[-1] < -1e-9:
            raise ValidationError("density matrix must be positive within -1e-9")
        self.matrix = mat


@dataclass
class MeasurementFamily:
    """effects[player][input][outcome]: PSD, summing to identity per input."""

    effects: Tuple[Tuple[Tuple[np.ndarray, ...], ...], ...]

    def __post_init__(self):
        cleaned = []
        for p, player in enumerate(self.effects):
            rows = []
            for x, effect_list in enumerate(player):
                mats = tuple(np.asarray(m, dtype=complex) for m in effect_list)
                dim = mats[0].shape[0]
                total = np.zeros((dim, dim), dtype=complex)
                for a, m in enumerate(mats):
                    if m.shape != (dim, dim):
                        raise ValidationError(f"effect {p}/{x}/{a} has shape {m.shape}")
                    if np.max(np.abs(m - m.conj().T)) > 1e-9:
                        raise ValidationError(f"effect {p}/{x}/{a} is not Hermitian")
                    if hermitian_eig(m).eigenvalues[-1] < -1e-9:
                        raise ValidationError(f"effect {p}/{x}/{a} is not positive")
                    total += m
                if np.max(np.abs(total - np.eye(dim))) > 1e-9:
                    raise ValidationError(f"effects of player {p} input {x} do not sum to identity")
                rows.append(mats)
            cleaned.append(tuple(rows))
        self.effects = tuple(cleaned)

    @property
    def n_players(self) -> int:
        return len(self.effects)

    def local_dim(self, player: int) -> int:
        return self.effects[player][0][0].shape[0]

    def n_inputs(self, player: int) -> int:
        return len(self.effects[player])

    def n_outcomes(self, player: int) -> int:
        return len(self.effects[player][0])

    def observable(self, player: int, x: int, k: int, group: AbelianGroup) -> np.ndarray:
        """A_x^k = sum_a conj(chi_k(a)) M_x^a for the given output group."""
        chars = character_table(group)
        dim = self.local_dim(player)
        out = np.zeros((dim, dim), dtype=complex)
        for a, effect in enumerate(self.effects[player][x]):
            out += np.conj(chars[k, a]) * effect
        return out


def born_box(state: DensityMatrix | PureState, meas: MeasurementFamily) -> Box:
    """P(a_vec|x_vec) = Tr((M_1 x ... x M_n) rho); validated Box."""
    rho = state.density() if isinstance(state, PureState) else state
    n = meas.n_players
    if len(rho.dims) != n:
        raise ValidationError("state and measurement player counts differ")
    for i, d in enumerate(rho.dims):
        if meas.local_dim(i) != d:
            raise ValidationError(f"player {i}: state dim {d} vs effect dim {meas.local_dim(i)}")
    d_out = meas.n_outcomes(0)
    if any(meas.n_outcomes(i) != d_out for i in range(n)):
        raise ValidationError("all players must share one outcome count")
    input_sizes = tuple(meas.n_inputs(i) for i in range(n))
    n_in = product(input_sizes)
    table = np.zeros((d_out ** n, n_in))
    out_sizes = (d_out,) * n
    for x_flat in range(n_in):
        xs = unflatten_index(x_flat, input_sizes)
        for a_flat in range(d_out ** n):
            avec = unflatten_index(a_flat, out_sizes)
            effect = meas.effects[0][xs[0]][avec[0]]
            for i in range(1, n):
                effect = np.kron(effect, meas.effects[i][xs[i]][avec[i]])
            table[a_flat, x_flat] = max(float(np.sum(effect.T * rho.matrix).real), 0.0)
    return Box(input_sizes, d_out, table)


def correlators_from_box(box: Box, group: AbelianGroup) -> np.ndarray:
    """Fourier transform of a 2-player box: C[i, j, x, y] = <A_x^i B_y^j>."""
    if box.n_players != 2:
        raise ValidationError("correlators_from_box handles 2-player boxes")
    if box.output_size != group.size:
        raise ValidationError("output group size does not match the box")
    d = group.size
    chars = character_table(group)
    m_a, m_b = box.input_sizes
    shaped = box.table.reshape(d, d, m_a, m_b)
    return np.einsum("ia,jb,abxy->ijxy", np.conj(chars), np.conj(chars), shaped)


def correlators_from_state(
    state: PureState, meas: MeasurementFamily, group: AbelianGroup
) -> np.ndarray:
    """<psi| A_x^i (x) B_y^j |psi> for a 2-player pure-state strategy."""
    if meas.n_players != 2:
        raise ValidationError("correlators_from_state handles 2-player strategies")
    d = group.size
    m_a, m_b = meas.n_inputs(0), meas.n_inputs(1)
    out = np.zeros((d, d, m_a, m_b), dtype=complex)
    psi = state.amplitudes
    for i in range(d):
        for j in range(d):
            for x in range(m_a):
                ax = meas.observable(0, x, i, group)
                for y in range(m_b):
                    by = meas.observable(1, y, j, group)
                    out[i, j, x, y] = psi.conj() @ np.kron(ax, by) @ psi
    return out


# ---------------------------------------------------------------------------
# canonical states and measurements
# ---------------------------------------------------------------------------


def ghz3_state() -> PureState:
    """(|000> + |111> + |222>)/sqrt(3) on three qutrits."""
    amps = np.zeros(27, dtype=complex)
    for k in range(3):
        amps[k * 9 + k * 3 + k] = 1.0 / np.sqrt(3.0)
    return PureState((3, 3, 3), amps)


def partial_trace_single(state: PureState, keep: int) -> np.ndarray:
    """Reduced density matrix of one subsystem of a pure state."""
    dims = state.dims
    psi = state.amplitudes.reshape(dims)
    axes = list(range(len(dims)))
    axes.remove(keep)
    mat = np.tensordot(psi, psi.conj(), axes=(axes, axes))
    return mat


# exponents (in units of 2*pi/9, i.e. zeta^(q/3) with zeta = e^(2*pi*i/3))
# of the rank-1 projector vectors winning the promise game; players 1 and 2
# share one family, player 3 uses the second
_MERMIN_AB = {
    0: ((0, 4, 0), (6, 7, 0), (3, 1, 0)),
    1: ((1, 0, 0), (7, 3, 0), (4, 6, 0)),
    2: ((8, 8, 0), (5, 2, 0), (2, 5, 0)),
}
_MERMIN_C = {
    0: ((0, 1, 0), (6, 4, 0), (3, 7, 0)),
    1: ((1, 6, 0), (7, 0, 0), (4, 3, 0)),
    2: ((8, 5, 0), (5, 8, 0), (2, 2, 0)),
}


def _mermin_vector(thirds: Sequence[int]) -> np.ndarray:
    return np.exp(2j * np.pi * np.asarray(thirds) / 9.0) / np.sqrt(3.0)


def mermin3_measurements() -> MeasurementFamily:
    """Projective qutrit measurements winning the promise game on GHZ_3.

    The derived observables A_x^k are traceless for k != 0, which makes the
    noisy-state success probability exactly linear in the visibility.
    """
    def projectors(table):
        rows = []
        for x in range(3):
            mats = tuple(
                np.outer(_mermin_vector(table[x][a]), _mermin_vector(table[x][a]).conj())
                for a in range(3)
            )
            rows.append(mats)
        return tuple(rows)

    ab = projectors(_MERMIN_AB)
    return MeasurementFamily((ab, ab, projectors(_MERMIN_C)))


def noisy_ghz3(visibility: float) -> DensityMatrix:
    """V |GHZ_3><GHZ_3| + (1 - V) I/27."""
    if not 0.0 <= visibility <= 1.0:
        raise ValidationError(f"visibility must lie in [0, 1], got {visibility}")
    ghz = ghz3_state().density().matrix
    mixed = np.eye(27, dtype=complex) / 27.0
    return DensityMatrix((3, 3, 3), visibility * ghz + (1.0 - visibility) * mixed)


def chsh_optimal_strategy() -> Tuple[PureState, MeasurementFamily]:
    """Singlet plus the standard Z/X observable pairs saturating the quantum value.

    Outcome labels on the second player follow the -1/+1 eigenspace order so
    that the resulting box wins `a xor b = x and y` with probability
    (2 + sqrt 2)/4 rather than its complement.
    """
    singlet = PureState((2, 2), np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0))
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    alice_obs = [sz, sx]
    bob_obs = [(sz + sx) / np.sqrt(2.0), (sz - sx) / np.sqrt(2.0)]
    eye = np.eye(2)
    alice = tuple(((eye + obs) / 2.0, (eye - obs) / 2.0) for obs in alice_obs)
    bob = tuple(((eye - obs) / 2.0, (eye + obs) / 2.0) for obs in bob_obs)
    return singlet, MeasurementFamily((alice, bob))


# ---------------------------------------------------------------------------
# DIEW evaluation
# ---------------------------------------------------------------------------


@dataclass
class DiewReport:
    quantum: float
    bisep_bound: float
    witnessed: bool
    traceless: bool
    visibility_threshold_exact: Optional[float]
    visibility_threshold: Optional[float]


def diew_verdict(
    game: LinearGame,
    state: DensityMatrix | PureState,
    meas: MeasurementFamily,
) -> DiewReport:
    """Compare a tripartite strategy against the biseparable norm bound.

    Genuine tripartite entanglement is witnessed when the strategy value
    exceeds the bound.  When the strategy's observables are traceless, mixing
    the state with white noise scales the value linearly, so the visibility at
    which the witness stops firing is reported both exactly and rounded up to
    the two-decimal grid (the conservative guarantee).
    """
    if game.n_players != 3:
        raise ValidationError("DIEW evaluation needs a 3-player game")
    box = born_box(state, meas)
    if box.input_sizes != game.input_sizes or box.output_size != game.group.size:
        raise ValidationError("strategy shape does not match the game")
    omega = success_probability(game, box)
    bound = diew_bound(game)
    witnessed = omega > bound + 1e-9
    traceless = _observables_traceless(meas, game.group)
    exact = None
    grid = None
    if traceless and omega > 1.0 / game.group.size:
        exact = (bound - 1.0 / game.group.size) / (omega - 1.0 / game.group.size)
        if exact < 1.0:
            grid = (math.floor(exact * 100) + 1) / 100.0
    return DiewReport(
        quantum=omega,
        bisep_bound=bound,
        witnessed=witnessed,
        traceless=traceless,
        visibility_threshold_exact=exact,
        visibility_threshold=grid,
    )


def _observables_traceless(meas: MeasurementFamily, group: AbelianGroup) -> bool:
    for k in range(1, group.size):
        for player in range(meas.n_players):
            for x in range(meas.n_inputs(player)):
                if abs(np.trace(meas.observable(player, x, k, group))) > 1e-10:
                    return False
    return True


# ---------------------------------------------------------------------------
# strategy files
# ---------------------------------------------------------------------------


def serialize_strategy(state: PureState, meas: MeasurementFamily) -> str:
    interleaved: List[float] = []
    for amp in state.amplitudes:
        interleaved.extend([float(amp.real), float(amp.imag)])

    def encode_matrix(m):
        return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]

    grouped = []
    for p in range(meas.n_players):
        rows = []
        for x in range(meas.n_inputs(p)):
            rows.append([encode_matrix(m) for m in meas.effects[p][x]])
        grouped.append(rows)
    payload = {
        "dims": list(state.dims),
        "state": interleaved,
        "measurements": grouped,
    }
    return json.dumps(payload, indent=2)


def parse_strategy(text: str) -> Tuple[PureState, MeasurementFamily]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"strategy file is not valid JSON: {exc}") from exc
    for key in ("dims", "state", "measurements"):
        if key not in data:
            raise ValidationError(f"$.{key}: missing required key")
    dims = tuple(int(d) for d in data["dims"])
    raw = data["state"]
    if not isinstance(raw, list) or len(raw) != 2 * product(dims):
        raise ValidationError("$.state: expected interleaved re/im pairs matching dims")
    amps = np.array(raw[0::2], dtype=float) + 1j * np.array(raw[1::2], dtype=float)
    state = PureState(dims, amps)
    meas_raw = data["measurements"]
    if not isinstance(meas_raw, list) or len(meas_raw) != len(dims):
        raise ValidationError("$.measurements: expected one entry per player")
    players = []
    for p, rows in enumerate(meas_raw):
        inputs = []
        for x, effect_list in enumerate(rows):
            mats = []
            for a, mat in enumerate(effect_list):
                arr = np.array(
                    [[complex(v[0], v[1]) for v in row] for row in mat], dtype=complex
                )
                mats.append(arr)
            inputs.append(tuple(mats))
        players.append(tuple(inputs))
    return state, MeasurementFamily(tuple(players))
