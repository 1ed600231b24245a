"""Exclusivity graphs of binary-output games: construction, closed-form
adjacency and spectrum, exact independence number, strong products, and the
explicit witness matrix that certifies Shannon capacity = independence number.

Vertices of a game graph are triples (x, y, a) flattened in C-order, so the
adjacency tensor expression and the edge-rule construction index identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ResourceError, ValidationError
from .numerics import hermitian_eig, singular_values, spectral_norm
from .values import no_advantage_sufficient

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass
class Graph:
    """Simple undirected graph: symmetric 0/1 adjacency, no self-loops."""

    adjacency: np.ndarray
    labels: Optional[List] = None

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValidationError("adjacency must be a square matrix")
        if not np.array_equal(adj, adj.T):
            raise ValidationError("adjacency must be symmetric")
        if np.any(np.diag(adj) != 0):
            raise ValidationError("self-loops are not allowed")
        if not np.all(np.isin(adj, (0, 1))):
            raise ValidationError("adjacency entries must be 0 or 1")
        self.adjacency = adj.astype(np.int8)

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> List[Tuple[int, int]]:
        out = []
        n = self.n_vertices
        for u in range(n):
            for v in range(u + 1, n):
                if self.adjacency[u, v]:
                    out.append((u, v))
        return out


def cycle_graph(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = 1
    return Graph(adj)


def export_graph(graph: Graph) -> str:
    """Adjacency-list text: first line the vertex count, then one edge per line."""
    lines = [str(graph.n_vertices)]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty graph file")
    n = int(lines[0])
    adj = np.zeros((n, n), dtype=np.int8)
    for ln in lines[1:]:
        u, v = (int(t) for t in ln.split())
        adj[u, v] = adj[v, u] = 1
    return Graph(adj)


# ---------------------------------------------------------------------------
# XOR-game graphs
# ---------------------------------------------------------------------------


def _check_signs(signs) -> np.ndarray:
    signs = np.asarray(signs)
    if signs.ndim != 2 or signs.shape[0] != signs.shape[1]:
        raise ValidationError("sign matrix must be square")
    if not np.all(np.isin(signs, (1, -1))):
        raise ValidationError("sign matrix entries must be +1 or -1")
    return signs.astype(float)


@dataclass
class XorGameGraph:
    """Exclusivity graph of a uniform-input XOR game: 2m^2 vertices (x, y, a)."""

    m: int
    signs: np.ndarray
    graph: Graph = field(init=False)

    def __post_init__(self):
        self.signs = _check_signs(self.signs)
        m = self.m
        n = 2 * m * m
        adj = np.zeros((n, n), dtype=np.int8)
        verts = [(x, y, a) for x in range(m) for y in range(m) for a in range(2)]
        for i, (x, y, a) in enumerate(verts):
            for j in range(i + 1, n):
                x2, y2, a2 = verts[j]
                alice = x == x2 and a != a2
                bob = y == y2 and (-1) ** ((a + a2) % 2) != self.signs[x, y] * self.signs[x2, y2]
                if alice or bob:
                    adj[i, j] = adj[j, i] = 1
        self.graph = Graph(adj, labels=verts)
        self._verify()

    def vertex_index(self, x: int, y: int, a: int) -> int:
        return (x * self.m + y) * 2 + a

    def _verify(self):
        m = self.m
        degs = self.graph.degrees()
        if not np.all(degs == 2 * m - 1):
            raise ValidationError("game graph is not (2m-1)-regular")
        for x in range(m):
            for y in range(m):
                if not self.graph.adjacency[self.vertex_index(x, y, 0), self.vertex_index(x, y, 1)]:
                    raise ValidationError("game graph lacks its perfect matching")
        if m <= 5:  # exhaustive triple scan
            a = self.graph.adjacency.astype(int)
            if np.any((a @ a) * a):
                raise ValidationError("game graph contains a triangle")


def xor_game_graph(signs) -> XorGameGraph:
    signs = _check_signs(signs)
    return XorGameGraph(m=signs.shape[0], signs=signs)


def adjacency_closed_form(signs) -> np.ndarray:
    """Tensor expression for the game-graph adjacency; equals the edge rule."""
    signs = _check_signs(signs)
    m = signs.shape[0]
    ones = np.ones((m, m))
    eye = np.eye(m)
    eye2 = np.eye(2)
    d = np.diag(signs.ravel())
    term1 = np.kron(np.kron(eye, ones - eye), SIGMA_X)
    term2 = 0.5 * np.kron(np.kron(ones, eye), eye2 + SIGMA_X)
    term3 = -0.5 * np.kron(d @ np.kron(ones, eye) @ d, eye2 - SIGMA_X)
    return term1 + term2 + term3


@dataclass
class SpectrumReport:
    computed: np.ndarray
    predicted: np.ndarray
    max_mismatch: float

    @property
    def ok(self) -> bool:
        return self.max_mismatch <= 1e-7


def graph_spectrum_check(signs) -> SpectrumReport:
    """Compare the adjacency spectrum against its closed-form multiset.

    The prediction uses the m singular values lambda_z of the sign matrix:
    {2m-1; (m-1) x (2m-2); -1 x (m-1)^2; 1-m +- lambda_z; 1 x m(m-2)}.
    """
    signs = _check_signs(signs)
    m = signs.shape[0]
    if m < 2 or m > 12:
        raise ResourceError(f"spectrum check supports 2 <= m <= 12, got {m}")
    adj = adjacency_closed_form(signs)
    computed = hermitian_eig(adj).eigenvalues
    lam = singular_values(signs)
    predicted = (
        [2 * m - 1]
        + [m - 1] * (2 * m - 2)
        + [-1] * ((m - 1) ** 2)
        + [1] * (m * (m - 2))
        + [1 - m + z for z in lam]
        + [1 - m - z for z in lam]
    )
    predicted = np.sort(np.array(predicted, dtype=float))[::-1]
    mismatch = float(np.max(np.abs(np.sort(computed) - np.sort(predicted))))
    return SpectrumReport(computed=computed, predicted=predicted, max_mismatch=mismatch)


# ---------------------------------------------------------------------------
# independence number
# ---------------------------------------------------------------------------


def _clique_cover_bound(cand: int, masks: List[int]) -> int:
    """Greedy clique cover of the candidate set; its size bounds independence."""
    classes: List[int] = []
    rest = cand
    while rest:
        v = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        placed = False
        for i, cls in enumerate(classes):
            if cls & ~masks[v] == 0:  # v adjacent to every member
                classes[i] = cls | (1 << v)
                placed = True
                break
        if not placed:
            classes.append(1 << v)
    return len(classes)


def _mis_size(cand: int, masks: List[int], degrees, best_known: int = 0) -> int:
    """Exact maximum independent set size on the candidate bitmask."""
    best = best_known
    stack = [(cand, 0)]
    while stack:
        cand_mask, size = stack.pop()
        if cand_mask == 0:
            best = max(best, size)
            continue
        if size + _clique_cover_bound(cand_mask, masks) <= best:
            continue
        # branch on the highest-degree candidate vertex
        v = max(_bits(cand_mask), key=lambda u: (degrees[u], -u))
        stack.append((cand_mask & ~(1 << v), size))  # exclude v
        stack.append((cand_mask & ~((1 << v) | masks[v]), size + 1))  # include v
    return best


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask &= mask - 1


def _exists_mis(cand: int, k: int, masks: List[int], degrees) -> bool:
    """Decision version: does the candidate set hold an independent set of size k?"""
    if k <= 0:
        return True
    return _mis_size(cand, masks, degrees, best_known=k - 1) >= k


def independence_number(graph: Graph, budget: int = 64) -> Tuple[int, Tuple[int, ...]]:
    """Exact independence number with the lexicographically smallest witness."""
    n = graph.n_vertices
    if n > budget:
        raise ResourceError(f"{n} vertices exceed the independence budget {budget}")
    adj = graph.adjacency
    masks = [int(sum(1 << j for j in range(n) if adj[i, j])) for i in range(n)]
    degrees = [int(adj[i].sum()) for i in range(n)]
    full = (1 << n) - 1
    alpha = _mis_size(full, masks, degrees)
    # lexicographically smallest witness: greedily commit vertices in order
    witness: List[int] = []
    cand = full
    need = alpha
    for v in range(n):
        if not (cand >> v) & 1:
            continue
        rest = cand & ~((1 << v) | masks[v])
        if _exists_mis(rest, need - 1, masks, degrees):
            witness.append(v)
            cand = rest
            need -= 1
            if need == 0:
                break
    return alpha, tuple(witness)


def strong_product(g: Graph, h: Graph, budget: int = 4096) -> Graph:
    """Vertices are pairs; adjacency = adjacent-or-equal in both coordinates."""
    n = g.n_vertices * h.n_vertices
    if n > budget:
        raise ResourceError(f"product with {n} vertices exceeds budget {budget}")
    eye_g = np.eye(g.n_vertices, dtype=int)
    eye_h = np.eye(h.n_vertices, dtype=int)
    adj = np.kron(g.adjacency + eye_g, h.adjacency + eye_h) - np.eye(n, dtype=int)
    return Graph(adj.astype(np.int8))


# ---------------------------------------------------------------------------
# Lovasz witness and Shannon certification
# ---------------------------------------------------------------------------


def lovasz_witness_value(signs, alpha: Optional[float] = None) -> float:
    """Maximum eigenvalue of the explicit Lovasz witness matrix.

    The witness family J (x) J (x) (I + sX) + a*Adj + b*I (x) I (x) sX has ones
    on the diagonal and on every non-edge, so its top eigenvalue upper-bounds
    the Lovasz number.  With ``alpha`` given, uses the certifying choice
    a = -m, b = alpha - m; with alpha=None picks b minimizing the eigenvalue,
    which lands at m(m + ||signs||)/2.
    """
    signs = _check_signs(signs)
    m = signs.shape[0]
    if m < 2:
        raise ValidationError("witness construction needs m >= 2")
    gg = xor_game_graph(signs)
    a_coef = -float(m)
    if alpha is None:
        b_coef = m * (m + spectral_norm(signs)) / 2.0 - m
    else:
        b_coef = float(alpha) - m
    ones = np.ones((m, m))
    witness = (
        np.kron(np.kron(ones, ones), np.eye(2) + SIGMA_X)
        + a_coef * gg.graph.adjacency
        + b_coef * np.kron(np.eye(m * m), SIGMA_X)
    )
    # construction validity: ones on the diagonal and on every non-edge
    fixed = (gg.graph.adjacency == 0)
    if not np.allclose(witness[fixed], 1.0, atol=1e-12):
        raise ValidationError("witness matrix violates its fixed-entry pattern")
    return float(hermitian_eig(witness).eigenvalues[0])


@dataclass
class ShannonReport:
    """Outcome of the Shannon-capacity certification for a uniform XOR game."""

    certified: bool
    alpha: Optional[int]
    alpha_source: str  # "search" or "closed-form"
    sign_norm: float
    witness_value: Optional[float]
    vectors_found: bool


def shannon_certify(signs, budget: int = 64) -> ShannonReport:
    """Certify Theta(G) = alpha(G) for the game graph of a uniform XOR game.

    Certification requires +-1 top singular vectors of the sign matrix and the
    witness eigenvalue matching alpha.  When the graph exceeds the exact
    independence budget, alpha comes from the closed form m(m + ||signs||)/2,
    which is valid exactly in the certified regime.
    """
    signs = _check_signs(signs)
    m = signs.shape[0]
    norm = spectral_norm(signs)
    vectors = no_advantage_sufficient(signs)
    found = vectors is not None
    n_vertices = 2 * m * m
    alpha: Optional[int] = None
    source = "search"
    if n_vertices <= budget:
        gg = xor_game_graph(signs)
        alpha, _ = independence_number(gg.graph, budget=budget)
    elif found:
        source = "closed-form"
        closed = m * (m + norm) / 2.0
        alpha = int(round(closed))
        if abs(closed - alpha) > 1e-7:
            raise ValidationError("closed-form alpha is not an integer; cannot certify")
    else:
        return ShannonReport(False, None, "unavailable", norm, None, False)
    witness = lovasz_witness_value(signs, alpha)
    certified = found and abs(witness - alpha) <= 1e-7
    return ShannonReport(certified, alpha, source, norm, witness, found)
