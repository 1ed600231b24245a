import itertools

import numpy as np
import pytest

from belltool.errors import ResourceError, ValidationError
from belltool.games import (
    Partition,
    build_chsh_d,
    build_chshn_d,
    build_mermin3,
    build_nlc_d,
    build_xor_from_signs,
    game_matrices,
    game_signs,
)
from belltool.numerics import spectral_norm
from belltool.values import (
    DeterministicStrategy,
    analyze,
    biseparable_bound,
    chshd_bound,
    classical_value,
    deterministic_box,
    diew_bound,
    linear_norm_bound,
    linear_norm_bound_best,
    no_advantage_iff,
    no_advantage_sufficient,
    ns_value,
    strategy_success,
    triviality_check,
    xor_norm_bound,
    xor_quantum_bias,
)

EX_SIGNS = np.array(
    [[1, -1, -1, 1], [-1, -1, 1, -1], [-1, 1, -1, -1], [1, -1, -1, 1]]
)


def excor_game(p, q):
    """Anti-circulant family with first row (p, q, q, -p), |p|+|q| = 1/8."""
    row = [p, q, q, -p]
    mat = np.array([[row[(x + y) % 4] for y in range(4)] for x in range(4)])
    signs = np.where(mat >= 0, 1, -1)
    dist = np.abs(mat).ravel()
    dist = dist / dist.sum()
    return build_xor_from_signs(signs, dist)


def brute_force_classical(game):
    """Independent oracle: plain loop over all deterministic strategies."""
    size = game.group.size
    best = -1.0
    spaces = [itertools.product(range(size), repeat=m) for m in game.input_sizes]
    for combo in itertools.product(*spaces):
        val = strategy_success(game, DeterministicStrategy(tuple(combo)))
        best = max(best, val)
    return best


def test_classical_chsh():
    value, strategy = classical_value(build_chsh_d(2))
    assert value == 0.75
    assert strategy_success(build_chsh_d(2), strategy) == 0.75


def test_classical_matches_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(5):
        signs = rng.choice([-1, 1], size=(3, 3))
        g = build_xor_from_signs(signs)
        value, strategy = classical_value(g)
        assert value == pytest.approx(brute_force_classical(g), abs=1e-12)
        assert strategy_success(g, strategy) == pytest.approx(value, abs=1e-12)


def test_classical_example_game():
    g = build_xor_from_signs(EX_SIGNS)
    value, _ = classical_value(g)
    assert value == 0.875


def test_classical_all_win():
    g = build_xor_from_signs(np.ones((3, 3), dtype=int))
    value, strategy = classical_value(g)
    assert value == 1.0
    assert strategy.flat() == (0,) * 6  # lexicographically smallest optimum


def test_classical_three_player():
    value, strategy = classical_value(build_mermin3())
    assert strategy_success(build_mermin3(), strategy) == pytest.approx(value)
    # oracle: brute force over all 27^3 strategies is too slow here, but the
    # Mermin game admits a perfect check against a smaller exhaustive scan of
    # player-wise affine strategies, plus the bound value <= diew bound later.
    assert 0.0 < value <= 1.0


def test_classical_budget_guard():
    with pytest.raises(ResourceError):
        classical_value(build_chsh_d(9), budget=10 ** 6)


def test_classical_tie_break_lex_smallest():
    # all-win game over Z_3: any constant-sum strategy wins; smallest is zeros
    g = build_xor_from_signs(np.ones((2, 2), dtype=int))
    _, strategy = classical_value(g)
    assert strategy.flat() == (0, 0, 0, 0)


def test_classical_workers_bit_identical():
    g = build_nlc_d(3, 2, np.arange(3), np.full(3, 1 / 3))
    v1, s1 = classical_value(g, workers=1)
    v2, s2 = classical_value(g, workers=2)
    assert v1 == v2
    assert s1 == s2


def test_ns_value_chsh():
    assert ns_value(build_chsh_d(2)) == pytest.approx(1.0, abs=1e-9)


def test_ns_value_concentrated():
    g = build_xor_from_signs(np.array([[1, -1], [1, 1]]), np.array([0.0, 1.0, 0.0, 0.0]))
    assert ns_value(g) == pytest.approx(1.0, abs=1e-9)


def test_ns_value_chsh3():
    assert ns_value(build_chsh_d(3)) == pytest.approx(1.0, abs=1e-9)


def test_xor_bias_chsh():
    phi = 0.25 * np.array([[1.0, 1.0], [1.0, -1.0]])
    bias, strat = xor_quantum_bias(phi, restarts=4, seed=0)
    assert bias == pytest.approx(1 / np.sqrt(2), abs=1e-8)
    assert strat.converged
    assert strat.gap <= 1e-6
    assert 0.5 * (1 + bias) == pytest.approx((2 + np.sqrt(2)) / 4, abs=1e-6)


def test_xor_bias_example_game():
    bias, _ = xor_quantum_bias(EX_SIGNS / 16.0, restarts=8, seed=1)
    assert bias == pytest.approx(0.75, abs=1e-6)


def test_xor_bias_rank_one():
    phi = np.full((2, 2), 0.25)
    bias, _ = xor_quantum_bias(phi, restarts=2, seed=0)
    assert bias == pytest.approx(1.0, abs=1e-9)  # sum of |entries|


def test_xor_bias_unit_vectors():
    bias, strat = xor_quantum_bias(EX_SIGNS / 16.0, restarts=2, seed=0)
    assert np.allclose(np.linalg.norm(strat.u, axis=1), 1.0, atol=1e-10)
    assert np.allclose(np.linalg.norm(strat.v, axis=1), 1.0, atol=1e-10)


def test_xor_norm_bound_chsh():
    phi = 0.25 * np.array([[1.0, 1.0], [1.0, -1.0]])
    assert xor_norm_bound(phi) == pytest.approx((2 + np.sqrt(2)) / 4, abs=1e-10)


def test_xor_norm_bound_all_ones():
    for m in (2, 3, 5):
        phi = np.full((m, m), 1.0 / m ** 2)
        assert xor_norm_bound(phi) == pytest.approx(1.0, abs=1e-10)


def test_xor_norm_bound_excor_matches_eig_oracle():
    g = excor_game(1 / 8, 0.0)
    phi = np.real(game_matrices(g, Partition((0,))).matrices[1])
    # oracle: top eigenvalue of phi^T phi via numpy
    top = np.sqrt(np.linalg.eigvalsh(phi.T @ phi).max())
    assert xor_norm_bound(phi) == pytest.approx(0.5 * (1 + 4 * top), abs=1e-10)


def test_linear_norm_bound_chsh3():
    g = build_chsh_d(3)
    bound = linear_norm_bound(g, Partition((0,)))
    assert bound == pytest.approx(1 / 3 + 2 / (3 * np.sqrt(3)), abs=1e-10)


def test_linear_norm_bound_chshn_independent_of_n():
    expected = 1 / 3 + 2 / (3 * np.sqrt(3))
    for n in (2, 3):
        g = build_chshn_d(n, 3)
        bound = linear_norm_bound(g, Partition((0,)))
        assert bound == pytest.approx(expected, abs=1e-9)


def test_linear_norm_bound_z2_reduces_to_xor():
    g = build_chsh_d(2)
    phi = np.real(game_matrices(g, Partition((0,))).matrices[1])
    assert linear_norm_bound(g, Partition((0,))) == pytest.approx(
        xor_norm_bound(phi), abs=1e-12
    )


def test_linear_norm_bound_best_partition():
    g = build_mermin3()
    bound, part = linear_norm_bound_best(g)
    assert 0 in part.members
    singles = min(linear_norm_bound(g, Partition((i,))) for i in range(3))
    assert bound <= singles + 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7, 8, 9])
def test_chshd_bound_closed_form(d):
    assert chshd_bound(d) == pytest.approx(1 / d + (d - 1) / (d * np.sqrt(d)), abs=1e-14)
    g = build_chsh_d(d)
    assert linear_norm_bound(g, Partition((0,))) == pytest.approx(chshd_bound(d), abs=1e-10)


def test_chshd_bound_rejects_bad_d():
    with pytest.raises(ValidationError):
        chshd_bound(6)


def test_no_advantage_iff_example_true():
    g = build_xor_from_signs(EX_SIGNS)
    value, strategy = classical_value(g)
    cert = no_advantage_iff(EX_SIGNS / 16.0, strategy)
    assert cert.verdict
    assert cert.spectral_radius == pytest.approx(1.0, abs=1e-10)
    assert np.all(cert.sigma_diag > 0) and np.all(cert.lambda_diag > 0)


def test_no_advantage_iff_chsh_false():
    g = build_chsh_d(2)
    _, strategy = classical_value(g)
    phi = 0.25 * np.array([[1.0, 1.0], [1.0, -1.0]])
    cert = no_advantage_iff(phi, strategy)
    assert not cert.verdict


def test_no_advantage_iff_nlc_one_bit():
    g = build_nlc_d(2, 1, np.array(1), np.array(1.0))
    _, strategy = classical_value(g)
    phi = np.real(game_matrices(g, Partition((0,))).matrices[1])
    cert = no_advantage_iff(phi, strategy)
    assert cert.verdict


def test_no_advantage_iff_rejects_zero_row():
    phi = np.array([[0.0, 0.0], [1.0, -1.0]])
    with pytest.raises(ValidationError):
        no_advantage_iff(phi, DeterministicStrategy(((0, 0), (0, 0))))


def test_no_advantage_sufficient_excor_found():
    for p, q in [(1 / 8, 0.0), (1 / 16, 1 / 16), (0.02, 0.105), (0.0, 1 / 8), (0.09, 0.035)]:
        g = excor_game(p, q)
        phi = np.real(game_matrices(g, Partition((0,))).matrices[1])
        found = no_advantage_sufficient(phi)
        assert found is not None
        a, b = found
        assert np.all(np.isin(a, (1.0, -1.0))) and np.all(np.isin(b, (1.0, -1.0)))
        assert a @ phi @ b == pytest.approx(4 * spectral_norm(phi), abs=1e-8)


def test_no_advantage_sufficient_chsh_absent():
    phi = 0.25 * np.array([[1.0, 1.0], [1.0, -1.0]])
    assert no_advantage_sufficient(phi) is None


def test_no_advantage_sufficient_example_absent_but_iff_true():
    assert no_advantage_sufficient(EX_SIGNS / 16.0) is None


def test_no_advantage_sufficient_guard():
    with pytest.raises(ResourceError):
        no_advantage_sufficient(np.ones((21, 2)))


def test_triviality_separable_found():
    # f(x,y) = x + y over Z_3
    f = np.array([(x + y) % 3 for x in range(3) for y in range(3)])
    from belltool.algebra import cyclic
    from belltool.games import LinearGame

    g = LinearGame((3, 3), cyclic(3), np.full(9, 1 / 9), f)
    strategy = triviality_check(g)
    assert strategy is not None
    assert strategy_success(g, strategy) == pytest.approx(1.0, abs=1e-12)
    assert strategy.outputs[0] == (0, 1, 2)
    assert strategy.outputs[1] == (0, 1, 2)


def test_triviality_chsh3_absent():
    assert triviality_check(build_chsh_d(3)) is None


def test_triviality_three_player_found():
    from belltool.algebra import cyclic
    from belltool.games import LinearGame

    f = np.array([(x + y + z) % 3 for x in range(3) for y in range(3) for z in range(3)])
    g = LinearGame((3, 3, 3), cyclic(3), np.full(27, 1 / 27), f)
    strategy = triviality_check(g)
    assert strategy is not None
    assert strategy_success(g, strategy) == pytest.approx(1.0, abs=1e-12)


def test_triviality_requires_uniform():
    with pytest.raises(ValidationError):
        triviality_check(build_mermin3())


def test_biseparable_bound_mermin():
    g = build_mermin3()
    bound = diew_bound(g)
    assert bound == pytest.approx(0.896, abs=5e-4)
    # classical value never exceeds the biseparable bound
    wc, _ = classical_value(g)
    assert bound >= wc - 1e-9


def test_biseparable_product_structure():
    # f(x,y,z) = f1(x,y), z irrelevant: the bound reduces to the bipartite one
    from belltool.algebra import cyclic
    from belltool.games import LinearGame

    rng = np.random.default_rng(4)
    f1 = rng.integers(0, 3, size=(3, 3))
    f = np.array([f1[x, y] for x in range(3) for y in range(3) for _ in range(3)])
    g = LinearGame((3, 3, 3), cyclic(3), np.full(27, 1 / 27), f)
    g1 = LinearGame((3, 3), cyclic(3), np.full(9, 1 / 9), f1.ravel())
    bound = biseparable_bound(g, 2)
    assert bound == pytest.approx(linear_norm_bound(g1, Partition((0,))), abs=1e-10)


def test_biseparable_needs_three_players():
    with pytest.raises(ValidationError):
        biseparable_bound(build_chsh_d(2), 0)


def test_nlc_no_advantage_and_counterexample():
    rng = np.random.default_rng(23)
    for d, n in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        shape = (d,) * (n - 1)
        h = rng.integers(0, d, size=shape)
        pt = rng.random(shape) if shape else np.array(1.0)
        pt = pt / pt.sum() if shape else pt
        g = build_nlc_d(d, n, h, pt)
        wc, _ = classical_value(g)
        bound = linear_norm_bound(g, Partition((0,)))
        assert wc == pytest.approx(bound, abs=1e-9)
    # counterexample: d=3 game with f not of the h(.)*(x+y) form
    from belltool.algebra import cyclic
    from belltool.games import LinearGame

    f = np.array([0 if (x + y) % 3 in (0, 1) else 1 for x in range(3) for y in range(3)])
    gex = LinearGame((3, 3), cyclic(3), np.full(9, 1 / 9), f)
    wc, _ = classical_value(gex)
    bound = linear_norm_bound(gex, Partition((0,)))
    assert bound - wc > 1e-3


def test_value_sandwich_corpus():
    corpus = [
        build_chsh_d(2),
        build_xor_from_signs(EX_SIGNS),
        excor_game(1 / 16, 1 / 16),
        build_nlc_d(2, 2, np.array([1, 0]), np.array([0.5, 0.5])),
    ]
    for g in corpus:
        wc, _ = classical_value(g)
        phi = np.real(game_matrices(g, Partition((0,))).matrices[1])
        bias, _ = xor_quantum_bias(phi, restarts=4, seed=3)
        wq = 0.5 * (1 + bias)
        bound, _ = linear_norm_bound_best(g)
        assert wc <= wq + 1e-7
        assert wq <= bound + 1e-7
        assert ns_value(g) == pytest.approx(1.0, abs=1e-9)


def test_analyze_report_chsh():
    report = analyze(build_chsh_d(2), ["classical", "ns", "quantum-xor", "bound", "no-advantage"])
    assert report.classical == 0.75
    assert report.ns == pytest.approx(1.0, abs=1e-9)
    assert report.quantum_value == pytest.approx((2 + np.sqrt(2)) / 4, abs=1e-6)
    assert report.norm_bound == pytest.approx((2 + np.sqrt(2)) / 4, abs=1e-10)
    assert report.no_advantage is False
    d = report.to_dict()
    assert d["classical"] == 0.75
    assert not d["norm_bound_exceeds_one"]


def test_analyze_rejects_unknown():
    with pytest.raises(ValidationError):
        analyze(build_chsh_d(2), ["bogus"])


def test_deterministic_box_roundtrip():
    g = build_chsh_d(2)
    value, strategy = classical_value(g)
    from belltool.games import success_probability

    assert success_probability(g, deterministic_box(g, strategy)) == pytest.approx(value)
