import numpy as np
import pytest

from belltool.algebra import cyclic, field_make
from belltool.errors import ValidationError
from belltool.games import (
    Box,
    LinearGame,
    Partition,
    box_functional,
    build_chsh_d,
    build_chshn_d,
    build_mermin3,
    build_nlc_d,
    build_xor_from_signs,
    cc_protocol_run,
    cc_protocol_simulate,
    game_matrices,
    game_signs,
    game_sum,
    monomial_coefficients,
    parse_game_file,
    serialize_game,
    success_probability,
    uniform_box,
    validate_no_signaling,
)
from belltool.numerics import spectral_norm

CHSH_SIGNS = np.array([[1, 1], [1, -1]])


def test_build_chsh_2_truth_table():
    g = build_chsh_d(2)
    assert g.input_sizes == (2, 2)
    assert g.f.reshape(2, 2).tolist() == [[0, 0], [0, 1]]
    assert np.allclose(g.dist, 0.25)


def test_build_chsh_3_field_arithmetic():
    g = build_chsh_d(3)
    assert g.n_inputs == 9
    assert g.f_at((2, 2)) == (1,)  # 2*2 mod 3


def test_build_chsh_4_uses_gf4():
    g = build_chsh_d(4)
    fld = field_make(2, 2)
    x_idx = fld.element_index((0, 1))  # the element X
    x_plus_1 = fld.element_index((1, 1))
    assert int(g.f[x_idx * 4 + x_idx]) == x_plus_1  # X*X = X+1 mod X^2+X+1


def test_build_chsh_rejects_non_prime_power():
    with pytest.raises(ValidationError):
        build_chsh_d(6)


def test_chshn_d_reduces_to_chsh_d():
    for d in (2, 3, 4):
        assert build_chshn_d(2, d) == build_chsh_d(d)


def test_chshn_d_examples():
    g = build_chshn_d(3, 3)
    assert g.f_at((1, 1, 1)) == (0,)  # 1+1+1 mod 3
    g2 = build_chshn_d(3, 2)
    assert g2.f_at((1, 1, 0)) == (1,)


def test_nlc_reduces_to_building_block():
    # n=1, h() = t: the game a + b = t (x + y)
    for t in range(3):
        g = build_nlc_d(3, 1, np.array(t), np.array(1.0))
        for x in range(3):
            for y in range(3):
                assert g.f_at((x, y)) == ((t * (x + y)) % 3,)
        assert np.allclose(g.dist, 1 / 9)


def test_nlc_constant_h():
    g = build_nlc_d(3, 2, np.ones(3, dtype=int), np.full(3, 1 / 3))
    # f((x1,x2),(y1,y2)) = x2 + y2
    for xs in g.inputs():
        x1, x2 = divmod(xs[0], 3)
        y1, y2 = divmod(xs[1], 3)
        assert g.f_at(xs) == ((x2 + y2) % 3,)


def test_nlc_requires_prime():
    with pytest.raises(ValidationError):
        build_nlc_d(4, 1, np.array(1), np.array(1.0))


def test_nlc_block_structure():
    # h(z)=z: Phi_k rows/cols arrange the single-dit blocks by head sum
    d = 3
    g = build_nlc_d(d, 2, np.arange(d), np.full(d, 1 / d))
    phi = game_matrices(g, Partition((0,))).matrices[1]
    blocks = {}
    for t in range(d):
        blk = build_nlc_d(d, 1, np.array(t), np.array(1.0))
        blocks[t] = game_matrices(blk, Partition((0,))).matrices[1]
    for x1 in range(d):
        for y1 in range(d):
            t = (x1 + y1) % d
            sub = phi[x1 * d : (x1 + 1) * d, y1 * d : (y1 + 1) * d]
            assert np.allclose(sub, blocks[t] / d**2)


def test_mermin3_promise_and_f():
    g = build_mermin3()
    assert g.p_at((0, 1, 2)) == pytest.approx(1 / 9)
    assert g.p_at((0, 1, 1)) == 0.0
    assert g.f_at((1, 1, 1)) == (1,)
    assert g.f_at((1, 2, 0)) == (0,)


def test_xor_from_signs_chsh():
    g = build_xor_from_signs(CHSH_SIGNS)
    assert g == build_chsh_d(2)
    assert np.array_equal(game_signs(g), CHSH_SIGNS)


def test_xor_from_signs_rejects_bad_entries():
    with pytest.raises(ValidationError):
        build_xor_from_signs(np.array([[1, 0], [1, -1]]))


def test_game_matrices_chsh():
    g = build_chsh_d(2)
    phi = game_matrices(g, Partition((0,))).matrices[1]
    assert np.allclose(phi, 0.25 * np.array([[1, 1], [1, -1]]))


def test_game_matrices_chsh3_norms():
    g = build_chsh_d(3)
    mats = game_matrices(g, Partition((0,))).matrices
    for k in (1, 2):
        assert spectral_norm(mats[k]) == pytest.approx(1 / (3 * np.sqrt(3)), abs=1e-12)


def test_game_matrices_mermin_zero_columns():
    g = build_mermin3()
    phi = game_matrices(g, Partition((0,))).matrices[1]
    assert phi.shape == (3, 9)
    # columns (y,z) are all touched by some promise triple, but each row x has
    # exactly 3 nonzero columns (those with x+y+z=0)
    for x in range(3):
        nz = np.nonzero(np.abs(phi[x]) > 1e-15)[0]
        assert len(nz) == 3
        for col in nz:
            y, z = divmod(int(col), 3)
            assert (x + y + z) % 3 == 0


def test_game_matrix_entry_magnitudes():
    for g in (build_chsh_d(3), build_mermin3(), build_xor_from_signs(CHSH_SIGNS)):
        for part in ((0,),) if g.n_players == 2 else ((0,), (1,), (0, 1)):
            mats = game_matrices(g, Partition(part))
            for mat in mats.matrices.values():
                rows, cols = mat.shape
                flat = np.abs(mat).ravel()
                assert np.allclose(np.sort(flat), np.sort(g.dist))


def test_partition_transpose_property():
    g = build_mermin3()
    a = game_matrices(g, Partition((0,))).matrices
    bc = game_matrices(g, Partition((1, 2))).matrices
    for k in a:
        assert np.array_equal(a[k], bc[k].T)


def test_row_col_sum_norm_bound():
    rng = np.random.default_rng(3)
    for _ in range(5):
        sizes = (rng.integers(2, 4), rng.integers(2, 4))
        d = int(rng.integers(2, 4))
        total = sizes[0] * sizes[1]
        p = rng.random(total)
        p /= p.sum()
        f = rng.integers(0, d, size=total)
        g = LinearGame(tuple(int(s) for s in sizes), cyclic(d), p, f)
        for k, mat in game_matrices(g, Partition((0,))).matrices.items():
            bound = max(np.abs(mat).sum(axis=0).max(), np.abs(mat).sum(axis=1).max())
            assert spectral_norm(mat) <= bound + 1e-12


def test_box_functional_wins_and_no_signaling():
    for g in (build_chsh_d(2), build_chsh_d(3), build_mermin3()):
        box = box_functional(g)
        assert success_probability(g, box) == pytest.approx(1.0, abs=1e-12)
        ok, viol = validate_no_signaling(box)
        assert ok and viol <= 1e-12


def test_box_functional_chsh_is_pr_box():
    box = box_functional(build_chsh_d(2))
    assert set(np.round(box.table.ravel(), 12)) == {0.0, 0.5}
    # all single-party marginals are 1/2
    shaped = box.table.reshape(2, 2, 2, 2)
    assert np.allclose(shaped.sum(axis=1), 0.5)
    assert np.allclose(shaped.sum(axis=0), 0.5)


def test_box_functional_chsh3_entries():
    box = box_functional(build_chsh_d(3))
    values = np.unique(box.table.ravel())
    assert len(values) == 2
    assert values[0] == 0.0
    assert values[1] == pytest.approx(1 / 3, abs=1e-15)


def test_success_probability_cases():
    g = build_chsh_d(2)
    assert success_probability(g, uniform_box(g)) == pytest.approx(0.5)
    # the best deterministic box: both always answer 0
    table = np.zeros((4, 4))
    table[0, :] = 1.0
    det = Box((2, 2), 2, table)
    assert success_probability(g, det) == pytest.approx(0.75)


def test_success_probability_shape_mismatch():
    g = build_chsh_d(2)
    with pytest.raises(ValidationError):
        success_probability(g, uniform_box(build_chsh_d(3)))


def test_validate_no_signaling_detects_signaling():
    # P(a|x,y) depends on y: deterministic a = y for player 1, b = 0
    table = np.zeros((4, 4))
    for x in range(2):
        for y in range(2):
            a, b = y, 0
            table[a * 2 + b, x * 2 + y] = 1.0
    box = Box((2, 2), 2, table)
    ok, viol = validate_no_signaling(box)
    assert not ok
    assert viol == pytest.approx(1.0)


def test_product_of_local_boxes_is_no_signaling():
    rng = np.random.default_rng(0)
    pa = rng.random((2, 3))
    pa /= pa.sum(axis=0)
    pb = rng.random((2, 3))
    pb /= pb.sum(axis=0)
    table = np.zeros((4, 9))
    for x in range(3):
        for y in range(3):
            for a in range(2):
                for b in range(2):
                    table[a * 2 + b, x * 3 + y] = pa[a, x] * pb[b, y]
    ok, viol = validate_no_signaling(Box((3, 3), 2, table))
    assert ok and viol <= 1e-12


def test_game_sum_tensor_identity():
    g = build_chsh_d(2)
    s = game_sum(g, g)
    phi = game_matrices(s, Partition((0,))).matrices[1]
    phi1 = game_matrices(g, Partition((0,))).matrices[1]
    assert np.max(np.abs(phi - np.kron(phi1, phi1))) < 1e-15
    assert spectral_norm(phi) == pytest.approx(spectral_norm(phi1) ** 2, abs=1e-9)


def test_game_sum_with_trivial_game():
    g = build_chsh_d(2)
    trivial = build_xor_from_signs(np.array([[1]]))
    s = game_sum(g, trivial)
    assert np.array_equal(s.f, g.f)
    assert np.allclose(s.dist, g.dist)


def test_game_sum_rejects_non_xor():
    with pytest.raises(ValidationError):
        game_sum(build_chsh_d(3), build_chsh_d(2))


def test_cc_protocol_mermin_function():
    f = np.zeros((3, 3, 3), dtype=int)
    for x in range(3):
        for y in range(3):
            for z in range(3):
                f[x, y, z] = (x * y * z) % 3
    res = cc_protocol_run(3, 3, f, trials=100, seed=7)
    assert res.ok
    assert res.dits_communicated == 2


def test_cc_protocol_constant_function():
    f = np.full((3, 3), 2, dtype=int)
    res = cc_protocol_run(3, 2, f, trials=10, seed=1)
    assert res.ok
    assert res.boxes_used == 0


def test_cc_protocol_random_f_d5():
    rng = np.random.default_rng(5)
    f = rng.integers(0, 5, size=(5, 5))
    assert cc_protocol_simulate(5, 2, f, trials=20, seed=9)
    # brute-force oracle: monomial expansion reproduces f on all 25 inputs
    mu = monomial_coefficients(5, 2, f)
    for x in range(5):
        for y in range(5):
            total = 0
            for ax in range(5):
                for ay in range(5):
                    term = int(mu[ax, ay])
                    term = term * (pow(x, ax, 5) if not (x == 0 and ax == 0) else 1)
                    term = term * (pow(y, ay, 5) if not (y == 0 and ay == 0) else 1)
                    total = (total + term) % 5
            assert total == f[x, y] % 5


def test_cc_protocol_rejects_composite_d():
    with pytest.raises(ValidationError):
        cc_protocol_simulate(4, 2, np.zeros((4, 4), dtype=int), trials=1)


def test_game_file_roundtrip():
    g = build_chsh_d(2)
    text = serialize_game(g)
    assert parse_game_file(text) == g
    g3 = build_mermin3()
    assert parse_game_file(serialize_game(g3)) == g3


def test_game_file_uniform_and_field_specs():
    g = parse_game_file(
        '{"players": 2, "inputs": [2, 2], "group": {"cyclic": [2]},'
        ' "distribution": "uniform", "f": [0, 0, 0, 1]}'
    )
    assert g == build_chsh_d(2)
    g4 = parse_game_file(
        '{"players": 2, "inputs": [4, 4], "group": {"field": {"p": 2, "r": 2}},'
        ' "distribution": "uniform", "f": ' + str([int(v) for v in build_chsh_d(4).f]) + "}"
    )
    assert g4 == build_chsh_d(4)


def test_game_file_bad_probability_sum():
    with pytest.raises(ValidationError, match="distribution"):
        parse_game_file(
            '{"players": 1, "inputs": [2], "group": {"cyclic": [2]},'
            ' "distribution": [0.25, 0.25], "f": [0, 1]}'
        )


def test_game_file_near_one_renormalized():
    g = parse_game_file(
        '{"players": 1, "inputs": [2], "group": {"cyclic": [2]},'
        ' "distribution": [0.5000000001, 0.4999999999], "f": [0, 1]}'
    )
    assert g.dist.sum() == pytest.approx(1.0, abs=1e-15)


def test_game_file_f_out_of_range():
    with pytest.raises(ValidationError, match=r"\$\.f\[1\]"):
        parse_game_file(
            '{"players": 1, "inputs": [2], "group": {"cyclic": [2]},'
            ' "distribution": [0.5, 0.5], "f": [0, 2]}'
        )


def test_game_file_parse_error_has_path():
    with pytest.raises(ValidationError, match=r"\$\.inputs"):
        parse_game_file('{"players": 2, "inputs": [2], "group": {"cyclic": [2]}, "distribution": "uniform", "f": []}')
