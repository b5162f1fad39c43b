import random
from fractions import Fraction

import pytest

from ncqsys.cfrac import (
    Inv,
    Leaf,
    Neg,
    Prod,
    Sum,
    canonicalize,
    canonical_certificate,
    denominator_coefficients,
    evaluate,
    extend_sequence,
    fm_node,
    fm_series,
    mutation_series_check,
    rearrange,
    recurrence_check,
    simplify,
    stieltjes_coefficients,
    stieltjes_node,
    truncation_check,
)
from ncqsys.errors import CheckFailed, PatternMismatch
from ncqsys.motzkin import (
    MotzkinPath,
    WeightAssignment,
    enumerate_motzkin,
    fundamental_path,
    mutate_path,
    mutate_weights,
    mutation_sequence,
    weights_from_cd,
)
from ncqsys.paths import hard_particle_pf
from ncqsys.quasidet import cd_variables
from ncqsys.rings import CommLaurent, FreeLaurent, random_invertible_matrix
from ncqsys.series import TSeries


def free_weights(r):
    gens = tuple("y%d" % a for a in range(1, 2 * r + 2))
    return [FreeLaurent.gen(gens, a) for a in range(2 * r + 1)]


def free_assignment(path):
    return WeightAssignment(path, free_weights(path.r))


def comm_weights(r):
    gens = tuple("y%d" % a for a in range(1, 2 * r + 2))
    return [CommLaurent.gen(gens, a) for a in range(2 * r + 1)]


def leaves_of(node):
    if isinstance(node, Leaf):
        return [node]
    out = []
    for child in node.children:
        out.extend(leaves_of(child))
    return out


def test_evaluate_geometric():
    x = CommLaurent.gen(("x",), 0)
    series = evaluate(Inv(Leaf(1, x)), 4)
    assert series == TSeries([x.one(), x, x * x, x * x * x, x * x * x * x], 4)


def test_evaluate_product_order_noncommutative():
    y = free_weights(1)
    node = Prod([Leaf(1, y[0]), Leaf(1, y[1])])
    series = evaluate(node, 3)
    assert series.coeffs[2] == y[0] * y[1]
    assert series.coeffs[2] != y[1] * y[0]


def test_evaluate_neg_and_empty_sum():
    x = CommLaurent.gen(("x",), 0)
    assert evaluate(Sum([Leaf(0, x), Neg(Leaf(0, x))]), 2, x.one()).coeffs[0].is_zero()
    assert evaluate(Sum([]), 2, x.one()) == TSeries.const(x.zero(), 2)


def test_positivity_check_symbolic():
    w = WeightAssignment(fundamental_path(2), comm_weights(2))
    fm_series(w, 5)  # implicit nonnegative-integer-coefficient check
    bad = WeightAssignment(
        fundamental_path(1), [v.scale(-1) for v in comm_weights(1)]
    )
    with pytest.raises(CheckFailed):
        fm_series(bad, 4, check_positive=True)


def rand_mat(rng):
    return random_invertible_matrix(rng, 3)


def test_rearrange_pull_through():
    rng = random.Random(101)
    a, c, u, x = (Leaf(1, rand_mat(rng)) for _ in range(4))
    x = Leaf(0, rand_mat(rng))
    tree = Sum([a, Neg(x), Prod([Inv(Sum([c, u])), x])])
    out = rearrange(tree, "pull-through", (), order=6)
    assert evaluate(out, 6) == evaluate(tree, 6)
    assert not any(isinstance(l, Neg) for l in out.children)


def test_rearrange_absorb():
    rng = random.Random(102)
    a, b, c, u = (Leaf(1, rand_mat(rng)) for _ in range(4))
    tree = Sum([a, b, Prod([Inv(Sum([c, u])), Prod([c, b])])])
    out = rearrange(tree, "absorb", (), order=6)
    assert evaluate(out, 6) == evaluate(tree, 6)


def test_rearrange_shift_one():
    rng = random.Random(103)
    a, b = Leaf(1, rand_mat(rng)), Leaf(1, rand_mat(rng))
    one = Leaf(0, a.value.one())
    tree = Sum([one, Prod([Inv(Sum([a, b])), a])])
    out = rearrange(tree, "shift-one", (), order=6)
    assert isinstance(out, Inv)
    assert evaluate(out, 6) == evaluate(tree, 6)


def test_rearrange_flip():
    rng = random.Random(104)
    a, b, c, d = (Leaf(1, rand_mat(rng)) for _ in range(4))
    tree = Sum([a, Prod([Inv(Prod([Inv(d), c])), b])])
    out = rearrange(tree, "flip", (), order=6)
    assert evaluate(out, 6) == evaluate(tree, 6)
    # the new leading numerator is the sum of the old two
    assert out.factors[-1].value == a.value + b.value


def test_rearrange_at_nested_site():
    rng = random.Random(105)
    a, b = Leaf(1, rand_mat(rng)), Leaf(1, rand_mat(rng))
    one = Leaf(0, a.value.one())
    inner = Sum([one, Prod([Inv(Sum([a, b])), a])])
    tree = Prod([Leaf(1, rand_mat(rng)), inner])
    out = rearrange(tree, "shift-one", (1,), order=6)
    assert evaluate(out, 6) == evaluate(tree, 6)
    assert isinstance(out.factors[1], Inv)


def test_rearrange_pattern_mismatch():
    x = Leaf(1, CommLaurent.gen(("x",), 0))
    with pytest.raises(PatternMismatch):
        rearrange(Sum([x, x]), "pull-through")
    with pytest.raises(PatternMismatch):
        rearrange(Sum([x, x, x]), "absorb")
    with pytest.raises(ValueError):
        rearrange(x, "no-such-rule")


def test_canonical_flat_path_golden():
    w = free_assignment(fundamental_path(2))
    y = w.y
    got = canonicalize(w, order=5)
    golden = Inv(
        Prod([
            Inv(Prod([
                Inv(Sum([
                    Leaf(1, y(3)),
                    Prod([Inv(Leaf(1, y(5))), Leaf(1, y(4))]),
                ])),
                Leaf(1, y(2)),
            ])),
            Leaf(1, y(1)),
        ])
    )
    assert got == golden


def test_canonical_staircase_is_nested_fraction():
    for r in (2, 3):
        path = MotzkinPath(tuple(range(r)))
        w = free_assignment(path)
        got = canonicalize(w, order=5)
        assert got == simplify(stieltjes_node(list(w.values)))


def test_canonical_descent_redundant_weight():
    path = MotzkinPath((0, 1, 0))
    w = free_assignment(path)
    got = canonicalize(w, order=5)
    redundant = w.y(5).inv() * w.y(4)
    assert any(l.tpow == 0 and l.value == redundant for l in leaves_of(got))


def test_canonicalize_all_paths_free():
    for r in (1, 2, 3):
        for path in enumerate_motzkin(r):
            w = free_assignment(path)
            node = canonicalize(w, order=4)
            canonical_certificate(node)


def test_canonicalize_matrix_backend():
    rng = random.Random(106)
    for path in enumerate_motzkin(2):
        w = WeightAssignment(path, [rand_mat(rng) for _ in range(5)])
        canonicalize(w, order=6)


def test_denominator_equals_hard_particles():
    for r in (2, 3):
        values = free_weights(r)
        coeffs = denominator_coefficients(values)
        assert len(coeffs) == r + 2
        for k, p in enumerate(coeffs):
            assert p == hard_particle_pf(values, k)


def staircase_data(r, seed, order=12):
    """Random noncommutative weights on the staircase path, the moment
    sequence they generate, and its recursion-extended version."""
    rng = random.Random(seed)
    path = MotzkinPath(tuple(range(r)))
    w = WeightAssignment(path, [rand_mat(rng) for _ in range(2 * r + 1)])
    series = fm_series(w, order)
    seq = {n: series.coeffs[n] for n in range(order + 1)}
    coeffs = denominator_coefficients(list(w.values))
    ext = extend_sequence(seq, coeffs, -r - 3, order)
    return w, seq, coeffs, ext


def test_moment_recurrence_and_extension():
    r = 2
    w, seq, coeffs, ext = staircase_data(r, seed=201)
    recurrence_check(coeffs, seq, range(0, 8))
    recurrence_check(coeffs, ext, range(-r - 3, 8))
    # forward re-extension from a truncated window reproduces the series
    window = {n: ext[n] for n in range(-r - 3, r + 2)}
    regrown = extend_sequence(window, coeffs, -r - 3, 10)
    assert all(regrown[n] == ext[n] for n in range(-r - 3, 11))


def test_truncation_of_extended_sequence():
    r = 2
    _, _, _, ext = staircase_data(r, seed=202)
    truncation_check(ext, r, range(0, 2))


def test_stieltjes_coefficients_round_trip():
    r = 2
    w, _, _, ext = staircase_data(r, seed=203)
    xs = stieltjes_coefficients(ext, r)
    assert xs == list(w.values)
    series = evaluate(stieltjes_node(xs), 8)
    want = TSeries([ext[n] for n in range(9)], 8)
    assert series == want


def test_cd_weights_noncommutative_routes():
    r = 2
    order = 12
    w, _, coeffs, ext = staircase_data(r, seed=204, order=order)
    cd = cd_variables(ext, r + 1, range(0, r + 2))
    staircase = MotzkinPath(tuple(range(r)))
    assert weights_from_cd(staircase, cd) == w
    base = weights_from_cd(fundamental_path(r), cd)
    for target in enumerate_motzkin(r):
        moves = mutation_sequence(target)
        got = base
        for i in moves:
            got = mutate_weights(got, i)
        assert got == weights_from_cd(target, cd), target.entries


def test_cd_weights_series_and_conservation():
    r = 2
    order = 10
    w, _, coeffs, ext = staircase_data(r, seed=205, order=order)
    cd = cd_variables(ext, r + 1, range(0, r + 2))

    def odd_product(wt):
        p = wt.y(2 * r + 1)
        for a in range(2 * r - 1, 0, -2):
            p = p * wt.y(a)
        return p

    conserved = odd_product(weights_from_cd(fundamental_path(r), cd))
    for target in enumerate_motzkin(r):
        wt = weights_from_cd(target, cd)
        m1 = target.entry(1)
        base_inv = ext[m1].inv()
        want = TSeries([ext[n + m1] * base_inv for n in range(7)], 6)
        assert fm_series(wt, 6) == want, target.entries
        # the product of odd weights in decreasing order is path independent
        assert odd_product(wt) == conserved, target.entries


def test_mutation_series_law_noncommutative():
    r = 2
    w, _, _, ext = staircase_data(r, seed=206)
    cd = cd_variables(ext, r + 1, range(0, r + 2))
    base = weights_from_cd(fundamental_path(r), cd)
    mutation_series_check(base, 1, order=6)
    mutation_series_check(base, 2, order=6)


def test_mutation_series_check_ties_routes():
    r = 2
    w, _, _, ext = staircase_data(r, seed=207)
    cd = cd_variables(ext, r + 1, range(0, r + 2))
    base = weights_from_cd(fundamental_path(r), cd)
    for i in (1, 2):
        _, after = mutation_series_check(base, i, order=6)
        target = mutate_path(base.path, i)
        assert after == fm_series(weights_from_cd(target, cd), 6)


def test_recurrence_check_detects_corruption():
    r = 2
    _, seq, coeffs, _ = staircase_data(r, seed=208)
    bad = list(coeffs)
    bad[1] = bad[1] + bad[1].one()
    with pytest.raises(CheckFailed):
        recurrence_check(bad, seq, range(0, 6))
