import random
from fractions import Fraction

import pytest

from ncqsys.cfrac import fm_series
from ncqsys.errors import CheckFailed
from ncqsys.motzkin import (
    MotzkinPath,
    WeightAssignment,
    enumerate_motzkin,
    fundamental_path,
    mutate_weights,
    mutation_case,
    weights_from_qsystem,
)
from ncqsys.paths import (
    a1_flip,
    conserved_quantity_check,
    graph_denominator,
    hard_particle_pf,
    lgv_commutative_check,
    nc_lgv_a1_check,
    positivity_involution_check,
    segment_path_weight,
    segment_paths,
)
from ncqsys.rings import CommLaurent, FreeLaurent, random_invertible_matrix
from test_motzkin import qsystem_table, rational


def comm_weights(r):
    gens = tuple("y%d" % a for a in range(1, 2 * r + 2))
    return [CommLaurent.gen(gens, a) for a in range(2 * r + 1)]


def free_weights(r):
    gens = tuple("y%d" % a for a in range(1, 2 * r + 2))
    return [FreeLaurent.gen(gens, a) for a in range(2 * r + 1)]


def test_hard_particle_counts():
    ones = [rational(1)] * 5
    # non-adjacent subsets of [1,5]: C(6-m, m) of each size m
    assert [hard_particle_pf(ones, m).terms[()] for m in range(4)] == [1, 5, 6, 1]


def test_hard_particle_ordering_noncommutative():
    y = free_weights(1)
    p2 = hard_particle_pf(y, 2)
    assert p2 == y[2] * y[0]
    assert p2 != y[0] * y[2]


def test_positivity_involution_flat_and_upstep():
    r = 2
    for entries in ((0, 0), (1, 0)):
        w = WeightAssignment(MotzkinPath(entries), comm_weights(r))
        positivity_involution_check(w.path, w, order=4)


def test_positivity_involution_free_backend():
    path = MotzkinPath((0, 1, 0))
    w = WeightAssignment(path, free_weights(3))
    positivity_involution_check(path, w, order=3)


def test_conserved_quantity_across_mutations():
    r = 2
    rng = random.Random(301)
    base = WeightAssignment(
        fundamental_path(r),
        [random_invertible_matrix(rng, 3) for _ in range(2 * r + 1)],
    )
    for i in (1, 2):
        after = mutate_weights(base, i)
        conserved_quantity_check(base, after)


def test_conserved_quantity_detects_tampering():
    r = 2
    rng = random.Random(302)
    base = WeightAssignment(
        fundamental_path(r),
        [random_invertible_matrix(rng, 3) for _ in range(2 * r + 1)],
    )
    after = mutate_weights(base, 1)
    values = list(after.values)
    values[0] = values[0] + values[0].one()
    bad = WeightAssignment(after.path, values)
    with pytest.raises(CheckFailed):
        conserved_quantity_check(base, bad)


def test_denominator_matches_segment_on_staircase():
    r = 2
    R = qsystem_table(r, 8, seed=303)
    w = weights_from_qsystem(MotzkinPath(tuple(range(r))), R)
    den = graph_denominator(w)
    values = list(w.values)
    for k in range(r + 2):
        want = hard_particle_pf(values, k)
        got = den.get(k, w.one().zero())
        assert got == want.scale(-1) if k % 2 else got == want


def test_lgv_determinant_families():
    r = 2
    R = qsystem_table(r, 10, seed=304)
    for path in (MotzkinPath((0, 0)), MotzkinPath((0, 1))):
        for alpha in (1, 2, 3):
            for n in range(alpha - 1, 4):
                lgv_commutative_check(path, R, alpha, n)


def test_lgv_detects_corrupt_table():
    r = 2
    R = dict(qsystem_table(r, 10, seed=305))
    R[(2, 3)] = R[(2, 3)] + rational(1)
    with pytest.raises(CheckFailed):
        lgv_commutative_check(MotzkinPath((0, 0)), R, 2, 3)


def test_segment_paths_are_catalan_like():
    # walks on [1,4] from 1 to 1 with n descents
    assert [len(segment_paths(n)) for n in range(5)] == [1, 1, 2, 5, 13]


def test_segment_weight_order():
    y = free_weights(1)
    heights = (1, 2, 3, 2, 1)
    assert segment_path_weight(heights, y) == y[1] * y[0]


def test_a1_flip_is_involutive_on_crossing_pairs():
    n = 4
    from ncqsys.paths import A1LoopConfig

    for blue in segment_paths(n + 1):
        for red in segment_paths(n - 1):
            cfg = A1LoopConfig(blue, red, n)
            out = a1_flip(cfg)
            if out is None:
                continue
            assert len(out.blue) == 2 * n + 1 and len(out.red) == 2 * n + 1


def test_nc_lgv_matrix_model():
    rng = random.Random(306)
    R0 = random_invertible_matrix(rng, 3, lo=-4, hi=4)
    R1 = random_invertible_matrix(rng, 3, lo=-4, hi=4)
    for n in range(1, 7):
        nc_lgv_a1_check(R0, R1, n, weight_checks=(n <= 3))


def test_nc_lgv_rejects_commuting_corruption():
    rng = random.Random(307)
    R0 = random_invertible_matrix(rng, 3, lo=-4, hi=4)
    # with R1 = R0 the torus relations degenerate; the constant collapses to 1
    cfg = nc_lgv_a1_check(R0, R0, 2)
    assert cfg is not None
