import random
from fractions import Fraction

import pytest

from ncqsys.cfrac import fm_series, mutation_series_check
from ncqsys.errors import InvalidMutationSite
from ncqsys.motzkin import (
    MotzkinPath,
    WeightAssignment,
    build_graph,
    enumerate_motzkin,
    fundamental_path,
    mutate_path,
    mutate_weights,
    mutation_case,
    mutation_sequence,
    weights_from_cd,
    weights_from_qsystem,
)
from ncqsys.paths import (
    closed_walk_series,
    count_closed_walks,
    graph_series,
)
from ncqsys.quasidet import cd_variables
from ncqsys.rings import CommLaurent, FreeLaurent, random_invertible_matrix
from ncqsys.series import TSeries


def rational(v):
    return CommLaurent.const((), v)


def qsystem_table(r, nmax, seed, nmin=None):
    """Numeric solution of R_{i,n+1} R_{i,n-1} = R_{i,n}^2 + R_{i+1,n} R_{i-1,n}
    with R_{0,n} = R_{r+1,n} = 1, from random positive initial data."""
    rng = random.Random(seed)
    R = {}
    for i in range(1, r + 1):
        R[(i, 0)] = Fraction(rng.randint(1, 4))
        R[(i, 1)] = Fraction(rng.randint(1, 4))

    def get(i, n):
        if i == 0 or i == r + 1:
            return Fraction(1)
        return R[(i, n)]

    for n in range(1, nmax):
        for i in range(1, r + 1):
            R[(i, n + 1)] = (get(i, n) ** 2 + get(i + 1, n) * get(i - 1, n)) / get(i, n - 1)
    if nmin is not None:
        for n in range(1, 1 - nmin):
            m = 1 - n
            for i in range(1, r + 1):
                R[(i, m - 1)] = (get(i, m) ** 2 + get(i + 1, m) * get(i - 1, m)) / get(i, m + 1)
    return {key: rational(v) for key, v in R.items()}


def f_oracle(R, path, order):
    m1 = path.entry(1)
    base = R[(1, m1)].terms[()]
    return TSeries(
        [rational(R[(1, n + m1)].terms[()] / base) for n in range(order + 1)], order
    )


def test_enumeration_counts():
    for r in range(1, 7):
        assert len(enumerate_motzkin(r)) == 3 ** (r - 1)
    assert [p.entries for p in enumerate_motzkin(2)] == [(0, 0), (0, 1), (1, 0)]
    assert fundamental_path(3).entries == (0, 0, 0)
    assert all(p.is_fundamental() for p in enumerate_motzkin(3))


def test_site_classification_boundaries():
    p = MotzkinPath((0, 1, 0))
    assert p.site_class(1) == 1
    assert p.site_class(2) == -1
    assert p.site_class(3) == 0  # virtual m_4 = m_3
    assert p.site_class(4) == 0


def test_mutation_examples():
    assert mutate_path(MotzkinPath((0, 0)), 1).entries == (1, 0)
    assert mutate_path(MotzkinPath((0, 0, 0)), 2).entries == (0, 1, 0)
    assert mutate_path(MotzkinPath((0, 0, 1)), 2).entries == (0, 1, 1)
    assert mutation_case(MotzkinPath((0, 0, 1)), 2) == "i"
    assert mutation_case(MotzkinPath((0, 0)), 1) == "ii"
    with pytest.raises(InvalidMutationSite):
        mutation_case(MotzkinPath((0, 1, 0)), 1)
    with pytest.raises(InvalidMutationSite):
        mutation_case(MotzkinPath((1, 0)), 2)
    with pytest.raises(InvalidMutationSite):
        mutation_case(MotzkinPath((0, 0)), 3)


def test_mutation_sequence_replay():
    for r in (2, 3):
        for target in enumerate_motzkin(r):
            try:
                moves = mutation_sequence(target)
            except InvalidMutationSite:
                continue
            assert len(moves) == sum(target.entries)
            cur = fundamental_path(r)
            for i in moves:
                cur = mutate_path(cur, i)
            assert cur == target


def test_unreachable_target_raises():
    with pytest.raises(InvalidMutationSite):
        mutation_sequence(MotzkinPath((1, 1, 0)))


def test_initial_weights_closed_form():
    r = 3
    R = qsystem_table(r, 3, seed=21)

    def rv(i, n):
        if i == 0 or i == r + 1:
            return Fraction(1)
        return R[(i, n)].terms[()]

    w = weights_from_qsystem(fundamental_path(r), R)
    for i in range(1, r + 1):
        odd = rv(i, 1) * rv(i - 1, 0) / (rv(i, 0) * rv(i - 1, 1))
        even = rv(i + 1, 1) * rv(i - 1, 0) / (rv(i, 1) * rv(i, 0))
        assert w.y(2 * i - 1) == rational(odd)
        assert w.y(2 * i) == rational(even)
    assert w.y(2 * r + 1) == rational(rv(r, 0) / rv(r, 1))


def test_weights_two_routes_agree():
    for r in (2, 3):
        R = qsystem_table(r, 6, seed=5 + r)
        base = weights_from_qsystem(fundamental_path(r), R)
        for target in enumerate_motzkin(r):
            try:
                moves = mutation_sequence(target)
            except InvalidMutationSite:
                continue
            w = base
            for i in moves:
                w = mutate_weights(w, i)
            assert w == weights_from_qsystem(target, R)


def test_generating_function_matches_qsystem():
    order = 6
    for r in (1, 2, 3):
        R = qsystem_table(r, order + 4, seed=30 + r)
        for path in enumerate_motzkin(r):
            w = weights_from_qsystem(path, R)
            assert fm_series(w, order) == f_oracle(R, path, order)


def test_mutation_series_law_numeric():
    R = qsystem_table(2, 10, seed=9)
    for path in [MotzkinPath((0, 0)), MotzkinPath((0, 1))]:
        for i in (1, 2):
            try:
                mutation_case(path, i)
            except InvalidMutationSite:
                continue
            w = weights_from_qsystem(path, R)
            mutation_series_check(w, i, order=6)


def test_graph_flavors_agree_numeric():
    order = 5
    for r in (2, 3):
        R = qsystem_table(r, order + 4, seed=40 + r)
        for path in enumerate_motzkin(r):
            w = weights_from_qsystem(path, R)
            want = fm_series(w, order)
            for flavor in ("G", "GammaPrime", "Gamma"):
                graph = build_graph(path, w, flavor)
                assert graph_series(graph, w, order) == want, (path.entries, flavor)
            gamma = build_graph(path, w, "Gamma")
            assert closed_walk_series(gamma, order) == want, path.entries


def test_graphs_free_backend():
    order = 4
    for r in (2, 3):
        gens = tuple("y%d" % a for a in range(1, 2 * r + 2))
        values = [FreeLaurent.gen(gens, a) for a in range(2 * r + 1)]
        for path in enumerate_motzkin(r):
            w = WeightAssignment(path, values)
            want = fm_series(w, order)
            flavors = ["Gamma"]
            if all(path.step_after(i) != 1 for i in range(1, r)):
                # the signed compact graph needs commuting weights at up-steps
                flavors.append("GammaPrime")
            for flavor in flavors:
                graph = build_graph(path, w, flavor)
                assert graph_series(graph, w, order) == want, (path.entries, flavor)
            gamma = build_graph(path, w, "Gamma")
            assert closed_walk_series(gamma, order) == want, path.entries


def test_graphs_matrix_backend():
    order = 5
    rng = random.Random(77)
    for path in enumerate_motzkin(2):
        w = WeightAssignment(path, [random_invertible_matrix(rng, 3) for _ in range(5)])
        want = fm_series(w, order)
        flavors = ["G", "Gamma"]
        if all(path.step_after(i) != 1 for i in range(1, 2)):
            flavors.append("GammaPrime")
        for flavor in flavors:
            graph = build_graph(path, w, flavor)
            assert graph_series(graph, w, order) == want, (path.entries, flavor)


def test_rank_one_unit_weights():
    path = fundamental_path(1)
    w = WeightAssignment(path, [rational(1)] * 3)
    series = fm_series(w, 6, check_positive=False)
    expected = [1, 1, 2, 5, 13, 34, 89]
    assert [c.terms.get((), Fraction(0)) for c in series.coeffs] == expected
    gamma = build_graph(path, w, "Gamma")
    assert count_closed_walks(gamma, 6) == expected


def test_cd_route_matches_qsystem_route():
    r = 2
    order = 8
    R = qsystem_table(r, order, seed=13, nmin=-r - 2)
    seq = {n: R[(1, n)] for n in range(-r - 2, order + 1)}
    cd = cd_variables(seq, r + 1, range(0, 4))
    for path in enumerate_motzkin(r):
        assert weights_from_cd(path, cd) == weights_from_qsystem(path, R)
