"""End-to-end acceptance checks.

Each test freezes one headline behavior of the engine: quasi-Wronskian
identities, the three independent series routes, mutation laws, commutative
and quantum positivity, T-system operator actions, the noncommutative
lattice-path model, and the rank-(2k+1) / rank-2 systems.  All comparisons
are exact; random instances use fixed seeds with resampling only on
degenerate draws.
"""

import random
from fractions import Fraction

import pytest

from ncqsys.cfrac import (
    denominator_coefficients,
    extend_sequence,
    fm_series,
    mutation_series_check,
    truncation_check,
)
from ncqsys.errors import CheckFailed, InvalidMutationSite, NcqsysError, SingularMatrix
from ncqsys.motzkin import (
    MotzkinPath,
    WeightAssignment,
    build_graph,
    enumerate_motzkin,
    mutation_case,
)
from ncqsys.paths import graph_series, nc_lgv_a1_check, walk_sum_series
from ncqsys.quasidet import (
    QuasiMatrix,
    RectMatrix,
    heredity_check,
    hirota_step,
    homological_check,
    quasi_plucker_check,
    quasi_wronskian,
)
from ncqsys.rings import (
    CommLaurent,
    FreeLaurent,
    random_invertible_matrix,
    random_matrix,
)
from ncqsys.systems import ncsys, qsys, quantum, tsys


def sample_invertible(rng, dim=4, lo=-3, hi=3):
    while True:
        try:
            return random_invertible_matrix(rng, dim, lo=lo, hi=hi)
        except SingularMatrix:
            continue


def symbolic_weights(path):
    count = 2 * path.r + 1
    gens = tuple("y%d" % a for a in range(1, count + 1))
    return WeightAssignment(path, [CommLaurent.gen(gens, a) for a in range(count)])


def free_weights(path):
    count = 2 * path.r + 1
    gens = tuple("y%d" % a for a in range(1, count + 1))
    return WeightAssignment(path, [FreeLaurent.gen(gens, a) for a in range(count)])


def matrix_weights(path, rng, dim=4):
    return WeightAssignment(
        path, [sample_invertible(rng, dim) for _ in range(2 * path.r + 1)]
    )


# ---------------------------------------------------------------------------
# 1. the three-term quasi-Wronskian step reproduces the (i+1)-Wronskian


def test_hirota_step_builds_higher_wronskians():
    for seed in (101, 102, 103):
        rng = random.Random(seed)
        while True:
            seq = {n: sample_invertible(rng) for n in range(-8, 9)}
            try:
                delta = {
                    (i, n): quasi_wronskian(seq, i, n)
                    for i in range(1, 6)
                    for n in range(-4, 5)
                }
            except NcqsysError:
                continue
            break
        for i in range(1, 5):
            for n in range(-3, 4):
                assert hirota_step(delta, i, n) == delta[(i + 1, n)]


# ---------------------------------------------------------------------------
# 2. sequences generated by the fraction satisfy the order-(r+2) truncation


def test_fraction_generated_sequences_truncate():
    rng = random.Random(17)
    half = 3
    for r in (1, 2):
        path = MotzkinPath(tuple(range(r)))
        while True:
            try:
                weights = WeightAssignment(
                    path, [sample_invertible(rng) for _ in range(2 * r + 1)]
                )
                series = fm_series(weights, 2 * half + r + 4, check_positive=False)
                seq = dict(enumerate(series.coeffs))
                coeffs = denominator_coefficients(list(weights.values))
                ext = extend_sequence(seq, coeffs, -half - r - 4, 2 * half + r + 4)
                truncation_check(ext, r, range(-half, half + 1))
            except CheckFailed:
                raise
            except NcqsysError:
                continue
            break


# ---------------------------------------------------------------------------
# 3. enumeration, resolvent, and nested-fraction series agree through t^8


@pytest.mark.parametrize("backend", ["symbolic", "free", "matrix"])
def test_three_series_routes_agree(backend):
    order = 8
    rng = random.Random(11)
    for r in (1, 2, 3):
        for path in enumerate_motzkin(r):
            while True:
                if backend == "symbolic":
                    weights = symbolic_weights(path)
                elif backend == "free":
                    weights = free_weights(path)
                else:
                    weights = matrix_weights(path, rng)
                try:
                    fraction = fm_series(weights, order, check_positive=False)
                except NcqsysError:
                    continue
                break
            graph = build_graph(path, weights, flavor="Gamma")
            enumerated = walk_sum_series(graph, order)
            assert enumerated == fraction, (backend, path.entries)
            del enumerated
            resolvent = graph_series(graph, weights, order)
            assert resolvent == fraction, (backend, path.entries)
            del fraction, resolvent, graph


# ---------------------------------------------------------------------------
# 4. mutation laws along every admissible edge of the fundamental domain


def test_mutation_laws_every_edge():
    order = 8
    rng = random.Random(23)
    for r in (1, 2, 3):
        for path in enumerate_motzkin(r):
            for i in range(1, r + 1):
                try:
                    mutation_case(path, i)
                except InvalidMutationSite:
                    continue
                while True:
                    weights = matrix_weights(path, rng)
                    try:
                        mutation_series_check(weights, i, order=order)
                    except CheckFailed:
                        raise
                    except NcqsysError:
                        continue
                    break


# ---------------------------------------------------------------------------
# 5. commutative Laurent positivity in every cluster, plus the rank-1 oracle


def test_commutative_positivity_all_clusters():
    for r in (1, 2):
        qsys.positivity_check(r, 6, paths=enumerate_motzkin(r))
    assert qsys.rank_one_sequence(6) == [1, 1, 2, 5, 13, 34, 89]


# ---------------------------------------------------------------------------
# 6. quantum positivity, the rank-2 weight tables, and the conserved q-power

# rank-2 weight monomials per cluster, written in the torus variables
# R = R_{1,.}, S = R_{2,.}; products are compared up to an overall q-power
RANK2_WEIGHT_TABLES = {
    (0, 0): [
        lambda R, S: R(1) * R(0).inv(),
        lambda R, S: S(1) * R(1).inv() * R(0).inv(),
        lambda R, S: S(1) * R(1).inv() * S(0).inv() * R(0),
        lambda R, S: S(1).inv() * S(0).inv() * R(0),
        lambda R, S: S(1).inv() * S(0),
    ],
    (0, 1): [
        lambda R, S: R(1) * R(0).inv(),
        lambda R, S: S(1) * R(1).inv() * R(0).inv(),
        lambda R, S: S(2) * R(1).inv() * R(0) * S(1).inv(),
        lambda R, S: S(2).inv() * S(1).inv() * R(1),
        lambda R, S: S(2).inv() * S(1),
    ],
    (1, 0): [
        lambda R, S: R(2) * R(1).inv(),
        lambda R, S: S(0).inv() * S(1) * S(1) * R(1).inv() * R(2).inv(),
        lambda R, S: S(1) * R(1) * S(0).inv() * R(2).inv(),
        lambda R, S: S(0).inv() * S(1).inv() * R(1) * R(1) * R(2).inv(),
        lambda R, S: S(1).inv() * S(0),
    ],
}


def monomial_exponents(value):
    assert len(value.terms) == 1, "expected a torus monomial"
    (exps, qpowers), = value.terms.items()
    assert list(qpowers.values()) == [Fraction(1)] or list(qpowers.values()) == [1]
    return exps


def test_quantum_positivity_and_weight_tables():
    quantum.quantum_positivity_check(1, MotzkinPath((0,)), 5)
    for entries in ((0, 0), (0, 1), (1, 0)):
        path = MotzkinPath(entries)
        state, weights = quantum.quantum_positivity_check(2, path, 5)
        table = RANK2_WEIGHT_TABLES[entries]

        def R(n):
            return state.get(1, n)

        def S(n):
            return state.get(2, n)

        for a in range(1, 6):
            got = monomial_exponents(weights.y(a))
            want = monomial_exponents(table[a - 1](R, S))
            assert got == want, (entries, a)
        conserved = quantum.conservation_check(weights)
        assert conserved == weights.one().q_scale(3)


# ---------------------------------------------------------------------------
# 7. shift-operator action and the vanishing of the order-(r+2) difference


def test_tsystem_operator_action():
    for r, seed in ((1, 31), (2, 32)):
        state = tsys.random_tsystem(r, 12, seed=seed, k_max=12)
        tsys.tsystem_window_check(state)
        tsys.tsystem_operator_check(state, range(r + 2, r + 5))


# ---------------------------------------------------------------------------
# 8. noncommutative lattice-path model by exhaustive loop enumeration


def test_nc_lattice_paths_rank_one():
    rng = random.Random(41)
    R0 = sample_invertible(rng, dim=3)
    R1 = sample_invertible(rng, dim=3)
    for n in range(1, 7):
        nc_lgv_a1_check(R0, R1, n, weight_checks=(n <= 3))


# ---------------------------------------------------------------------------
# 9. rank-(2k+1) systems: conserved quantity, recursions, fraction round-trips


@pytest.mark.parametrize("k,seed", [(1, 51), (2, 52)])
def test_rank2k1_system(k, seed):
    rng = random.Random(seed)
    for _ in range(200):
        try:
            initial = [
                random_invertible_matrix(rng, 3, lo=-3, hi=3)
                for _ in range(2 * k + 1)
            ]
            ncsys.rank2k1_check(k, initial, n_max=2, order=2)
            ncsys.rank2k1_phi_check(k, initial, n_max=4)
            return
        except SingularMatrix:
            continue
    pytest.fail("no invertible sample")


# ---------------------------------------------------------------------------
# 10. rank-2 walk periodicities up to conjugation


@pytest.mark.parametrize("bc,period", [((1, 1), 5), ((1, 2), 6), ((1, 3), 8)])
def test_rank2_walk_periods(bc, period):
    ncsys.rank2_walk_check(bc, period, seed=61 + bc[1])


# ---------------------------------------------------------------------------
# 11. identity suites on random matrix instances


def test_plucker_identity_suite():
    rng = random.Random(71)
    done = 0
    while done < 100:
        A = RectMatrix([[random_matrix(rng, 4) for _ in range(4)] for _ in range(2)])
        try:
            quasi_plucker_check(A, M=(3,), L=(2, 4), i=1)
        except CheckFailed:
            raise
        except NcqsysError:
            continue
        done += 1


def test_homological_identity_suite():
    rng = random.Random(72)
    done = 0
    while done < 100:
        A = QuasiMatrix([[random_matrix(rng, 4) for _ in range(3)] for _ in range(3)])
        i, k = rng.sample([1, 2, 3], 2)
        j = rng.choice([1, 2, 3])
        l = rng.choice([c for c in [1, 2, 3] if c != j])
        try:
            homological_check(A, i, j, k, l)
        except CheckFailed:
            raise
        except NcqsysError:
            continue
        done += 1


def test_heredity_identity_suite():
    rng = random.Random(73)
    done = 0
    while done < 100:
        entries = [[random_matrix(rng, 4) for _ in range(3)] for _ in range(3)]
        zero = entries[0][0].zero()
        column = 2 if done % 2 == 0 else 0
        for x in range(2):
            entries[x][column] = zero
        try:
            heredity_check(QuasiMatrix(entries))
        except CheckFailed:
            raise
        except NcqsysError:
            continue
        done += 1
