"""Evolution engines: commutative Q-systems, T-system operators, quantum
Q-systems, and the noncommutative rank-2 / rank-(2k+1) recursions."""

import random
from fractions import Fraction

import pytest

from ncqsys.errors import CheckFailed, InexactDivision, SingularMatrix
from ncqsys.motzkin import MotzkinPath
from ncqsys.rings import CommLaurent, MatrixElement, random_invertible_matrix
from ncqsys.systems import ncsys, qsys, quantum, tsys


def sample_pair(seed, dim=3):
    rng = random.Random(seed)
    while True:
        try:
            return (
                random_invertible_matrix(rng, dim, lo=-3, hi=3),
                random_invertible_matrix(rng, dim, lo=-3, hi=3),
            )
        except SingularMatrix:
            continue


# ---------------------------------------------------------------------------
# commutative Q-system


def test_laurent_divide_exact_and_inexact():
    gens = ("x", "y")
    x = CommLaurent.gen(gens, 0)
    y = CommLaurent.gen(gens, 1)
    num = (x + y) * (x * x + y.inv())
    assert qsys.laurent_divide(num, x + y) == x * x + y.inv()
    with pytest.raises(InexactDivision):
        qsys.laurent_divide(x * x + y, x + y)


def test_rank_one_numeric_sequence():
    assert qsys.rank_one_sequence(6) == [1, 1, 2, 5, 13, 34, 89]


def test_symbolic_positivity_small():
    qsys.positivity_check(2, 4, paths=[MotzkinPath((0, 0)), MotzkinPath((0, 1))])


def test_wronskian_reduction_numeric():
    state = qsys.numeric_state(
        2, {(1, 0): 1, (1, 1): 2, (2, 0): 1, (2, 1): 3}
    )
    qsys.qsystem_evolve(state, -2, 6)
    for i in (1, 2, 3):
        for n in (0, 1, 2):
            qsys.wronskian_reduction_check(state, i, n)


def test_translation_invariance():
    qsys.translation_check(2, 5, 2, seed=9)


# ---------------------------------------------------------------------------
# T-system operators


def test_tsystem_window_and_operator():
    state = tsys.random_tsystem(2, 12, seed=4, k_max=12)
    tsys.tsystem_window_check(state)
    tsys.tsystem_operator_check(state, range(4, 8))


def test_tsystem_weights_route():
    state = tsys.random_tsystem(2, 12, seed=4, k_max=14)
    tsys.tsystem_weights_check(state, MotzkinPath((0, 0)), order=3)


def test_tsystem_reduces_to_qsystem():
    tsys.qsystem_reduction_check(2, 12, seed=6, k_max=4)


# ---------------------------------------------------------------------------
# quantum Q-system


def test_quantum_positivity_rank_one_and_two():
    quantum.quantum_positivity_check(1, MotzkinPath((0,)), 4)
    quantum.quantum_positivity_check(2, MotzkinPath((0, 0)), 4)
    quantum.quantum_positivity_check(2, MotzkinPath((0, 1)), 4)


def test_quantum_wronskian_expansions():
    quantum.wronskian_expansion_check(1, range(-1, 3))
    quantum.wronskian_expansion_check(2, range(-1, 3))


def test_quantum_bar_invariance():
    quantum.bar_invariance_check(1, 3, range(-2, 3))
    quantum.bar_invariance_check(2, 3, range(-2, 3))


def test_quantum_a1():
    quantum.a1_quantum_check(4)


# ---------------------------------------------------------------------------
# A_1 noncommutative Q-system


def test_a1_nc_conserved_and_series():
    R0, R1 = sample_pair(11)
    out = ncsys.a1_nc_qsystem_check(R0, R1, n_max=5, order=5)
    assert not out["C"].is_zero()


def test_a1_nc_qtorus_central():
    ncsys.a1_qtorus_check()


def test_a1_commutative_constant_value():
    assert ncsys.a1_commutative_constant() == 3


# ---------------------------------------------------------------------------
# affine (1, 4)


def test_affine14_weights_and_recursion():
    rng = random.Random(5)
    while True:
        try:
            R0 = random_invertible_matrix(rng, 3, lo=-3, hi=3)
            R1 = random_invertible_matrix(rng, 3, lo=-3, hi=3)
            ncsys.affine14_check(R0, R1, n_max=3, order=3)
            return
        except SingularMatrix:
            continue


def test_affine14_commutative_integers():
    seq = ncsys.affine14_commutative_sequence(n_max=8)
    assert seq[:6] == [1, 1, 2, 17, 9, 386]


# ---------------------------------------------------------------------------
# rank 2k+1


@pytest.mark.parametrize("k,seed", [(1, 3), (2, 7)])
def test_rank2k1_full_check(k, seed):
    rng = random.Random(seed)
    for _ in range(200):
        try:
            init = [
                random_invertible_matrix(rng, 3, lo=-3, hi=3)
                for _ in range(2 * k + 1)
            ]
            ncsys.rank2k1_check(k, init, n_max=2, order=2)
            ncsys.rank2k1_phi_check(k, init, n_max=4)
            return
        except SingularMatrix:
            continue
    pytest.fail("no invertible sample")


def test_rank2k1_commutative_integers():
    assert ncsys.rank2k1_commutative_sequence(1, 10) == [
        1, 1, 1, 2, 3, 7, 11, 26, 41, 97, 153,
    ]
    seq2 = ncsys.rank2k1_commutative_sequence(2, 12)
    assert all(v.denominator == 1 and v > 0 for v in seq2)


def test_rank2k1_detects_tampering():
    rng = random.Random(21)
    init = None
    while init is None:
        try:
            init = [
                random_invertible_matrix(rng, 3, lo=-3, hi=3) for _ in range(3)
            ]
            u = ncsys.rank2k1_evolve(1, init, -8, 8)
        except SingularMatrix:
            init = None
    u[4] = u[4] + u[4].one()
    K = ncsys.rank2k1_K(1, u)
    K2 = u[3].inv() * (u[5] + u[1])
    L2 = (u[4] + u[0]) * u[2].inv()
    assert not (K == K2 and K == L2)


# ---------------------------------------------------------------------------
# non-coprime rank 2


def test_noncoprime_conserved_and_substitution():
    R1, R2 = sample_pair(2)
    C = ncsys.noncoprime_check(R1, R2, n_max=7)
    assert not C.is_zero()


def test_noncoprime_commutative_seed():
    one = MatrixElement([[Fraction(1)]])
    two = MatrixElement([[Fraction(2)]])
    seq = ncsys.noncoprime_evolve(one, two, 8)
    vals = [seq[n].entries[0][0] for n in range(1, 9)]
    assert all(v > 0 and v.denominator == 1 for v in vals)


# ---------------------------------------------------------------------------
# rank-2 bipartite walk


@pytest.mark.parametrize("bc,period", [((1, 1), 5), ((1, 2), 6), ((1, 3), 8)])
def test_rank2_walk_periodicity(bc, period):
    ncsys.rank2_walk_check(bc, period, seed=13 * bc[1] + 1)


def test_rank2_walk_wrong_period_fails():
    with pytest.raises(CheckFailed):
        ncsys.rank2_walk_check((1, 2), 5, seed=27)
