"""Quantum Q-system engine over the quantum torus.

The evolution q^(lambda_ii) R_{i,k+1} R_{i,k-1} = R_{i,k}^2 + R_{i+1,k} R_{i-1,k}
is solved by exact skew division inside a torus generated by one cluster's
variables; positivity, conservation, and the path-model route are checked
against the same torus.
"""

from fractions import Fraction

from ..cfrac import fm_series
from ..errors import CheckFailed, MissingData
from ..motzkin import WeightAssignment
from ..rings import QTorus, exact_skew_divide
from ..series import TSeries


def lambda_entry(r, i, j):
    """lambda_{ij} = min(i,j) (r + 1 - max(i,j))."""
    return min(i, j) * (r + 1 - max(i, j))


def cluster_torus(r, path):
    """Torus generated by the cluster variables R_{i,m_i}, R_{i,m_i+1},
    with R_{i,n} R_{j,n'} = q^((n'-n) lambda_{ij}) R_{j,n'} R_{i,n}."""
    labels = []
    for i in range(1, r + 1):
        labels.append((i, path.entry(i)))
        labels.append((i, path.entry(i) + 1))
    names = tuple("R%d_%d" % lab for lab in labels)
    skew = [
        [(nb - na) * lambda_entry(r, ia, ib) for (ib, nb) in labels]
        for (ia, na) in labels
    ]
    torus = QTorus(names, skew)
    return torus, labels


class QuantumState:
    """Window of quantum Q-system values, all expressed in one cluster's torus."""

    def __init__(self, r, torus, table):
        self.r = r
        self.torus = torus
        self.table = dict(table)
        self._one = torus.const(1)

    def get(self, i, n):
        if i == 0 or i == self.r + 1:
            return self._one
        value = self.table.get((i, n))
        if value is None:
            raise MissingData("R_{%d,%d} not filled" % (i, n))
        return value

    def has(self, i, n):
        return i in (0, self.r + 1) or (i, n) in self.table


def cluster_state(r, path):
    torus, labels = cluster_torus(r, path)
    table = {lab: torus.gen(a) for a, lab in enumerate(labels)}
    return QuantumState(r, torus, table)


def quantum_evolve(state, n_lo, n_hi):
    """Fill (i, n) for 1 <= i <= r, n_lo <= n <= n_hi, by relaxation with
    exact skew division in either time direction."""
    r = state.r
    wanted = [
        (i, n)
        for i in range(1, r + 1)
        for n in range(n_lo, n_hi + 1)
        if not state.has(i, n)
    ]
    lo = min([n_lo] + [n for (_, n) in state.table])
    hi = max([n_hi] + [n for (_, n) in state.table])
    progress = True
    while wanted and progress:
        progress = False
        remaining = []
        for i, n in wanted:
            filled = None
            for center in (n - 1, n + 1):
                if not (lo <= center <= hi):
                    continue
                opposite = 2 * center - n
                if (
                    state.has(i, center)
                    and state.has(i, opposite)
                    and state.has(i - 1, center)
                    and state.has(i + 1, center)
                ):
                    num = (
                        state.get(i, center) * state.get(i, center)
                        + state.get(i + 1, center) * state.get(i - 1, center)
                    ).q_scale(-lambda_entry(r, i, i))
                    side = "right" if n > center else "left"
                    filled = exact_skew_divide(num, state.get(i, opposite), side)
                    break
            if filled is None:
                remaining.append((i, n))
            else:
                state.table[(i, n)] = filled
                progress = True
        wanted = remaining
    if wanted:
        raise MissingData("cells %s unreachable from the given data" % wanted)
    return state


def qcommutation_check(state, cells=None):
    """Pairs in the stored window that share a cluster-shaped layout must
    satisfy R_{i,n} R_{j,n+p} = q^(p lambda_{ij}) R_{j,n+p} R_{i,n}."""
    r = state.r
    cells = sorted(state.table) if cells is None else sorted(cells)
    for a, (i, n) in enumerate(cells):
        for (j, np_) in cells[a:]:
            lhs = state.get(i, n) * state.get(j, np_)
            rhs = (state.get(j, np_) * state.get(i, n)).q_scale(
                (np_ - n) * lambda_entry(r, i, j)
            )
            if lhs != rhs:
                raise CheckFailed(
                    "q-commutation", "(%d,%d) vs (%d,%d)" % (i, n, j, np_)
                )
    return True


def q_positive(value):
    """Coefficients in Z_+[q, q^-1]: every q-power coefficient a positive integer."""
    return all(
        c > 0 and c.denominator == 1 for qp in value.terms.values() for c in qp.values()
    )


def quantum_weights(state, path):
    """Skeleton weights in the cluster torus.

    The odd weight is q^(i-1) R_{i,m_i+1} R_{i,m_i}^{-1} R_{i-1,m_{i-1}}
    R_{i-1,m_{i-1}+1}^{-1}.  The even weight's displayed prefix/suffix factors
    leave the cluster; q-commutation collapses them onto cluster variables:
    the prefix cancels exactly against the head of the core, and the suffix
    contributes q^(lambda_{i-1,i-1}) R_{i-1,m_{i-1}}^2 R_{i-1,m_{i-1}+1}^{-1}
    in place of the tail R_{i-1,m_i} ... segment.
    """
    r = state.r

    def R(i, n):
        return state.get(i, n)

    def m(i):
        return path.entry(i)

    values = []
    for i in range(1, r + 2):
        odd = R(i, m(i) + 1) * R(i, m(i)).inv()
        if i > 1:
            odd = odd * R(i - 1, m(i - 1)) * R(i - 1, m(i - 1) + 1).inv()
        values.append(odd.q_scale(i - 1))
        if i > r:
            break
        if m(i) == m(i + 1) + 1:
            even = (
                R(i + 1, m(i + 1) + 1)
                * R(i + 1, m(i + 1)).inv()
                * R(i + 1, m(i + 1) + 1)
            )
        else:
            even = R(i + 1, m(i) + 1)
        even = even * R(i, m(i) + 1).inv() * R(i, m(i)).inv()
        if i > 1:
            if m(i) == m(i - 1) - 1:
                even = (
                    even * R(i - 1, m(i - 1)) * R(i - 1, m(i - 1)) * R(i - 1, m(i - 1) + 1).inv()
                ).q_scale(lambda_entry(r, i - 1, i - 1))
            else:
                even = even * R(i - 1, m(i))
        values.append(even)
    return WeightAssignment(path, values)


def conservation_check(weights):
    """The decreasing product of odd weights equals the central q^(r(r+1)/2)."""
    r = weights.path.r
    product = weights.y(2 * r + 1)
    for a in range(2 * r - 1, 0, -2):
        product = product * weights.y(a)
    want = weights.one().q_scale(r * (r + 1) // 2)
    if product != want:
        raise CheckFailed("quantum-conservation", "path %s" % (weights.path.entries,))
    return product


def quantum_positivity_check(r, path, n_max, order=None):
    """Torus evolution and the path model agree on R_{1,n+m_1} R_{1,m_1}^{-1}
    in the cluster labelled by `path`, with coefficients in Z_+[q, q^-1]."""
    if order is None:
        order = n_max
    state = cluster_state(r, path)
    lo = min(0, min(path.entries))
    hi = max(n_max + path.entry(1), max(path.entries) + 1)
    quantum_evolve(state, lo, hi)
    qcommutation_check(
        state, [(i, path.entry(i) + d) for i in range(1, r + 1) for d in (0, 1)]
    )
    m1 = path.entry(1)
    base_inv = state.get(1, m1).inv()
    for n in range(0, n_max + 1):
        value = state.get(1, n + m1) * base_inv
        if not q_positive(value):
            raise CheckFailed(
                "quantum-positivity", "cluster %s, n=%d" % (path.entries, n)
            )
    weights = quantum_weights(state, path)
    conservation_check(weights)
    series = fm_series(weights, order, check_positive=False)
    want = TSeries(
        [state.get(1, n + m1) * base_inv for n in range(order + 1)], order
    )
    if series != want:
        raise CheckFailed("quantum-two-routes", "cluster %s" % (path.entries,))
    return state, weights


def wronskian_expansion_check(r, n_values):
    """The closed-form quantum Wronskians, in the fundamental cluster:
    R_{2,n} = q^r R_{n+1} R_{n-1} - R_n^2 and the cubic expansion of R_{3,n}
    (the boundary rows reduce them to 1 when i = r + 1)."""
    from ..motzkin import fundamental_path

    n_values = sorted(n_values)
    state = cluster_state(r, fundamental_path(r))
    quantum_evolve(state, n_values[0] - 2, n_values[-1] + 2)

    def R1(n):
        return state.get(1, n)

    def expected(i, n):
        if i > r + 1:
            return state.torus.const(0)
        return state.get(i, n)

    for n in n_values:
        w2 = (R1(n + 1) * R1(n - 1)).q_scale(r) - R1(n) * R1(n)
        if w2 != expected(2, n):
            raise CheckFailed("quantum-wronskian", "i=2, n=%d" % n)
        w3 = (
            (R1(n + 2) * R1(n) * R1(n - 2)).q_scale(3 * r - 1)
            - (R1(n + 2) * R1(n - 1) * R1(n - 1) + R1(n + 1) * R1(n + 1) * R1(n - 2)).q_scale(
                2 * r - 1
            )
            + (R1(n + 1) * R1(n) * R1(n - 1)).q_scale(r - 1)
            + (R1(n + 1) * R1(n) * R1(n - 1)).q_scale(2 * r)
            - R1(n) * R1(n) * R1(n)
        )
        if w3 != expected(3, n):
            raise CheckFailed("quantum-wronskian", "i=3, n=%d" % n)
    return state


def bar_invariance_check(r, i_max, n_values):
    """Bar-invariance of the quasi-Wronskians.

    The involution * fixes the whole sequence R_n, reverses products, and
    sends q to q^-1; it is not the generator-fixing reversal of the torus.
    With Delta_{i,n} = q^-c R_{i,n} R_{i-1,n-1}^{-1}, c = (i-1)(2r+2-i)/2,
    the statement Delta* = Delta is equivalent to the inverse-free identity
    (R_{i,n})* R_{i-1,n-1} = q^{-2c} (R_{i-1,n-1})* R_{i,n}, where the starred
    Wronskians are obtained by reversing each term of their R-expansions."""
    from ..motzkin import fundamental_path

    n_values = sorted(n_values)
    state = cluster_state(r, fundamental_path(r))
    quantum_evolve(state, n_values[0] - 3, n_values[-1] + 3)

    def R1(n):
        return state.get(1, n)

    def wronskian(i, n, star):
        sign = -1 if star else 1
        if i == 0:
            return state.torus.const(1)
        if i == 1:
            return R1(n)
        if i == 2:
            if star:
                return (R1(n - 1) * R1(n + 1)).q_scale(-r) - R1(n) * R1(n)
            return (R1(n + 1) * R1(n - 1)).q_scale(r) - R1(n) * R1(n)
        if i == 3:
            def prod(*ns):
                out = state.torus.const(1)
                for k in (reversed(ns) if star else ns):
                    out = out * R1(k)
                return out

            return (
                prod(n + 2, n, n - 2).q_scale(sign * (3 * r - 1))
                - (prod(n + 2, n - 1, n - 1) + prod(n + 1, n + 1, n - 2)).q_scale(
                    sign * (2 * r - 1)
                )
                + prod(n + 1, n, n - 1).q_scale(sign * (r - 1))
                + prod(n + 1, n, n - 1).q_scale(sign * 2 * r)
                - prod(n, n, n)
            )
        raise ValueError("expansion only available for i <= 3")

    for i in range(2, i_max + 1):
        c = ((i - 1) * (2 * r + 2 - i)) // 2
        for n in n_values:
            lhs = wronskian(i, n, star=True) * wronskian(i - 1, n - 1, star=False)
            rhs = (wronskian(i - 1, n - 1, star=True) * wronskian(i, n, star=False)).q_scale(
                -2 * c
            )
            if lhs != rhs:
                raise CheckFailed("bar-invariance", "Delta_{%d,%d}" % (i, n))
    return True


def a1_quantum_check(n_max=5):
    """Rank one: lambda_11 = 1, R_2 = q^-1 (R_1^2 + 1) R_0^{-1}, and every
    R_n R_0^{-1} positive."""
    from ..motzkin import fundamental_path

    path = fundamental_path(1)
    state = cluster_state(1, path)
    quantum_evolve(state, 0, n_max)
    R0, R1 = state.get(1, 0), state.get(1, 1)
    want = exact_skew_divide((R1 * R1 + state.torus.const(1)).q_scale(-1), R0, "right")
    if state.get(1, 2) != want:
        raise CheckFailed("a1-quantum", "R_2 closed form")
    for n in range(n_max + 1):
        if not q_positive(state.get(1, n) * R0.inv()):
            raise CheckFailed("a1-quantum", "positivity at n=%d" % n)
    return state
