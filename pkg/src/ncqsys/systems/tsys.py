"""T-system lattice engine and its shift-operator realization.

The octahedron recursion T_{i,j,k+1} T_{i,j,k-1} = T_{i,j+1,k} T_{i,j-1,k}
+ T_{i+1,j,k} T_{i-1,j,k} is solved on a j-periodic lattice; the associated
operators act on a basis {|t>} by a diagonal coefficient composed with a
downward shift, and the quasi-Wronskians of R_n = T_{1,n} act by ratios of
lattice values.
"""

import random
from fractions import Fraction

from ..errors import CheckFailed, MissingData, NotAUnit, WindowTooSmall
from ..motzkin import WeightAssignment, weights_from_cd
from ..quasidet import cd_variables, quasi_wronskian


class TSystemState:
    """Lattice values T_{i,j,k}, periodic in j with even period J and with
    unit boundaries at i = 0 and i = r + 1."""

    def __init__(self, r, J, table):
        if J % 2:
            raise ValueError("period J must be even")
        self.r = r
        self.J = J
        self.table = {(i, j % J, k): Fraction(v) for (i, j, k), v in table.items()}

    def get(self, i, j, k):
        if i == 0 or i == self.r + 1:
            return Fraction(1)
        value = self.table.get((i, j % self.J, k))
        if value is None:
            raise MissingData("T_{%d,%d,%d} not filled" % (i, j, k))
        return value

    def has(self, i, j, k):
        return i in (0, self.r + 1) or (i, j % self.J, k) in self.table


def random_tsystem(r, J, seed, k_max, lo=1, hi=4):
    """Generic positive rational initial data on the slices k = 0, 1,
    evolved up to k = k_max."""
    rng = random.Random(seed)
    table = {
        (i, j, k): Fraction(rng.randint(lo, hi))
        for i in range(1, r + 1)
        for j in range(J)
        for k in (0, 1)
    }
    state = TSystemState(r, J, table)
    tsystem_evolve(state, k_max)
    return state


def tsystem_evolve(state, k_max):
    filled = max(k for (_, _, k) in state.table)
    for k in range(filled, k_max):
        for i in range(1, state.r + 1):
            for j in range(state.J):
                if state.has(i, j, k + 1):
                    continue
                num = state.get(i, j + 1, k) * state.get(i, j - 1, k) + state.get(
                    i + 1, j, k
                ) * state.get(i - 1, j, k)
                state.table[(i, j % state.J, k + 1)] = num / state.get(i, j, k - 1)
    return state


def tsystem_window_check(state):
    for (i, j, k) in list(state.table):
        if state.has(i, j, k + 1) and state.has(i, j, k - 1):
            lhs = state.get(i, j, k + 1) * state.get(i, j, k - 1)
            rhs = state.get(i, j + 1, k) * state.get(i, j - 1, k) + state.get(
                i + 1, j, k
            ) * state.get(i - 1, j, k)
            if lhs != rhs:
                raise CheckFailed("tsystem-window", "cell (%d,%d,%d)" % (i, j, k))
    return True


class ShiftOperator:
    """Operator on the basis {|t>}: A|t> = sum_s c_s(t) |t - s>.

    `window` is the set of input labels t on which the action is known;
    `terms` maps each shift s to its diagonal coefficient map t -> c_s(t)
    (zeros dropped).  Operations intersect windows, so a product is only
    defined where every factor's action stays inside known territory.
    """

    __slots__ = ("window", "terms")

    def __init__(self, window, terms):
        self.window = frozenset(window)
        clean = {}
        for s, diag in terms.items():
            kept = {t: Fraction(c) for t, c in diag.items() if t in self.window and c}
            if kept:
                clean[s] = kept
        self.terms = clean

    @classmethod
    def diagonal_shift(cls, window, shift, coeff_fn):
        return cls(window, {shift: {t: coeff_fn(t) for t in window}})

    def one(self):
        return ShiftOperator(self.window, {0: {t: Fraction(1) for t in self.window}})

    def zero(self):
        return ShiftOperator(self.window, {})

    def is_zero(self):
        if not self.window:
            raise WindowTooSmall("zero test on an empty window")
        return not self.terms

    def action(self, t):
        """The image of |t> as a map (output label) -> coefficient."""
        if t not in self.window:
            raise WindowTooSmall("|%d> outside the operator window" % t)
        return {t - s: diag[t] for s, diag in self.terms.items() if t in diag}

    def __add__(self, other):
        other = self._coerce(other)
        window = self.window & other.window
        terms = {}
        for src in (self.terms, other.terms):
            for s, diag in src.items():
                acc = terms.setdefault(s, {})
                for t, c in diag.items():
                    if t in window:
                        acc[t] = acc.get(t, Fraction(0)) + c
        return ShiftOperator(window, terms)

    __radd__ = __add__

    def __neg__(self):
        return ShiftOperator(
            self.window, {s: {t: -c for t, c in d.items()} for s, d in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def _coerce(self, other):
        if isinstance(other, ShiftOperator):
            return other
        if isinstance(other, (int, Fraction)):
            return ShiftOperator(
                self.window, {0: {t: Fraction(other) for t in self.window}}
            )
        raise TypeError("cannot combine ShiftOperator with %r" % type(other).__name__)

    def __mul__(self, other):
        other = self._coerce(other)
        window = set()
        for t in other.window:
            ok = True
            for s, diag in other.terms.items():
                if t in diag and (t - s) not in self.window:
                    ok = False
                    break
            if ok:
                window.add(t)
        terms = {}
        for sB, diagB in other.terms.items():
            for t, cB in diagB.items():
                if t not in window:
                    continue
                mid = t - sB
                for sA, diagA in self.terms.items():
                    cA = diagA.get(mid)
                    if cA is None:
                        continue
                    acc = terms.setdefault(sA + sB, {})
                    acc[t] = acc.get(t, Fraction(0)) + cA * cB
        return ShiftOperator(window, terms)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def scale(self, value):
        value = Fraction(value)
        return ShiftOperator(
            self.window,
            {s: {t: c * value for t, c in d.items()} for s, d in self.terms.items()},
        )

    def inv(self):
        if len(self.terms) != 1:
            raise NotAUnit("inverse needs a single shift component")
        ((s, diag),) = self.terms.items()
        if any(t not in diag for t in self.window):
            raise NotAUnit("operator annihilates a basis vector")
        return ShiftOperator(
            {t - s for t in self.window},
            {-s: {t - s: 1 / c for t, c in diag.items()}},
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, ShiftOperator):
            return NotImplemented
        shared = self.window & other.window
        if not shared:
            raise WindowTooSmall("operator comparison on disjoint windows")
        return all(self.action(t) == other.action(t) for t in shared)

    def __hash__(self):
        raise TypeError("ShiftOperator is unhashable (window equality)")

    def __repr__(self):
        return "ShiftOperator(shifts=%s, |window|=%d)" % (
            sorted(self.terms),
            len(self.window),
        )


def operator_sequence(state, n_values, window):
    """R_n = T_{1,n} as ShiftOperators: R_n |j+n+1> = T_{1,j,n} |j-n-1>."""
    return {
        n: ShiftOperator.diagonal_shift(
            window, 2 * (n + 1), lambda t, n=n: state.get(1, t - n - 1, n)
        )
        for n in n_values
    }


def default_window(state, k_lo, k_hi, margin=None):
    if margin is None:
        margin = 6 * (abs(k_hi) + state.r + 3)
    return range(-margin, margin + 1)


def tsystem_operator_check(state, n_values):
    """Quasi-Wronskians of the operator sequence act by lattice ratios:
    Delta_{i,n} |j+n+i> = (T_{i,j,n} / T_{i-1,j,n-1}) |j-n-i| for
    i = 1..r+1, and Delta_{r+2,n} annihilates every in-window vector."""
    r = state.r
    n_values = sorted(n_values)
    k_lo = n_values[0] - (r + 2)
    k_hi = n_values[-1] + (r + 2)
    if k_lo < 0:
        raise WindowTooSmall("operator check needs n >= r + 2")
    window = default_window(state, k_lo, k_hi)
    seq = operator_sequence(state, range(k_lo, k_hi + 1), window)
    cache = {}
    checked = 0
    for n in n_values:
        for i in range(1, r + 3):
            delta = quasi_wronskian(seq, i, n, cache)
            if i == r + 2:
                if not delta.is_zero():
                    raise CheckFailed(
                        "truncation-operator", "Delta_{%d,%d} != 0" % (i, n)
                    )
                checked += len(delta.window)
                continue
            for t in sorted(delta.window):
                j = t - n - i
                want = {
                    t
                    - 2 * (n + i): state.get(i, j, n)
                    / state.get(i - 1, j, n - 1)
                }
                if delta.action(t) != want:
                    raise CheckFailed(
                        "operator-action", "Delta_{%d,%d} on |%d>" % (i, n, t)
                    )
                checked += 1
    return checked


def lattice_c(state, i, t, m):
    if i == 0:
        return Fraction(1)
    return state.get(i, t, m) / state.get(i, t + 1, m - 1)


def lattice_d(state, i, t, m):
    return (
        state.get(i + 1, t, m)
        * state.get(i - 1, t + 1, m - 1)
        / (state.get(i, t + 1, m) * state.get(i, t, m - 1))
    )


def tsystem_weights_check(state, path, order=4):
    """Skeleton weight operators built from the quasi-Wronskian C/D route.

    Asserts the odd weight acts by the ratio of c-values with a downward
    shift of 2, the even weight by the d-value with its up/down corrections,
    and that the continued-fraction series in these operator weights
    reproduces the lattice entries through sum_n t^n R_{n+m_1} R_{m_1}^{-1}.
    """
    from ..cfrac import fm_series
    from ..series import TSeries

    r = state.r
    if path.r != r:
        raise ValueError("path rank does not match the lattice")
    shift = max(path.entries) + 1
    base = r + 2 + shift
    moved = path.__class__(tuple(m + base for m in path.entries))
    k_lo = 0
    k_hi = base + order + r + 3
    window = default_window(state, k_lo, k_hi)
    seq = operator_sequence(state, range(k_lo, k_hi + 1), window)
    cd = cd_variables(seq, r + 1, range(base - 1, base + order + 2))
    w = weights_from_cd(moved, cd)

    def entry(i):
        return moved.entry(i)

    for i in range(1, r + 2):
        op = w.y(2 * i - 1)
        for t in sorted(op.window):
            want = lattice_c(state, i, t + entry(i) + i - 1, entry(i) + 1) / lattice_c(
                state, i - 1, t + entry(i - 1) + i, entry(i - 1) + 1
            )
            if op.action(t) != {t - 2: want}:
                raise CheckFailed("odd-weight-action", "y_%d on |%d>" % (2 * i - 1, t))
    for i in range(1, r + 1):
        op = w.y(2 * i)
        for t in sorted(op.window):
            want = lattice_d(state, i, t + entry(i) + i, entry(i) + 1)
            if entry(i) == entry(i + 1) + 1:
                want = (
                    lattice_c(state, i + 1, t + entry(i + 1) + i, entry(i + 1) + 1)
                    / lattice_c(state, i + 1, t + entry(i) + i, entry(i) + 1)
                ) * want
            if entry(i) == entry(i - 1) - 1:
                want = want * (
                    lattice_c(state, i - 1, t + entry(i) + i, entry(i) + 1)
                    / lattice_c(state, i - 1, t + entry(i - 1) + i, entry(i - 1) + 1)
                )
            if op.action(t) != {t - 2: want}:
                raise CheckFailed("even-weight-action", "y_%d on |%d>" % (2 * i, t))

    m1 = moved.entry(1)
    series = fm_series(WeightAssignment(moved, list(w.values)), order, check_positive=False)
    base_inv = seq[m1].inv()
    want = TSeries([seq[n + m1] * base_inv for n in range(order + 1)], order)
    if series != want:
        raise CheckFailed("operator-series", "path %s" % (path.entries,))
    return w


def qsystem_reduction_check(r, J, seed, k_max):
    """A lattice seeded 2-periodically in j on one parity class reduces to
    the Q-system: R_{i,k} = T_{i,(i+k) mod 2,k}."""
    from .qsys import numeric_state, qsystem_evolve

    rng = random.Random(seed)
    R = {
        (i, k): Fraction(rng.randint(1, 4)) for i in range(1, r + 1) for k in (0, 1)
    }
    table = {}
    for i in range(1, r + 1):
        for j in range(J):
            for k in (0, 1):
                if (i + j + k) % 2 == 0:
                    table[(i, j, k)] = R[(i, k)]
                else:
                    table[(i, j, k)] = Fraction(rng.randint(1, 4))
    state = tsystem_evolve(TSystemState(r, J, table), k_max)
    qstate = qsystem_evolve(
        numeric_state(r, {key: v for key, v in R.items()}), 0, k_max
    )
    for i in range(1, r + 1):
        for k in range(k_max + 1):
            if state.get(i, (i + k) % 2, k) != qstate.get(i, k).terms[()]:
                raise CheckFailed("qsystem-reduction", "cell (%d,%d)" % (i, k))
    return state
