"""Commutative Q-system engine with exact Laurent division."""

from fractions import Fraction

from ..errors import CheckFailed, InexactDivision, MissingData
from ..motzkin import enumerate_motzkin
from ..paths import fraction_det
from ..rings import CommLaurent


def laurent_divide(num, den):
    """Exact quotient of commutative Laurent polynomials.

    Both arguments are shifted to honest polynomials, divided by lex long
    division, and shifted back; a nonzero remainder (equivalently a
    non-divisible leading term) raises InexactDivision."""
    if den.is_zero():
        raise InexactDivision("division by zero")
    if num.is_zero():
        return num
    k = len(num.gens)

    def shift_vector(terms):
        return tuple(min(e[j] for e in terms) for j in range(k))

    ns = shift_vector(num.terms)
    ds = shift_vector(den.terms)
    nterms = {tuple(a - b for a, b in zip(e, ns)): c for e, c in num.terms.items()}
    dterms = {tuple(a - b for a, b in zip(e, ds)): c for e, c in den.terms.items()}
    dlead = max(dterms)
    dcoef = dterms[dlead]
    quot = {}
    rem = dict(nterms)
    while rem:
        lead = max(rem)
        qexp = tuple(a - b for a, b in zip(lead, dlead))
        if any(e < 0 for e in qexp):
            raise InexactDivision("leading term not divisible")
        qc = rem[lead] / dcoef
        quot[qexp] = qc
        for e, c in dterms.items():
            tgt = tuple(a + b for a, b in zip(qexp, e))
            v = rem.get(tgt, Fraction(0)) - qc * c
            if v:
                rem[tgt] = v
            else:
                rem.pop(tgt, None)
    offset = tuple(a - b for a, b in zip(ns, ds))
    return CommLaurent(
        num.gens, {tuple(a + b for a, b in zip(e, offset)): c for e, c in quot.items()}
    )


class QSystemState:
    """A window of the bilinear recursion
    R_{i,n+1} R_{i,n-1} = R_{i,n}^2 + R_{i+1,n} R_{i-1,n}
    with unit boundaries at i = 0 and i = r + 1."""

    def __init__(self, r, table):
        self.r = r
        self.table = dict(table)
        self._one = next(iter(self.table.values())).one()

    def get(self, i, n):
        if i == 0 or i == self.r + 1:
            return self._one
        value = self.table.get((i, n))
        if value is None:
            raise MissingData("R_{%d,%d} not filled" % (i, n))
        return value

    def has(self, i, n):
        return i == 0 or i == self.r + 1 or (i, n) in self.table

    def check_window(self):
        for (i, n) in list(self.table):
            if all(self.has(i, n + d) for d in (-1, 1)) and all(
                self.has(j, n) for j in (i - 1, i + 1)
            ):
                lhs = self.get(i, n + 1) * self.get(i, n - 1)
                rhs = self.get(i, n) * self.get(i, n) + self.get(i + 1, n) * self.get(
                    i - 1, n
                )
                if lhs != rhs:
                    raise CheckFailed("qsystem-window", "cell (%d,%d)" % (i, n))
        return True


def _divide(num, den):
    if isinstance(num, CommLaurent):
        return laurent_divide(num, den)
    return num * den.inv()


def qsystem_evolve(state, n_lo, n_hi):
    """Fill every cell (i, n) with 1 <= i <= r, n_lo <= n <= n_hi, by
    relaxation: any cell whose bilinear neighbors are present is solved for,
    in either time direction, until the window closes."""
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
                    num = state.get(i, center) * state.get(i, center) + state.get(
                        i + 1, center
                    ) * state.get(i - 1, center)
                    filled = _divide(num, state.get(i, opposite))
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


def symbolic_cluster_state(r, path):
    """Initial data for the cluster labelled by a Motzkin path: one fresh
    generator per cell (i, m_i) and (i, m_i + 1)."""
    gens = []
    for i in range(1, r + 1):
        gens.extend(["x%d_0" % i, "x%d_1" % i])
    gens = tuple(gens)
    table = {}
    for i in range(1, r + 1):
        m = path.entry(i)
        table[(i, m)] = CommLaurent.gen(gens, 2 * (i - 1))
        table[(i, m + 1)] = CommLaurent.gen(gens, 2 * (i - 1) + 1)
    return QSystemState(r, table)


def laurent_positive(value):
    return all(c > 0 and c.denominator == 1 for c in value.terms.values())


def positivity_check(r, n_max, paths=None):
    """In every cluster, each R_{1,n} for 0 <= n <= n_max must be a Laurent
    polynomial in the cluster variables with positive integer coefficients."""
    results = {}
    for path in paths if paths is not None else enumerate_motzkin(r):
        state = symbolic_cluster_state(r, path)
        lo = min(0, min(path.entries))
        hi = max(n_max, max(path.entries) + 1)
        qsystem_evolve(state, lo, hi)
        for n in range(0, n_max + 1):
            value = state.get(1, n)
            if not laurent_positive(value):
                raise CheckFailed(
                    "laurent-positivity",
                    "cluster %s, R_{1,%d}" % (path.entries, n),
                )
            results[(path.entries, n)] = len(value.terms)
    return results


def numeric_state(r, seed_values):
    """State over constant Laurent elements from per-cell rational seeds,
    given as a dict (i, n) -> value."""
    table = {
        key: CommLaurent.const((), Fraction(v)) for key, v in seed_values.items()
    }
    return QSystemState(r, table)


def rank_one_sequence(n_max, seed=(1, 1)):
    state = numeric_state(1, {(1, 0): seed[0], (1, 1): seed[1]})
    qsystem_evolve(state, 0, n_max)
    return [state.get(1, n).terms.get((), Fraction(0)) for n in range(n_max + 1)]


def wronskian_reduction_check(state, i, n):
    """det(R_{1,n+i+1-a-b})_{a,b=1..i} must equal R_{i,n} (numeric backend)."""

    def rv(j, k):
        return state.get(j, k).terms.get((), Fraction(0))

    got = fraction_det(
        [[rv(1, n + i + 1 - a - b) for b in range(1, i + 1)] for a in range(1, i + 1)]
    )
    want = rv(i, n) if i <= state.r else Fraction(1)
    if got != want:
        raise CheckFailed(
            "wronskian-reduction", "i=%d n=%d: %s != %s" % (i, n, got, want)
        )
    return got


def translation_check(r, n_max, shift, seed):
    """Solving from shifted initial data reproduces the index-shifted table."""
    import random

    rng = random.Random(seed)
    seeds = {}
    for i in range(1, r + 1):
        seeds[(i, 0)] = Fraction(rng.randint(1, 4))
        seeds[(i, 1)] = Fraction(rng.randint(1, 4))
    base = qsystem_evolve(numeric_state(r, seeds), 0, n_max + shift)
    moved = qsystem_evolve(
        numeric_state(
            r,
            {
                (i, n + shift): base.get(i, n + shift).terms[()]
                for i in range(1, r + 1)
                for n in (0, 1)
            },
        ),
        shift,
        n_max + shift,
    )
    for i in range(1, r + 1):
        for n in range(shift, n_max + shift + 1):
            if base.get(i, n) != moved.get(i, n):
                raise CheckFailed("translation", "cell (%d,%d)" % (i, n))
    return True
