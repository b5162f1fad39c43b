"""Branched continued fractions as explicit expression trees.

A fraction is a tree built from four node kinds: ring-valued leaves
carrying an explicit power of the central variable t, ordered sums,
ordered products, and the inversion node Inv(x) standing for (1 - x)^{-1}.
Trees are evaluated exactly as truncated t-series, and rewritten by a
small set of exact rearrangement rules that never assume the ring
coefficients commute.
"""

from .errors import CheckFailed, NonInvertibleSum, PatternMismatch
from .motzkin import ASCENT, DESCENT
from .series import DEFAULT_ORDER, TSeries


class Node:
    kind = None

    @property
    def children(self):
        return []

    def replace(self, index, new_child):
        kids = list(self.children)
        kids[index] = new_child
        return self._rebuild(kids)

    def __eq__(self, other):
        if not isinstance(other, Node) or self.kind != other.kind:
            return False
        if isinstance(self, Leaf):
            return self.tpow == other.tpow and self.value == other.value
        a, b = self.children, other.children
        return len(a) == len(b) and all(x == y for x, y in zip(a, b))

    def __repr__(self):
        return to_sexpr(self)


class Leaf(Node):
    kind = "leaf"

    def __init__(self, tpow, value):
        self.tpow = tpow
        self.value = value

    def _rebuild(self, kids):
        return self


class Sum(Node):
    kind = "sum"

    def __init__(self, terms):
        self.terms = list(terms)

    @property
    def children(self):
        return self.terms

    def _rebuild(self, kids):
        return Sum(kids)


class Prod(Node):
    kind = "prod"

    def __init__(self, factors):
        self.factors = list(factors)

    @property
    def children(self):
        return self.factors

    def _rebuild(self, kids):
        return Prod(kids)


class Inv(Node):
    """Inv(x) denotes (1 - x)^{-1}."""

    kind = "inv"

    def __init__(self, child):
        self.child = child

    @property
    def children(self):
        return [self.child]

    def _rebuild(self, kids):
        return Inv(kids[0])


class Neg(Node):
    kind = "neg"

    def __init__(self, child):
        self.child = child

    @property
    def children(self):
        return [self.child]

    def _rebuild(self, kids):
        return Neg(kids[0])


def to_sexpr(node):
    if isinstance(node, Leaf):
        body = node.value.canonical_str()
        return body if node.tpow == 0 else "t^%d*(%s)" % (node.tpow, body)
    label = {"sum": "+", "prod": "*", "inv": "inv1m", "neg": "-"}[node.kind]
    return "(%s %s)" % (label, " ".join(to_sexpr(c) for c in node.children))


def find_leaf(node):
    if isinstance(node, Leaf):
        return node
    for child in node.children:
        got = find_leaf(child)
        if got is not None:
            return got
    return None


def evaluate(node, order=DEFAULT_ORDER, one=None):
    """Expand the tree as an exact truncated series in t."""
    if one is None:
        leaf = find_leaf(node)
        if leaf is None:
            raise ValueError("cannot infer the ring from a leafless tree")
        one = leaf.value.one()
    if isinstance(node, Leaf):
        return TSeries.term(node.value, node.tpow, order)
    if isinstance(node, Neg):
        return -evaluate(node.child, order, one)
    if isinstance(node, Sum):
        total = TSeries.const(one.zero(), order)
        for term in node.terms:
            total = total + evaluate(term, order, one)
        return total
    if isinstance(node, Prod):
        total = TSeries.const(one, order)
        for factor in node.factors:
            total = total * evaluate(factor, order, one)
        return total
    if isinstance(node, Inv):
        inner = evaluate(node.child, order, one)
        return (TSeries.const(one, order) - inner).inv_right()
    raise TypeError("not a fraction node: %r" % (node,))


def simplify(node):
    """Collapse single-child sums/products and merge adjacent leaf factors."""
    if isinstance(node, Leaf):
        return node
    kids = [simplify(c) for c in node.children]
    if isinstance(node, Sum):
        return kids[0] if len(kids) == 1 else Sum(kids)
    if isinstance(node, Prod):
        merged = []
        for k in kids:
            if merged and isinstance(merged[-1], Leaf) and isinstance(k, Leaf):
                prev = merged.pop()
                merged.append(Leaf(prev.tpow + k.tpow, prev.value * k.value))
            else:
                merged.append(k)
        return merged[0] if len(merged) == 1 else Prod(merged)
    return node._rebuild(kids)


def _level_pieces(assignment, i):
    """(odd summands, even factor node) of level i, split so that the
    rearrangement rules can match the tree literally."""
    y = assignment.y
    cls = assignment.path.site_class(i)
    if cls == ASCENT:
        odd = [Leaf(1, y(2 * i - 1)), Leaf(1, y(2 * i))]
        even = Prod([Leaf(1, y(2 * i + 1)), Leaf(1, y(2 * i))])
    elif cls == DESCENT:
        cross = y(2 * i + 1).inv() * y(2 * i)
        odd = [Leaf(1, y(2 * i - 1)), Neg(Leaf(0, cross))]
        even = Leaf(0, cross)
    else:
        odd = [Leaf(1, y(2 * i - 1))]
        even = Leaf(1, y(2 * i))
    return odd, even


def jacobi_node(assignment):
    """The branched continued fraction J(t) of a weighted path."""
    r = assignment.path.r
    y = assignment.y
    level = Sum([Leaf(1, y(2 * r + 1))])
    for i in range(r, 0, -1):
        odd, even = _level_pieces(assignment, i)
        level = Sum(odd + [Prod([Inv(level), even])])
    return Inv(level)


def fm_node(assignment):
    """F(t) = 1 + t J(t) y_1 as a tree."""
    one = assignment.one()
    return Sum([Leaf(0, one),
                Prod([jacobi_node(assignment), Leaf(1, assignment.y(1))])])


def assert_nonnegative_integer_coefficients(series):
    for k, coeff in enumerate(series.coeffs):
        terms = getattr(coeff, "terms", None)
        if terms is None:
            raise CheckFailed("positivity", "backend has no monomial expansion")
        for mono, q in terms.items():
            if q < 0 or q.denominator != 1:
                raise CheckFailed(
                    "positivity",
                    "coefficient %s of %s at t^%d" % (q, mono, k),
                )


def fm_series(assignment, order=DEFAULT_ORDER, check_positive=None):
    """Expand F(t); by default the commutative-symbolic backend also
    verifies that every coefficient is a nonnegative-integer Laurent
    polynomial of the weights."""
    series = evaluate(fm_node(assignment), order, assignment.one())
    if check_positive is None:
        y1 = assignment.y(1)
        check_positive = getattr(y1, "backend", None) == "comm" and bool(
            getattr(y1, "gens", ())
        )
    if check_positive:
        assert_nonnegative_integer_coefficients(series)
    return series


# ---------------------------------------------------------------------------
# rearrangement rules


def _subtree(node, site):
    for index in site:
        kids = node.children
        if index >= len(kids):
            raise PatternMismatch("site %r leaves the tree" % (site,))
        node = kids[index]
    return node


def _replace_subtree(node, site, new_subtree):
    if not site:
        return new_subtree
    head = site[0]
    return node.replace(head, _replace_subtree(node.children[head], site[1:], new_subtree))


def _match_pull_through(sub):
    # a - x + (1 - c - u)^{-1} x   -->   a + (1 - c - u)^{-1} (c x + u x)
    if not (isinstance(sub, Sum) and len(sub.terms) == 3):
        raise PatternMismatch("expected a three-term sum")
    a, neg, tail = sub.terms
    if not (isinstance(neg, Neg) and isinstance(tail, Prod) and len(tail.factors) >= 2):
        raise PatternMismatch("expected - x + (...)^{-1} x")
    head = tail.factors[0]
    rest = tail.factors[1:]
    x = rest[0] if len(rest) == 1 else Prod(rest)
    if not (isinstance(head, Inv) and isinstance(head.child, Sum) and head.child.terms):
        raise PatternMismatch("expected an inverted sum")
    if x != neg.child:
        raise PatternMismatch("subtracted and pulled-through terms differ")
    c = head.child.terms[0]
    u = head.child.terms[1:]
    inner = [Prod([c, x])] + [Prod([term, x]) for term in u]
    return Sum([a, Prod([head, Sum(inner)])])


def _match_absorb(sub):
    # a + b + (1 - c - u)^{-1} c b   -->   a + (1 - (1-u)^{-1} c)^{-1} b
    if not (isinstance(sub, Sum) and len(sub.terms) == 3):
        raise PatternMismatch("expected a three-term sum")
    a, b, tail = sub.terms
    if not (isinstance(tail, Prod) and len(tail.factors) == 2):
        raise PatternMismatch("expected (...)^{-1} c b")
    head, cb = tail.factors
    if not (isinstance(head, Inv) and isinstance(head.child, Sum) and head.child.terms):
        raise PatternMismatch("expected an inverted sum")
    if not (isinstance(cb, Prod) and len(cb.factors) == 2):
        raise PatternMismatch("expected a two-factor product c b")
    c, b2 = cb.factors
    if c != head.child.terms[0] or b2 != b:
        raise PatternMismatch("product factors do not match the inverted sum")
    u = Sum(head.child.terms[1:])
    return Sum([a, Prod([Inv(Prod([Inv(u), c])), b])])


def _match_shift_one(sub):
    # 1 + (1 - a - b)^{-1} a   -->   (1 - (1-b)^{-1} a)^{-1}
    if not (isinstance(sub, Sum) and len(sub.terms) == 2):
        raise PatternMismatch("expected a two-term sum")
    unit, tail = sub.terms
    if not (isinstance(unit, Leaf) and unit.tpow == 0 and unit.value == unit.value.one()):
        raise PatternMismatch("expected a unit leaf")
    if not (isinstance(tail, Prod) and len(tail.factors) == 2):
        raise PatternMismatch("expected (...)^{-1} a")
    head, a = tail.factors
    if not (isinstance(head, Inv) and isinstance(head.child, Sum)
            and len(head.child.terms) == 2):
        raise PatternMismatch("expected an inverted two-term sum")
    a2, b = head.child.terms
    if a2 != a:
        raise PatternMismatch("numerator does not match the inverted sum")
    return Inv(Prod([Inv(b), a]))


def _match_flip(sub):
    # a + (1 - (1-d)^{-1} c)^{-1} b  -->  (1 - (1-c'-d)^{-1} b')^{-1} a'
    # with a' = a+b, b' = c b (a+b)^{-1}, c' = c a (a+b)^{-1}
    if not (isinstance(sub, Sum) and len(sub.terms) == 2):
        raise PatternMismatch("expected a two-term sum")
    a, tail = sub.terms
    if not (isinstance(tail, Prod) and len(tail.factors) == 2):
        raise PatternMismatch("expected (...)^{-1} b")
    head, b = tail.factors
    if not (isinstance(head, Inv) and isinstance(head.child, Prod)
            and len(head.child.factors) == 2):
        raise PatternMismatch("expected an inverted two-factor product")
    inner_inv, c = head.child.factors
    if not isinstance(inner_inv, Inv):
        raise PatternMismatch("expected (1-d)^{-1} as first factor")
    d = inner_inv.child
    for piece in (a, b, c):
        if not isinstance(piece, Leaf):
            raise PatternMismatch("a, b, c must be ring leaves")
    if a.tpow != b.tpow:
        raise PatternMismatch("a and b carry different powers of t")
    s = a.value + b.value
    try:
        s_inv = s.inv()
    except Exception as exc:
        raise NonInvertibleSum(str(exc))
    a_new = Leaf(a.tpow, s)
    b_new = Leaf(c.tpow + b.tpow - a.tpow, c.value * b.value * s_inv)
    c_new = Leaf(c.tpow, c.value * a.value * s_inv)
    return Prod([Inv(Prod([Inv(Sum([c_new, d])), b_new])), a_new])


_RULES = {
    "pull-through": _match_pull_through,
    "absorb": _match_absorb,
    "shift-one": _match_shift_one,
    "flip": _match_flip,
}

REARRANGEMENT_RULES = tuple(_RULES)


def rearrange(node, rule, site=(), order=None):
    """Apply one exact rearrangement at the subtree addressed by `site`
    (a tuple of child indices).  With `order` set, both versions of the
    subtree are expanded and compared, and a mismatch raises CheckFailed."""
    if rule not in _RULES:
        raise ValueError("unknown rule %r (have %s)" % (rule, ", ".join(_RULES)))
    sub = _subtree(node, site)
    new_sub = _RULES[rule](sub)
    if order is not None:
        one = find_leaf(sub).value.one()
        before = evaluate(sub, order, one)
        after = evaluate(new_sub, order, one)
        if before != after:
            raise CheckFailed(
                "rearrange:%s" % rule,
                "first difference at t^%s" % before.first_difference(after),
            )
    return _replace_subtree(node, site, new_sub)


def _level_site(i):
    """Address of the level-i sum inside F while levels < i are untouched:
    each raw level ends with the product Inv(next level) * (even factor)."""
    return (1, 0, 0) + (-1, 0, 0) * (i - 1)


def _resolve_site(node, site):
    out = []
    for index in site:
        kids = node.children
        if index < 0:
            index += len(kids)
        out.append(index)
        node = kids[index]
    return tuple(out)


def canonicalize(assignment, order=None):
    """Rewrite F(t) into its canonical positive form: rearrangements are
    applied at every non-flat site from the bottom level upwards, then the
    top level is folded so that the last factor is t y_1.  With `order`
    set, every step and the final tree are verified by series expansion."""
    path = assignment.path
    node = fm_node(assignment)
    for i in range(path.r, 0, -1):
        cls = path.site_class(i)
        if cls == 0:
            continue
        rule = "pull-through" if cls == DESCENT else "absorb"
        site = _resolve_site(node, _level_site(i))
        node = rearrange(node, rule, site, order)
    top_site = _resolve_site(node, (1, 0, 0))
    level_one = _subtree(node, top_site)
    first = level_one.terms[0]
    if first != Leaf(1, assignment.y(1)):
        raise CheckFailed("canonicalize", "top level does not lead with t y_1")
    node = Inv(Prod([Inv(Sum(level_one.terms[1:])), first]))
    node = simplify(node)
    if order is not None:
        got = evaluate(node, order, assignment.one())
        want = evaluate(fm_node(assignment), order, assignment.one())
        if got != want:
            raise CheckFailed(
                "canonicalize",
                "first difference at t^%s" % got.first_difference(want),
            )
    canonical_certificate(node)
    return node


def canonical_certificate(node):
    """Check the structural positivity certificate: no negations anywhere,
    and (for backends with a monomial expansion) every leaf is a single
    Laurent monomial with coefficient one."""
    if isinstance(node, Neg):
        raise CheckFailed("certificate", "negation node present")
    if isinstance(node, Leaf):
        terms = getattr(node.value, "terms", None)
        if terms is not None:
            if len(terms) != 1 or any(q != 1 for q in terms.values()):
                raise CheckFailed(
                    "certificate",
                    "leaf is not a unit monomial: %s" % node.value.canonical_str(),
                )
        return
    for child in node.children:
        canonical_certificate(child)


def stieltjes_node(xs):
    """The ordinary nested fraction (1 - t(1 - t(...)^{-1}x_2)^{-1}x_1)^{-1}."""
    node = None
    for value in reversed(xs):
        leaf = Leaf(1, value)
        node = Inv(leaf if node is None else Prod([node, leaf]))
    return node


def mutation_series_check(assignment, i, order=DEFAULT_ORDER):
    """Series law for one mutation: F is unchanged at interior sites, and
    picks up F = 1 + t F' y_1 at site 1.  Returns (F, F'); raises CheckFailed."""
    from .motzkin import mutate_weights

    before = fm_series(assignment, order)
    mutated = mutate_weights(assignment, i)
    after = fm_series(mutated, order)
    if i == 1:
        one = TSeries.const(assignment.one(), order)
        rebuilt = one + after * TSeries.term(assignment.y(1), 1, order)
    else:
        rebuilt = after
    if before != rebuilt:
        raise CheckFailed(
            "mutation-series",
            "site %d, first difference at t^%s" % (i, before.first_difference(rebuilt)),
        )
    return before, after


# ---------------------------------------------------------------------------
# linear recursion satisfied by the moments


def denominator_coefficients(values):
    """[P_0, ..., P_{r+1}] with P(t) = sum_i (-t)^i P_i, where P obeys
    P(y_1..y_{s+1}) = P(y_1..y_s) - t y_{s+1} P(y_1..y_{s-1}).  P_i equals
    the i-particle hard-particle sum on the segment, factors decreasing."""
    one = values[0].one()
    prev = [one]
    cur = [one, values[0]]
    for s in range(1, len(values)):
        y = values[s]
        nxt = [one] + [
            (cur[k] if k < len(cur) else one.zero())
            + (y * prev[k - 1] if k - 1 < len(prev) else one.zero())
            for k in range(1, len(prev) + 2)
        ]
        # trailing zeros appear when placements run out of room
        while nxt and nxt[-1].is_zero():
            nxt.pop()
        prev, cur = cur, nxt
    return cur


def recurrence_check(coefficients, seq, n_values):
    """sum_i (-1)^i P_i R_{n+r+1-i} = 0 for each n, the P_i multiplying
    from the left; raises CheckFailed with the offending n."""
    top = len(coefficients) - 1
    for n in n_values:
        acc = None
        for i, p in enumerate(coefficients):
            term = p * seq[n + top - i]
            if i % 2:
                term = -term
            acc = term if acc is None else acc + term
        if not acc.is_zero():
            raise CheckFailed("recurrence", "fails at n=%d" % n)


def extend_sequence(seq, coefficients, lo, hi):
    """Extend the moment sequence in both directions using the recursion;
    returns a new dict covering [lo, hi]."""
    out = dict(seq)
    top = len(coefficients) - 1
    lead_inv = None
    while max(out) < hi:
        n = max(out) + 1
        acc = None
        for i in range(1, top + 1):
            term = coefficients[i] * out[n - i]
            if i % 2 == 0:
                term = -term
            acc = term if acc is None else acc + term
        out[n] = acc
    while min(out) > lo:
        if lead_inv is None:
            lead_inv = coefficients[top].inv()
        n = min(out) - 1
        acc = None
        for i in range(0, top):
            term = coefficients[i] * out[n + top - i]
            if (top + i) % 2 == 0:
                term = -term
            acc = term if acc is None else acc + term
        out[n] = lead_inv * acc
    return out


def stieltjes_coefficients(seq, r, cache=None):
    """The 2r+1 nested-fraction coefficients of the moment series, as
    ratios of staircase quasi-determinants of the sequence."""
    from .quasidet import quasi_wronskian

    if cache is None:
        cache = {}

    def delta(i, n):
        if (i, n) not in cache:
            cache[(i, n)] = quasi_wronskian(seq, i, n)
        return cache[(i, n)]

    xs = []
    for i in range(1, r + 2):
        xs.append(delta(i, i) * delta(i, i - 1).inv())
        if i <= r:
            xs.append(delta(i + 1, i) * delta(i, i).inv())
    return xs


def truncation_check(seq, r, n_values):
    """The fraction terminates at depth 2r+1: the (r+2)-row staircase
    quasi-determinants of the sequence all vanish."""
    from .quasidet import quasi_wronskian

    for n in n_values:
        value = quasi_wronskian(seq, r + 2, n)
        if not value.is_zero():
            raise CheckFailed("truncation", "depth-%d minor at n=%d is nonzero" % (r + 2, n))
