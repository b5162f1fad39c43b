"""Motzkin paths, mutation moves, edge weights, and the weighted graph families."""

from .errors import InvalidMutationSite, MissingData, NonInvertibleSum, NotAUnit

ASCENT = 1
DESCENT = -1
FLAT = 0


class MotzkinPath:
    """Integer sequence (m_1..m_r) with steps in {-1, 0, +1}."""

    def __init__(self, entries):
        entries = tuple(int(v) for v in entries)
        if not entries:
            raise ValueError("a Motzkin path needs at least one entry")
        for a, b in zip(entries, entries[1:]):
            if abs(b - a) > 1:
                raise ValueError("step larger than one in %r" % (entries,))
        self.entries = entries

    @property
    def r(self):
        return len(self.entries)

    def is_fundamental(self):
        return min(self.entries) == 0

    def entry(self, i):
        """m_i with the virtual boundary values m_0 = m_1 and m_{r+1} = m_r."""
        if i <= 0:
            return self.entries[0]
        if i >= self.r:
            return self.entries[-1]
        return self.entries[i - 1]

    def step_after(self, i):
        """m_{i+1} - m_i, zero past the right end."""
        return self.entry(i + 1) - self.entry(i)

    def site_class(self, i):
        """ASCENT/DESCENT/FLAT classification of site i in 1..r+1."""
        if i > self.r:
            return FLAT
        return self.step_after(i)

    def __eq__(self, other):
        return isinstance(other, MotzkinPath) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "MotzkinPath(%s)" % (self.entries,)

    def __iter__(self):
        return iter(self.entries)


def fundamental_path(r):
    return MotzkinPath((0,) * r)


def enumerate_motzkin(r):
    """All paths of r entries with unit steps and minimum zero, in sorted order."""
    out = []

    def extend(prefix):
        if len(prefix) == r:
            if min(prefix) == 0:
                out.append(MotzkinPath(prefix))
            return
        for step in (-1, 0, 1):
            extend(prefix + (prefix[-1] + step,))

    for start in range(r):
        extend((start,))
    unique = sorted(set(p.entries for p in out))
    return [MotzkinPath(e) for e in unique]


def mutation_case(path, i):
    """'i' or 'ii' when raising entry i is an admissible move, else an error.

    The local pattern (m_{i-1}, m_i, m_{i+1}) must read (a, a, a+1) [case i,
    only for i >= 2] or (a, a, a) [case ii]; missing boundary entries are read
    as equal to their neighbor.
    """
    if not 1 <= i <= path.r:
        raise InvalidMutationSite(i, "site out of range")
    cur = path.entry(i)
    if path.entry(i - 1) != cur:
        raise InvalidMutationSite(i, "left neighbor differs")
    nxt = path.entry(i + 1)
    if nxt == cur + 1:
        if i == 1:
            raise InvalidMutationSite(i, "ascending pattern not raisable at the left end")
        return "i"
    if nxt == cur:
        return "ii"
    raise InvalidMutationSite(i, "pattern is neither admissible case")


def mutate_path(path, i):
    mutation_case(path, i)
    entries = list(path.entries)
    entries[i - 1] += 1
    return MotzkinPath(entries)


def mutation_sequence(target):
    """Deterministic move list from the flat path to target.

    Depth-first search trying sites left to right; any successful sequence has
    length sum(m_i), so the first one found is taken.
    """
    target = MotzkinPath(target)
    if min(target.entries) < 0:
        raise InvalidMutationSite(0, "target leaves the fundamental domain")
    total = sum(target.entries)

    def search(cur, moves):
        if len(moves) == total:
            return moves if cur == target else None
        for i in range(1, cur.r + 1):
            if cur.entry(i) >= target.entry(i):
                continue
            try:
                nxt = mutate_path(cur, i)
            except InvalidMutationSite:
                continue
            found = search(nxt, moves + [i])
            if found is not None:
                return found
        return None

    found = search(fundamental_path(target.r), [])
    if found is None:
        raise InvalidMutationSite(0, "target %r unreachable by admissible moves" % (target.entries,))
    return found


class WeightAssignment:
    """Skeleton weights y_1..y_{2r+1} attached to a Motzkin path."""

    def __init__(self, path, y):
        self.path = path
        y = list(y)
        if len(y) != 2 * path.r + 1:
            raise ValueError("expected %d weights, got %d" % (2 * path.r + 1, len(y)))
        self._y = tuple(y)

    @property
    def r(self):
        return self.path.r

    def y(self, a):
        return self._y[a - 1]

    @property
    def values(self):
        return self._y

    def one(self):
        return self._y[0].one()

    def hat(self, a):
        """The graded weight on edge a of G_m, as a dict {t-power: coefficient}.

        Ascending sites carry t(y_{2i-1}+y_{2i}) and t^2 y_{2i+1} y_{2i};
        descending sites carry t y_{2i-1} - y_{2i+1}^{-1} y_{2i} and the
        t-free y_{2i+1}^{-1} y_{2i}; flat sites carry t y_a.
        """
        i = (a + 1) // 2
        cls = self.path.site_class(i)
        if a % 2 == 1:
            if cls == ASCENT:
                return {1: self.y(a) + self.y(a + 1)}
            if cls == DESCENT:
                return {0: -(self.y(a + 2).inv() * self.y(a + 1)), 1: self.y(a)}
            return {1: self.y(a)}
        if cls == ASCENT:
            return {2: self.y(a + 1) * self.y(a)}
        if cls == DESCENT:
            return {0: self.y(a + 1).inv() * self.y(a)}
        return {1: self.y(a)}

    def hat_weights(self):
        return [self.hat(a) for a in range(1, 2 * self.r + 2)]

    def __eq__(self, other):
        return (
            isinstance(other, WeightAssignment)
            and self.path == other.path
            and all(x == y for x, y in zip(self._y, other._y))
        )

    def __repr__(self):
        return "WeightAssignment(%s, [%s])" % (
            self.path.entries,
            ", ".join(v.canonical_str() for v in self._y),
        )


def mutate_weights(assignment, i):
    """Weight update along the admissible raise of entry i.

    Both cases share y'_{2i-1} = y_{2i-1} + y_{2i} and the right-inverse
    ordered updates of y'_{2i}, y'_{2i+1}; case (ii) additionally updates
    y'_{2i+2} when that index exists.
    """
    path = assignment.path
    case = mutation_case(path, i)
    y = list(assignment.values)
    a = 2 * i - 1
    s = assignment.y(a) + assignment.y(a + 1)
    try:
        s_inv = s.inv()
    except (NotAUnit, ZeroDivisionError) as exc:
        raise NonInvertibleSum(str(exc))
    y[a - 1] = s
    y[a] = assignment.y(a + 2) * assignment.y(a + 1) * s_inv
    y[a + 1] = assignment.y(a + 2) * assignment.y(a) * s_inv
    if case == "ii" and a + 3 <= 2 * path.r + 1:
        y[a + 2] = assignment.y(a + 3) * assignment.y(a) * s_inv
    return WeightAssignment(mutate_path(path, i), y)


def _qsys_lookup(R, r, i, n, one):
    if i == 0 or i == r + 1:
        return one
    try:
        return R[(i, n)]
    except KeyError:
        raise MissingData("missing Q-system entry R_{%d,%d}" % (i, n))


def weights_from_qsystem(path, R, one=None):
    """Commutative skeleton weights from Q-system data via ratio variables.

    With c_{i,n} = R_{i,n}/R_{i,n-1} and
    d_{i,n} = R_{i+1,n} R_{i-1,n-1} / (R_{i,n} R_{i,n-1}):
    y_{2i-1} = c_{i,m_i+1} / c_{i-1,m_{i-1}+1} and
    y_{2i} = d_{i,m_i+1} L_{i,i+1} / L_{i,i-1}, where L_{i,i+e} is the
    correction c_{i+e,m_{i+e}+1}/c_{i+e,m_i+1} active when m_i = m_{i+e} + e.
    """
    r = path.r
    if one is None:
        one = next(iter(R.values())).one()

    def c(i, n):
        return _qsys_lookup(R, r, i, n, one) * _qsys_lookup(R, r, i, n - 1, one).inv()

    def d(i, n):
        num = _qsys_lookup(R, r, i + 1, n, one) * _qsys_lookup(R, r, i - 1, n - 1, one)
        return num * (_qsys_lookup(R, r, i, n, one) * _qsys_lookup(R, r, i, n - 1, one)).inv()

    y = []
    for i in range(1, r + 2):
        y.append(c(i, path.entry(i) + 1) * c(i - 1, path.entry(i - 1) + 1).inv())
        if i > r:
            break
        value = d(i, path.entry(i) + 1)
        if i < r and path.entry(i) == path.entry(i + 1) + 1:
            value = value * c(i + 1, path.entry(i + 1) + 1) * c(i + 1, path.entry(i) + 1).inv()
        if i > 1 and path.entry(i) == path.entry(i - 1) - 1:
            value = value * c(i - 1, path.entry(i) + 1) * c(i - 1, path.entry(i - 1) + 1).inv()
        y.append(value)
    # interleave: list built as [y1, y2, y3, y4, ..., y_{2r+1}]
    return WeightAssignment(path, y)


def weights_from_cd(path, cd, one=None):
    """Skeleton weights from the quasi-Wronskian ratio variables C and D.

    y_{2i-1} = C_{i,m_i+1} C_{i-1,m_{i-1}+1}^{-1}; y_{2i} is D_{i,m_i+1}
    left-corrected by C_{i+1,m_{i+1}+1} C_{i+1,m_i+1}^{-1} when m_i = m_{i+1}+1
    and right-corrected by C_{i-1,m_i+1} C_{i-1,m_{i-1}+1}^{-1} when
    m_i = m_{i-1}-1.  The stated multiplication order is preserved.
    """
    r = path.r
    if one is None:
        one = next(iter(cd.C.values())).one()

    def C(i, n):
        if i == 0:
            return one
        try:
            return cd.C[(i, n)]
        except KeyError:
            raise MissingData("missing C_{%d,%d}" % (i, n))

    def D(i, n):
        try:
            return cd.D[(i, n)]
        except KeyError:
            raise MissingData("missing D_{%d,%d}" % (i, n))

    y = []
    for i in range(1, r + 2):
        y.append(C(i, path.entry(i) + 1) * C(i - 1, path.entry(i - 1) + 1).inv())
        if i > r:
            break
        value = D(i, path.entry(i) + 1)
        if i < r and path.entry(i) == path.entry(i + 1) + 1:
            value = C(i + 1, path.entry(i + 1) + 1) * C(i + 1, path.entry(i) + 1).inv() * value
        if i > 1 and path.entry(i) == path.entry(i - 1) - 1:
            value = value * C(i - 1, path.entry(i) + 1) * C(i - 1, path.entry(i - 1) + 1).inv()
        y.append(value)
    return WeightAssignment(path, y)


class Edge:
    __slots__ = ("u", "v", "tpow", "weight")

    def __init__(self, u, v, tpow, weight):
        self.u = u
        self.v = v
        self.tpow = tpow
        self.weight = weight

    def __repr__(self):
        return "Edge(%r -> %r, t^%d, %s)" % (self.u, self.v, self.tpow, self.weight.canonical_str())


class PathGraph:
    def __init__(self, vertices, edges, root, flavor):
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.root = root
        self.flavor = flavor

    def outgoing(self, u):
        return [e for e in self.edges if e.u == u]


def _down_runs(path):
    """Maximal runs of down-steps: (first step index p, count d); the run
    spans spine vertices p..p+d+1 and carries the long descending edges."""
    runs = []
    i = 1
    while i <= path.r - 1:
        if path.step_after(i) == -1:
            p = i
            while i <= path.r - 1 and path.step_after(i) == -1:
                i += 1
            runs.append((p, i - p))
        else:
            i += 1
    return runs


def _up_runs(path):
    runs = []
    i = 1
    while i <= path.r - 1:
        if path.step_after(i) == 1:
            p = i
            while i <= path.r - 1 and path.step_after(i) == 1:
                i += 1
            runs.append((p, i - p))
        else:
            i += 1
    return runs


def redundant_weight(assignment, b, a):
    """Long-edge weight from spine vertex b down to a (b - a >= 2):
    t * (y_{2b-2} y_{2b-3}^{-1}) ... (y_{2a+2} y_{2a+1}^{-1}) * y_{2a},
    factors in decreasing order."""
    w = assignment.one()
    for c in range(b - 1, a, -1):
        w = w * assignment.y(2 * c) * assignment.y(2 * c - 1).inv()
    return w * assignment.y(2 * a)


def build_graph(path, assignment, flavor="G"):
    """The weighted graph of the given flavor: 'G', 'Gamma', or 'GammaPrime'."""
    r = path.r
    one = assignment.one()
    if flavor == "G":
        vertices = list(range(1, r + 2))
        edges = []
        for i in range(1, r + 2):
            for tpow, coeff in sorted(assignment.hat(2 * i - 1).items()):
                edges.append(Edge(i, i, tpow, coeff))
            if i <= r:
                edges.append(Edge(i, i + 1, 0, one))
                for tpow, coeff in sorted(assignment.hat(2 * i).items()):
                    edges.append(Edge(i + 1, i, tpow, coeff))
        return PathGraph(vertices, edges, 1, flavor)

    if flavor == "GammaPrime":
        vertices = list(range(1, r + 2))
        edges = []
        for i in range(1, r + 2):
            edges.append(Edge(i, i, 1, assignment.y(2 * i - 1)))
            if i <= r:
                edges.append(Edge(i, i + 1, 0, one))
                edges.append(Edge(i + 1, i, 1, assignment.y(2 * i)))
        for p, d in _down_runs(path):
            for a in range(p, p + d):
                for b in range(a + 2, p + d + 2):
                    edges.append(Edge(b, a, 1, redundant_weight(assignment, b, a)))
        for p, u in _up_runs(path):
            for a in range(p, p + u):
                for b in range(a + 2, p + u + 2):
                    sign = one if (b - a + 1) % 2 == 0 else -one
                    edges.append(Edge(a, b, 0, sign))
        return PathGraph(vertices, edges, 1, flavor)

    if flavor != "Gamma":
        raise ValueError("unknown graph flavor %r" % (flavor,))

    # Two vertices per spine position: ('A', i) inner and ('B', i) outer.
    vertices = []
    for i in range(1, r + 2):
        vertices.append(("A", i))
        vertices.append(("B", i))
    edges = []
    for i in range(1, r + 2):
        A, B = ("A", i), ("B", i)
        if i == 1:
            # root rung: the weighted step is the one entering the root
            edges.append(Edge(B, A, 0, one))
            edges.append(Edge(A, B, 1, assignment.y(1)))
        else:
            edges.append(Edge(B, A, 1, assignment.y(2 * i - 1)))
            edges.append(Edge(A, B, 0, one))
    for i in range(1, r + 1):
        # after an up-step the deeper levels hang off the outer vertex
        lower = ("B", i) if path.step_after(i - 1) == 1 else ("A", i)
        edges.append(Edge(lower, ("A", i + 1), 0, one))
        edges.append(Edge(("A", i + 1), lower, 1, assignment.y(2 * i)))
    for p, d in _down_runs(path):
        for a in range(p, p + d):
            target = ("B", a) if path.step_after(a - 1) == 1 else ("A", a)
            for b in range(a + 2, p + d + 2):
                edges.append(Edge(("A", b), target, 1, redundant_weight(assignment, b, a)))
    return PathGraph(vertices, edges, ("B", 1), "Gamma")
