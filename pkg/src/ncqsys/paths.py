"""Path enumeration and transfer-matrix partition functions on weighted graphs."""

from .errors import CheckFailed, ExplosionGuardExceeded
from .series import DEFAULT_ORDER, TSeries

ENUMERATION_GUARD = 10 ** 6


def transfer_entries(graph, order=DEFAULT_ORDER):
    """Transfer matrix of the graph as a dict (u, v) -> weight series."""
    entries = {}
    for e in graph.edges:
        term = TSeries.term(e.weight, e.tpow, order)
        key = (e.u, e.v)
        entries[key] = entries[key] + term if key in entries else term
    return entries


def resolvent_series(graph, order=DEFAULT_ORDER):
    """((I - T)^{-1}) at (root, root) by eliminating the other vertices.

    Eliminating vertex k replaces T_uv by T_uv + T_uk (1 - T_kk)^{-1} T_kv,
    which preserves the ordered-product weights of walks through k.
    """
    entries = transfer_entries(graph, order)
    sample = graph.edges[0].weight
    one = TSeries.const(sample.one(), order)
    zero = TSeries.const(sample.zero(), order)
    alive = [v for v in graph.vertices if v != graph.root]
    while alive:
        # smallest fill-in first: eliminating k creates in(k) * out(k) entries
        def fill(v):
            ins = sum(1 for (u, w) in entries if w == v and u != v)
            outs = sum(1 for (u, w) in entries if u == v and w != v)
            return ins * outs
        k = min(alive, key=fill)
        alive.remove(k)
        loop = entries.pop((k, k), zero)
        g = (one - loop).inv_right()
        ins = {u: w for (u, v), w in entries.items() if v == k}
        outs = {v: w for (u, v), w in entries.items() if u == k}
        for u in ins:
            del entries[(u, k)]
        for v in outs:
            del entries[(k, v)]
        for u, win in ins.items():
            through = win * g
            for v, wout in outs.items():
                key = (u, v)
                add = through * wout
                entries[key] = entries[key] + add if key in entries else add
    loop = entries.get((graph.root, graph.root), zero)
    return (one - loop).inv_right()


def graph_series(graph, assignment, order=DEFAULT_ORDER):
    """The generating function F_m(t) read off the graph.

    On the two-vertices-per-site graph this is the root-to-root resolvent;
    on the compact graphs it is 1 + (resolvent) * t y_1, the extra factor
    accounting for the final step back into the root.
    """
    res = resolvent_series(graph, order)
    if graph.flavor == "Gamma":
        return res
    one = TSeries.const(assignment.one(), order)
    return one + res * TSeries.term(assignment.y(1), 1, order)


def closed_walks(graph, order, guard=ENUMERATION_GUARD):
    """All closed walks at the root with total t-power at most `order`,
    yielded as (tpow, ordered weight product)."""
    adjacency = {}
    for e in graph.edges:
        adjacency.setdefault(e.u, []).append(e)
    one = graph.edges[0].weight.one()
    yield (0, one)
    stack = [(graph.root, 0, one)]
    visited = 0
    while stack:
        vertex, tpow, weight = stack.pop()
        visited += 1
        if visited > guard:
            raise ExplosionGuardExceeded(
                "more than %d partial walks at order %d" % (guard, order)
            )
        for e in adjacency.get(vertex, ()):
            npow = tpow + e.tpow
            if npow > order:
                continue
            nweight = weight * e.weight
            if e.v == graph.root:
                yield (npow, nweight)
            stack.append((e.v, npow, nweight))


def closed_walk_series(graph, order=DEFAULT_ORDER, guard=ENUMERATION_GUARD):
    """Partition function of closed walks at the root, by direct enumeration."""
    zero = graph.edges[0].weight.zero()
    coeffs = [zero] * (order + 1)
    for tpow, weight in closed_walks(graph, order, guard):
        coeffs[tpow] = coeffs[tpow] + weight
    return TSeries(coeffs, order)


def walk_sum_series(graph, order=DEFAULT_ORDER):
    """Closed-walk partition function by layered walk accumulation.

    Sums the same ordered weights as direct enumeration, sharing common
    prefixes: W_k(v) = sum over root-to-v walks of t-power k.  Walks are
    seeded per layer by their last positive-power edge and completed along
    the zero-power edges, which form a DAG (otherwise enumeration itself
    would diverge), processed in topological order."""
    zero = graph.edges[0].weight.zero()
    one = graph.edges[0].weight.one()
    zero_out = {}
    indeg = {v: 0 for v in graph.vertices}
    pos_edges = []
    for e in graph.edges:
        if e.tpow == 0:
            zero_out.setdefault(e.u, []).append(e)
            indeg[e.v] += 1
        else:
            pos_edges.append(e)
    topo = [v for v in graph.vertices if indeg[v] == 0]
    pending = dict(indeg)
    cursor = 0
    while cursor < len(topo):
        for e in zero_out.get(topo[cursor], ()):
            pending[e.v] -= 1
            if pending[e.v] == 0:
                topo.append(e.v)
        cursor += 1
    if len(topo) != len(graph.vertices):
        raise ExplosionGuardExceeded("zero-power edges form a cycle")
    # minimum t-power needed to return to the root; vertices that cannot
    # make it back within the remaining budget are dropped from each layer
    dist = {graph.root: 0}
    changed = True
    while changed:
        changed = False
        for e in graph.edges:
            if e.v in dist and dist[e.v] + e.tpow < dist.get(e.u, order + 1):
                dist[e.u] = dist[e.v] + e.tpow
                changed = True

    def close(cur, budget):
        for u in topo:
            if u not in cur:
                continue
            for e in zero_out.get(u, ()):
                if dist.get(e.v, budget + 1) > budget:
                    continue
                add = cur[u] * e.weight
                cur[e.v] = cur[e.v] + add if e.v in cur else add
        return cur

    depth = max(e.tpow for e in pos_edges) if pos_edges else 1
    layers = {0: close({graph.root: one}, order)}
    coeffs = [one]
    for k in range(1, order + 1):
        cur = {}
        for e in pos_edges:
            if e.tpow > k or dist.get(e.v, order + 1) > order - k:
                continue
            prev = layers[k - e.tpow]
            if e.u in prev:
                add = prev[e.u] * e.weight
                cur[e.v] = cur[e.v] + add if e.v in cur else add
        close(cur, order - k)
        layers[k] = cur
        layers.pop(k - depth, None)
        coeffs.append(cur.get(graph.root, zero))
    return TSeries(coeffs, order)


def count_closed_walks(graph, order, guard=ENUMERATION_GUARD):
    counts = [0] * (order + 1)
    for tpow, _ in closed_walks(graph, order, guard):
        counts[tpow] += 1
    return counts


def hard_particle_pf(values, particles):
    """Sum over placements of `particles` mutually non-adjacent sites
    i_1 < ... < i_m on the segment [1, len(values)], each placement
    contributing y_{i_m} ... y_{i_1} (factors in decreasing order)."""
    n = len(values)
    one = values[0].one()
    if particles == 0:
        return one
    total = None

    def place(start, left, acc):
        nonlocal total
        if left == 0:
            total = acc if total is None else total + acc
            return
        for pos in range(start, n - 2 * (left - 1)):
            # acc multiplies on the left so the factors end up decreasing
            place(pos + 2, left - 1, values[pos] * acc)

    place(0, particles, one)
    return total if total is not None else one.zero()


# ---------------------------------------------------------------------------
# sign cancellation on the compact graph with split loops

def _split_loop_tables(graph):
    """Classify the edges of the one-vertex-per-site graph: t-free negative
    loops, up edges, and t-free down edges (the latter two at descent sites)."""
    minus, up, down0 = {}, {}, {}
    for e in graph.edges:
        if e.u == e.v and e.tpow == 0:
            minus[e.u] = e
        elif e.v == e.u + 1 and e.tpow == 0:
            up[e.u] = e
        elif e.v == e.u - 1 and e.tpow == 0:
            down0[e.v] = e
    return minus, up, down0


def _edge_walks(graph, order, step_cap, prune_fixed, guard=ENUMERATION_GUARD):
    """Closed walks at the root as edge lists, total t-power at most `order`.

    With `prune_fixed`, walks through a t-free negative loop, or through an
    up step immediately undone by the matching t-free down step, are skipped
    entirely: what remains are exactly the fixed points of the sign-reversing
    pairing, and the enumeration terminates without a step cap.
    """
    minus, up, down0 = _split_loop_tables(graph)
    minus_edges = set(id(e) for e in minus.values())
    adjacency = {}
    for e in graph.edges:
        adjacency.setdefault(e.u, []).append(e)
    yield []
    stack = [(graph.root, 0, [])]
    visited = 0
    while stack:
        vertex, tpow, walk = stack.pop()
        visited += 1
        if visited > guard:
            raise ExplosionGuardExceeded(
                "more than %d partial walks at order %d" % (guard, order)
            )
        if step_cap is not None and len(walk) >= step_cap:
            continue
        for e in adjacency.get(vertex, ()):
            if prune_fixed:
                if id(e) in minus_edges:
                    continue
                if walk and e.tpow == 0 and e.v == e.u - 1:
                    prev = walk[-1]
                    if prev.u == e.v and prev.v == e.u and prev.tpow == 0:
                        continue
            npow = tpow + e.tpow
            if npow > order:
                continue
            nwalk = walk + [e]
            if e.v == graph.root:
                yield nwalk
            stack.append((e.v, npow, nwalk))


def _walk_weight(walk, one):
    w = one
    for e in walk:
        w = w * e.weight
    return w


def _walk_tpow(walk):
    return sum(e.tpow for e in walk)


def _pair_image(walk, minus, up, down0):
    """The sign-reversing partner of a closed walk, or None at a fixed point.

    The earliest occurrence of a t-free negative loop is traded for the
    up-then-down excursion at the same site, and vice versa."""
    for j, e in enumerate(walk):
        if e.u == e.v and e.tpow == 0:
            return walk[:j] + [up[e.u], down0[e.u]] + walk[j + 1:]
        if e.tpow == 0 and e.v == e.u + 1 and j + 1 < len(walk):
            nxt = walk[j + 1]
            if nxt.u == e.v and nxt.v == e.u and nxt.tpow == 0:
                return walk[:j] + [minus[e.u]] + walk[j + 2:]
    return None


def positivity_involution_check(path, assignment, order=DEFAULT_ORDER, step_cap=None):
    """Sign cancellation for the compact-graph partition function.

    Checks that (a) the pairing of walks is a weight-negating involution,
    and (b) the surviving fixed-point walks alone reproduce the series
    1 + (root resolvent) t y_1, i.e. the full generating function.
    Raises CheckFailed on any violation; returns the fixed-point series.
    """
    from .cfrac import fm_series
    from .motzkin import build_graph

    graph = build_graph(path, assignment, "G")
    minus, up, down0 = _split_loop_tables(graph)
    one = assignment.one()
    if step_cap is None:
        # the unrestricted walk count grows geometrically in the step budget,
        # so the pairwise-cancellation audit runs on a short-walk window
        step_cap = 9

    coeffs = [one.zero() for _ in range(order + 1)]
    for walk in _edge_walks(graph, order, None, prune_fixed=True):
        if _pair_image(walk, minus, up, down0) is not None:
            raise CheckFailed("positivity-involution", "pruned walk is not a fixed point")
        coeffs[_walk_tpow(walk)] = coeffs[_walk_tpow(walk)] + _walk_weight(walk, one)
    fixed_series = TSeries(coeffs, order)

    for walk in _edge_walks(graph, order, step_cap, prune_fixed=False):
        image = _pair_image(walk, minus, up, down0)
        if image is None:
            continue
        if len(image) > step_cap:
            continue
        back = _pair_image(image, minus, up, down0)
        if back is None or [id(e) for e in back] != [id(e) for e in walk]:
            raise CheckFailed("positivity-involution", "pairing is not an involution")
        if _walk_tpow(image) != _walk_tpow(walk):
            raise CheckFailed("positivity-involution", "pairing changes the t-power")
        if not (_walk_weight(image, one) + _walk_weight(walk, one)).is_zero():
            raise CheckFailed("positivity-involution", "paired weights do not cancel")

    want = fm_series(assignment, order, check_positive=False)
    rebuilt = TSeries.const(one, order) + fixed_series * TSeries.term(
        assignment.y(1), 1, order
    )
    if rebuilt != want:
        raise CheckFailed(
            "positivity-involution",
            "fixed points differ from the series at t^%s" % rebuilt.first_difference(want),
        )
    return fixed_series


# ---------------------------------------------------------------------------
# conserved denominator

def _poly_sub(p, q):
    out = dict(p)
    for k, v in q.items():
        out[k] = out[k] - v if k in out else -v
    return {k: v for k, v in out.items() if not v.is_zero()}


def graph_denominator(assignment):
    """Denominator polynomial of the generating function, as {t-power: element}.

    Built from the graded site weights by the three-term recursion
    D_k = (1 - loop_k) D_{k-1} - dimer_k D_{k-2} with coefficients acting on
    the left; D * F_m is a polynomial of degree at most r, and the
    coefficients are invariant under every weight mutation."""
    one = assignment.one()
    prev2, prev1 = {}, {0: one}
    for k in range(1, assignment.r + 2):
        cur = dict(prev1)
        for tpow, coeff in assignment.hat(2 * k - 1).items():
            cur = _poly_sub(cur, {t + tpow: coeff * v for t, v in prev1.items()})
        if k >= 2:
            for tpow, coeff in assignment.hat(2 * (k - 1)).items():
                cur = _poly_sub(cur, {t + tpow: coeff * v for t, v in prev2.items()})
        prev2, prev1 = prev1, cur
    return prev1


def conserved_quantity_check(before, after):
    """Invariance of the denominator coefficients and of the ordered product
    of odd weights under one weight mutation; raises CheckFailed."""
    d0, d1 = graph_denominator(before), graph_denominator(after)
    if sorted(d0) != sorted(d1) or any(d0[k] != d1[k] for k in d0):
        raise CheckFailed("conserved-denominator", "denominator coefficients moved")
    r = before.r

    def odd_product(assignment):
        p = assignment.y(2 * r + 1)
        for a in range(2 * r - 1, 0, -2):
            p = p * assignment.y(a)
        return p

    if odd_product(before) != odd_product(after):
        raise CheckFailed("conserved-denominator", "odd-weight product moved")
    return d0


# ---------------------------------------------------------------------------
# non-intersecting families: commutative determinant form

def timed_closed_walks(graph, tpow, start_time=0, guard=ENUMERATION_GUARD):
    """Closed walks at the root with the given total t-power, as
    (weight, frozenset of (vertex, time)) with one time unit per step.

    Requires a graph whose closed walks of t-power n all have 2n steps
    (no long redundant edges)."""
    adjacency = {}
    for e in graph.edges:
        adjacency.setdefault(e.u, []).append(e)
    one = graph.edges[0].weight.one()
    out = []
    visited = 0

    def rec(vertex, acc, steps, weight, occupied):
        nonlocal visited
        visited += 1
        if visited > guard:
            raise ExplosionGuardExceeded("walk enumeration guard exceeded")
        if steps == 2 * tpow:
            if acc == tpow and vertex == graph.root:
                out.append((weight, frozenset(occupied)))
            return
        for e in adjacency.get(vertex, ()):
            nacc = acc + e.tpow
            if nacc > tpow:
                continue
            occupied.append((e.v, start_time + steps + 1))
            rec(e.v, nacc, steps + 1, weight * e.weight, occupied)
            occupied.pop()

    rec(graph.root, 0, 0, one, [(graph.root, start_time)])
    return out


def fraction_det(rows):
    """Determinant of a square matrix of Fractions by exact elimination."""
    from fractions import Fraction

    m = [list(row) for row in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((k for k in range(c, n) if m[k][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for k in range(c + 1, n):
            f = m[k][c] / m[c][c]
            for j in range(c, n):
                m[k][j] -= f * m[c][j]
    return det


def lgv_commutative_check(path, table, alpha, n):
    """Determinant identity for families of vertex-disjoint closed walks.

    `table` maps (i, n) to numeric ring values of the bilinear recursion.
    Walkers start at the root at times 0, 2, ..., 2(alpha-1) and return at
    times 2n+2(alpha-1), ..., 2n; no two may share a (vertex, time) pair.
    Asserts the disjoint-family sum equals det(R_{1,i+j-alpha-1+n+m_1})
    normalized by R_{1,m_1}^alpha; raises CheckFailed."""
    from fractions import Fraction

    from .motzkin import build_graph, weights_from_qsystem

    r = max(i for (i, _) in table)

    def rv(i, k):
        if i == 0 or i == r + 1:
            return Fraction(1)
        return table[(i, k)].terms[()]

    w = weights_from_qsystem(path, table)
    graph = build_graph(path, w, "Gamma")
    m1 = path.entry(1)
    walkers = []
    for i in range(1, alpha + 1):
        ni = n + alpha - 1 - 2 * (i - 1)
        if ni < 0:
            raise CheckFailed("lgv", "negative walk length for walker %d" % i)
        walks = timed_closed_walks(graph, ni, start_time=2 * (i - 1))
        walkers.append([(wt.terms.get((), Fraction(0)), occ) for wt, occ in walks])

    total = Fraction(0)

    def rec(i, used, prod):
        nonlocal total
        if i == alpha:
            total += prod
            return
        for wt, occ in walkers[i]:
            if used & occ:
                continue
            rec(i + 1, used | occ, prod * wt)

    rec(0, frozenset(), Fraction(1))
    want = fraction_det(
        [
            [rv(1, i + j - alpha - 1 + n + m1) / rv(1, m1) for j in range(1, alpha + 1)]
            for i in range(1, alpha + 1)
        ]
    )
    if total != want:
        raise CheckFailed("lgv", "disjoint-family sum %s != determinant %s" % (total, want))
    if alpha <= r + 1:
        wron = rv(alpha, n + m1) / rv(1, m1) ** alpha
        if want != wron:
            raise CheckFailed("lgv", "determinant does not reduce to the bilinear table")
    return total


# ---------------------------------------------------------------------------
# non-intersecting pairs with noncommutative weights on the four-site segment

def segment_paths(downs, top=4):
    """Height sequences of walks on [1, top] from 1 to 1 with `downs`
    descending steps (2*downs steps in total)."""
    out = []

    def rec(h, steps, seq):
        if steps == 2 * downs:
            if h == 1:
                out.append(tuple(seq))
            return
        if h < top:
            seq.append(h + 1)
            rec(h + 1, steps + 1, seq)
            seq.pop()
        if h > 1:
            seq.append(h - 1)
            rec(h - 1, steps + 1, seq)
            seq.pop()

    rec(1, 0, [1])
    return out


def segment_path_weight(heights, y):
    """Ordered product of descent weights y[i-1] for each step i+1 -> i."""
    w = y[0].one()
    for a, b in zip(heights, heights[1:]):
        if b == a - 1:
            w = w * y[b - 1]
    return w


class A1LoopConfig:
    """A closed loop made of a rightward path (times 0..2n+2) and a
    leftward path (times 2n..2), with two root stations."""

    __slots__ = ("blue", "red", "n")

    def __init__(self, blue, red, n):
        self.blue = blue
        self.red = red
        self.n = n

    def red_position(self, time):
        # the leftward path occupies time 2n - s after its s-th step
        s = 2 * self.n - time
        if 0 <= s < len(self.red):
            return self.red[s]
        return None

    def rightmost_intersection(self):
        for time in range(2 * self.n, 1, -1):
            h = self.red_position(time)
            if h is not None and time < len(self.blue) and self.blue[time] == h:
                return time, h
        return None


def a1_flip(config):
    """The weight-preserving flip at the rightmost intersection: exchanges a
    crossing (P_{n+1}, P_{n-1}) loop for a (P_n, P_n) loop and back."""
    hit = config.rightmost_intersection()
    if hit is None:
        return None
    x, _ = hit
    n = config.n
    blue_prefix = config.blue[: x + 1]
    blue_suffix = config.blue[x:]
    red_as_times = {2 * n - s: h for s, h in enumerate(config.red)}
    red_left = [red_as_times[t] for t in range(x - 1, 1, -1)]
    red_right = [red_as_times[t] for t in range(2 * n, x - 1, -1)]
    new_blue = list(blue_prefix) + list(reversed(red_right))[1:]
    new_red = list(reversed(blue_suffix)) + red_left
    return A1LoopConfig(tuple(new_blue), tuple(new_red), n)


def a1_station_weights(R0, C):
    return R0 * C


def a1_loop_weight(config, y, R0, C, flipped=False):
    """Ordered loop weight; the return station carries R0 when the central
    portion has been flipped, R0 C otherwise."""
    station1 = R0 if flipped else R0 * C
    return (
        segment_path_weight(config.blue, y)
        * station1
        * segment_path_weight(config.red, y)
        * (R0 * C)
    )


def nc_lgv_a1_check(R0, R1, n, weight_checks=True):
    """The pair-of-paths cancellation identity for the rank-one system.

    Verifies the weight relations, the bijective flip between crossing
    (n+1, n-1) loops and equal-length (n, n) loops, the pairwise weight
    preservation, the resulting identity
    P_{n+1} R0 C P_{n-1} R0 C - P_n R0 P_n R0 C = C, and the uniqueness of
    the non-crossing configuration with weight C.  Raises CheckFailed."""
    one = R0.one()
    y = [R1 * R0.inv(), R1.inv() * R0.inv(), R1.inv() * R0]
    C = y[2] * y[0]
    RC = R0 * C
    for k in range(0, n + 2):
        y3k = one
        y1k = one
        for _ in range(k):
            y3k = y3k * y[2]
            y1k = y1k * y[0]
        if y3k * y[1] * y[0] * RC * y1k != R0.inv():
            raise CheckFailed("nc-lgv", "station relation fails at power %d" % k)
        if y1k * R0 * y3k != R0:
            raise CheckFailed("nc-lgv", "diagonal relation fails at power %d" % k)

    paths = {k: segment_paths(k) for k in (n - 1, n, n + 1)}
    weights = {
        k: {p: segment_path_weight(p, y) for p in paths[k]} for k in paths
    }

    term1 = [A1LoopConfig(b, r_, n) for b in paths[n + 1] for r_ in paths[n - 1]]
    term2_expected = set(
        (b, r_) for b in paths[n] for r_ in paths[n]
    )
    images = {}
    noncrossing = []
    total1 = None
    for cfg in term1:
        w = weights[n + 1][cfg.blue] * RC * weights[n - 1][cfg.red] * RC
        total1 = w if total1 is None else total1 + w
        flip = a1_flip(cfg)
        if flip is None:
            noncrossing.append((cfg, w))
            continue
        key = (flip.blue, flip.red)
        if key not in term2_expected:
            raise CheckFailed("nc-lgv", "flip image is not an equal-length pair")
        if key in images:
            raise CheckFailed("nc-lgv", "flip is not injective")
        images[key] = cfg
        if weight_checks:
            w2 = weights[n][flip.blue] * R0 * weights[n][flip.red] * RC
            if w != w2:
                raise CheckFailed("nc-lgv", "flip changes the loop weight")
    if set(images) != term2_expected:
        raise CheckFailed("nc-lgv", "flip is not onto the equal-length pairs")
    total2 = None
    for b, r_ in term2_expected:
        w2 = weights[n][b] * R0 * weights[n][r_] * RC
        total2 = w2 if total2 is None else total2 + w2
    if total1 - total2 != C:
        raise CheckFailed("nc-lgv", "signed pair sum does not reduce to the constant")
    if len(noncrossing) != 1:
        raise CheckFailed("nc-lgv", "expected a unique non-crossing configuration")
    cfg, w = noncrossing[0]
    if w != C:
        raise CheckFailed("nc-lgv", "non-crossing configuration weight differs")
    return cfg
