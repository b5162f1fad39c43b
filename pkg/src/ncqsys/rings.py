"""Exact coefficient rings: four backends sharing one duck-typed contract.

Every element supports +, -, unary -, * (order preserving), ==, inv(),
is_zero(), zero(), one(), scale(rational) and canonical_str().  Integers and
Fractions mix in as central scalars.
"""

import json
import random
from fractions import Fraction

from .errors import (
    BackendMismatch,
    GeneratorContextMismatch,
    InexactDivision,
    NotAUnit,
    SingularMatrix,
)


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _is_scalar(x):
    return isinstance(x, (int, Fraction))


class CommLaurent:
    """Commutative Laurent polynomial over the rationals."""

    backend = "comm"

    def __init__(self, gens, terms):
        self.gens = tuple(gens)
        clean = {}
        for exps, coeff in terms.items():
            coeff = _frac(coeff)
            if coeff == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.gens):
                raise GeneratorContextMismatch(
                    "exponent vector length %d, %d generators" % (len(exps), len(self.gens))
                )
            clean[exps] = clean.get(exps, Fraction(0)) + coeff
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def const(cls, gens, value):
        return cls(gens, {(0,) * len(gens): _frac(value)})

    @classmethod
    def gen(cls, gens, index, power=1):
        exps = [0] * len(gens)
        exps[index] = power
        return cls(gens, {tuple(exps): Fraction(1)})

    def zero(self):
        return CommLaurent(self.gens, {})

    def one(self):
        return CommLaurent.const(self.gens, 1)

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if _is_scalar(other):
            return CommLaurent.const(self.gens, other)
        if not isinstance(other, CommLaurent):
            raise BackendMismatch("expected CommLaurent, got %r" % type(other).__name__)
        if other.gens != self.gens:
            raise GeneratorContextMismatch("generator lists differ")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return CommLaurent(self.gens, terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return CommLaurent(self.gens, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return CommLaurent(self.gens, terms)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def scale(self, value):
        value = _frac(value)
        return CommLaurent(self.gens, {e: c * value for e, c in self.terms.items()})

    def inv(self):
        if len(self.terms) != 1:
            raise NotAUnit("CommLaurent inverse needs a single monomial")
        (exps, coeff), = self.terms.items()
        return CommLaurent(self.gens, {tuple(-e for e in exps): 1 / coeff})

    def __eq__(self, other):
        if _is_scalar(other):
            other = CommLaurent.const(self.gens, other)
        if not isinstance(other, CommLaurent):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def canonical_str(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms):
            coeff = self.terms[exps]
            factors = []
            for name, e in zip(self.gens, exps):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append("%s^%d" % (name, e))
            body = ".".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            else:
                parts.append("%s*%s" % (coeff, body))
        return " + ".join(parts)

    __repr__ = canonical_str

    def to_json(self):
        return json.dumps(
            {
                "backend": self.backend,
                "generators": list(self.gens),
                "terms": {
                    ",".join(str(e) for e in exps): str(coeff)
                    for exps, coeff in sorted(self.terms.items())
                },
            },
            sort_keys=True,
        )


def _encode_word(word):
    """Bytes encoding of a word: letter 2g is generator g, 2g+1 its inverse.

    Accepts the public ((gen, exp), ...) pair format or an already-encoded
    bytes object."""
    if isinstance(word, bytes):
        return word
    out = bytearray()
    for gen, exp in word:
        letter = 2 * gen if exp > 0 else 2 * gen + 1
        out.extend([letter] * abs(exp))
    return bytes(out)


def _reduce_word(word):
    out = []
    for b in word:
        if out and (out[-1] ^ b) == 1:
            out.pop()
        else:
            out.append(b)
    return bytes(out)


def _concat_reduced(w1, w2):
    """Concatenate two already-reduced words, cancelling at the junction."""
    i = len(w1)
    j = 0
    n2 = len(w2)
    while i > 0 and j < n2 and (w1[i - 1] ^ w2[j]) == 1:
        i -= 1
        j += 1
    return w1[:i] + w2[j:]


class FreeLaurent:
    """Element of the free Laurent algebra: rational combination of reduced words."""

    backend = "free"

    def __init__(self, gens, terms):
        self.gens = tuple(gens)
        clean = {}
        for word, coeff in terms.items():
            coeff = _frac(coeff)
            if coeff == 0:
                continue
            if coeff.denominator == 1:
                coeff = coeff.numerator
            word = _reduce_word(_encode_word(word))
            clean[word] = clean.get(word, 0) + coeff
        self.terms = {w: c for w, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, gens, terms):
        """Internal constructor for terms whose words are already reduced."""
        out = cls.__new__(cls)
        out.gens = gens
        out.terms = terms
        return out

    @classmethod
    def const(cls, gens, value):
        return cls(gens, {(): _frac(value)})

    @classmethod
    def gen(cls, gens, index, power=1):
        letter = 2 * index if power >= 0 else 2 * index + 1
        word = bytes([letter] * abs(power))
        return cls._raw(tuple(gens), {word: 1})

    def zero(self):
        return FreeLaurent(self.gens, {})

    def one(self):
        return FreeLaurent.const(self.gens, 1)

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if _is_scalar(other):
            return FreeLaurent.const(self.gens, other)
        if not isinstance(other, FreeLaurent):
            raise BackendMismatch("expected FreeLaurent, got %r" % type(other).__name__)
        if other.gens != self.gens:
            raise GeneratorContextMismatch("generator lists differ")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            v = terms.get(w, 0) + c
            if v:
                terms[w] = v
            else:
                terms.pop(w, None)
        return FreeLaurent._raw(self.gens, terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return FreeLaurent._raw(self.gens, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        concat = _concat_reduced
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = concat(w1, w2)
                v = terms.get(w, 0) + c1 * c2
                if v:
                    terms[w] = v
                else:
                    terms.pop(w, None)
        return FreeLaurent._raw(self.gens, terms)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def scale(self, value):
        value = _frac(value)
        if not value:
            return self.zero()
        return FreeLaurent._raw(
            self.gens, {w: c * value for w, c in self.terms.items()}
        )

    def inv(self):
        if len(self.terms) != 1:
            raise NotAUnit("FreeLaurent inverse needs a single word")
        (word, coeff), = self.terms.items()
        inv_word = bytes(b ^ 1 for b in reversed(word))
        return FreeLaurent(self.gens, {inv_word: Fraction(1, 1) / coeff})

    def __eq__(self, other):
        if _is_scalar(other):
            other = FreeLaurent.const(self.gens, other)
        if not isinstance(other, FreeLaurent):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def _word_str(self, word):
        if not word:
            return "1"
        parts = []
        i = 0
        while i < len(word):
            letter = word[i]
            run = 1
            while i + run < len(word) and word[i + run] == letter:
                run += 1
            total = run if letter % 2 == 0 else -run
            name = self.gens[letter >> 1]
            parts.append(name if total == 1 else "%s^%d" % (name, total))
            i += run
        return ".".join(parts)

    def canonical_str(self):
        if not self.terms:
            return "0"
        parts = []
        for word in sorted(self.terms, key=lambda w: (len(w), w)):
            coeff = self.terms[word]
            body = self._word_str(word)
            if body == "1":
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            else:
                parts.append("%s*%s" % (coeff, body))
        return " + ".join(parts)

    __repr__ = canonical_str

    def to_json(self):
        return json.dumps(
            {
                "backend": self.backend,
                "generators": list(self.gens),
                "terms": {
                    self._word_str(w): str(c)
                    for w, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
                },
            },
            sort_keys=True,
        )


def qp_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in out.items() if v != 0}


def qp_neg(a):
    return {k: -v for k, v in a.items()}


def qp_mul(a, b):
    out = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def qp_shift(a, s):
    return {k + s: v for k, v in a.items()}


def qp_div(num, den):
    """Exact division in the Laurent polynomial ring of q; raises if inexact."""
    if not den:
        raise InexactDivision("division by zero q-polynomial")
    if not num:
        return {}
    num = dict(num)
    out = {}
    dlead = max(den)
    steps = 0
    while num:
        nlead = max(num)
        c = num[nlead] / den[dlead]
        k = nlead - dlead
        out[k] = out.get(k, Fraction(0)) + c
        for dk, dv in den.items():
            key = dk + k
            val = num.get(key, Fraction(0)) - c * dv
            if val == 0:
                num.pop(key, None)
            else:
                num[key] = val
        steps += 1
        if steps > 10000:
            raise InexactDivision("q-polynomial division did not terminate")
    return {k: v for k, v in out.items() if v != 0}


def qp_str(a):
    if not a:
        return "0"
    parts = []
    for k in sorted(a):
        v = a[k]
        if k == 0:
            parts.append(str(v))
        else:
            power = "q" if k == 1 else "q^%d" % k
            if v == 1:
                parts.append(power)
            elif v == -1:
                parts.append("-%s" % power)
            else:
                parts.append("%s*%s" % (v, power))
    return "+".join(parts).replace("+-", "-")


class QTorus:
    """Shared generator context: names plus antisymmetric integer skew matrix."""

    def __init__(self, names, skew):
        self.names = tuple(names)
        self.skew = tuple(tuple(int(v) for v in row) for row in skew)
        n = len(self.names)
        if len(self.skew) != n or any(len(row) != n for row in self.skew):
            raise GeneratorContextMismatch("skew matrix shape mismatch")
        for i in range(n):
            for j in range(n):
                if self.skew[i][j] != -self.skew[j][i]:
                    raise GeneratorContextMismatch("skew matrix not antisymmetric")

    def reorder_exponent(self, e, f):
        """q-power from normal ordering x^e * x^f into x^(e+f)."""
        s = 0
        for i in range(len(e)):
            if e[i] == 0:
                continue
            for j in range(i):
                if f[j]:
                    s += self.skew[i][j] * e[i] * f[j]
        return s

    def const(self, value):
        return QTorusElement(self, {(0,) * len(self.names): {0: _frac(value)}})

    def gen(self, index, power=1, qpower=0, coeff=1):
        exps = [0] * len(self.names)
        exps[index] = power
        return QTorusElement(self, {tuple(exps): {qpower: _frac(coeff)}})

    def monomial(self, exps, qpower=0, coeff=1):
        return QTorusElement(self, {tuple(int(e) for e in exps): {qpower: _frac(coeff)}})


class QTorusElement:
    """Quantum torus element: exponent vectors (ascending normal order) with
    Laurent-in-q coefficients; x_a x_b = q^(skew[a][b]) x_b x_a."""

    backend = "qtorus"

    def __init__(self, torus, terms):
        self.torus = torus
        clean = {}
        for exps, qp in terms.items():
            qp = {int(k): _frac(v) for k, v in qp.items() if v != 0}
            if not qp:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(torus.names):
                raise GeneratorContextMismatch("exponent vector length mismatch")
            if exps in clean:
                clean[exps] = qp_add(clean[exps], qp)
            else:
                clean[exps] = qp
        self.terms = {e: qp for e, qp in clean.items() if qp}

    def zero(self):
        return QTorusElement(self.torus, {})

    def one(self):
        return self.torus.const(1)

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if _is_scalar(other):
            return self.torus.const(other)
        if not isinstance(other, QTorusElement):
            raise BackendMismatch("expected QTorusElement, got %r" % type(other).__name__)
        if other.torus is not self.torus and (
            other.torus.names != self.torus.names or other.torus.skew != self.torus.skew
        ):
            raise GeneratorContextMismatch("different torus contexts")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        terms = {e: dict(qp) for e, qp in self.terms.items()}
        for e, qp in other.terms.items():
            terms[e] = qp_add(terms.get(e, {}), qp)
        return QTorusElement(self.torus, terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return QTorusElement(self.torus, {e: qp_neg(qp) for e, qp in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for e1, qp1 in self.terms.items():
            for e2, qp2 in other.terms.items():
                shift = self.torus.reorder_exponent(e1, e2)
                e = tuple(a + b for a, b in zip(e1, e2))
                qp = qp_shift(qp_mul(qp1, qp2), shift)
                terms[e] = qp_add(terms.get(e, {}), qp) if e in terms else qp
        return QTorusElement(self.torus, terms)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def scale(self, value):
        value = _frac(value)
        return QTorusElement(
            self.torus, {e: {k: v * value for k, v in qp.items()} for e, qp in self.terms.items()}
        )

    def q_scale(self, qpower):
        """Multiply by the central scalar q^qpower."""
        return QTorusElement(
            self.torus, {e: qp_shift(qp, qpower) for e, qp in self.terms.items()}
        )

    def inv(self):
        if len(self.terms) != 1:
            raise NotAUnit("QTorus inverse needs a single torus term")
        (exps, qp), = self.terms.items()
        if len(qp) != 1:
            raise NotAUnit("QTorus inverse needs a single q-power coefficient")
        (k, c), = qp.items()
        inv_exps = tuple(-e for e in exps)
        shift = self.torus.reorder_exponent(exps, inv_exps)
        return QTorusElement(self.torus, {inv_exps: {-k - shift: 1 / c}})

    def bar(self):
        """Bar involution: q -> 1/q, reverse products (monomial-wise re-normal-order)."""
        out = self.zero()
        n = len(self.torus.names)
        for exps, qp in self.terms.items():
            # reversed product x_n^{e_n} ... x_1^{e_1} re-normal-ordered picks up
            # q^(reorder(e_desc)) relative to the ascending normal form
            shift = 0
            for i in range(n):
                for j in range(i):
                    shift += self.torus.skew[i][j] * exps[i] * exps[j]
            barqp = {-k + shift: v for k, v in qp.items()}
            out = out + QTorusElement(self.torus, {exps: barqp})
        return out

    def __eq__(self, other):
        if _is_scalar(other):
            other = self.torus.const(other)
        if not isinstance(other, QTorusElement):
            return NotImplemented
        return self.torus.names == other.torus.names and self.terms == other.terms

    def __hash__(self):
        return hash(
            (self.torus.names, frozenset((e, frozenset(qp.items())) for e, qp in self.terms.items()))
        )

    def canonical_str(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms):
            qp = self.terms[exps]
            factors = []
            for name, e in zip(self.torus.names, exps):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append("%s^%d" % (name, e))
            body = ".".join(factors)
            coeff = qp_str(qp)
            if not body:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(body)
            else:
                wrap = coeff if len(qp) == 1 and not coeff.startswith("-") else "(%s)" % coeff
                parts.append("%s*%s" % (wrap, body))
        return " + ".join(parts)

    __repr__ = canonical_str

    def to_json(self):
        return json.dumps(
            {
                "backend": self.backend,
                "generators": list(self.torus.names),
                "terms": {
                    ",".join(str(e) for e in exps): qp_str(qp)
                    for exps, qp in sorted(self.terms.items())
                },
            },
            sort_keys=True,
        )


def _deglex_key(exps):
    return (sum(exps), exps)


def exact_skew_divide(num, den, side="right"):
    """Exact one-sided division in the quantum torus.

    side="right" returns Q with Q*den == num; side="left" returns Q with
    den*Q == num.  Raises InexactDivision when no torus quotient exists.
    """
    if not isinstance(num, QTorusElement) or not isinstance(den, QTorusElement):
        raise BackendMismatch("exact_skew_divide needs QTorusElement arguments")
    if den.is_zero():
        raise InexactDivision("division by zero")
    rem = num
    quot = num.zero()
    den_lead = max(den.terms, key=_deglex_key)
    den_lead_qp = den.terms[den_lead]
    steps = 0
    while not rem.is_zero():
        rem_lead = max(rem.terms, key=_deglex_key)
        mono_exps = tuple(a - b for a, b in zip(rem_lead, den_lead))
        if side == "right":
            shift = num.torus.reorder_exponent(mono_exps, den_lead)
        else:
            shift = num.torus.reorder_exponent(den_lead, mono_exps)
        target = qp_shift(rem.terms[rem_lead], -shift)
        mono_qp = qp_div(target, den_lead_qp)
        t = QTorusElement(num.torus, {mono_exps: mono_qp})
        quot = quot + t
        rem = rem - (t * den if side == "right" else den * t)
        steps += 1
        # an inexact division walks down the monomial order forever while the
        # remainder support grows; cap both to keep failure cheap
        if steps > 2000 or len(rem.terms) > 50 * (len(num.terms) + len(den.terms)) + 200:
            raise InexactDivision("no torus quotient found")
    return quot


class MatrixElement:
    """Square matrix of exact rationals; the generic skew-field evaluation model."""

    backend = "matrix"

    def __init__(self, entries):
        rows = [tuple(_frac(v) for v in row) for row in entries]
        self.dim = len(rows)
        for row in rows:
            if len(row) != self.dim:
                raise GeneratorContextMismatch("matrix not square")
        self.entries = tuple(rows)

    @classmethod
    def const(cls, dim, value):
        value = _frac(value)
        return cls(
            [[value if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
        )

    @classmethod
    def identity(cls, dim):
        return cls.const(dim, 1)

    def zero(self):
        return MatrixElement.const(self.dim, 0)

    def one(self):
        return MatrixElement.identity(self.dim)

    def is_zero(self):
        return all(v == 0 for row in self.entries for v in row)

    def _coerce(self, other):
        if _is_scalar(other):
            return MatrixElement.const(self.dim, other)
        if not isinstance(other, MatrixElement):
            raise BackendMismatch("expected MatrixElement, got %r" % type(other).__name__)
        if other.dim != self.dim:
            raise GeneratorContextMismatch("matrix dimensions differ")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return MatrixElement(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return MatrixElement([[-v for v in row] for row in self.entries])

    def __mul__(self, other):
        other = self._coerce(other)
        d = self.dim
        return MatrixElement(
            [
                [
                    sum((self.entries[i][k] * other.entries[k][j] for k in range(d)), Fraction(0))
                    for j in range(d)
                ]
                for i in range(d)
            ]
        )

    def __rmul__(self, other):
        return self._coerce(other) * self

    def scale(self, value):
        value = _frac(value)
        return MatrixElement([[v * value for v in row] for row in self.entries])

    def det(self):
        d = self.dim
        m = [list(row) for row in self.entries]
        result = Fraction(1)
        for col in range(d):
            pivot = next((r for r in range(col, d) if m[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
                result = -result
            result *= m[col][col]
            inv_p = 1 / m[col][col]
            for r in range(col + 1, d):
                factor = m[r][col] * inv_p
                if factor:
                    for c in range(col, d):
                        m[r][c] -= factor * m[col][c]
        return result

    def inv(self):
        d = self.dim
        m = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(d)]
             for i, row in enumerate(self.entries)]
        for col in range(d):
            pivot = next((r for r in range(col, d) if m[r][col] != 0), None)
            if pivot is None:
                raise SingularMatrix("matrix has no inverse")
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
            inv_p = 1 / m[col][col]
            m[col] = [v * inv_p for v in m[col]]
            for r in range(d):
                if r != col and m[r][col]:
                    factor = m[r][col]
                    m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
        return MatrixElement([row[d:] for row in m])

    def __eq__(self, other):
        if _is_scalar(other):
            other = MatrixElement.const(self.dim, other)
        if not isinstance(other, MatrixElement):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def canonical_str(self):
        return "[" + "; ".join(
            ", ".join(str(v) for v in row) for row in self.entries
        ) + "]"

    __repr__ = canonical_str

    def to_json(self):
        return json.dumps(
            {
                "backend": self.backend,
                "generators": [],
                "terms": [[str(v) for v in row] for row in self.entries],
            },
            sort_keys=True,
        )


def invert(a):
    return a.inv()


def random_matrix(rng, dim=4, lo=-9, hi=9):
    return MatrixElement([[rng.randint(lo, hi) for _ in range(dim)] for _ in range(dim)])


def random_invertible_matrix(rng, dim=4, lo=-9, hi=9, max_tries=200):
    for _ in range(max_tries):
        m = random_matrix(rng, dim, lo, hi)
        if m.det() != 0:
            return m
    raise SingularMatrix("could not sample an invertible matrix")


def matrix_rng(seed):
    return random.Random(seed)
