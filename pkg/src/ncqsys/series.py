"""Truncated power series in a central variable t over any ring backend."""

from .errors import NonUnitConstantTerm

DEFAULT_ORDER = 8


class TSeries:
    """coeffs[k] is the coefficient of t^k; exact through order N."""

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("TSeries needs at least the constant coefficient")
        if order is None:
            order = len(coeffs) - 1
        if len(coeffs) < order + 1:
            zero = coeffs[0].zero()
            coeffs = coeffs + [zero] * (order + 1 - len(coeffs))
        self.coeffs = coeffs[: order + 1]
        self.order = order

    @classmethod
    def const(cls, value, order=DEFAULT_ORDER):
        return cls([value], order)

    @classmethod
    def term(cls, value, tpow, order=DEFAULT_ORDER):
        zero = value.zero()
        coeffs = [zero] * (order + 1)
        if tpow <= order:
            coeffs[tpow] = value
        return cls(coeffs, order)

    def ring_zero(self):
        return self.coeffs[0].zero()

    def ring_one(self):
        return self.coeffs[0].one()

    def truncate(self, order):
        return TSeries(self.coeffs[: order + 1], order)

    def _align(self, other):
        if not isinstance(other, TSeries):
            if hasattr(other, "zero"):
                other = TSeries.const(other, self.order)
            else:
                other = TSeries.const(self.ring_one().scale(other), self.order)
        n = min(self.order, other.order)
        return self.truncate(n), other.truncate(n)

    def __add__(self, other):
        a, b = self._align(other)
        return TSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(other)
        return TSeries([x - y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    def __rsub__(self, other):
        a, b = self._align(other)
        return TSeries([y - x for x, y in zip(a.coeffs, b.coeffs)], a.order)

    def __neg__(self):
        return TSeries([-x for x in self.coeffs], self.order)

    def __mul__(self, other):
        a, b = self._align(other)
        zero = a.ring_zero()
        out = [zero for _ in range(a.order + 1)]
        for i, x in enumerate(a.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(b.coeffs):
                if i + j > a.order:
                    break
                if y.is_zero():
                    continue
                out[i + j] = out[i + j] + x * y
        return TSeries(out, a.order)

    def __rmul__(self, other):
        if hasattr(other, "zero"):
            other = TSeries.const(other, self.order)
        else:
            other = TSeries.const(self.ring_one().scale(other), self.order)
        return other * self

    def shift(self, tpow):
        """Multiply by t^tpow."""
        zero = self.ring_zero()
        return TSeries([zero] * tpow + self.coeffs, self.order + tpow).truncate(self.order)

    def inv_right(self):
        """g with self * g == 1 through the truncation order."""
        try:
            c0_inv = self.coeffs[0].inv()
        except Exception as exc:
            raise NonUnitConstantTerm(str(exc))
        out = [c0_inv]
        for k in range(1, self.order + 1):
            acc = self.ring_zero()
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(c0_inv * acc))
        return TSeries(out, self.order)

    def inv_left(self):
        """g with g * self == 1 through the truncation order."""
        try:
            c0_inv = self.coeffs[0].inv()
        except Exception as exc:
            raise NonUnitConstantTerm(str(exc))
        out = [c0_inv]
        for k in range(1, self.order + 1):
            acc = self.ring_zero()
            for i in range(1, k + 1):
                acc = acc + out[k - i] * self.coeffs[i]
            out.append(-(acc * c0_inv))
        return TSeries(out, self.order)

    inv = inv_right

    def __eq__(self, other):
        if not isinstance(other, TSeries):
            return NotImplemented
        a, b = self._align(other)
        return all(x == y for x, y in zip(a.coeffs, b.coeffs))

    def first_difference(self, other):
        a, b = self._align(other)
        for k, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
            if x != y:
                return k
        return None

    def canonical_str(self):
        return " ; ".join(
            "t^%d: %s" % (k, c.canonical_str()) for k, c in enumerate(self.coeffs)
        )

    __repr__ = canonical_str


def series_invert(f, side="right"):
    return f.inv_right() if side == "right" else f.inv_left()


def geometric(x_series):
    """(1 - x)^(-1) as a truncated series."""
    one = TSeries.const(x_series.ring_one(), x_series.order)
    return (one - x_series).inv_right()
