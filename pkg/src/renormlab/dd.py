"""Vectorised double-double arithmetic on numpy arrays.

A :class:`DD` value is an unevaluated sum ``hi + lo`` of two float64 arrays
with ``|lo| <= ulp(hi)/2``, giving about 106 significant bits.  Only the
operations needed by the renormalization solver are provided: the four
arithmetic operations, ``abs``, ``exp``, ``log`` and real powers.

The error-free transformations follow Dekker and Knuth; exp and log follow
the usual QD-library recipes (argument reduction + Taylor series, and one
Newton step on exp respectively).
"""

from decimal import Decimal, localcontext

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

_LN2 = (0.6931471805599453, 2.3190468138462996e-17)


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    err = b - (s - a)
    return s, err


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DD:
    """Double-double array.  Broadcasting follows numpy rules."""

    __slots__ = ("hi", "lo")
    __array_priority__ = 1000

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=float)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=float)

    @staticmethod
    def coerce(x):
        return x if isinstance(x, DD) else DD(x)

    # -- conversions -----------------------------------------------------
    def to_float(self):
        return self.hi + self.lo

    def __float__(self):
        return float(self.hi + self.lo)

    def __len__(self):
        return len(self.hi)

    def __getitem__(self, idx):
        return DD(self.hi[idx], self.lo[idx])

    @property
    def shape(self):
        return self.hi.shape

    def __repr__(self):
        return f"DD(hi={self.hi!r}, lo={self.lo!r})"

    # -- arithmetic ------------------------------------------------------
    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        neg = self.hi < 0
        return DD(np.where(neg, -self.hi, self.hi), np.where(neg, -self.lo, self.lo))

    def __add__(self, other):
        if not isinstance(other, DD):
            s, e = _two_sum(self.hi, np.asarray(other, dtype=float))
            e = e + self.lo
            return DD(*_quick_two_sum(s, e))
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e = e + t
        s, e = _quick_two_sum(s, e)
        e = e + f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-DD.coerce(other))

    def __rsub__(self, other):
        return DD.coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, DD):
            b = np.asarray(other, dtype=float)
            p, e = _two_prod(self.hi, b)
            e = e + self.lo * b
            return DD(*_quick_two_sum(p, e))
        p, e = _two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = DD.coerce(other)
        q1 = self.hi / b.hi
        r = self - b * q1
        q2 = r.hi / b.hi
        r = r - b * q2
        q3 = r.hi / b.hi
        q1, q2 = _quick_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other):
        return DD.coerce(other) / self

    def __pow__(self, exponent):
        return power(self, exponent)

    # comparisons act on the leading component, which is enough for signs
    def __lt__(self, other):
        return self.hi < (other.hi if isinstance(other, DD) else other)

    def __gt__(self, other):
        return self.hi > (other.hi if isinstance(other, DD) else other)

    def ldexp(self, k):
        return DD(np.ldexp(self.hi, k), np.ldexp(self.lo, k))


def where(mask, a, b):
    a, b = DD.coerce(a), DD.coerce(b)
    return DD(np.where(mask, a.hi, b.hi), np.where(mask, a.lo, b.lo))


def exp(x):
    x = DD.coerce(x)
    k = np.rint(x.hi / _LN2[0])
    r = x - DD(_LN2[0], _LN2[1]) * k
    r = r.ldexp(-10)
    # e^r - 1 by Taylor series; |r| < 3.4e-4 so 10 terms reach 1e-36
    term = r
    s = r
    for n in range(2, 11):
        term = term * r / float(n)
        s = s + term
    for _ in range(10):
        s = s * 2.0 + s * s
    out = (s + 1.0)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        hi = np.ldexp(out.hi, k.astype(int))
        lo = np.ldexp(out.lo, k.astype(int))
        big = x.hi > 709.7
        tiny = x.hi < -745.0
        hi = np.where(big, np.inf, np.where(tiny, 0.0, hi))
        lo = np.where(big | tiny, 0.0, lo)
    return DD(hi, lo)


def log(x):
    x = DD.coerce(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(x.hi)
        finite = np.isfinite(y)
        y0 = np.where(finite, y, 0.0)
        corr = x * exp(DD(-y0)) - 1.0
        out = DD(y0) + corr
    return DD(np.where(finite, out.hi, y), np.where(finite, out.lo, 0.0))


def power(x, exponent):
    """``x**exponent`` for ``x >= 0`` and a float exponent."""
    x = DD.coerce(x)
    e = float(exponent)
    if e == 2.0:
        return x * x
    zero = x.hi == 0.0
    safe = where(zero, 1.0, x)
    out = exp(log(safe) * e)
    return where(zero, 0.0, out)


def to_decimal_string(hi, lo=0.0):
    """Decimal string that reads back to exactly the same (hi, lo) pair.

    Plain doubles use the shortest ``repr``; genuine double-double values are
    written as the exact decimal expansion of ``hi + lo``.
    """
    hi, lo = float(hi), float(lo)
    if lo == 0.0:
        return repr(hi)
    with localcontext() as ctx:
        ctx.prec = 1200
        return str(Decimal(hi) + Decimal(lo))


def from_decimal_string(text):
    text = text.strip()
    hi = float(text)
    if repr(hi) == text or not np.isfinite(hi):
        return hi, 0.0
    with localcontext() as ctx:
        ctx.prec = 1200
        rest = Decimal(text) - Decimal(hi)
    return hi, float(rest)
