"""Truncated power series ("jets") for exact higher derivatives.

A ``Jet`` of order M holds Taylor coefficients ``c[0..M]`` of a function
around a point; the m-th derivative there is ``m! * c[m]``.  Products,
reciprocals, powers and exponentials follow the standard recurrences and
are exact up to rounding.
"""

import math

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float).copy()

    @classmethod
    def variable(cls, x0, order):
        """The identity function ``s`` expanded around ``x0``."""
        c = np.zeros(order + 1)
        c[0] = x0
        if order:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        return Jet(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return Jet(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return Jet(self._coerce(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        o = self._coerce(other)
        return Jet(np.convolve(self.c, o.c)[: self.order + 1])

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("jet has zero constant term")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for n in range(1, len(a)):
            b[n] = -np.dot(a[1 : n + 1], b[n - 1 :: -1][:n]) / a[0]
        return Jet(b)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k):
        """Real power via ``b' a = k a' b``; needs a nonzero constant term."""
        a = self.c
        if k == 0:
            return Jet.constant(1.0, self.order)
        if float(k).is_integer() and k > 0 and a[0] == 0:
            out = Jet.constant(1.0, self.order)
            for _ in range(int(k)):
                out = out * self
            return out
        b = np.zeros_like(a)
        b[0] = a[0] ** k
        for n in range(1, len(a)):
            j = np.arange(1, n + 1)
            b[n] = np.dot((k * j - (n - j)) * a[j], b[n - j]) / (n * a[0])
        return Jet(b)

    def exp(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = math.exp(a[0])
        for n in range(1, len(a)):
            j = np.arange(1, n + 1)
            b[n] = np.dot(j * a[j], b[n - j]) / n
        return Jet(b)

    def derivative(self, m):
        return math.factorial(m) * self.c[m]

    def derivatives(self):
        return np.array([math.factorial(m) * v for m, v in enumerate(self.c)])

    def __repr__(self):
        return f"Jet({self.c.tolist()})"
