"""Exact ground fields: the rationals and prime fields GF(p)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

DEFAULT_PRIME = 32003


class Fp:
    """Element of GF(p). Interoperates with Python ints."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o, self.p) / self

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"{self.v}"


class Field:
    """A ground field: ``Field(0)`` is QQ, ``Field(p)`` is GF(p)."""

    def __init__(self, char: int = 0):
        if char < 0 or char == 1:
            raise ValueError(f"invalid characteristic {char}")
        self.char = char

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip().upper().replace(" ", "")
        if t in ("QQ", "Q"):
            return cls(0)
        if t.startswith("GF(") and t.endswith(")"):
            return cls(int(t[3:-1]))
        if t in ("FP", "GF"):
            return cls(DEFAULT_PRIME)
        raise ValueError(f"unknown field {text!r}")

    @property
    def name(self) -> str:
        return "QQ" if self.char == 0 else f"GF({self.char})"

    def __call__(self, x):
        if self.char == 0:
            if isinstance(x, Fp):
                raise TypeError("cannot coerce GF(p) element into QQ")
            return Fraction(x)
        if isinstance(x, Fp):
            return Fp(x.v, self.char)
        if isinstance(x, Fraction):
            return Fp(x.numerator, self.char) / x.denominator
        return Fp(int(x), self.char)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        m = np.empty((rows, cols), dtype=object)
        z = self.zero
        for idx in np.ndindex(rows, cols):
            m[idx] = z
        return m

    def eye(self, n: int) -> np.ndarray:
        m = self.zeros(n, n)
        for i in range(n):
            m[i, i] = self.one
        return m

    def matrix(self, rows) -> np.ndarray:
        rows = [list(r) for r in rows]
        n = len(rows)
        c = len(rows[0]) if n else 0
        m = self.zeros(n, c)
        for i, r in enumerate(rows):
            if len(r) != c:
                raise ValueError("ragged matrix")
            for j, x in enumerate(r):
                m[i, j] = self(x)
        return m

    def vector(self, xs) -> np.ndarray:
        xs = list(xs)
        v = np.empty(len(xs), dtype=object)
        for i, x in enumerate(xs):
            v[i] = self(x)
        return v

    def __eq__(self, other):
        return isinstance(other, Field) and other.char == self.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field(0)
