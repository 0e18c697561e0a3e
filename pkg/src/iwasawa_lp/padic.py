"""Finite-precision p-adic numbers.

Two representations are used throughout the package:

* :class:`PadicScalar` -- a single element of Q_p stored as ``p**val * unit``
  and known modulo ``p**prec`` (capped absolute precision).
* :class:`QpPoly` -- a coefficient vector sharing one scale and one absolute
  precision.  Power series, polynomials and group-ring elements are built on
  it because the integer-vector layout keeps the hot loops cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the available precision."""


def valuation(x: Rational, p: int) -> int | float:
    """p-adic valuation of a rational; ``inf`` for zero."""
    if x == 0:
        return float("inf")
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _split(x: Fraction, p: int) -> tuple[int, int, int]:
    """Return (v, num, den) with x = p^v * num/den and num, den prime to p."""
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num, den


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrecisionProfile:
    """Working precision shared by a computation.

    ``cap_n`` is the number of p-adic digits (absolute) and ``series_cap`` the
    truncation degree of power series.
    """

    p: int
    cap_n: int = 10
    series_cap: int = 30
    cyclo_level: int = 4

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.cap_n < 1:
            raise ValueError("cap_n must be >= 1")
        if self.series_cap < 1:
            raise ValueError("series_cap must be >= 1")
        if self.cyclo_level < 0:
            raise ValueError("cyclo_level must be >= 0")

    @property
    def modulus(self) -> int:
        return self.p ** self.cap_n


class PadicScalar:
    """An element ``p**val * unit`` of Q_p known modulo ``p**prec``.

    The zero-at-precision element has ``unit == 0`` and ``val == prec``.
    Equality compares values modulo the smaller of the two precisions.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        rel = prec - val
        if unit == 0 or rel <= 0:
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "val", prec)
            object.__setattr__(self, "unit", 0)
            object.__setattr__(self, "prec", prec)
            return
        while unit % p == 0:
            unit //= p
            val += 1
        rel = prec - val
        if rel <= 0:
            val, unit = prec, 0
        else:
            unit %= p ** rel
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("PadicScalar is immutable")

    # constructors -----------------------------------------------------
    @classmethod
    def from_rational(cls, x: Rational, p: int, prec: int) -> "PadicScalar":
        x = Fraction(x)
        if x == 0:
            return cls(p, prec, 0, prec)
        v, num, den = _split(x, p)
        rel = prec - v
        if rel <= 0:
            return cls(p, prec, 0, prec)
        mod = p ** rel
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicScalar":
        return cls(p, prec, 0, prec)

    @classmethod
    def one(cls, p: int, prec: int) -> "PadicScalar":
        return cls(p, 0, 1, prec)

    # queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def valuation(self) -> int:
        return self.val

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    def lift(self) -> Fraction:
        """Canonical rational representative p^val * unit."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, digits: int | None = None) -> int:
        """Integer representative modulo p^digits (requires val >= 0)."""
        digits = self.prec if digits is None else digits
        if self.unit == 0:
            return 0
        if self.val < 0:
            raise PrecisionError("element is not integral")
        return (self.unit * self.p ** self.val) % self.p ** digits

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction)):
            # exact rationals carry infinite precision; cap generously
            extra = abs(self.val) + _exact_margin(other, self.p)
            return PadicScalar.from_rational(other, self.p, self.prec + extra)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        if self.unit == 0:
            return PadicScalar(self.p, o.val, o.unit, prec)
        if o.unit == 0:
            return PadicScalar(self.p, self.val, self.unit, prec)
        m = min(self.val, o.val)
        s = self.unit * self.p ** (self.val - m) + o.unit * self.p ** (o.val - m)
        return PadicScalar(self.p, m, s, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.val + o.prec, o.val + self.prec)
        return PadicScalar(self.p, self.val + o.val, self.unit * o.unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.unit == 0:
            raise ZeroDivisionError("inverse of zero-at-precision element")
        rel = self.prec - self.val
        mod = self.p ** rel
        return PadicScalar(self.p, -self.val, pow(self.unit, -1, mod), rel - self.val)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicScalar.one(self.p, self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def with_prec(self, prec: int) -> "PadicScalar":
        """Reduce to a lower absolute precision."""
        if prec > self.prec:
            raise PrecisionError("cannot raise precision")
        return PadicScalar(self.p, self.val, self.unit, prec)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicScalar.from_rational(other, self.p, self.prec)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.prec})"


def _exact_margin(x: Rational, p: int) -> int:
    v = valuation(x, p)
    return 0 if v == float("inf") or v >= 0 else -int(v)


def teichmuller(a: int, prof: PrecisionProfile | int, prec: int | None = None) -> PadicScalar:
    """The (p-1)-st root of unity congruent to ``a`` mod p.

    Computed by iterating x -> x^p, which converges to the Teichmuller lift.
    """
    if isinstance(prof, PrecisionProfile):
        p, prec = prof.p, prof.cap_n if prec is None else prec
    else:
        p = prof
        if prec is None:
            raise ValueError("precision required")
    if a % p == 0:
        raise ValueError("Teichmuller lift of a non-unit")
    mod = p ** prec
    x = a % mod
    for _ in range(prec):
        x = pow(x, p, mod)
    return PadicScalar(p, 0, x, prec)


def teichmuller_int(a: int, p: int, prec: int) -> int:
    mod = p ** prec
    x = a % mod
    for _ in range(prec):
        x = pow(x, p, mod)
    return x


def log_gamma_index(a: int, p: int, n: int) -> int:
    """The exponent s in Z/p^n with <a> = (1+p)^s modulo p^(n+1).

    ``<a>`` is the principal-unit part a / omega(a).
    """
    mod = p ** (n + 1)
    w = teichmuller_int(a, p, n + 1)
    u = a * pow(w, -1, mod) % mod
    g = 1 + p
    x = 1
    for s in range(p ** n):
        if x == u:
            return s
        x = x * g % mod
    raise ValueError("not a principal unit")  # pragma: no cover


def principal_unit_logs(p: int, n: int) -> dict[int, int]:
    """Map every unit a mod p^(n+1) to its index s(a) in Z/p^n."""
    mod = p ** (n + 1)
    g = 1 + p
    table: dict[int, int] = {}
    x = 1
    powers = {}
    for s in range(p ** n):
        powers[x] = s
        x = x * g % mod
    for a in range(1, mod):
        if a % p == 0:
            continue
        w = teichmuller_int(a, p, n + 1)
        table[a] = powers[a * pow(w, -1, mod) % mod]
    return table


@dataclass(frozen=True)
class QpPoly:
    """Coefficient vector over Q_p with a shared scale.

    Coefficient i is ``coeffs[i] * p**shift`` and every coefficient is known
    modulo ``p**prec``.  Stored integers are reduced modulo p^(prec - shift).
    """

    p: int
    coeffs: tuple
    shift: int
    prec: int

    def __post_init__(self):
        digits = self.prec - self.shift
        if digits <= 0:
            object.__setattr__(self, "coeffs", tuple(0 for _ in self.coeffs))
            object.__setattr__(self, "shift", self.prec)
            return
        mod = self.p ** digits
        object.__setattr__(self, "coeffs", tuple(c % mod for c in self.coeffs))

    # constructors -----------------------------------------------------
    @classmethod
    def from_ints(cls, p: int, coeffs: Iterable[int], prec: int) -> "QpPoly":
        return cls(p, tuple(coeffs), 0, prec)

    @classmethod
    def from_rationals(cls, p: int, coeffs: Sequence[Rational], prec: int) -> "QpPoly":
        fr = [Fraction(c) for c in coeffs]
        vals = [valuation(c, p) for c in fr if c != 0]
        shift = min(min(vals), prec) if vals else prec
        shift = min(shift, 0) if shift != prec else shift
        if not vals:
            return cls(p, tuple(0 for _ in fr), prec, prec)
        digits = prec - shift
        if digits <= 0:
            return cls(p, tuple(0 for _ in fr), prec, prec)
        mod = p ** digits
        out = []
        for c in fr:
            c2 = c / Fraction(p) ** shift
            out.append(c2.numerator * pow(c2.denominator, -1, mod) % mod)
        return cls(p, tuple(out), shift, prec)

    @classmethod
    def from_scalars(cls, p: int, scalars: Sequence[PadicScalar]) -> "QpPoly":
        if not scalars:
            return cls(p, (), 0, 0)
        prec = min(s.prec for s in scalars)
        shift = min(min(s.val for s in scalars), prec)
        out = []
        for s in scalars:
            out.append(0 if s.unit == 0 else s.unit * p ** (s.val - shift))
        return cls(p, tuple(out), shift, prec)

    @classmethod
    def zeros(cls, p: int, n: int, prec: int) -> "QpPoly":
        return cls(p, tuple(0 for _ in range(n)), prec, prec)

    # access ------------------------------------------------------------
    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i: int) -> PadicScalar:
        if i >= len(self.coeffs):
            return PadicScalar.zero(self.p, self.prec)
        return PadicScalar(self.p, self.shift, self.coeffs[i], self.prec)

    def scalars(self) -> list[PadicScalar]:
        return [self[i] for i in range(len(self))]

    def valuations(self) -> list:
        out = []
        for c in self.coeffs:
            if c == 0:
                out.append(float("inf"))
            else:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                out.append(self.shift + v)
        return out

    def min_valuation(self):
        """Smallest coefficient valuation; ``prec`` when zero at precision."""
        vals = [v for v in self.valuations() if v != float("inf")]
        return min(vals) if vals else self.prec

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    # reshaping -----------------------------------------------------------
    def resize(self, n: int) -> "QpPoly":
        c = self.coeffs[:n] + tuple(0 for _ in range(n - len(self.coeffs)))
        return QpPoly(self.p, c, self.shift, self.prec)

    def rescale(self, shift: int) -> "QpPoly":
        """Re-express on a smaller shift (no loss)."""
        if shift > self.shift:
            raise ValueError("can only lower the shift")
        f = self.p ** (self.shift - shift)
        return QpPoly(self.p, tuple(c * f for c in self.coeffs), shift, self.prec)

    def with_prec(self, prec: int) -> "QpPoly":
        return QpPoly(self.p, self.coeffs, min(self.shift, prec), min(prec, self.prec))

    def normalized(self) -> "QpPoly":
        """Raise the shift as far as the coefficients allow."""
        m = self.min_valuation()
        if m == self.prec or m <= self.shift:
            return self if m != self.prec else QpPoly.zeros(self.p, len(self), self.prec)
        f = self.p ** (m - self.shift)
        return QpPoly(self.p, tuple(c // f for c in self.coeffs), m, self.prec)

    # arithmetic ----------------------------------------------------------
    def _align(self, other: "QpPoly"):
        shift = min(self.shift, other.shift)
        a = self.rescale(shift) if self.shift != shift else self
        b = other.rescale(shift) if other.shift != shift else other
        return a, b, shift

    def __add__(self, other: "QpPoly") -> "QpPoly":
        a, b, shift = self._align(other)
        n = max(len(a), len(b))
        ca = a.coeffs + (0,) * (n - len(a))
        cb = b.coeffs + (0,) * (n - len(b))
        return QpPoly(self.p, tuple(x + y for x, y in zip(ca, cb)), shift, min(self.prec, other.prec))

    def __neg__(self) -> "QpPoly":
        return QpPoly(self.p, tuple(-c for c in self.coeffs), self.shift, self.prec)

    def __sub__(self, other: "QpPoly") -> "QpPoly":
        return self + (-other)

    def scale(self, c: PadicScalar | Rational) -> "QpPoly":
        if not isinstance(c, PadicScalar):
            c = Fraction(c)
            if c == 0:
                return QpPoly.zeros(self.p, len(self), self.prec)
            v, num, den = _split(c, self.p)
            digits = self.prec - self.shift
            mod = self.p ** max(digits, 1)
            u = num * pow(den, -1, mod)
            return QpPoly(self.p, tuple(x * u for x in self.coeffs), self.shift + v, self.prec + v)
        if c.unit == 0:
            return QpPoly.zeros(self.p, len(self), c.prec + self.min_valuation())
        prec = min(self.prec + c.val, c.prec + self.min_valuation())
        return QpPoly(self.p, tuple(x * c.unit for x in self.coeffs), self.shift + c.val, prec)

    def mul(self, other: "QpPoly", cap: int | None = None) -> "QpPoly":
        """Product, truncated to ``cap`` coefficients if given."""
        n = len(self) + len(other) - 1
        if cap is not None:
            n = min(n, cap)
        if n <= 0:
            return QpPoly.zeros(self.p, 0, min(self.prec, other.prec))
        out = [0] * n
        ca, cb = self.coeffs, other.coeffs
        for i, x in enumerate(ca):
            if not x or i >= n:
                continue
            lim = min(len(cb), n - i)
            for j in range(lim):
                y = cb[j]
                if y:
                    out[i + j] += x * y
        prec = min(self.prec + other.min_valuation(), other.prec + self.min_valuation())
        return QpPoly(self.p, tuple(out), self.shift + other.shift, prec)

    def shift_x(self, m: int, cap: int | None = None) -> "QpPoly":
        """Multiply by X^m."""
        c = (0,) * m + self.coeffs
        if cap is not None:
            c = c[:cap]
        return QpPoly(self.p, c, self.shift, self.prec)

    # basis change X <-> T = 1 + X ---------------------------------------
    def to_t_basis(self) -> "QpPoly":
        """Coefficients of F in powers of T = 1 + X, i.e. of F(T - 1)."""
        return QpPoly(self.p, _taylor_shift(self.coeffs, -1), self.shift, self.prec)

    def from_t_basis(self) -> "QpPoly":
        """Inverse of :meth:`to_t_basis`: coefficients of G(1 + X)."""
        return QpPoly(self.p, _taylor_shift(self.coeffs, 1), self.shift, self.prec)

    # evaluation ----------------------------------------------------------
    def eval_scalar(self, x: PadicScalar) -> PadicScalar:
        acc = PadicScalar.zero(self.p, self.prec + max(0, -min(0, x.val)) * len(self))
        for i in range(len(self) - 1, -1, -1):
            acc = acc * x + self[i]
        return acc

    def equal_at(self, other: "QpPoly", prec: int | None = None) -> bool:
        d = self - other
        if prec is not None:
            d = d.with_prec(prec)
        return d.is_zero()

    def to_fractions(self) -> list[Fraction]:
        return [Fraction(c) * Fraction(self.p) ** self.shift for c in self.coeffs]


def _taylor_shift(coeffs: Sequence[int], a: int) -> tuple:
    """Coefficients of F(X + a) given those of F(X), over the integers."""
    c = list(coeffs)
    n = len(c)
    # Horner-style synthetic division repeated n times: O(n^2)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] += a * c[j + 1]
    return tuple(c)


def binomial_row(n: int) -> list[int]:
    return [comb(n, i) for i in range(n + 1)]
