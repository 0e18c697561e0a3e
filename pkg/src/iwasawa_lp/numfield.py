"""Exact arithmetic in Q[alpha] / (alpha^2 - a*alpha + c) and p-adic Hecke roots."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import PadicScalar, PrecisionError, valuation


@dataclass(frozen=True)
class QuadraticElement:
    """r0 + r1*alpha where alpha^2 = a*alpha - c (a Hecke polynomial root)."""

    r0: Fraction
    r1: Fraction
    a: int
    c: int

    @classmethod
    def rational(cls, x, a: int, c: int) -> "QuadraticElement":
        return cls(Fraction(x), Fraction(0), a, c)

    @classmethod
    def generator(cls, a: int, c: int) -> "QuadraticElement":
        return cls(Fraction(0), Fraction(1), a, c)

    def _lift(self, other) -> "QuadraticElement":
        if isinstance(other, QuadraticElement):
            if (other.a, other.c) != (self.a, self.c):
                raise ValueError("elements of different quadratic rings")
            return other
        return QuadraticElement(Fraction(other), Fraction(0), self.a, self.c)

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticElement(self.r0 + o.r0, self.r1 + o.r1, self.a, self.c)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.r0, -self.r1, self.a, self.c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        # (x0 + x1 t)(y0 + y1 t) with t^2 = a t - c
        t2 = self.r1 * o.r1
        return QuadraticElement(self.r0 * o.r0 - self.c * t2,
                                self.r0 * o.r1 + self.r1 * o.r0 + self.a * t2, self.a, self.c)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticElement":
        """Image under alpha -> a - alpha."""
        return QuadraticElement(self.r0 + self.a * self.r1, -self.r1, self.a, self.c)

    def norm(self) -> Fraction:
        return self.r0 ** 2 + self.a * self.r0 * self.r1 + self.c * self.r1 ** 2

    def inverse(self) -> "QuadraticElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("element is not invertible")
        conj = self.conjugate()
        return QuadraticElement(conj.r0 / n, conj.r1 / n, self.a, self.c)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadraticElement.rational(1, self.a, self.c)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_zero(self) -> bool:
        return self.r0 == 0 and self.r1 == 0

    def embed(self, alpha_p: PadicScalar) -> PadicScalar:
        """Image in Q_p under alpha -> alpha_p."""
        p, prec = alpha_p.p, alpha_p.prec
        margin = max(0, -_val(self.r0, p), -_val(self.r1, p))
        hi = prec + margin
        x0 = PadicScalar.from_rational(self.r0, p, hi)
        x1 = PadicScalar.from_rational(self.r1, p, hi)
        return x0 + x1 * alpha_p


def _val(x: Fraction, p: int) -> int:
    v = valuation(x, p)
    return 0 if v == float("inf") else v


def newton_slopes(a: int, c: int, p: int) -> tuple[Fraction, Fraction]:
    """Valuations of the two roots of X^2 - a X + c (c != 0), ascending."""
    vc = valuation(c, p)
    va = valuation(a, p)
    if 2 * va < vc:
        return Fraction(va), Fraction(vc - va)
    return Fraction(vc, 2), Fraction(vc, 2)


def hecke_root(a: int, c: int, p: int, prec: int, which: str | int = "small") -> PadicScalar:
    """A root of X^2 - a X + c in Q_p known to absolute precision ``prec``.

    ``which`` is "small"/"unit"/"ordinary" (smaller valuation), "large", or
    0/1 (order of the square roots in the equal-slope case).
    """
    if a * a == 4 * c:
        raise ValueError("the Hecke polynomial has a double root")
    s1, s2 = newton_slopes(a, c, p)
    if which in ("unit", "ordinary") and s1 != 0:
        raise ValueError("no unit root: the form is not ordinary at p")
    want_small = which in ("small", "unit", "ordinary", 0)
    if s1 != s2:
        vc = valuation(c, p)
        hi = prec + vc + 4
        A = PadicScalar.from_rational(a, p, hi)
        C = PadicScalar.from_rational(c, p, hi)
        x = A
        # x -> a - c/x contracts by p^(s2 - s1) around the small root
        for _ in range(hi + 2):
            nxt = A - C / x
            if nxt == x and nxt.prec >= prec:
                x = nxt
                break
            x = nxt
        small = x
        root = small if want_small else C / small
        return root.with_prec(min(prec, root.prec))
    # equal slopes: need a square root of the discriminant in Q_p
    disc = a * a - 4 * c
    vd = valuation(disc, p)
    if vd % 2:
        raise PrecisionError("Hecke roots are not in Q_p (ramified quadratic extension needed)")
    u = disc // p ** vd
    if pow(u % p, (p - 1) // 2, p) != 1:
        raise PrecisionError("Hecke roots are not in Q_p (unramified quadratic extension needed)")
    hi = prec + vd + 4
    mod = p ** hi
    r = next(t for t in range(1, p) if (t * t - u) % p == 0)
    for _ in range(hi.bit_length() + 1):
        r = (r + u * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    sq = PadicScalar(p, vd // 2, r, hi)
    sign = 1 if which in (0, "small", "unit", "ordinary") else -1
    root = (PadicScalar.from_rational(a, p, hi) + sq * sign) / PadicScalar.from_rational(2, p, hi)
    return root.with_prec(min(prec, root.prec))
