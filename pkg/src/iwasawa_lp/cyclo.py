"""Cyclotomic scalars, p-adic characters and Gauss sums.

Elements of Z_p[zeta_{p^n}] (tensored with Q_p) are stored in the power basis
of x = zeta_{p^n}, reduced modulo the p^n-th cyclotomic polynomial.  The fixed
embedding sends exp(2 pi i / p^n) to x.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .padic import (
    PadicScalar,
    PrecisionError,
    PrecisionProfile,
    _taylor_shift,
    principal_unit_logs,
    teichmuller_int,
    valuation,
)


def cyclo_degree(p: int, level: int) -> int:
    return 1 if level == 0 else (p - 1) * p ** (level - 1)


def _reduce_cyclic(coeffs: list[int], p: int, level: int) -> list[int]:
    """Reduce a coefficient list modulo Phi_{p^level}(x)."""
    if level == 0:
        return [sum(coeffs)]
    n = p ** level
    d = cyclo_degree(p, level)
    q = p ** (level - 1)
    buf = [0] * n
    for i, c in enumerate(coeffs):
        if c:
            buf[i % n] += c
    # x^(d + r) = -sum_{t<p-1} x^(t q + r)
    for r in range(q):
        c = buf[d + r]
        if c:
            for t in range(p - 1):
                buf[t * q + r] -= c
    return buf[:d]


class CycloScalar:
    """An element ``p**shift * sum c_i x^i`` of Q_p(zeta_{p^level}).

    Known modulo p^prec in every power-basis coordinate.
    """

    __slots__ = ("p", "level", "coeffs", "shift", "prec")

    def __init__(self, p: int, level: int, coeffs, shift: int, prec: int):
        d = cyclo_degree(p, level)
        coeffs = list(coeffs)
        if len(coeffs) != d:
            coeffs = _reduce_cyclic(coeffs, p, level)
        digits = prec - shift
        if digits <= 0:
            coeffs = [0] * d
            shift = prec
        else:
            mod = p ** digits
            coeffs = [c % mod for c in coeffs]
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("CycloScalar is immutable")

    # constructors -----------------------------------------------------
    @classmethod
    def from_scalar(cls, s: PadicScalar | int | Fraction, p: int | None = None,
                    prec: int | None = None, level: int = 0) -> "CycloScalar":
        if not isinstance(s, PadicScalar):
            s = PadicScalar.from_rational(s, p, prec)
        d = cyclo_degree(s.p, level)
        coeffs = [s.unit] + [0] * (d - 1)
        return cls(s.p, level, coeffs, s.val, s.prec)

    @classmethod
    def zeta_power(cls, p: int, level: int, e: int, prec: int) -> "CycloScalar":
        """zeta_{p^level}^e."""
        n = p ** level
        coeffs = [0] * n
        coeffs[e % n] = 1
        return cls(p, level, _reduce_cyclic(coeffs, p, level), 0, prec)

    # structure ---------------------------------------------------------
    def lift_to(self, level: int) -> "CycloScalar":
        if level == self.level:
            return self
        if level < self.level:
            raise ValueError("cannot lower the level of a general element")
        step = self.p ** (level - self.level)
        n = self.p ** level
        buf = [0] * n
        for i, c in enumerate(self.coeffs):
            buf[(i * step) % n] += c
        return CycloScalar(self.p, level, buf, self.shift, self.prec)

    def reduced(self) -> "CycloScalar":
        """Drop to level 0 when every non-constant coordinate vanishes."""
        if self.level and not any(self.coeffs[1:]):
            return CycloScalar(self.p, 0, [self.coeffs[0]], self.shift, self.prec)
        return self

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def coefficient(self, i: int) -> PadicScalar:
        return PadicScalar(self.p, self.shift, self.coeffs[i], self.prec)

    def constant(self) -> PadicScalar:
        return self.coefficient(0)

    def _min_coeff_val(self) -> int:
        best = self.prec
        for c in self.coeffs:
            if c:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                best = min(best, self.shift + v)
        return best

    def valuation(self) -> Fraction | float:
        """Normalized valuation (v(p) = 1); ``inf`` when zero at precision.

        Read off the expansion in the uniformizer pi = x - 1.
        """
        if self.is_zero():
            return float("inf")
        if self.level == 0:
            return Fraction(valuation(self.coeffs[0], self.p) + self.shift)
        d = len(self.coeffs)
        b = _taylor_shift(self.coeffs, 1)
        best = None
        for i, c in enumerate(b):
            if c:
                v = Fraction(valuation(c, self.p) + self.shift) + Fraction(i, d)
                best = v if best is None or v < best else best
        if best is None or best >= self.prec:
            return float("inf")
        return best

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "CycloScalar":
        if isinstance(other, CycloScalar):
            return other
        if isinstance(other, PadicScalar):
            return CycloScalar.from_scalar(other)
        if isinstance(other, (int, Fraction)):
            extra = abs(self.shift) + max(0, -int(valuation(other, self.p))) if other != 0 else 0
            return CycloScalar.from_scalar(other, self.p, self.prec + extra)
        return NotImplemented

    def _common(self, other: "CycloScalar"):
        level = max(self.level, other.level)
        a, b = self.lift_to(level), other.lift_to(level)
        shift = min(a.shift, b.shift)
        ca = [c * self.p ** (a.shift - shift) for c in a.coeffs]
        cb = [c * self.p ** (b.shift - shift) for c in b.coeffs]
        return level, ca, cb, shift

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        level, ca, cb, shift = self._common(o)
        return CycloScalar(self.p, level, [x + y for x, y in zip(ca, cb)], shift, min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.p, self.level, [-c for c in self.coeffs], self.shift, self.prec)

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
        level = max(self.level, o.level)
        a, b = self.lift_to(level), o.lift_to(level)
        if level == 0:
            prod = [a.coeffs[0] * b.coeffs[0]]
        else:
            n = self.p ** level
            prod = [0] * n
            for i, x in enumerate(a.coeffs):
                if x:
                    for j, y in enumerate(b.coeffs):
                        if y:
                            prod[(i + j) % n] += x * y
            prod = _reduce_cyclic(prod, self.p, level)
        prec = min(a.prec + b._min_coeff_val(), b.prec + a._min_coeff_val())
        return CycloScalar(self.p, level, prod, a.shift + b.shift, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = CycloScalar.from_scalar(1, self.p, self.prec, self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, u: int) -> "CycloScalar":
        """Apply zeta -> zeta^u (u prime to p)."""
        if self.level == 0:
            return self
        n = self.p ** self.level
        buf = [0] * n
        for i, c in enumerate(self.coeffs):
            buf[(i * u) % n] += c
        return CycloScalar(self.p, self.level, buf, self.shift, self.prec)

    def conj(self) -> "CycloScalar":
        return self.galois(-1)

    def with_prec(self, prec: int) -> "CycloScalar":
        return CycloScalar(self.p, self.level, self.coeffs, min(self.shift, prec), min(prec, self.prec))

    def equal_at(self, other, prec: int | None = None) -> bool:
        d = self - other
        if prec is not None:
            d = d.with_prec(prec)
        return d.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar, CycloScalar)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"CycloScalar(level={self.level}, {self.p}^{self.shift}*({body}), prec={self.prec})"


@dataclass(frozen=True)
class PadicCharacter:
    """The character x |-> x^j * phi(x) of Z_p^x.

    ``phi`` has tame part omega^tame and sends the principal unit (1+p)^s to
    zeta_{p^wild_level}^(wild_exp * s).  Equivalently phi is a Dirichlet
    character of p-power conductor via a -> omega(a)^tame * zeta^(wild_exp*s(a)).
    """

    p: int
    j: int = 0
    tame: int = 0
    wild_level: int = 0
    wild_exp: int = 0

    def __post_init__(self):
        p = self.p
        object.__setattr__(self, "tame", self.tame % (p - 1))
        m, e = self.wild_level, self.wild_exp % (p ** self.wild_level) if self.wild_level else 0
        while m > 0 and e % p == 0:
            m -= 1
            e //= p
        object.__setattr__(self, "wild_level", m)
        object.__setattr__(self, "wild_exp", e % p ** m if m else 0)

    @property
    def finite_part(self) -> "PadicCharacter":
        return PadicCharacter(self.p, 0, self.tame, self.wild_level, self.wild_exp)

    @property
    def is_trivial_finite(self) -> bool:
        return self.tame == 0 and self.wild_level == 0

    @property
    def kind(self) -> str:
        if self.is_trivial_finite:
            return "cyclotomic" if self.j else "trivial"
        return "finite" if self.j == 0 else "product"

    @property
    def conductor_exponent(self) -> int:
        if self.wild_level:
            return self.wild_level + 1
        return 1 if self.tame else 0

    @property
    def conductor(self) -> int:
        return self.p ** self.conductor_exponent

    @property
    def parity(self) -> int:
        """phi(-1) for the finite part."""
        return -1 if self.tame % 2 else 1

    @property
    def branch(self) -> int:
        """Index i with the restriction to mu_{p-1} equal to omega^i."""
        return (self.j + self.tame) % (self.p - 1)

    def conjugate(self) -> "PadicCharacter":
        return PadicCharacter(self.p, -self.j, -self.tame, self.wild_level, -self.wild_exp)

    def __mul__(self, other: "PadicCharacter") -> "PadicCharacter":
        m = max(self.wild_level, other.wild_level)
        e = self.wild_exp * self.p ** (m - self.wild_level) + other.wild_exp * self.p ** (m - other.wild_level)
        return PadicCharacter(self.p, self.j + other.j, self.tame + other.tame, m, e)

    def dirichlet_value(self, a: int, prec: int) -> CycloScalar:
        """phi(a) for an integer a (0 when p divides a), at level wild_level."""
        p = self.p
        if a % p == 0:
            return CycloScalar.from_scalar(0, p, prec, self.wild_level)
        w = teichmuller_int(a, p, prec)
        tame = PadicScalar(p, 0, pow(w, self.tame, p ** prec), prec)
        if self.wild_level == 0:
            return CycloScalar.from_scalar(tame)
        s = principal_unit_logs(p, self.wild_level)[a % p ** (self.wild_level + 1)]
        z = CycloScalar.zeta_power(p, self.wild_level, self.wild_exp * s, prec)
        return z * CycloScalar.from_scalar(tame)


def finite_characters(p: int, max_exponent: int, parity: int | None = None) -> Iterator[PadicCharacter]:
    """All finite-order characters of conductor dividing p^max_exponent."""
    for m in range(0, max(max_exponent - 1, 0) + 1):
        if m > 0 and m + 1 > max_exponent:
            break
        exps = [0] if m == 0 else [e for e in range(p ** m) if e % p]
        for t in range(p - 1):
            if m == 0 and t and max_exponent < 1:
                continue
            for e in exps:
                chi = PadicCharacter(p, 0, t, m, e)
                if chi.conductor_exponent > max_exponent:
                    continue
                if parity is not None and chi.parity != parity:
                    continue
                yield chi


def gauss_sum(phi: PadicCharacter, prof: PrecisionProfile) -> CycloScalar:
    """sum_{i=1}^{Cond} phi(i) zeta_Cond^i as an element of level ord_p(Cond)."""
    if phi.j:
        raise ValueError("Gauss sums are defined for finite-order characters")
    n = phi.conductor_exponent
    max_level = getattr(prof, "cyclo_level", None)
    if max_level is not None and n > max_level:
        raise PrecisionError(f"conductor p^{n} exceeds the supported cyclotomic level {max_level}")
    p, prec = phi.p, prof.cap_n
    if n == 0:
        return CycloScalar.from_scalar(1, p, prec)
    size = p ** n
    mod = p ** prec
    logs = principal_unit_logs(p, phi.wild_level) if phi.wild_level else None
    # phi values live at level n-1; zeta_{p^(n-1)} = x^p inside level n
    buf = [0] * size
    for i in range(1, size + 1):
        if i % p == 0:
            continue
        w = pow(teichmuller_int(i, p, prec), phi.tame, mod)
        e = i
        if logs is not None:
            e += p * phi.wild_exp * logs[i % p ** (phi.wild_level + 1)]
        buf[e % size] += w
    return CycloScalar(p, n, _reduce_cyclic(buf, p, n), 0, prec)


def character_eval(chi: PadicCharacter, u: PadicScalar, prof: PrecisionProfile | None = None) -> CycloScalar:
    """chi(u) = u^j * phi(u) for a p-adic unit u."""
    if u.is_zero() or u.val != 0:
        raise ValueError("character_eval needs a p-adic unit")
    p = chi.p
    prec = u.prec if prof is None else min(u.prec, prof.cap_n)
    base = u.residue(prec)
    if chi.j >= 0:
        power = PadicScalar(p, 0, pow(base, chi.j, p ** prec), prec)
    else:
        power = PadicScalar(p, 0, pow(pow(base, -1, p ** prec), -chi.j, p ** prec), prec)
    return chi.finite_part.dirichlet_value(base, prec) * CycloScalar.from_scalar(power)
