"""The cyclotomic Iwasawa algebra: power series, branches, specialization,
Weierstrass preparation and characteristic ideals.

An :class:`IwasawaSeries` is a truncated element of Z_p[[X]] (tensor Q_p);
``tail_val`` is a lower bound for the valuation of every coefficient beyond
the stored ones (``None`` when the element is an exact polynomial).  Branch i
of a :class:`LambdaCycElement` is the omega^i-component; the group element
gamma = 1+p corresponds to 1+X.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from .cyclo import CycloScalar, PadicCharacter, cyclo_degree
from .padic import PadicScalar, PrecisionError, PrecisionProfile, QpPoly, valuation

INF = float("inf")


@dataclass(frozen=True)
class IwasawaSeries:
    poly: QpPoly
    tail_val: int | None = 0

    # constructors -----------------------------------------------------
    @classmethod
    def from_ints(cls, p: int, coeffs: Sequence[int], prec: int, tail_val: int | None = 0) -> "IwasawaSeries":
        return cls(QpPoly.from_ints(p, coeffs, prec), tail_val)

    @classmethod
    def from_rationals(cls, p: int, coeffs: Sequence, prec: int, tail_val: int | None = 0) -> "IwasawaSeries":
        return cls(QpPoly.from_rationals(p, coeffs, prec), tail_val)

    @classmethod
    def zero(cls, p: int, cap: int, prec: int) -> "IwasawaSeries":
        return cls(QpPoly.zeros(p, cap, prec), None)

    @classmethod
    def one(cls, p: int, cap: int, prec: int) -> "IwasawaSeries":
        return cls.from_ints(p, [1] + [0] * (cap - 1), prec, None)

    @classmethod
    def gen(cls, p: int, cap: int, prec: int) -> "IwasawaSeries":
        """The variable X."""
        return cls.from_ints(p, [0, 1] + [0] * (cap - 2), prec, None)

    @classmethod
    def group_element(cls, p: int, s: int, cap: int, prec: int) -> "IwasawaSeries":
        """(1+X)^s, the image of gamma^s."""
        from math import comb
        return cls.from_ints(p, [comb(s, i) for i in range(cap)], prec, 0 if s >= cap else None)

    # structure ----------------------------------------------------------
    @property
    def p(self) -> int:
        return self.poly.p

    @property
    def prec(self) -> int:
        return self.poly.prec

    @property
    def cap(self) -> int:
        return len(self.poly)

    def __getitem__(self, i: int) -> PadicScalar:
        return self.poly[i]

    def coefficients(self) -> list[PadicScalar]:
        return self.poly.scalars()

    def valuations(self) -> list:
        return self.poly.valuations()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def resize(self, cap: int) -> "IwasawaSeries":
        tail = self.tail_val
        if cap < self.cap:
            dropped = [v for v in self.valuations()[cap:] if v != INF]
            if dropped:
                tail = min(dropped) if tail is None else min(tail, min(dropped))
        return IwasawaSeries(self.poly.resize(cap), tail)

    def with_prec(self, prec: int) -> "IwasawaSeries":
        return IwasawaSeries(self.poly.with_prec(prec), self.tail_val)

    def __eq__(self, other):
        if not isinstance(other, IwasawaSeries):
            return NotImplemented
        n = max(self.cap, other.cap)
        return self.poly.resize(n).equal_at(other.poly.resize(n))

    __hash__ = None

    # ring operations ----------------------------------------------------
    @staticmethod
    def _tails(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def __add__(self, other: "IwasawaSeries") -> "IwasawaSeries":
        return IwasawaSeries(self.poly + other.poly, self._tails(self.tail_val, other.tail_val))

    def __neg__(self) -> "IwasawaSeries":
        return IwasawaSeries(-self.poly, self.tail_val)

    def __sub__(self, other: "IwasawaSeries") -> "IwasawaSeries":
        return self + (-other)

    def __mul__(self, other) -> "IwasawaSeries":
        if not isinstance(other, IwasawaSeries):
            return self.scale(other)
        cap = max(self.cap, other.cap)
        prod = self.poly.mul(other.poly, cap)
        tail = None
        if self.tail_val is not None or other.tail_val is not None or self.cap + other.cap - 1 > cap:
            vs = [self.poly.min_valuation(), other.poly.min_valuation()]
            ta = self.tail_val if self.tail_val is not None else vs[0]
            tb = other.tail_val if other.tail_val is not None else vs[1]
            tail = min(ta, vs[0]) + min(tb, vs[1])
        return IwasawaSeries(prod, tail)

    __rmul__ = __mul__

    def scale(self, c) -> "IwasawaSeries":
        cv = c.val if isinstance(c, PadicScalar) else valuation(Fraction(c), self.p)
        tail = None if self.tail_val is None or cv == INF else self.tail_val + cv
        return IwasawaSeries(self.poly.scale(c), tail)

    # evaluation -----------------------------------------------------------
    def eval_scalar(self, x: PadicScalar) -> PadicScalar:
        return self.poly.eval_scalar(x)

    def eval_cyclo(self, x: CycloScalar) -> CycloScalar:
        acc = CycloScalar.from_scalar(0, self.p, self.prec, x.level)
        for i in range(self.cap - 1, -1, -1):
            acc = acc * x + CycloScalar.from_scalar(self.poly[i]).lift_to(x.level)
        return acc

    def to_json(self) -> dict:
        return {"shift": self.poly.shift, "prec": self.poly.prec,
                "digits": [str(c) for c in self.poly.coeffs], "tail_val": self.tail_val}

    @classmethod
    def from_json(cls, p: int, d: dict) -> "IwasawaSeries":
        poly = QpPoly(p, tuple(int(c) for c in d["digits"]), int(d["shift"]), int(d["prec"]))
        return cls(poly, d.get("tail_val"))


# ---------------------------------------------------------------------------
# specialization

def evaluation_point(chi: PadicCharacter, prec: int) -> CycloScalar:
    """X = chi(gamma) - 1 = (1+p)^j zeta - 1 with gamma = 1+p."""
    p = chi.p
    m = chi.wild_level
    gj = PadicScalar.from_rational(Fraction(1 + p) ** chi.j, p, prec + abs(chi.j))
    z = CycloScalar.zeta_power(p, m, chi.wild_exp, prec)
    return z * CycloScalar.from_scalar(gj.with_prec(prec)) - CycloScalar.from_scalar(1, p, prec, m)


def point_valuation(chi: PadicCharacter) -> Fraction | float:
    """Valuation of the evaluation point (1+p)^j zeta - 1."""
    p = chi.p
    if chi.wild_level:
        return Fraction(1, cyclo_degree(p, chi.wild_level))
    if chi.j == 0:
        return INF
    return Fraction(1 + valuation(chi.j, p))


def specialize(f: IwasawaSeries, chi: PadicCharacter, prof: PrecisionProfile | None = None,
               exact: bool = False) -> CycloScalar:
    """Evaluate f at X = chi(gamma) - 1.

    The result's precision is the coefficient precision, lowered by the tail
    bound sum_{i >= cap} a_i X^i unless ``exact`` (f is known to agree with the
    true element at this point, e.g. by a congruence) or f has no tail.
    """
    if chi.p != f.p:
        raise ValueError("prime mismatch")
    if prof is not None and chi.wild_level > prof.cyclo_level:
        raise PrecisionError(f"conductor beyond the supported cyclotomic level {prof.cyclo_level}")
    prec = f.prec
    v = point_valuation(chi)
    if not exact and f.tail_val is not None and v != INF:
        bound = f.tail_val + f.cap * v
        if bound < prec:
            if floor(bound) <= f.poly.min_valuation():
                raise PrecisionError(
                    f"series_cap={f.cap} too small: tail bound {float(bound):.2f} leaves no certified digits")
            prec = floor(bound)
    x = evaluation_point(chi, prec + max(0, -f.poly.shift) + 2)
    val = f.eval_cyclo(x)
    return val.with_prec(min(prec, val.prec))


def omega_poly(n: int, j: int, prof: PrecisionProfile, cap: int | None = None) -> IwasawaSeries:
    """omega_n^{[j]}(X) = (1+X)^{p^n} - (1+p)^{j p^n}."""
    from math import comb
    p = prof.p
    deg = p ** n
    cap = prof.series_cap if cap is None else cap
    if deg >= cap:
        raise ValueError(f"degree p^n = {deg} exceeds series_cap {cap}")
    coeffs = [comb(deg, i) for i in range(deg + 1)] + [0] * (cap - deg - 1)
    coeffs[0] -= (1 + p) ** (j * deg)
    return IwasawaSeries.from_ints(p, coeffs, prof.cap_n, None)


def poly_divmod(a: QpPoly, b: QpPoly) -> tuple[QpPoly, QpPoly]:
    """Division with remainder by a polynomial with unit leading coefficient."""
    p = a.p
    db = b.degree()
    if db < 0:
        raise ZeroDivisionError("division by zero polynomial")
    lead = b[db]
    if lead.val != 0:
        raise ValueError("leading coefficient must be a unit")
    prec = min(a.prec, b.prec)
    shift = min(a.shift, 0)
    mod = p ** (prec - shift)
    rem = list(a.rescale(shift).coeffs) if a.shift != shift else list(a.coeffs)
    bc = b.rescale(0).coeffs if b.shift > 0 else b.coeffs
    if b.shift < 0:
        raise ValueError("divisor must be integral")
    inv = pow(bc[db], -1, mod)
    nq = max(len(rem) - db, 1)
    q = [0] * nq
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i] * inv % mod
        if c:
            q[i - db] = c
            for t in range(db + 1):
                rem[i - db + t] -= c * bc[t]
        rem[i] %= mod
    r = rem[:db] if db > 0 else []
    return QpPoly(p, tuple(q), shift, prec), QpPoly(p, tuple(r) or (0,), shift, prec)


def resultant_valuation(f: QpPoly, g: QpPoly) -> int | float:
    """Valuation of Res(f, g) for integer polynomials (exact integer resultant)."""
    from .modsym import rref  # noqa: F401  (exact rational linear algebra helper)
    fa = [int(c) * f.p ** f.shift for c in f.coeffs[: f.degree() + 1]] if f.shift >= 0 else None
    ga = [int(c) * g.p ** g.shift for c in g.coeffs[: g.degree() + 1]] if g.shift >= 0 else None
    if fa is None or ga is None:
        raise ValueError("resultant needs integral polynomials")
    res = _int_resultant(fa, ga)
    return valuation(res, f.p) if res else INF


def _int_resultant(a: list[int], b: list[int]) -> int:
    """Resultant via the Sylvester determinant (Bareiss fraction-free elimination)."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(n):
        rows.append([0] * i + list(reversed(a)) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(reversed(b)) + [0] * (size - n - 1 - i))
    return _bareiss_det(rows)


def _bareiss_det(mat: list[list[int]]) -> int:
    m = [list(r) for r in mat]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k]), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Weierstrass preparation

@dataclass(frozen=True)
class WeierstrassData:
    mu: int
    lam: int
    distinguished: QpPoly        # monic, degree lam
    unit_part: IwasawaSeries
    certified_digits: int         # digits (relative to p^mu) to which the factors are determined

    @property
    def lambda_(self) -> int:
        return self.lam

    def reconstruct(self) -> IwasawaSeries:
        p = self.unit_part.p
        prod = self.unit_part.poly.mul(self.distinguished, self.unit_part.cap)
        return IwasawaSeries(prod.scale(Fraction(p) ** self.mu), None)


def mu_lambda_scan(f: IwasawaSeries) -> tuple[int, int]:
    """(mu, lambda) by a direct scan of coefficient valuations."""
    vals = f.valuations()
    finite = [v for v in vals if v != INF]
    if not finite:
        raise PrecisionError("series is zero at working precision; increase precision")
    mu = min(finite)
    return mu, vals.index(mu)


def weierstrass_prepare(f: IwasawaSeries) -> WeierstrassData:
    """f = p^mu * P * U with P distinguished of degree lambda and U a unit.

    Computed by lifting the factorization f/p^mu = X^lambda * U mod p one
    digit at a time (each step is a Weierstrass division by X^lambda).
    """
    p = f.p
    mu, lam = mu_lambda_scan(f)
    digits = f.prec - mu
    if digits <= 0:
        raise PrecisionError("series is zero at working precision; increase precision")
    mod = p ** digits
    g = f.poly.rescale(min(f.poly.shift, mu)) if f.poly.shift > mu else f.poly
    if g.shift < mu:
        fac = p ** (mu - g.shift)
        gc = [c // fac for c in g.coeffs]
    else:
        gc = [c * p ** (g.shift - mu) for c in g.coeffs]
    gc = [c % mod for c in gc]
    cap = len(gc)
    P = [0] * lam + [1]
    Q = gc[lam:] + [0] * (lam)
    Q = Q[: cap - lam] if cap > lam else [gc[-1]]
    Bbar = [c % p for c in Q]
    inv_b = _series_inverse_mod_p(Bbar, lam, p) if lam else []
    for t in range(1, digits):
        pt = p ** t
        prod = _poly_mul_trunc(P, Q, cap)
        err = [(gc[i] - prod[i]) for i in range(cap)]
        if any(e % pt for e in err):
            raise AssertionError("lifting invariant violated")  # pragma: no cover
        E = [(e // pt) % p for e in err]
        if not any(E):
            continue
        dP = _poly_mul_trunc(E, inv_b, lam) if lam else []
        dP = [c % p for c in dP]
        rest = _poly_mul_trunc(dP, Bbar, cap) if lam else [0] * cap
        dQ_full = [(E[i] - (rest[i] if i < len(rest) else 0)) for i in range(cap)]
        dQ = [c % p for c in dQ_full[lam:]]
        for i in range(lam):
            P[i] = (P[i] + pt * dP[i]) % mod
        for i in range(len(dQ)):
            if i < len(Q):
                Q[i] = (Q[i] + pt * dQ[i]) % mod
    # digits of P are certified up to the influence of the unknown tail,
    # which reaches the low coefficients only through ceil((cap-lam+1)/lam)
    # multiplications by p-divisible coefficients.
    certified = digits
    if lam and f.tail_val is not None:
        reach = ceil((cap - lam + 1) / lam)
        certified = min(digits, f.tail_val - mu + reach)
    distinguished = QpPoly(p, tuple(P), 0, digits)
    unit = IwasawaSeries(QpPoly(p, tuple(Q + [0] * (cap - len(Q))), 0, digits), None if f.tail_val is None else max(f.tail_val - mu, 0))
    return WeierstrassData(mu, lam, distinguished, unit, certified)


def _poly_mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a):
        if not x or i >= n:
            continue
        for j in range(min(len(b), n - i)):
            if b[j]:
                out[i + j] += x * b[j]
    return out


def _series_inverse_mod_p(b: Sequence[int], n: int, p: int) -> list[int]:
    """b^{-1} mod (p, X^n) for b(0) a unit."""
    inv0 = pow(b[0] % p, -1, p)
    out = [0] * n
    out[0] = inv0
    for i in range(1, n):
        s = sum(b[t] * out[i - t] for t in range(1, min(i, len(b) - 1) + 1))
        out[i] = (-s * inv0) % p
    return out


# ---------------------------------------------------------------------------
# the semi-local algebra

@dataclass(frozen=True)
class LambdaCycElement:
    p: int
    branches: tuple  # IwasawaSeries per omega^i, i = 0..p-2

    def __post_init__(self):
        if len(self.branches) != self.p - 1:
            raise ValueError(f"need {self.p - 1} branches")

    @classmethod
    def constant(cls, p: int, c: int, cap: int, prec: int) -> "LambdaCycElement":
        return cls(p, tuple(IwasawaSeries.from_ints(p, [c] + [0] * (cap - 1), prec, None) for _ in range(p - 1)))

    def branch(self, i: int) -> IwasawaSeries:
        return self.branches[i % (self.p - 1)]

    def __add__(self, other):
        return LambdaCycElement(self.p, tuple(a + b for a, b in zip(self.branches, other.branches)))

    def __sub__(self, other):
        return LambdaCycElement(self.p, tuple(a - b for a, b in zip(self.branches, other.branches)))

    def __mul__(self, other):
        if isinstance(other, LambdaCycElement):
            return LambdaCycElement(self.p, tuple(a * b for a, b in zip(self.branches, other.branches)))
        return LambdaCycElement(self.p, tuple(a.scale(other) for a in self.branches))

    def __eq__(self, other):
        if not isinstance(other, LambdaCycElement):
            return NotImplemented
        return self.p == other.p and all(a == b for a, b in zip(self.branches, other.branches))

    __hash__ = None

    def specialize(self, chi: PadicCharacter, prof: PrecisionProfile | None = None, exact: bool = False) -> CycloScalar:
        return specialize(self.branch(chi.branch), chi, prof, exact)

    def augmentation(self) -> list[PadicScalar]:
        return [b[0] for b in self.branches]

    # serialization --------------------------------------------------------
    def to_record(self, prof: PrecisionProfile | None = None) -> dict:
        cap_n = prof.cap_n if prof else max(b.prec for b in self.branches)
        series_cap = prof.series_cap if prof else max(b.cap for b in self.branches)
        return {"p": self.p, "cap_n": cap_n, "series_cap": series_cap,
                "branches": [b.to_json() for b in self.branches]}

    def to_json(self, prof: PrecisionProfile | None = None) -> str:
        return json.dumps(self.to_record(prof), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "LambdaCycElement":
        p = int(rec["p"])
        branches = []
        for b in rec["branches"]:
            if isinstance(b, list):  # bare digit lists
                branches.append(IwasawaSeries.from_ints(p, [int(x) for x in b], int(rec["cap_n"])))
            else:
                branches.append(IwasawaSeries.from_json(p, b))
        return cls(p, tuple(branches))

    @classmethod
    def from_json(cls, text: str) -> "LambdaCycElement":
        return cls.from_record(json.loads(text))


def mu_lambda(f: LambdaCycElement) -> list[tuple[int, int]]:
    """Per-branch Iwasawa invariants."""
    return [(w.mu, w.lam) for w in (weierstrass_prepare(b) for b in f.branches)]


# ---------------------------------------------------------------------------
# characteristic ideals

@dataclass(frozen=True)
class CharacteristicIdeal:
    generator: LambdaCycElement
    torsion_flags: tuple

    def invariants(self) -> list[tuple[int, int] | None]:
        return [mu_lambda_scan(b) if t else None for b, t in zip(self.generator.branches, self.torsion_flags)]

    def distinguished_generators(self) -> list[WeierstrassData | None]:
        return [weierstrass_prepare(b) if t else None for b, t in zip(self.generator.branches, self.torsion_flags)]

    def equals(self, other: "CharacteristicIdeal", invert_p: bool = False) -> bool:
        """Equality of principal ideals per branch (optionally after inverting p)."""
        if self.torsion_flags != other.torsion_flags:
            return False
        for a, b, t in zip(self.generator.branches, other.generator.branches, self.torsion_flags):
            if not t:
                continue
            wa, wb = weierstrass_prepare(a), weierstrass_prepare(b)
            if wa.lam != wb.lam or (not invert_p and wa.mu != wb.mu):
                return False
            digits = min(wa.certified_digits, wb.certified_digits)
            if not wa.distinguished.with_prec(digits).equal_at(wb.distinguished.with_prec(digits)):
                return False
        return True


def series_det(mat: list[list[IwasawaSeries]]) -> IwasawaSeries:
    """Determinant by Laplace expansion along the first row (small sizes)."""
    n = len(mat)
    if any(len(r) != n for r in mat):
        raise ValueError("presentation matrix must be square")
    if n == 1:
        return mat[0][0]
    total = None
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        term = mat[0][c] * series_det(minor)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total


def char_ideal_from_presentation(mat: list[list[LambdaCycElement]]) -> CharacteristicIdeal:
    """Characteristic ideal of coker(M) for a square matrix over Lambda_cyc."""
    if not mat or any(len(r) != len(mat) for r in mat):
        raise ValueError("presentation matrix must be square")
    p = mat[0][0].p
    gens, flags = [], []
    for i in range(p - 1):
        d = series_det([[e.branches[i] for e in row] for row in mat])
        gens.append(d)
        flags.append(not d.is_zero())
    return CharacteristicIdeal(LambdaCycElement(p, tuple(gens)), tuple(flags))
