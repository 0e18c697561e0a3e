"""Power series of logarithmic order h and the Amice-Velu gluing machinery.

Conventions
-----------
* ell(0) = 0 and ell(i) = floor(log_p i) + 1, computed with integer powers.
* For a series F = sum a_i X^i, ``floor_bound`` = min_i ord(a_i) + h*ell(i);
  F lies in the integral structure H_h^+ iff floor_bound >= 0.
* omega_n^{[j]} = (1+X)^{p^n} - (1+p)^{j p^n}.  With T = 1+X, reduction modulo
  omega_n^{[j]} replaces T^{p^n} by y_j = (1+p)^{j p^n}.
* A congruence grid holds G_{n,j} (degree < p^n) for 1 <= n <= n_max and
  l <= j <= l' with h = l' - l.  The Gauss norm of a polynomial is the same in
  the X and T bases; condition norms below are Gauss valuations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .iwasawa import IwasawaSeries, poly_divmod
from .padic import PadicScalar, PrecisionError, PrecisionProfile, QpPoly

INF = float("inf")


def ell(i: int, p: int) -> int:
    """ell(0) = 0, ell(i) = floor(log_p i) + 1 (integer comparison only)."""
    if i < 0:
        raise ValueError("ell is defined for non-negative integers")
    if i == 0:
        return 0
    k, q = 0, 1
    while q * p <= i:
        q *= p
        k += 1
    return k + 1


@dataclass(frozen=True)
class GrowthProfile:
    p: int
    h: int
    cap: int
    ell_table: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("h must be non-negative")
        if not self.ell_table:
            object.__setattr__(self, "ell_table", tuple(ell(i, self.p) for i in range(self.cap + 1)))

    def weight(self, i: int) -> int:
        return self.h * (self.ell_table[i] if i < len(self.ell_table) else ell(i, self.p))


def floor_bound(poly: QpPoly, h: int) -> float | int:
    """min_i ord(a_i) + h*ell(i) over the stored coefficients (+inf for zero)."""
    best = INF
    for i, v in enumerate(poly.valuations()):
        if v != INF:
            best = min(best, v + h * ell(i, poly.p))
    return best


def hh_membership(coeffs, h: int, p: int | None = None) -> tuple[bool, float | int]:
    """(is_member, floor_bound); membership in H_h^+ is floor_bound >= 0."""
    poly = _as_poly(coeffs, p)
    return True, floor_bound(poly, h)


def in_hh_plus(coeffs, h: int, p: int | None = None) -> bool:
    return hh_membership(coeffs, h, p)[1] >= 0


def _as_poly(coeffs, p: int | None, prec: int = 60) -> QpPoly:
    if isinstance(coeffs, QpPoly):
        return coeffs
    if isinstance(coeffs, (HhSeries, IwasawaSeries)):
        return coeffs.poly
    if p is None:
        raise ValueError("p is required for raw coefficient lists")
    coeffs = list(coeffs)
    if coeffs and isinstance(coeffs[0], PadicScalar):
        return QpPoly.from_scalars(p, coeffs)
    return QpPoly.from_rationals(p, coeffs, prec)


@dataclass(frozen=True)
class HhSeries:
    """A truncated power series with logarithmic-order-h growth data."""

    poly: QpPoly
    h: int

    @property
    def p(self) -> int:
        return self.poly.p

    @property
    def prec(self) -> int:
        return self.poly.prec

    @property
    def cap(self) -> int:
        return len(self.poly)

    @property
    def growth(self) -> GrowthProfile:
        return GrowthProfile(self.p, self.h, self.cap)

    @property
    def floor_bound(self):
        return floor_bound(self.poly, self.h)

    def in_plus(self) -> bool:
        return self.floor_bound >= 0

    def __getitem__(self, i: int) -> PadicScalar:
        return self.poly[i]

    def __add__(self, other: "HhSeries") -> "HhSeries":
        return HhSeries(self.poly + other.poly, max(self.h, other.h))

    def __sub__(self, other: "HhSeries") -> "HhSeries":
        return HhSeries(self.poly - other.poly, max(self.h, other.h))

    def __eq__(self, other):
        if not isinstance(other, HhSeries):
            return NotImplemented
        n = max(self.cap, other.cap)
        return self.poly.resize(n).equal_at(other.poly.resize(n))

    __hash__ = None

    def to_iwasawa(self) -> IwasawaSeries:
        return IwasawaSeries(self.poly, None)


@dataclass(frozen=True)
class HhCycElement:
    p: int
    branches: tuple  # HhSeries per omega^i

    def branch(self, i: int) -> HhSeries:
        return self.branches[i % (self.p - 1)]


# ---------------------------------------------------------------------------
# reduction modulo omega_n^{[j]}

def y_node(p: int, n: int, j: int, prec: int) -> int:
    """(1+p)^{j p^n} modulo p^prec."""
    mod = p ** prec
    base = 1 + p if j >= 0 else pow(1 + p, -1, mod)
    return pow(base, abs(j) * p ** n, mod)


def omega_qp(p: int, n: int, j: int, prec: int) -> QpPoly:
    deg = p ** n
    c = [comb(deg, i) for i in range(deg + 1)]
    c[0] -= y_node(p, n, j, prec)
    return QpPoly.from_ints(p, c, prec)


def reduce_mod_omega(F, n: int, j: int) -> QpPoly:
    """Remainder of F upon division by omega_n^{[j]}: a polynomial of degree < p^n."""
    poly = _as_poly(F, None)
    p = poly.p
    deg = p ** n
    if len(poly) <= deg:
        return poly.resize(deg)
    # fold in the T-basis: T^(b + p^n t) -> T^b * y^t, computed exactly mod p^(prec - shift)
    digits = poly.prec - poly.shift
    if digits <= 0:
        return QpPoly.zeros(p, deg, poly.prec)
    tb = poly.to_t_basis().coeffs
    mod = p ** digits
    y = y_node(p, n, j, digits)
    out = [0] * deg
    yt = 1
    for start in range(0, len(tb), deg):
        block = tb[start:start + deg]
        for b, c in enumerate(block):
            if c:
                out[b] = (out[b] + c * yt) % mod
        yt = yt * y % mod
    return QpPoly(p, tuple(out), poly.shift, poly.prec).from_t_basis()


def reduce_by_division(F, n: int, j: int) -> QpPoly:
    """Same remainder computed by long division (independent path)."""
    poly = _as_poly(F, None)
    p = poly.p
    prec = poly.prec - min(poly.shift, 0)
    _, r = poly_divmod(poly, omega_qp(p, n, j, prec))
    return r.resize(p ** n).with_prec(poly.prec)


# ---------------------------------------------------------------------------
# congruence grids

@dataclass
class CongruenceGrid:
    p: int
    h: int
    l: int
    l_prime: int
    n_max: int
    entries: dict  # (n, j) -> QpPoly of length p^n (X-basis)

    def __post_init__(self):
        if self.l_prime - self.l != self.h:
            raise ValueError("need h = l' - l")
        for n in range(1, self.n_max + 1):
            for j in self.js:
                if (n, j) not in self.entries:
                    raise ValueError(f"grid entry G_{{{n},{j}}} missing")
                if len(self.entries[(n, j)]) > self.p ** n:
                    raise ValueError(f"deg G_{{{n},{j}}} must be < p^n")

    @property
    def js(self) -> range:
        return range(self.l, self.l_prime + 1)

    def __getitem__(self, key) -> QpPoly:
        return self.entries[key]

    def perturbed(self, n: int, j: int, delta: QpPoly) -> "CongruenceGrid":
        e = dict(self.entries)
        e[(n, j)] = (e[(n, j)] + delta).resize(self.p ** n)
        return CongruenceGrid(self.p, self.h, self.l, self.l_prime, self.n_max, e)

    # serialization --------------------------------------------------------
    def to_record(self) -> dict:
        ent = {}
        for (n, j), g in sorted(self.entries.items()):
            ent.setdefault(str(n), {})[str(j)] = {"shift": g.shift, "prec": g.prec,
                                                  "digits": [str(c) for c in g.coeffs]}
        return {"p": self.p, "h": self.h, "l": self.l, "l_prime": self.l_prime,
                "n_max": self.n_max, "entries": ent}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "CongruenceGrid":
        p = int(rec["p"])
        entries = {}
        for n, row in rec["entries"].items():
            for j, g in row.items():
                entries[(int(n), int(j))] = QpPoly(p, tuple(int(c) for c in g["digits"]),
                                                   int(g["shift"]), int(g["prec"]))
        return cls(p, int(rec["h"]), int(rec["l"]), int(rec["l_prime"]), int(rec["n_max"]), entries)

    @classmethod
    def from_json(cls, text: str) -> "CongruenceGrid":
        return cls.from_record(json.loads(text))


def grid_from_series(F, h: int, l: int, n_max: int) -> CongruenceGrid:
    """The grid of reductions G_{n,j} = F mod omega_n^{[j]}."""
    poly = _as_poly(F, None)
    entries = {(n, j): reduce_mod_omega(poly, n, j)
               for n in range(1, n_max + 1) for j in range(l, l + h + 1)}
    return CongruenceGrid(poly.p, h, l, l + h, n_max, entries)


# ---------------------------------------------------------------------------
# the Amice-Velu conditions

def _gauss_val(poly: QpPoly) -> float | int:
    """Gauss valuation; a polynomial that is zero at precision counts as its precision."""
    v = poly.min_valuation()
    return v


def _bounded(seq: Sequence, tol: int) -> bool:
    """Decide boundedness below of a finite sequence indexed by n = 1..n_max.

    Fails iff the minimum over the later half drops more than ``tol`` below
    the minimum over the earlier half *and* the sequence is still falling at
    the last level.  A sequence decreasing linearly in n fails as soon as
    n_max/2 exceeds tol; a single early value that is high by accident (an
    entry divisible by an extra power of p) followed by a plateau does not.
    """
    if len(seq) <= 1:
        return True
    half = len(seq) // 2
    early = min(seq[:max(half, 1)])
    late = min(seq[max(half, 1):])
    return late >= early - tol or seq[-1] >= seq[-2]


def scaled_difference(grid: CongruenceGrid, n: int, d: int) -> QpPoly:
    """sum_k (-1)^{d-k} C(d,k) G_{n,l+k}((1+p)^{l+d} T) in the T-basis.

    Its T^b coefficient is the integral of x^l (x - (1+p)^b)^d over the ball of
    level n centred at (1+p)^b, so h-admissibility bounds it by p^{(n+1)(h-d)}.
    """
    p = grid.p
    total = None
    for k in range(d + 1):
        g = grid[(n, grid.l + k)].to_t_basis()
        coef = (-1) ** (d - k) * comb(d, k)
        term = g.scale(coef) if coef != 1 else g
        total = term if total is None else total + term
    # rescale T -> c T with c = (1+p)^{l+d}, a unit: multiply T^b by c^b
    digits = total.prec - total.shift
    if digits <= 0:
        return total
    mod = p ** digits
    e = grid.l + d
    c = pow(1 + p, e, mod) if e >= 0 else pow(pow(1 + p, -e, mod), -1, mod)
    out, cb = [], 1
    for x in total.coeffs:
        out.append(x * cb % mod)
        cb = cb * c % mod
    return QpPoly(p, tuple(out), total.shift, total.prec)


@dataclass
class ConditionReport:
    passed: bool
    details: dict

    def __bool__(self):
        return self.passed


@dataclass
class AVReport:
    i: ConditionReport
    ii: ConditionReport
    iii: ConditionReport
    tol: int

    @property
    def passed(self) -> bool:
        return self.i.passed and self.ii.passed and self.iii.passed

    def failing(self) -> list[str]:
        return [name for name, c in (("i", self.i), ("ii", self.ii), ("iii", self.iii)) if not c.passed]

    def __bool__(self):
        return self.passed

    def to_record(self) -> dict:
        return {"passed": self.passed, "failing": self.failing(), "tol": self.tol,
                "i": _jsonable(self.i.details), "ii": _jsonable(self.ii.details),
                "iii": _jsonable(self.iii.details)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x == INF:
        return "inf"
    return x


def av_conditions_check(grid: CongruenceGrid, h: int | None = None, tol: int = 1) -> AVReport:
    """Check conditions (i)-(iii) of the gluing criterion on a finite grid.

    (i)   u_n = gauss_val(G_{n,j}) + n h is bounded below in n, for each j;
    (ii)  G_{n+1,j} = G_{n,j} modulo omega_n^{[j]} (exactly, at precision);
    (iii) gauss_val(d-th scaled difference at level n) + n (h - d) is bounded
          below in n, for each 0 < d <= h.
    """
    h = grid.h if h is None else h
    if h < grid.h:
        raise ValueError("declared h is smaller than the grid window")
    # (i)
    seqs, ok_i = {}, True
    for j in grid.js:
        seq = [_gauss_val(grid[(n, j)]) + n * h for n in range(1, grid.n_max + 1)]
        seqs[j] = seq
        ok_i &= _bounded(seq, tol)
    # (ii)
    failures = []
    for j in grid.js:
        for n in range(1, grid.n_max):
            lower = reduce_mod_omega(grid[(n + 1, j)], n, j)
            if not lower.equal_at(grid[(n, j)]):
                failures.append((n, j))
    # (iii)
    diffs, ok_iii = {}, True
    for d in range(1, grid.h + 1):
        seq = [_gauss_val(scaled_difference(grid, n, d)) + n * (h - d) for n in range(1, grid.n_max + 1)]
        diffs[d] = seq
        ok_iii &= _bounded(seq, tol)
    return AVReport(ConditionReport(ok_i, {"u": seqs}),
                    ConditionReport(not failures, {"failures": failures}),
                    ConditionReport(ok_iii, {"u": diffs}), tol)


class GluingError(ValueError):
    def __init__(self, message: str, report: AVReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class GluedSeries:
    series: HhSeries
    precision: int                 # absolute digits of every output coefficient
    stable_digits: list            # per-coefficient agreement of the last two levels
    report: AVReport

    def __getattr__(self, name):
        return getattr(self.series, name)


def crt_level(grid: CongruenceGrid, n: int) -> QpPoly:
    """The unique F_n of degree < p^n (h+1) with F_n = G_{n,j} mod omega_n^{[j]}."""
    p = grid.p
    deg = p ** n
    js = list(grid.js)
    gs = [grid[(n, j)] for j in js]
    prec = min(g.prec for g in gs)
    loss = sum(n + 1 + _vp(j - jj, p) for j in js for jj in js if jj != j)
    work = prec + loss + 2
    ys = [PadicScalar(p, 0, y_node(p, n, j, work), work) for j in js]
    total = None
    for idx, g in enumerate(gs):
        # Lagrange basis L_idx(Y) = prod_{other} (Y - y_o) / (y_idx - y_o)
        coeffs = [PadicScalar.one(p, work)]
        denom = PadicScalar.one(p, work)
        for o, yo in enumerate(ys):
            if o == idx:
                continue
            new = [PadicScalar.zero(p, work)] * (len(coeffs) + 1)
            for r, c in enumerate(coeffs):
                new[r + 1] = new[r + 1] + c
                new[r] = new[r] - c * yo
            coeffs = new
            denom = denom * (ys[idx] - yo)
        inv = denom.inverse()
        gt = g.to_t_basis().resize(deg)
        for r, c in enumerate(coeffs):
            term = gt.scale(c * inv).shift_x(r * deg)
            total = term if total is None else total + term
    return total.resize(deg * len(js)).from_t_basis()


def _vp(x: int, p: int) -> int:
    if x == 0:
        return 0
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def av_glue(grid: CongruenceGrid, h: int | None = None, tol: int = 1, check: bool = True) -> GluedSeries:
    """Glue a grid satisfying (i)-(iii) into F in H_h with F = G_{n,j} mod omega_n^{[j]}."""
    h = grid.h if h is None else h
    report = av_conditions_check(grid, h, tol)
    if check and not report.passed:
        raise GluingError(f"gluing conditions fail: {', '.join(report.failing())}", report)
    top = crt_level(grid, grid.n_max)
    stable = [top.prec] * len(top)
    if grid.n_max > 1:
        prev = crt_level(grid, grid.n_max - 1).resize(len(top))
        diff = (top - prev).valuations()
        stable = [min(top.prec, d) for d in diff]
    return GluedSeries(HhSeries(top, h), top.prec, stable, report)


def uniqueness_test(F, l: int, l_prime: int, n_max: int) -> bool:
    """True iff F = 0 modulo omega_n^{[j]} for all 1 <= n <= n_max, l <= j <= l'."""
    poly = _as_poly(F, None)
    for n in range(1, n_max + 1):
        for j in range(l, l_prime + 1):
            if not reduce_mod_omega(poly, n, j).is_zero():
                return False
    return True
