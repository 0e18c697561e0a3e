"""Weight-disc bookkeeping, CRT gluing of per-weight p-adic L-functions, p-adic periods.

The weight chart is pinned once: the arithmetic point k of the disc B(k0; r)
goes to w_k = (1+p)^(k-k0) - 1, and functions on the disc are power series in W.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

from .modsym import SymbolSpace, charpoly, hecke_operator
from .numfield import newton_slopes
from .padic import PadicScalar, PrecisionError, QpPoly, valuation
from .plfn import PadicLFunction, branch_sign

INF = float("inf")


class CompatibilityError(ValueError):
    """Two weights carry data that are not congruent modulo I_k + I_k'."""

    def __init__(self, message: str, pair: tuple, gap: int | None = None):
        super().__init__(message)
        self.pair = pair
        self.gap = gap


class CoherenceError(CompatibilityError):
    """A fixture's q-expansions violate the family congruences."""


# ---------------------------------------------------------------------------
# the weight disc

@dataclass(frozen=True)
class WeightDisc:
    p: int
    k0: int
    r: int = 1

    def w(self, k: int) -> Fraction:
        """The chart coordinate w_k = (1+p)^(k-k0) - 1 (exact)."""
        return Fraction(1 + self.p) ** (k - self.k0) - 1

    def contains(self, k: int) -> bool:
        """k is an arithmetic point of B(k0; r).

        That is an integer weight k >= 2 on the component of k0 (k = k0 mod p-1,
        so that a -> a^k and a -> a^k0 agree on the roots of unity) with
        val(w_k) >= r.
        """
        return (isinstance(k, int) and k >= 2 and (k - self.k0) % (self.p - 1) == 0
                and valuation(self.w(k), self.p) >= self.r)

    def require(self, k: int) -> None:
        if not self.contains(k):
            raise ValueError(f"k={k} is not an arithmetic point of B({self.k0}; {self.r}) at p={self.p}")

    def to_record(self) -> dict:
        return {"p": self.p, "k0": self.k0, "r": self.r, "chart": "W = (1+p)^(k-k0) - 1"}


# ---------------------------------------------------------------------------
# power series in W

@dataclass(frozen=True)
class FamilySeries:
    """A power series in W over Z_p (or Q_p), truncated at len(poly)."""

    poly: QpPoly

    @classmethod
    def from_rationals(cls, p: int, coeffs, prec: int) -> "FamilySeries":
        return cls(QpPoly.from_rationals(p, list(coeffs), prec))

    @property
    def p(self) -> int:
        return self.poly.p

    @property
    def prec(self) -> int:
        return self.poly.prec

    def __len__(self):
        return len(self.poly)

    def __getitem__(self, i: int) -> PadicScalar:
        return self.poly[i]

    def _pad(self, other: "FamilySeries"):
        n = max(len(self), len(other))
        return self.poly.resize(n), other.poly.resize(n)

    def __add__(self, other: "FamilySeries") -> "FamilySeries":
        a, b = self._pad(other)
        return FamilySeries(a + b)

    def __sub__(self, other: "FamilySeries") -> "FamilySeries":
        a, b = self._pad(other)
        return FamilySeries(a - b)

    def __mul__(self, other) -> "FamilySeries":
        if isinstance(other, FamilySeries):
            cap = max(len(self), len(other))
            return FamilySeries(self.poly.mul(other.poly, cap))
        return FamilySeries(self.poly.scale(other))

    def __eq__(self, other):
        if not isinstance(other, FamilySeries):
            return NotImplemented
        a, b = self._pad(other)
        return a.equal_at(b)

    __hash__ = None

    def evaluate(self, w) -> PadicScalar:
        x = w if isinstance(w, PadicScalar) else PadicScalar.from_rational(w, self.p, self.prec + 2)
        return self.poly.eval_scalar(x)

    def specialize(self, disc: WeightDisc, k: int) -> PadicScalar:
        return self.evaluate(disc.w(k))


# ---------------------------------------------------------------------------
# exact polynomial helpers in W

def _poly_mul_linear(c: list[Fraction], root: Fraction) -> list[Fraction]:
    """c(W) * (W - root)."""
    out = [Fraction(0)] * (len(c) + 1)
    for i, x in enumerate(c):
        out[i + 1] += x
        out[i] -= x * root
    return out


def _eval(c: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def newton_interpolate(nodes: list[Fraction], values: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    """Exact interpolating polynomial (low to high) and its divided differences."""
    n = len(nodes)
    table = list(values)
    diffs = [table[0]]
    for level in range(1, n):
        table = [(table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]) for i in range(n - level)]
        diffs.append(table[0])
    poly = [Fraction(0)]
    basis = [Fraction(1)]
    for i, d in enumerate(diffs):
        poly = [a + d * b for a, b in zip(poly + [Fraction(0)] * (len(basis) - len(poly)), basis)]
        basis = _poly_mul_linear(basis, nodes[i])
    return poly, diffs


@dataclass
class IdealFamily:
    """J = prod_{k in S} (W - w_k) for a finite set S of arithmetic points."""

    disc: WeightDisc
    S: tuple

    def __post_init__(self):
        for k in self.S:
            self.disc.require(k)
        if len(set(self.S)) != len(self.S):
            raise ValueError("arithmetic points must be distinct")

    @property
    def generator(self) -> list[Fraction]:
        c = [Fraction(1)]
        for k in self.S:
            c = _poly_mul_linear(c, self.disc.w(k))
        return c

    def as_series(self, prec: int = 30) -> FamilySeries:
        return FamilySeries.from_rationals(self.disc.p, self.generator, prec)

    def contains_point(self, k: int) -> bool:
        """Exact test J(w_k) = 0."""
        return _eval(self.generator, self.disc.w(k)) == 0

    def valuation_at(self, k: int):
        """val_p J(w_k): how far the class modulo J pins down the value at k."""
        v = _eval(self.generator, self.disc.w(k))
        return INF if v == 0 else valuation(v, self.disc.p)


# ---------------------------------------------------------------------------
# family fixtures and coefficient interpolation

@dataclass
class FamilyMember:
    k: int
    a_n: dict           # n -> integer Fourier coefficient
    alpha: Fraction | None = None
    slope: Fraction | None = None


@dataclass
class FamilyFixture:
    disc: WeightDisc
    slope: Fraction
    members: list
    notes: str = ""

    @classmethod
    def from_record(cls, rec: dict) -> "FamilyFixture":
        disc = WeightDisc(int(rec["p"]), int(rec["k0"]), int(rec.get("r", 1)))
        members = [FamilyMember(int(m["k"]), {int(n): int(a) for n, a in _as_items(m["a_n"])},
                                None if m.get("alpha") is None else Fraction(m["alpha"]),
                                None if m.get("slope") is None else Fraction(m["slope"]))
                   for m in rec["members"]]
        return cls(disc, Fraction(rec.get("slope", 0)), members, rec.get("notes", ""))

    def to_record(self) -> dict:
        return {"p": self.disc.p, "k0": self.disc.k0, "r": self.disc.r, "slope": str(self.slope),
                "members": [{"k": m.k, "a_n": {str(n): a for n, a in sorted(m.a_n.items())},
                             "alpha": None if m.alpha is None else str(m.alpha),
                             "slope": None if m.slope is None else str(m.slope)} for m in self.members],
                "notes": self.notes}


def _as_items(a_n):
    if isinstance(a_n, dict):
        return a_n.items()
    return enumerate(a_n, start=1)


@dataclass
class CoefficientFamily:
    series: dict          # n -> FamilySeries (degree < |S|)
    exact: dict           # n -> exact rational coefficients in W
    divided_differences: dict  # n -> valuations of the divided differences
    ideal: IdealFamily


def interpolate_coefficients(fixture: FamilyFixture, prec: int = 30) -> CoefficientFamily:
    """A_n(W) through (w_k, a_n(f_k)) for every index n shared by all members."""
    disc = fixture.disc
    p = disc.p
    members = fixture.members
    if len(members) < 2:
        raise ValueError("need at least two member weights")
    ideal = IdealFamily(disc, tuple(m.k for m in members))
    for m in members:
        s = m.slope
        if s is None and p in m.a_n and m.a_n[p]:
            s = newton_slopes(m.a_n[p], p ** (m.k - 1), p)[0]
        if s is not None and s != fixture.slope:
            raise CoherenceError(f"member k={m.k} has slope {s}, fixture declares {fixture.slope}", (m.k,))
    indices = sorted(set.intersection(*(set(m.a_n) for m in members)))
    for n in indices:
        for a, b in combinations(members, 2):
            need = valuation(disc.w(a.k) - disc.w(b.k), p)
            diff = a.a_n[n] - b.a_n[n]
            if diff and valuation(diff, p) < need:
                raise CoherenceError(
                    f"a_{n}: weights {a.k} and {b.k} differ at valuation {valuation(diff, p)} < {need}",
                    (n, a.k, b.k), need - valuation(diff, p))
    nodes = [disc.w(m.k) for m in members]
    series, exact, dd = {}, {}, {}
    for n in indices:
        poly, diffs = newton_interpolate(nodes, [Fraction(m.a_n[n]) for m in members])
        exact[n] = poly
        series[n] = FamilySeries.from_rationals(p, poly, prec)
        dd[n] = [valuation(d, p) if d else INF for d in diffs]
    return CoefficientFamily(series, exact, dd, ideal)


# ---------------------------------------------------------------------------
# gluing per-weight p-adic L-functions

@dataclass
class TwoVariableLp:
    """Per branch and X-index, a polynomial in W of degree < |S| (the class modulo J)."""

    disc: WeightDisc
    S: tuple
    h: int
    template: PadicLFunction       # metadata (window, levels) shared by the fibres
    coefficients: tuple            # per branch: None or list of W-polynomials (list[PadicScalar])
    min_input_valuation: int
    refinement: list = field(default_factory=list)

    @property
    def ideal(self) -> IdealFamily:
        return IdealFamily(self.disc, self.S)

    @property
    def precision(self) -> int:
        return min(c.prec for br in self.coefficients if br for poly in br for c in poly)

    def certified_digits(self, k: int) -> int | float:
        """Digits of the fibre at k fixed by the class modulo J."""
        v = self.ideal.valuation_at(k)
        if v == INF:
            return self.precision
        return min(self.precision, v + self.min_input_valuation)

    def fibre(self, k: int) -> PadicLFunction:
        self.disc.require(k)
        digits = self.certified_digits(k)
        if digits <= self.min_input_valuation:
            raise PrecisionError(f"k={k} lies outside the certified set of the gluing modulus")
        p = self.disc.p
        w = PadicScalar.from_rational(self.disc.w(k), p, self.precision + 4)
        branches = []
        for br in self.coefficients:
            if br is None:
                branches.append(None)
                continue
            vals = []
            for poly in br:
                acc = PadicScalar.zero(p, self.precision + 4)
                for c in reversed(poly):
                    acc = acc * w + c
                vals.append(acc.with_prec(min(acc.prec, int(digits))))
            branches.append(QpPoly.from_scalars(p, vals))
        t = self.template
        prov = dict(t.provenance)
        prov.update({"family_fibre": k, "nodes": list(self.S), "certified_digits": _jsonable(digits)})
        return PadicLFunction(p, t.slope_class, t.h, t.l, t.l_prime, t.n_max, tuple(branches),
                              (None,) * len(branches), prov)

    def to_record(self) -> dict:
        return {"chart": self.disc.to_record(), "J_factors": [str(self.disc.w(k)) for k in self.S],
                "nodes": list(self.S), "h": self.h, "certified_precision": self.precision,
                "min_input_valuation": self.min_input_valuation,
                "coefficients": [None if br is None else
                                 [[_scalar_record(c) for c in poly] for poly in br]
                                 for br in self.coefficients],
                "template": self.template.to_record(), "refinement": self.refinement}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _scalar_record(c: PadicScalar) -> dict:
    return {"val": c.val, "unit": str(c.unit), "prec": c.prec}


def _jsonable(x):
    return "inf" if x == INF else x


def _poly_scalars(F: QpPoly) -> list[PadicScalar]:
    return [F[i] for i in range(len(F))]


def _check_pair(disc: WeightDisc, k1: int, F1: QpPoly, k2: int, F2: QpPoly, branch: int) -> None:
    p = disc.p
    need = valuation(disc.w(k1) - disc.w(k2), p)
    n = max(len(F1), len(F2))
    diff = F1.resize(n) - F2.resize(n)
    got = diff.min_valuation()
    if got < need and got < diff.prec:
        raise CompatibilityError(
            f"weights {k1} and {k2} are incompatible on branch {branch}: "
            f"difference has valuation {got} < val(w_{k1} - w_{k2}) = {need}",
            (k1, k2), need - got)


def glue_family_lp(per_weight: dict, disc: WeightDisc, h: int | None = None) -> TwoVariableLp:
    """CRT in the weight direction: the unique class modulo J restricting to each L_k."""
    if not per_weight:
        raise ValueError("need at least one weight")
    S = tuple(sorted(per_weight))
    for k in S:
        disc.require(k)
    p = disc.p
    template = per_weight[S[0]]
    h = template.h if h is None else h
    for k in S:
        L = per_weight[k]
        if L.h != h or L.p != p:
            raise ValueError(f"weight {k}: expected p={p} and h={h}")
    nb = len(template.branches)
    coefficients, min_val = [], 0
    for b in range(nb):
        polys = [per_weight[k].branches[b] for k in S]
        if any(F is None for F in polys):
            coefficients.append(None)
            continue
        for (i1, F1), (i2, F2) in combinations(list(enumerate(polys)), 2):
            _check_pair(disc, S[i1], F1, S[i2], F2, b)
        n = max(len(F) for F in polys)
        polys = [F.resize(n) for F in polys]
        min_val = min(min_val, min(F.min_valuation() for F in polys))
        nodes = [PadicScalar.from_rational(disc.w(k), p, max(F.prec for F in polys) + 4) for k in S]
        coefficients.append([_newton_padic(nodes, [F[i] for F in polys]) for i in range(n)])
    refinement = []
    for m in range(1, len(S) + 1):
        sub = S[:m]
        refinement.append({"nodes": list(sub)})
    return TwoVariableLp(disc, S, h, template, tuple(coefficients), int(min_val), refinement)


def _newton_padic(nodes: list[PadicScalar], values: list[PadicScalar]) -> list[PadicScalar]:
    """Coefficients (low to high) of the interpolating polynomial, p-adically."""
    n = len(nodes)
    p = nodes[0].p
    table = list(values)
    diffs = [table[0]]
    for level in range(1, n):
        table = [(table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]) for i in range(n - level)]
        diffs.append(table[0])
    prec = min(d.prec for d in diffs)
    poly = [PadicScalar.zero(p, prec)]
    basis = [PadicScalar.one(p, prec + 4)]
    for i, d in enumerate(diffs):
        poly = poly + [PadicScalar.zero(p, prec)] * (len(basis) - len(poly))
        poly = [a + d * b for a, b in zip(poly, basis)]
        new = [PadicScalar.zero(p, prec + 4)] * (len(basis) + 1)
        for j, c in enumerate(basis):
            new[j + 1] = new[j + 1] + c
            new[j] = new[j] - c * nodes[i]
        basis = new
    return [c.with_prec(min(c.prec, prec)) for c in poly]


def specialize_family(Ltwo: TwoVariableLp, k: int, ledger: "PadicPeriodLedger | None" = None) -> PadicLFunction:
    """The one-variable fibre at k; divided by C^sgn per branch when a ledger is given."""
    L = Ltwo.fibre(k)
    if ledger is None:
        return L
    branches = []
    for i, F in enumerate(L.branches):
        if F is None:
            branches.append(None)
            continue
        C = ledger.period(k, branch_sign(i))
        branches.append(F.scale(C.inverse()))
    return PadicLFunction(L.p, L.slope_class, L.h, L.l, L.l_prime, L.n_max, tuple(branches),
                          L.reports, L.provenance)


# ---------------------------------------------------------------------------
# p-adic periods

@dataclass
class PadicPeriodLedger:
    """C^±_{f_k,p} per weight, with the pinned basis they refer to."""

    p: int
    basis: str = "first nonzero Manin coordinate = 1"
    entries: dict = field(default_factory=dict)   # (k, sign) -> PadicScalar

    def record(self, k: int, sign: int, C: PadicScalar) -> None:
        if C.is_zero():
            raise ValueError("a p-adic period must be nonzero")
        self.entries[(k, sign)] = C

    def period(self, k: int, sign: int) -> PadicScalar:
        try:
            return self.entries[(k, sign)]
        except KeyError:
            raise KeyError(f"no period recorded for k={k}, sign {sign:+d}") from None

    def is_unit(self, k: int, sign: int) -> bool:
        return self.period(k, sign).val == 0

    def record_from_fibre(self, k: int, sign: int, fibre: PadicLFunction, reference: PadicLFunction,
                          branch: int) -> PadicScalar:
        """C = (fibre / reference) read off the first coefficient where reference is a unit multiple."""
        F, R = fibre.branches[branch], reference.branches[branch]
        for i in range(min(len(F), len(R))):
            if not R[i].is_zero():
                C = F[i] / R[i]
                self.record(k, sign, C)
                return C
        raise ValueError("reference branch vanishes at working precision")

    def ratio_identity(self, other: "PadicPeriodLedger") -> dict:
        """C/C' per (k, sign); for two pinned bases this ratio does not depend on k."""
        out = {}
        for key, C in self.entries.items():
            if key in other.entries:
                out[key] = C / other.entries[key]
        return out

    def to_record(self) -> dict:
        return {"p": self.p, "basis": self.basis,
                "entries": [{"k": k, "sign": s, "C": _scalar_record(C), "unit": C.val == 0}
                            for (k, s), C in sorted(self.entries.items())]}


# ---------------------------------------------------------------------------
# Hida's ordinary projector

@dataclass
class OrdinaryProjector:
    matrix: list          # integers mod p^prec, acting on column vectors
    rank: int
    prec: int
    p: int


def _to_modular(mat, p: int, prec: int) -> list[list[int]]:
    mod = p ** prec
    out = []
    for row in mat:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator % p == 0:
                raise PrecisionError("the operator is not p-integral in the given basis")
            r.append(x.numerator * pow(x.denominator, -1, mod) % mod)
        out.append(r)
    return out


def _matmul_mod(a, b, mod):
    n, m = len(a), len(b[0])
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(a[i], bt[j])) % mod for j in range(m)] for i in range(n)]


def _matpow_mod(a, e: int, mod: int):
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = a
    while e:
        if e & 1:
            out = _matmul_mod(out, base, mod)
        base = _matmul_mod(base, base, mod)
        e >>= 1
    return out


def _rank_mod_p(a, p: int) -> int:
    rows = [[x % p for x in r] for r in a]
    rank, col, n = 0, 0, len(rows[0]) if rows else 0
    for col in range(n):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def hida_ordinary_projector(space: SymbolSpace, p: int, prec: int = 20) -> OrdinaryProjector:
    """e = lim U_p^(m!) on the symbol space of level divisible by p, modulo p^prec."""
    if space.N % p:
        raise ValueError("the ordinary projector needs p | level (supply the p-stabilized space)")
    return ordinary_projector_matrix(hecke_operator(space, p), p, prec)


def ordinary_projector_matrix(matrix, p: int, prec: int = 20) -> OrdinaryProjector:
    """e = lim A^(m!) modulo p^prec for a p-integral square matrix A."""
    U = _to_modular(matrix, p, prec)
    d = len(U)
    m = 1
    while not (_vp_fact(m, p) >= prec + d and m >= d + 1 and m >= prec):
        m += 1
    e = _matpow_mod(U, factorial(m), p ** prec)
    return OrdinaryProjector(e, _rank_mod_p(e, p), prec, p)


def _vp_fact(m: int, p: int) -> int:
    v, q = 0, p
    while q <= m:
        v += m // q
        q *= p
    return v


def unit_root_count(space: SymbolSpace, p: int) -> int:
    """Number of slope-0 roots of the characteristic polynomial of U_p (Newton polygon)."""
    cp = charpoly(hecke_operator(space, p))
    vals = [valuation(c, p) if c else INF for c in cp]
    # monic and integral: the slope-0 segment runs from the lowest unit coefficient to the top
    deg = len(cp) - 1
    lowest = min(i for i, v in enumerate(vals) if v == 0)
    return deg - lowest
