"""The one-variable p-adic L-function of a p-stabilized eigen-symbol.

Conventions
-----------
* The measure on Z_p^x attached to f_alpha gives the ball a + p^n Z_p the
  functional  P |-> alpha^-n Phi_alpha(P(a - p^n z){a/p^n, oo})  on polynomials
  P of degree <= k-2 (z = X/Y after homogenizing).  ``mazur_tate`` records its
  moments P = x^m for m = 0..k-2.
* L_p corresponds to the measure x^-1 d(that measure), so a character
  kappa = chi_cyc^j phi evaluates to the integral of x^(j-1) phi(x).
  Branch i of L_p is the series  int omega^i(x) (1+X)^{s(x)} x^-1,
  with <x> = (1+p)^{s(x)}; branch i pairs with the sign (-1)^(i-1) symbol.
* The group-like element of a prime q is [q^-1] (geometric Frobenius): a
  character kappa sends it to kappa(q)^-1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from .cyclo import CycloScalar, PadicCharacter, gauss_sum
from .distributions import (AVReport, CongruenceGrid, GluingError, HhCycElement, HhSeries,
                            av_conditions_check, av_glue, floor_bound, reduce_mod_omega, y_node)
from .iwasawa import IwasawaSeries, LambdaCycElement, evaluation_point
from .modsym import (EigenSymbol, StabilizedForm, SymbolError, algebraic_l_value, p_stabilize,
                     sign_for)
from .numfield import QuadraticElement
from .padic import (PadicScalar, PrecisionError, PrecisionProfile, principal_unit_logs,
                    teichmuller_int, valuation)


class InadmissibleError(ValueError):
    """The declared growth h is below the slope of the stabilized form."""


def mellin_sign(j: int) -> int:
    """The orientation sign relating L_p(chi^j phi) to the classical right-hand side.

    With the measure above, the evaluation of L_p at chi_cyc^j phi equals
    (-1)^(j-1) (-1)^j (j-1)! e_p tau(phi) L(f, phi^-1, j) / ((2 pi i)^j Omega):
    the classical Mellin identity  int_{a/m}^{i oo} f(z) (z - a/m)^(j-1) dz
    carries (-1)^j, and the admissible ball attached to a/p^n is centred at a
    with moment polynomial (a - p^n z)^(j-1) = (-1)^(j-1) (p^n z - a)^(j-1).
    """
    return -1 if j % 2 == 0 else 1


# ---------------------------------------------------------------------------
# forms and signs

def _forms_by_sign(form) -> dict[int, StabilizedForm]:
    if isinstance(form, StabilizedForm):
        return {form.base.sign: form}
    if isinstance(form, dict):
        return {int(s): f for s, f in form.items()}
    raise TypeError("expected a StabilizedForm or a {sign: StabilizedForm} mapping")


def stabilize_pair(symbols: dict[int, EigenSymbol], p: int, which_root="small") -> dict[int, StabilizedForm]:
    """p-stabilize the plus and minus eigen-symbols with the same root."""
    return {s: p_stabilize(sym, p, which_root) for s, sym in symbols.items()}


def branch_sign(i: int) -> int:
    """Sign of the symbol feeding branch omega^i: (-1)^(j-1) phi(-1) = (-1)^(i-1)."""
    return -1 if i % 2 == 0 else 1


def _any_form(form) -> StabilizedForm:
    return next(iter(_forms_by_sign(form).values()))


# ---------------------------------------------------------------------------
# Mazur-Tate layers

@dataclass
class MazurTateElement:
    """Moments of the ball measures at layer n, exact in Q(alpha).

    ``values[a][m]`` = alpha^-n Phi_alpha((a - p^n z)^m {a/p^n, oo}) for units a
    mod p^n and m = 0..k-2.
    """

    p: int
    n: int
    sign: int
    values: dict

    def value(self, a: int, m: int = 0):
        return self.values[a % self.p ** self.n][m]

    def group_ring_form(self, m: int = 0) -> dict[int, QuadraticElement]:
        """Coefficients of sum_a value(a) [sigma_a] in K[(Z/p^n)^x]."""
        return {a: v[m] for a, v in sorted(self.values.items())}

    def relabel(self, u: int) -> "MazurTateElement":
        """The element [sigma_u] * theta: the value at a moves to u a."""
        mod = self.p ** self.n
        return MazurTateElement(self.p, self.n, self.sign,
                                {u * a % mod: v for a, v in self.values.items()})


def ball_moments(form: StabilizedForm, n: int, a: int) -> list[QuadraticElement]:
    """alpha^-n Phi_alpha((a - p^n z)^m {a/p^n, oo}) for m = 0..k-2."""
    p = form.p
    w = form.k - 2
    q = p ** n
    mom = form.moments(Fraction(a, q))
    scale = form.alpha ** (-n)
    out = []
    for m in range(w + 1):
        acc = QuadraticElement.rational(0, int(form.a_p), form.c)
        for i in range(m + 1):
            coef = comb(m, i) * (-q) ** i * a ** (m - i)
            if coef:
                acc = acc + mom[i] * coef
        out.append(acc * scale)
    return out


def mazur_tate(form: StabilizedForm, n: int) -> MazurTateElement:
    if n < 1:
        raise ValueError("the layer n must be at least 1")
    p = form.p
    q = p ** n
    values = {a: ball_moments(form, n, a) for a in range(1, q) if a % p}
    return MazurTateElement(p, n, form.base.sign, values)


@dataclass
class NormCheck:
    ok: bool
    defect: dict  # (a, m) -> nonzero difference

    def __bool__(self):
        return self.ok


def norm_compatibility_check(upper: MazurTateElement, lower: MazurTateElement) -> NormCheck:
    """Project layer n+1 onto layer n and compare every moment exactly."""
    if upper.p != lower.p or upper.n != lower.n + 1:
        raise ValueError("need consecutive layers for the same prime")
    p, n = lower.p, lower.n
    q = p ** n
    defect = {}
    for a, vals in lower.values.items():
        for m, v in enumerate(vals):
            total = -v
            for t in range(p):
                total = total + upper.values[a + q * t][m]
            if not total.is_zero():
                defect[(a, m)] = total
    return NormCheck(not defect, defect)


# ---------------------------------------------------------------------------
# the congruence grid of a stabilized form

def _margin(x: QuadraticElement, p: int) -> int:
    out = 0
    for r in (x.r0, x.r1):
        if r:
            out = max(out, -valuation(r, p))
    return out


def _layer_padic(form: StabilizedForm, n: int, prec: int) -> dict[int, list[PadicScalar]]:
    """Ball moments at layer n embedded in Q_p with absolute precision >= prec."""
    theta = mazur_tate(form, n)
    margin = max(_margin(v, form.p) for vals in theta.values.values() for v in vals)
    alpha_p = form.alpha_padic(prec + margin + 2)
    return {a: [v.embed(alpha_p) for v in vals] for a, vals in theta.values.items()}


def grid_entry(layer: dict, p: int, n: int, j: int, i: int, prec: int):
    """G_{n,j}^{(i)} from the layer-(n+1) ball moments, in the X-basis.

    The T^b coefficient (T = 1 + X) is the sum over units a mod p^(n+1) with
    s(a) = b mod p^n of omega^(i-j)(a) (1+p)^(-j b) times the x^(j-1) moment.
    """
    from .padic import QpPoly
    deg = p ** n
    logs = principal_unit_logs(p, n)
    work = prec + 4
    mod = p ** work
    inv_g = pow(1 + p, -1, mod)
    acc = [PadicScalar.zero(p, work)] * deg
    e = (i - j) % (p - 1)
    for a, moms in layer.items():
        b = logs[a] % deg
        unit = pow(teichmuller_int(a, p, work), e, mod) * pow(inv_g, j * b, mod) % mod
        acc[b] = acc[b] + moms[j - 1] * PadicScalar(p, 0, unit, work)
    out = QpPoly.from_scalars(p, acc).from_t_basis()
    return out.with_prec(min(out.prec, prec))


def build_grids(form, h: int, n_max: int, l: int = 1, prof: PrecisionProfile | None = None):
    """Per-branch congruence grids with window l..l+h, levels 1..n_max."""
    forms = _forms_by_sign(form)
    any_f = _any_form(form)
    p, k = any_f.p, any_f.k
    if not 1 <= l <= l + h <= k - 1:
        raise InadmissibleError(f"window {l}..{l + h} leaves the critical range 1..{k - 1}")
    prec = prof.cap_n if prof else 20
    layers = {s: {n: _layer_padic(f, n + 1, prec + (n + 1) * (k - 1))
                  for n in range(1, n_max + 1)} for s, f in forms.items()}
    grids = []
    for i in range(p - 1):
        s = branch_sign(i)
        if s not in layers:
            grids.append(None)
            continue
        entries = {(n, j): grid_entry(layers[s][n], p, n, j, i, prec)
                   for n in range(1, n_max + 1) for j in range(l, l + h + 1)}
        low = min(g.prec for g in entries.values())
        if low <= min(g.min_valuation() for g in entries.values() if not g.is_zero()):
            raise PrecisionError("working precision exhausted by the alpha^-n denominators; raise --prec")
        entries = {key: g.with_prec(low) for key, g in entries.items()}
        grids.append(CongruenceGrid(p, h, l, l + h, n_max, entries))
    return grids


# ---------------------------------------------------------------------------
# the p-adic L-function

@dataclass
class PadicLFunction:
    p: int
    slope_class: str                 # "ordinary" or "finite_slope"
    h: int
    l: int
    l_prime: int
    n_max: int
    branches: tuple                  # QpPoly per omega^i (None if that sign is missing)
    reports: tuple                   # AVReport per branch (None where not built)
    provenance: dict = field(default_factory=dict)

    @property
    def precision(self) -> int:
        return min(b.prec for b in self.branches if b is not None)

    def branch(self, i: int):
        b = self.branches[i % (self.p - 1)]
        if b is None:
            raise ValueError(f"branch {i} needs the {branch_sign(i):+d} eigen-symbol")
        return b

    @property
    def floor_bounds(self) -> list:
        return [None if b is None else floor_bound(b, self.h) for b in self.branches]

    @property
    def element(self):
        """LambdaCycElement (ordinary) or HhCycElement (finite slope)."""
        if any(b is None for b in self.branches):
            raise ValueError("both signs are needed for the full element")
        if self.slope_class == "ordinary":
            return LambdaCycElement(self.p, tuple(IwasawaSeries(b, None) for b in self.branches))
        return HhCycElement(self.p, tuple(HhSeries(b, self.h) for b in self.branches))

    def is_exact_at(self, chi: PadicCharacter) -> bool:
        """True when chi lies in the interpolation range fixed by the grid."""
        return self.l <= chi.j <= self.l_prime and chi.conductor_exponent <= self.n_max + 1

    def evaluate(self, chi: PadicCharacter) -> tuple[CycloScalar, int | None]:
        """(value at chi, certified digits); certified is None outside the exact range."""
        poly = self.branch(chi.branch)
        x = evaluation_point(chi, poly.prec + max(0, -poly.shift) + 2)
        val = IwasawaSeries(poly, None).eval_cyclo(x)
        if not self.is_exact_at(chi):
            return val, None
        return val, val.prec

    def to_record(self) -> dict:
        return {"p": self.p, "slope_class": self.slope_class, "h": self.h, "l": self.l,
                "l_prime": self.l_prime, "n_max": self.n_max,
                "floor_bounds": [_jsonable(x) for x in self.floor_bounds],
                "provenance": self.provenance,
                "branches": [None if b is None else {"shift": b.shift, "prec": b.prec,
                                                     "digits": [str(c) for c in b.coeffs]}
                             for b in self.branches]}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "PadicLFunction":
        from .padic import QpPoly
        p = int(rec["p"])
        branches = tuple(None if b is None else QpPoly(p, tuple(int(c) for c in b["digits"]),
                                                       int(b["shift"]), int(b["prec"]))
                         for b in rec["branches"])
        return cls(p, rec["slope_class"], int(rec["h"]), int(rec["l"]), int(rec["l_prime"]),
                   int(rec["n_max"]), branches, (None,) * len(branches), dict(rec.get("provenance", {})))


def _jsonable(x):
    return "inf" if x == float("inf") else x


def _provenance(form) -> dict:
    forms = _forms_by_sign(form)
    f = _any_form(form)
    alpha = f.alpha_padic(12)
    return {"level": f.base.N, "weight": f.k, "p": f.p, "a_p": str(f.a_p),
            "root": str(f.which_root), "slope": str(f.slope),
            "alpha_mod_p^12": alpha.residue(12) if alpha.val >= 0 else str(alpha),
            "signs": sorted(forms),
            "sign_basis": {str(s): [str(c) for c in g.base.coords] for s, g in sorted(forms.items())}}


def build_lp_ordinary(form, n_max: int, prof: PrecisionProfile | None = None) -> PadicLFunction:
    """Measure path: the level-n_max reduction of each branch, read off the Mazur-Tate layer."""
    f = _any_form(form)
    if not f.is_ordinary:
        raise InadmissibleError(f"build_lp_ordinary needs slope 0 (slope is {f.slope})")
    grids = build_grids(form, 0, n_max, 1, prof)
    branches, reports = [], []
    for g in grids:
        if g is None:
            branches.append(None)
            reports.append(None)
            continue
        report = av_conditions_check(g, 0)
        if not report.passed:
            raise GluingError(f"measure layers fail: {', '.join(report.failing())}", report)
        branches.append(g[(n_max, 1)])
        reports.append(report)
    return PadicLFunction(f.p, "ordinary", 0, 1, 1, n_max, tuple(branches), tuple(reports),
                          _provenance(form))


def build_lp_finite_slope(form, h: int, n_max: int, prof: PrecisionProfile | None = None,
                          l: int = 1) -> PadicLFunction:
    """Glue the Mazur-Tate congruence grid (window l..l+h) with the Amice-Velu criterion."""
    f = _any_form(form)
    if h < f.slope:
        raise InadmissibleError(f"declared h={h} is below the slope {f.slope}")
    if f.slope >= f.k - 1:
        raise InadmissibleError(f"slope {f.slope} is not below k-1 = {f.k - 1}")
    grids = build_grids(form, h, n_max, l, prof)
    branches, reports = [], []
    for g in grids:
        if g is None:
            branches.append(None)
            reports.append(None)
            continue
        glued = av_glue(g, h)
        branches.append(glued.series.poly)
        reports.append(glued.report)
    kind = "ordinary" if h == 0 else "finite_slope"
    return PadicLFunction(f.p, kind, h, l, l + h, n_max, tuple(branches), tuple(reports),
                          _provenance(form))


def forced_condition_report(form, h: int, n_max: int, prof: PrecisionProfile | None = None,
                            l: int = 1) -> list[AVReport]:
    """The gluing-condition reports for a declared h, without refusing h < slope."""
    return [None if g is None else av_conditions_check(g, h)
            for g in build_grids(form, h, n_max, l, prof)]


# ---------------------------------------------------------------------------
# Euler factors and interpolation

def euler_factor(form, j: int, phi: PadicCharacter | None) -> QuadraticElement | Fraction:
    """e_p = 1 - p^(j-1)/a  (phi trivial)  or  (p^(j-1)/a)^ord_p(Cond phi).

    ``a`` is alpha for a StabilizedForm (exact in Q(alpha)) and a_p for an EigenSymbol.
    """
    if isinstance(form, dict):
        form = _any_form(form)
    if isinstance(form, StabilizedForm):
        p, k, a = form.p, form.k, form.alpha
        if int(form.a_p) == 0:
            raise ValueError("a_p = 0 is excluded")
    elif isinstance(form, EigenSymbol):
        if phi is None:
            raise ValueError("the prime is needed: pass phi or a StabilizedForm")
        p, k, a = phi.p, form.k, form.a(phi.p)
        if a == 0:
            raise ValueError("a_p = 0 is excluded")
    else:
        raise TypeError("expected a StabilizedForm or EigenSymbol")
    if not 1 <= j <= k - 1:
        raise SymbolError(f"j={j} outside the critical range 1..{k - 1}")
    m = 0 if phi is None else phi.conductor_exponent
    ratio = a ** -1 * p ** (j - 1) if isinstance(a, QuadraticElement) else Fraction(p ** (j - 1)) / a
    if m == 0:
        return 1 - ratio
    return ratio ** m


def _embed(x, form: StabilizedForm, prec: int) -> PadicScalar:
    if isinstance(x, QuadraticElement):
        return x.embed(form.alpha_padic(prec + _margin(x, form.p) + 2))
    return PadicScalar.from_rational(x, form.p, prec)


@dataclass
class InterpolationReport:
    j: int
    phi: PadicCharacter
    lhs: CycloScalar
    rhs: CycloScalar
    verdict: str                 # "pass", "fail" or "indeterminate"
    certified_precision: int | None

    @property
    def equal(self) -> bool:
        return self.verdict == "pass"

    def to_record(self) -> dict:
        phi = self.phi
        return {"j": self.j,
                "phi": {"tame": phi.tame, "wild_level": phi.wild_level, "wild_exp": phi.wild_exp,
                        "conductor": phi.conductor},
                "lhs": repr(self.lhs), "rhs": repr(self.rhs), "verdict": self.verdict,
                "certified_precision": self.certified_precision}


def interpolation_rhs(form, j: int, phi: PadicCharacter, prof: PrecisionProfile | None = None) -> CycloScalar:
    """mellin_sign(j) (-1)^j (j-1)! e_p tau(phi) L(f, phi^-1, j)/((2 pi i)^j Omega^sgn).

    The Gauss-sum-weighted L-value is the exact symbol sum of algebraic_l_value.
    """
    forms = _forms_by_sign(form)
    sgn = sign_for(j, phi.parity)
    if sgn not in forms:
        raise ValueError(f"(j, phi) needs the {sgn:+d} eigen-symbol")
    f = forms[sgn]
    prec = prof.cap_n if prof else 20
    work = PrecisionProfile(f.p, cap_n=prec + 2 * f.k, cyclo_level=max(4, phi.conductor_exponent))
    alg = algebraic_l_value(f, j, phi, work)
    fact = 1
    for t in range(2, j):
        fact *= t
    scale = mellin_sign(j) * (-1) ** j * fact
    ep = _embed(euler_factor(f, j, phi), f, prec + 2 * f.k)
    return alg * CycloScalar.from_scalar(ep * scale)


def check_interpolation(L: PadicLFunction, form, j: int, phi: PadicCharacter | None = None,
                        prof: PrecisionProfile | None = None, min_digits: int = 1) -> InterpolationReport:
    """Compare L(chi^j phi) with the symbol-sum side; indeterminate when precision is short."""
    if phi is None:
        phi = PadicCharacter(L.p, 0)
    if phi.j:
        raise ValueError("phi must be of finite order")
    f = _any_form(form)
    if not 1 <= j <= f.k - 1:
        raise SymbolError(f"j={j} outside the critical range 1..{f.k - 1}")
    chi = PadicCharacter(L.p, j, phi.tame, phi.wild_level, phi.wild_exp)
    lhs, cert = L.evaluate(chi)
    rhs = interpolation_rhs(form, j, phi, prof)
    if cert is None:
        return InterpolationReport(j, phi, lhs, rhs, "indeterminate", None)
    digits = min(cert, lhs.prec, rhs.prec)
    if digits < min_digits:
        return InterpolationReport(j, phi, lhs, rhs, "indeterminate", digits)
    verdict = "pass" if lhs.equal_at(rhs, digits) else "fail"
    return InterpolationReport(j, phi, lhs, rhs, verdict, digits)


# ---------------------------------------------------------------------------
# Euler polynomials away from p

@dataclass(frozen=True)
class EulerPolynomial:
    """P_q(X) = 1 - a_q [sigma_q] X + psi(q) q^(k-1) [sigma_q]^2 X^2, [sigma_q] = [q^-1]."""

    q: int
    a_q: Fraction
    psi_q: Fraction
    k: int

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        """Coefficients of 1, [sigma_q] X, [sigma_q]^2 X^2."""
        return (Fraction(1), -Fraction(self.a_q), Fraction(self.psi_q) * self.q ** (self.k - 1))

    def specialize(self, j: int, phi: PadicCharacter | None = None, x=1, prec: int = 20):
        """Value at kappa = chi^j phi, where kappa([sigma_q]) = q^-j phi(q)^-1.

        For trivial phi the value is an exact Fraction (q may equal p then).
        """
        c0, c1, c2 = self.coefficients
        if phi is None or phi.is_trivial_finite:
            s = Fraction(1, self.q ** j) * x
            return c0 + c1 * s + c2 * s * s
        p = phi.p
        if self.q % p == 0:
            raise ValueError("a nontrivial phi is undefined at q = p")
        s = phi.conjugate().dirichlet_value(self.q, prec + 2 * j) * CycloScalar.from_scalar(
            PadicScalar.from_rational(Fraction(x, self.q ** j), p, prec + 2 * j))
        one = CycloScalar.from_scalar(1, p, prec + 2 * j, phi.wild_level)
        return one + s * CycloScalar.from_scalar(PadicScalar.from_rational(c1, p, prec + 2 * j)) \
            + s * s * CycloScalar.from_scalar(PadicScalar.from_rational(c2, p, prec + 2 * j))

    def classical_factor(self, s: int) -> Fraction:
        """1 - a_q q^-s + psi(q) q^(k-1-2s): the inverse local Euler factor at s."""
        return 1 - Fraction(self.a_q) / self.q ** s + Fraction(self.psi_q) * Fraction(self.q) ** (self.k - 1 - 2 * s)


def euler_polynomial(q: int, a_q, character_value=1, k: int = 2) -> EulerPolynomial:
    return EulerPolynomial(q, Fraction(a_q), Fraction(character_value), k)


def _group_like_mod(p: int, q: int, e: int, n: int, j: int, i: int, prec: int):
    """[q^-e] on branch i modulo omega_n^{[j]}, as a T-basis coefficient list.

    omega^i(q^-e) (1+X)^{s(q^-e)} = omega^i(u) (1+p)^{j(s - b)} T^b with b = s mod p^n.
    """
    mod = p ** prec
    deg = p ** n
    u = pow(q, -e, mod)
    b = principal_unit_logs(p, n)[u % p ** (n + 1)] % deg
    w = teichmuller_int(u, p, prec)
    principal = u * pow(w, -1, mod) % mod          # <u> = (1+p)^s
    # (1+p)^{j(s-b)} = <u>^j (1+p)^{-jb}
    val = pow(w, i % (p - 1), mod) * pow(principal, j, mod) * pow(pow(1 + p, -1, mod), j * b, mod) % mod
    coeffs = [0] * deg
    coeffs[b] = val
    return coeffs


def remove_euler_factors(L: PadicLFunction, r: int, form) -> PadicLFunction:
    """Multiply L by prod_{q | r} P_q([sigma_q]) at the grid level and re-glue."""
    from .padic import QpPoly, is_prime
    f = _any_form(form)
    p, N, k = L.p, f.base.N, f.k
    if r < 1:
        raise ValueError("r must be a positive square-free integer")
    primes = [q for q in range(2, r + 1) if r % q == 0 and is_prime(q)]
    rem = r
    for q in primes:
        rem //= q
        if rem % q == 0:
            raise ValueError("r must be square-free")
        if gcd(q, N * p) != 1:
            raise ValueError(f"r shares the factor {q} with Np")
    if r == 1:
        return L
    polys = [euler_polynomial(q, f.base.a(q), 1, k) for q in primes]
    branches = []
    for i, F in enumerate(L.branches):
        if F is None:
            branches.append(None)
            continue
        entries = {}
        for n in range(1, L.n_max + 1):
            deg = p ** n
            for j in range(L.l, L.l_prime + 1):
                G = reduce_mod_omega(F, n, j)
                prec = G.prec - min(0, G.shift) + 4
                for P in polys:
                    G = _mul_mod_omega(G, _euler_mod(P, p, n, j, i, prec), n, j)
                entries[(n, j)] = G.resize(deg)
        grid = CongruenceGrid(p, L.h, L.l, L.l_prime, L.n_max, entries)
        glued = av_glue(grid, L.h, check=False)
        branches.append(glued.series.poly.with_prec(min(glued.series.poly.prec, F.prec)))
    prov = dict(L.provenance)
    prov["euler_removed"] = primes
    return PadicLFunction(p, L.slope_class, L.h, L.l, L.l_prime, L.n_max, tuple(branches),
                          (None,) * len(branches), prov)


def _euler_mod(P: EulerPolynomial, p: int, n: int, j: int, i: int, prec: int):
    """P_q([q^-1]) modulo omega_n^{[j]} on branch i, X-basis QpPoly."""
    from .padic import QpPoly
    c0, c1, c2 = P.coefficients
    deg = p ** n
    mod = p ** prec
    total = [0] * deg
    for e, c in ((0, c0), (1, c1), (2, c2)):
        if not c:
            continue
        cc = c.numerator * pow(c.denominator, -1, mod) % mod
        g = [1] + [0] * (deg - 1) if e == 0 else _group_like_mod(p, P.q, e, n, j, i, prec)
        for b, x in enumerate(g):
            total[b] = (total[b] + cc * x) % mod
    return QpPoly(p, tuple(total), 0, prec).from_t_basis()


def _mul_mod_omega(a, b, n: int, j: int):
    prod = a.mul(b)
    return reduce_mod_omega(prod, n, j)
