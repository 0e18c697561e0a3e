"""Modular symbols for Gamma_0(N) via Manin symbols, over Q.

Conventions
-----------
* Polynomials of weight k are homogeneous of degree w = k - 2 in X, Y and are
  stored as coefficient lists ``P[i]`` of ``X^i Y^(w-i)``.
* A matrix g = (a b; c d) acts by (g.P)(X, Y) = P(dX - bY, -cX + aY), and on
  symbols by g(P{r, s}) = (g.P){g r, g s}.  With this action
  integral_r^s f(z) P(z, 1) dz is invariant, and T_l = sum over the coset
  representatives (1 b; 0 l) (and (l 0; 0 1) when l does not divide N).
* The Manin symbol [P, (c:d)] is g(P{0, oo}) for any g in SL_2(Z) with bottom
  row congruent to (c, d) mod N.
* The eigen-symbol of a newform is a *dual* Hecke eigenvector: a linear
  functional on the full symbol space with Phi o T_l = a_l Phi and
  Phi o iota = sign * Phi, where iota = (-1 0; 0 1).  Its coordinates on the
  free Manin generators are normalized so that the first nonzero one is 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, gcd
from typing import Iterable, Sequence

Matrix = tuple[int, int, int, int]
INF = None  # the cusp at infinity


class SymbolError(ValueError):
    """Invalid input to a modular-symbol construction."""


class NotSeparatedError(SymbolError):
    """The supplied eigenvalues do not cut out a one-dimensional eigenspace."""


class NotFoundError(SymbolError):
    """No simultaneous eigenvector with the supplied eigenvalues exists."""


# ---------------------------------------------------------------------------
# small exact linear algebra over Q

def rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                row_r = m[r]
                m[i] = [x - f * y for x, y in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def mat_mul(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    out = [[Fraction(0)] * k for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(m):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(k):
                    if bt[j]:
                        oi[j] += x * bt[j]
    return out


def transpose(a: list[list[Fraction]]) -> list[list[Fraction]]:
    return [list(r) for r in zip(*a)] if a else []


def rank(rows: list[list[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def charpoly(a: list[list[Fraction]]) -> list[Fraction]:
    """Characteristic polynomial det(x - A), coefficients low to high (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = mat_mul(a, m) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        m = [[am[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        am = mat_mul(a, m)
        tr = sum(am[i][i] for i in range(n))
        coeffs[n - k] = -tr / k
    return coeffs


# ---------------------------------------------------------------------------
# polynomials and the matrix action

def subst(P: Sequence, a: int, b: int, c: int, d: int) -> list:
    """Coefficients of P(aX + bY, cX + dY)."""
    w = len(P) - 1
    out = [0] * (w + 1)
    # precompute powers of the two linear forms as coefficient lists in X-degree
    pow1 = [[1]]
    pow2 = [[1]]
    for _ in range(w):
        pow1.append(_mul_lin(pow1[-1], a, b))
        pow2.append(_mul_lin(pow2[-1], c, d))
    for i, coef in enumerate(P):
        if not coef:
            continue
        prod = _poly_mul(pow1[i], pow2[w - i])
        for m, v in enumerate(prod):
            if v:
                out[m] += coef * v
    return out


def subst_columns(a: int, b: int, c: int, d: int, w: int) -> list[list[int]]:
    """For each i, the coefficients of (aX + bY)^i (cX + dY)^(w-i)."""
    pow1 = [[1]]
    pow2 = [[1]]
    for _ in range(w):
        pow1.append(_mul_lin(pow1[-1], a, b))
        pow2.append(_mul_lin(pow2[-1], c, d))
    return [_poly_mul(pow1[i], pow2[w - i]) for i in range(w + 1)]


def _mul_lin(q: list, s: int, t: int) -> list:
    """q * (sX + tY) where q[m] is the coefficient of X^m (homogeneous)."""
    out = [0] * (len(q) + 1)
    for m, v in enumerate(q):
        out[m + 1] += s * v
        out[m] += t * v
    return out


def _poly_mul(u: list, v: list) -> list:
    out = [0] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        if x:
            for j, y in enumerate(v):
                out[i + j] += x * y
    return out


def act(g: Matrix, P: Sequence) -> list:
    """(g.P)(X, Y) = P(dX - bY, -cX + aY)."""
    a, b, c, d = g
    return subst(P, d, -b, -c, a)


def act_inverse_sl2(g: Matrix, P: Sequence) -> list:
    """g^{-1}.P for g in SL_2(Z), i.e. P(aX + bY, cX + dY)."""
    a, b, c, d = g
    return subst(P, a, b, c, d)


def apply_cusp(g: Matrix, r):
    """Moebius action on Q u {oo}; cusps are Fractions or INF."""
    a, b, c, d = g
    if r is INF:
        return INF if c == 0 else Fraction(a, c)
    num = a * r.numerator + b * r.denominator
    den = c * r.numerator + d * r.denominator
    return INF if den == 0 else Fraction(num, den)


def convergents(r: Fraction) -> list[tuple[int, int]]:
    """Continued-fraction convergents p_j/q_j of r, q_j > 0."""
    num, den = r.numerator, r.denominator
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    while den:
        a, rem = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
        num, den = den, rem
    return out


def monomial(w: int, i: int) -> list[int]:
    P = [0] * (w + 1)
    P[i] = 1
    return P


# ---------------------------------------------------------------------------
# P^1(Z/N) and cusps

class P1List:
    """Canonical representatives of P^1(Z/N)."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [1]
        table: dict[tuple[int, int], int] = {}
        reps: list[tuple[int, int]] = []
        if N == 1:
            reps = [(0, 0)]
            self._index = {(0, 0): 0}
            self.reps = reps
            return
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1 or (c, d) in table:
                    continue
                orbit = {((u * c) % N, (u * d) % N) for u in units}
                rep = min(orbit)
                idx = len(reps)
                reps.append(rep)
                for o in orbit:
                    table[o] = idx
        self._index = table
        self.reps = reps

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        if self.N == 1:
            return 0
        return self._index[(c % self.N, d % self.N)]


def lift_to_sl2(c: int, d: int, N: int) -> Matrix:
    """A matrix in SL_2(Z) whose bottom row is congruent to (c, d) mod N."""
    if N == 1:
        return (1, 0, 0, 1)
    c %= N
    d %= N
    if c == 0:
        c = N
    # find t with gcd(c, d + tN) = 1
    t = 0
    while gcd(c, d + t * N) != 1:
        t += 1
    d2 = d + t * N
    g, x, y = _egcd(c, d2)
    # x c + y d2 = 1 -> matrix (y, -x; c, d2) has det y d2 + x c = 1
    return (y, -x, c, d2)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def cusps_equivalent(r1, r2, N: int) -> bool:
    """Gamma_0(N)-equivalence of cusps (Cremona's criterion)."""
    u1, v1 = (1, 0) if r1 is INF else (r1.numerator, r1.denominator)
    u2, v2 = (1, 0) if r2 is INF else (r2.numerator, r2.denominator)
    s1 = _inverse_mod(u1, v1)
    s2 = _inverse_mod(u2, v2)
    m = gcd(v1 * v2, N)
    return (s1 * v2 - s2 * v1) % m == 0


def _inverse_mod(u: int, v: int) -> int:
    if v == 0:
        return 1 if u == 1 else -1
    if v == 1:
        return 0
    return pow(u, -1, v)


# ---------------------------------------------------------------------------
# the symbol space

@dataclass
class SymbolSpace:
    """Manin-symbol presentation of M_k(Gamma_0(N)) over Q (trivial character)."""

    N: int
    k: int
    p1: P1List = field(repr=False)
    free: list[int] = field(repr=False)          # generator indices forming a basis
    gen_vectors: list[dict[int, Fraction]] = field(repr=False)  # generator -> sparse basis vector
    relation_rank: int = 0
    n_generators: int = 0

    @property
    def weight_degree(self) -> int:
        return self.k - 2

    @property
    def dimension(self) -> int:
        return len(self.free)

    def gen_index(self, i: int, c: int, d: int) -> int:
        return i * len(self.p1) + self.p1.index(c, d)

    # -- conversions ----------------------------------------------------
    def manin_vector(self, P: Sequence, c: int, d: int) -> dict[int, Fraction]:
        """Basis coordinates of the Manin symbol [P, (c:d)]."""
        out: dict[int, Fraction] = {}
        w = self.weight_degree
        for i in range(w + 1):
            coef = P[i]
            if not coef:
                continue
            for b, v in self.gen_vectors[self.gen_index(i, c, d)].items():
                out[b] = out.get(b, 0) + coef * v
        return out

    def _from_infinity(self, P: Sequence, r) -> dict[int, Fraction]:
        """Coordinates of P{oo, r}."""
        out: dict[int, Fraction] = {}
        if r is INF:
            return out
        prev = (1, 0)
        for j, (pj, qj) in enumerate(convergents(r)):
            s = 1 if j % 2 == 1 else -1  # (-1)^(j-1)
            g = (s * pj, prev[0], s * qj, prev[1])
            Q = act_inverse_sl2(g, P)
            for b, v in self.manin_vector(Q, g[2], g[3]).items():
                out[b] = out.get(b, 0) + v
            prev = (pj, qj)
        return out

    def symbol_vector(self, P: Sequence, alpha, beta) -> dict[int, Fraction]:
        """Coordinates of the modular symbol P{alpha, beta}."""
        out = self._from_infinity(P, beta)
        for b, v in self._from_infinity(P, alpha).items():
            out[b] = out.get(b, 0) - v
        return {b: v for b, v in out.items() if v}

    def basis_symbol(self, b: int) -> tuple[list[int], Matrix]:
        """The basis element b as (P, g) meaning g(P{0, oo})."""
        gen = self.free[b]
        i, idx = divmod(gen, len(self.p1))
        c, d = self.p1.reps[idx]
        return monomial(self.weight_degree, i), lift_to_sl2(c, d, self.N)

    def apply_matrices(self, mats: Iterable[Matrix]) -> list[list[Fraction]]:
        """Matrix (columns = images of basis elements) of x -> sum g x."""
        mats = list(mats)
        n = self.dimension
        cols = []
        for b in range(n):
            P, g = self.basis_symbol(b)
            gP = act(g, P)
            alpha, beta = apply_cusp(g, Fraction(0)), apply_cusp(g, INF)
            col: dict[int, Fraction] = {}
            for h in mats:
                hP = act(h, gP)
                for t, v in self.symbol_vector(hP, apply_cusp(h, alpha), apply_cusp(h, beta)).items():
                    col[t] = col.get(t, 0) + v
            cols.append(col)
        return [[cols[b].get(t, Fraction(0)) for b in range(n)] for t in range(n)]

    # -- structure --------------------------------------------------------
    @cached_property
    def star_involution(self) -> list[list[Fraction]]:
        return self.apply_matrices([(-1, 0, 0, 1)])

    def hecke_matrix(self, ell: int) -> list[list[Fraction]]:
        return hecke_operator(self, ell)

    @cached_property
    def cusp_reps(self) -> list:
        reps: list = []
        for d in sorted(dd for dd in range(1, self.N + 1) if self.N % dd == 0):
            for u in range(0, max(d, 1) + self.N):
                r = INF if d == self.N and False else Fraction(u, d)
                if gcd(u, d) != 1:
                    continue
                if not any(cusps_equivalent(r, s, self.N) for s in reps):
                    reps.append(r)
        if not any(cusps_equivalent(INF, s, self.N) for s in reps):
            reps.append(INF)
        return reps

    def cusp_class(self, r) -> int:
        for i, s in enumerate(self.cusp_reps):
            if cusps_equivalent(r, s, self.N):
                return i
        raise AssertionError("cusp class not found")  # pragma: no cover

    @cached_property
    def boundary_matrix(self) -> list[list[Fraction]]:
        """Boundary map to the free space on cusp classes (columns = basis)."""
        w = self.weight_degree
        ncusps = len(self.cusp_reps)
        mat = [[Fraction(0)] * self.dimension for _ in range(ncusps)]
        for b in range(self.dimension):
            P, g = self.basis_symbol(b)
            # g(P{0,oo}) = (gP){b/d, a/c}; boundary = phi_{a/c} - phi_{b/d}
            top = P[w]
            bottom = P[0]
            if top:
                mat[self.cusp_class(apply_cusp(g, INF))][b] += top
            if bottom:
                mat[self.cusp_class(apply_cusp(g, Fraction(0)))][b] -= bottom
        return mat

    @cached_property
    def cuspidal_basis(self) -> list[list[Fraction]]:
        return nullspace(self.boundary_matrix, self.dimension)

    @property
    def cuspidal_dimension(self) -> int:
        return len(self.cuspidal_basis)

    def sign_dimensions(self) -> tuple[int, int]:
        """(dim +, dim -) of the star involution on the cuspidal subspace."""
        iota = self.star_involution
        cusp = self.cuspidal_basis
        out = []
        for s in (1, -1):
            # vectors v in cusp span with iota v = s v
            n = len(cusp)
            rows = []
            imgs = [_mat_vec(iota, v) for v in cusp]
            for t in range(self.dimension):
                rows.append([imgs[i][t] - s * cusp[i][t] for i in range(n)])
            out.append(len(nullspace(rows, n)))
        return out[0], out[1]


def _mat_vec(m: list[list[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in m]


def manin_relations(N: int, k: int, p1: P1List) -> list[dict[int, int]]:
    """The two- and three-term Manin relations as sparse rows."""
    w = k - 2
    n1 = len(p1)
    sigma_inv = (0, 1, -1, 0)       # sigma = (0 -1; 1 0)
    tau_inv = (-1, 1, -1, 0)        # tau = (0 -1; 1 -1)
    tau2_inv = (0, -1, 1, -1)
    rows = []

    def gen(i, c, d):
        return i * n1 + p1.index(c, d)

    def add(row, P, c, d, sgn=1):
        for i, v in enumerate(P):
            if v:
                g = gen(i, c, d)
                row[g] = row.get(g, 0) + sgn * v

    seen2, seen3 = set(), set()
    for idx, (c, d) in enumerate(p1.reps):
        for i in range(w + 1):
            x = monomial(w, i)
            # x + x sigma = 0 with x sigma = [sigma^{-1} P, (d, -c)]
            key = (i, idx)
            if key not in seen2:
                row: dict[int, int] = {}
                add(row, x, c, d)
                add(row, act(sigma_inv, x), d, -c)
                rows.append(row)
                seen2.add(key)
            # x + x tau + x tau^2 = 0
            row = {}
            add(row, x, c, d)
            add(row, act(tau_inv, x), d, -c - d)
            add(row, act(tau2_inv, x), -c - d, c)
            rows.append(row)
    # (-1) acts trivially for even weight; nothing further to impose
    return [r for r in rows if any(r.values())]


def build_space(N: int, k: int, character=None) -> SymbolSpace:
    """Manin-symbol presentation of weight-k modular symbols on Gamma_0(N)."""
    if N < 1 or k < 2:
        raise SymbolError("need N >= 1 and k >= 2")
    if character not in (None, "trivial", 1):
        raise SymbolError("only the trivial character is supported")
    if k % 2:
        raise SymbolError("parity mismatch: trivial character needs even weight")
    p1 = P1List(N)
    w = k - 2
    ngens = (w + 1) * len(p1)
    rels = manin_relations(N, k, p1)
    dense = [[Fraction(r.get(c, 0)) for c in range(ngens)] for r in rels]
    red, pivots = rref(dense, ngens)
    pivset = set(pivots)
    free = [c for c in range(ngens) if c not in pivset]
    pos = {g: b for b, g in enumerate(free)}
    gen_vectors: list[dict[int, Fraction]] = [dict() for _ in range(ngens)]
    for g in free:
        gen_vectors[g] = {pos[g]: Fraction(1)}
    for row, pc in zip(red, pivots):
        gen_vectors[pc] = {pos[f]: -row[f] for f in free if row[f]}
    return SymbolSpace(N=N, k=k, p1=p1, free=free, gen_vectors=gen_vectors,
                       relation_rank=len(pivots), n_generators=ngens)


def hecke_coset_reps(ell: int, N: int) -> list[Matrix]:
    mats = [(1, b, 0, ell) for b in range(ell)]
    if N % ell:
        mats.append((ell, 0, 0, 1))
    return mats


def hecke_operator(space: SymbolSpace, ell: int) -> list[list[Fraction]]:
    """Exact matrix of T_ell (U_ell when ell | N) on the Manin basis."""
    cache = space.__dict__.setdefault("_hecke_cache", {})
    if ell not in cache:
        cache[ell] = space.apply_matrices(hecke_coset_reps(ell, space.N))
    return cache[ell]


# ---------------------------------------------------------------------------
# eigen-symbols

@dataclass
class EigenSymbol:
    """A dual Hecke eigenvector (linear functional on the symbol space)."""

    space: SymbolSpace = field(repr=False)
    coords: list[Fraction]
    eigenvalues: dict[int, Fraction]
    sign: int

    @property
    def N(self) -> int:
        return self.space.N

    @property
    def k(self) -> int:
        return self.space.k

    def __call__(self, vec: dict[int, Fraction]) -> Fraction:
        return sum((self.coords[b] * v for b, v in vec.items()), Fraction(0))

    def value(self, P: Sequence, alpha, beta) -> Fraction:
        """Phi(P{alpha, beta})."""
        return self(self.space.symbol_vector(P, alpha, beta))

    def moments(self, alpha, beta) -> list[Fraction]:
        """Phi(X^i Y^(w-i){alpha, beta}) for i = 0..w."""
        out = self.moments_from_infinity(beta)
        for i, v in enumerate(self.moments_from_infinity(alpha)):
            out[i] -= v
        return out

    @cached_property
    def _generator_values(self) -> list[Fraction]:
        """Phi evaluated on every Manin generator [X^i Y^(w-i), (c:d)]."""
        return [sum((self.coords[b] * v for b, v in vec.items()), Fraction(0))
                for vec in self.space.gen_vectors]

    def moments_from_infinity(self, r) -> list[Fraction]:
        """Phi(X^i Y^(w-i){oo, r}) for i = 0..w, via one matrix per convergent."""
        w = self.space.weight_degree
        out = [Fraction(0)] * (w + 1)
        if r is INF:
            return out
        gv = self._generator_values
        n1 = len(self.space.p1)
        prev = (1, 0)
        for j, (pj, qj) in enumerate(convergents(r)):
            s = 1 if j % 2 == 1 else -1
            a, b, c, d = s * pj, prev[0], s * qj, prev[1]
            idx = self.space.p1.index(c, d)
            row = [gv[m * n1 + idx] for m in range(w + 1)]
            # column i of the substitution matrix: coefficients of (aX+bY)^i (cX+dY)^(w-i)
            for i, col in enumerate(subst_columns(a, b, c, d, w)):
                acc = Fraction(0)
                for m, x in enumerate(col):
                    if x and row[m]:
                        acc += x * row[m]
                out[i] += acc
            prev = (pj, qj)
        return out

    def a(self, ell: int) -> Fraction:
        if ell not in self.eigenvalues:
            self.eigenvalues[ell] = self._eigenvalue(ell)
        return self.eigenvalues[ell]

    def _eigenvalue(self, ell: int) -> Fraction:
        T = hecke_operator(self.space, ell)
        img = _mat_vec(transpose(T), self.coords)
        for x, y in zip(img, self.coords):
            if y:
                return x / y
        raise AssertionError("zero eigen-symbol")  # pragma: no cover

    def check(self) -> bool:
        """T_l Phi = a_l Phi for every stored l and iota Phi = sign Phi."""
        for ell, a in self.eigenvalues.items():
            img = _mat_vec(transpose(hecke_operator(self.space, ell)), self.coords)
            if any(x != a * y for x, y in zip(img, self.coords)):
                return False
        img = _mat_vec(transpose(self.space.star_involution), self.coords)
        return all(x == self.sign * y for x, y in zip(img, self.coords))


def find_eigensymbol(space: SymbolSpace, eigenvalues: dict[int, int | Fraction], sign: int) -> EigenSymbol:
    """The normalized dual eigenvector with the given Hecke eigenvalues and sign."""
    if sign not in (1, -1):
        raise SymbolError("sign must be +1 or -1")
    n = space.dimension
    rows: list[list[Fraction]] = []
    iota_t = transpose(space.star_involution)
    rows += [[iota_t[i][j] - (sign if i == j else 0) for j in range(n)] for i in range(n)]
    for ell, a in eigenvalues.items():
        Tt = transpose(hecke_operator(space, ell))
        a = Fraction(a)
        rows += [[Tt[i][j] - (a if i == j else 0) for j in range(n)] for i in range(n)]
    # dual eigenvectors must also kill the Eisenstein (non-cuspidal) directions:
    # restrict to functionals vanishing on ker(boundary)^perp is automatic once
    # separated, but with no eigenvalues we still require separation.
    basis = nullspace(rows, n)
    if not basis:
        raise NotFoundError("no eigen-symbol with these eigenvalues and sign")
    if len(basis) > 1:
        raise NotSeparatedError(f"eigenspace has dimension {len(basis)}; supply more a_l")
    v = basis[0]
    first = next(x for x in v if x)
    v = [x / first for x in v]
    sym = EigenSymbol(space=space, coords=v, eigenvalues={l: Fraction(a) for l, a in eigenvalues.items()}, sign=sign)
    return sym


# ---------------------------------------------------------------------------
# p-stabilization

@dataclass
class StabilizedForm:
    """The p-stabilization f_alpha(q) = g(q) - beta g(q^p) of an eigen-symbol g.

    ``alpha`` is exact in Q[alpha]/(alpha^2 - a_p alpha + p^(k-1)); its image in
    Q_p is ``alpha_padic(prec)``.
    """

    base: EigenSymbol
    p: int
    a_p: Fraction
    which_root: str | int
    slope: Fraction
    _alpha_cache: dict = field(default_factory=dict, repr=False)
    _moment_cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def c(self) -> int:
        return self.p ** (self.k - 1)

    @property
    def alpha(self):
        from .numfield import QuadraticElement
        return QuadraticElement.generator(int(self.a_p), self.c)

    @property
    def beta(self):
        return self.alpha.conjugate()

    @property
    def is_ordinary(self) -> bool:
        return self.slope == 0

    def alpha_padic(self, prec: int):
        from .numfield import hecke_root
        if prec not in self._alpha_cache:
            self._alpha_cache[prec] = hecke_root(int(self.a_p), self.c, self.p, prec, self.which_root)
        return self._alpha_cache[prec]

    def value(self, P: Sequence, r, s):
        """Phi_alpha(P{r, s}) = Phi(P{r,s}) - beta p^(1-k) Phi(diag(p,1) P{r,s})."""
        h = (self.p, 0, 0, 1)
        main = self.base.value(P, r, s)
        other = self.base.value(act(h, P), apply_cusp(h, r), apply_cusp(h, s))
        return self.beta * Fraction(-other, self.c) + main

    def moments(self, r) -> list:
        """Phi_alpha(X^i Y^(w-i){r, oo}) for i = 0..w."""
        if r not in self._moment_cache:
            base = _base_moments(self.base, r)
            scaled = _base_moments(self.base, None if r is INF else r * self.p)
            p = self.p
            self._moment_cache[r] = [self.beta * Fraction(-scaled[i], p ** (i + 1)) + base[i]
                                     for i in range(len(base))]
        return self._moment_cache[r]

    def up_defect(self, P: Sequence, r, s):
        """sum_b Phi_alpha((1 b; 0 p) x) - alpha Phi_alpha(x); zero for an U_p-eigensymbol."""
        total = self.alpha * (-1) * self.value(P, r, s)
        for b in range(self.p):
            h = (1, b, 0, self.p)
            total = total + self.value(act(h, P), apply_cusp(h, r), apply_cusp(h, s))
        return total


def _base_moments(sym: EigenSymbol, r) -> list[Fraction]:
    cache = sym.__dict__.setdefault("_moments", {})
    if r not in cache:
        cache[r] = sym.moments(r, INF)
    return cache[r]


def p_stabilize(eigsym: EigenSymbol, p: int, which_root: str | int = "small") -> StabilizedForm:
    """Choose a root alpha of X^2 - a_p X + p^(k-1) and return the stabilized form."""
    from .numfield import newton_slopes
    if eigsym.N % p == 0:
        raise SymbolError("p-stabilization needs p not dividing the level")
    a_p = eigsym.a(p)
    if a_p.denominator != 1:
        raise SymbolError("a_p must be rational integral")
    c = p ** (eigsym.k - 1)
    if a_p * a_p == 4 * c:
        raise SymbolError("the Hecke polynomial at p has a double root")
    s1, s2 = newton_slopes(int(a_p), c, p)
    if which_root in ("unit", "ordinary") and s1 != 0:
        raise SymbolError("no unit root: the form is not ordinary at p")
    slope = s2 if which_root in ("large", 1) and s1 != s2 else s1
    form = StabilizedForm(base=eigsym, p=p, a_p=a_p, which_root=which_root, slope=slope)
    # materialize the root early so unsupported extensions fail here
    form.alpha_padic(4)
    return form


# ---------------------------------------------------------------------------
# algebraic L-values

def _twist_polynomial(w: int, j: int, m: int, a: int) -> list[Fraction]:
    """m^(1-j) (mX - aY)^(j-1) Y^(k-1-j) as coefficients of X^i Y^(w-i)."""
    out = [Fraction(0)] * (w + 1)
    for i in range(j):
        out[i] = Fraction(comb(j - 1, i) * m ** i * (-a) ** (j - 1 - i), m ** (j - 1))
    return out


def sign_for(j: int, phi_parity: int) -> int:
    """The sign (-1)^(j-1) phi(-1) of the period attached to (j, phi)."""
    return (-1) ** (j - 1) * phi_parity


def _pick_symbol(symbols, sgn: int) -> EigenSymbol:
    if isinstance(symbols, EigenSymbol):
        return symbols
    if isinstance(symbols, dict):
        return symbols[sgn]
    raise TypeError("expected an EigenSymbol or a {sign: EigenSymbol} mapping")


def twisted_symbol_sum(symbols, j: int, m: int, coeff) -> list:
    """[(a, Phi^sgn(P_a{a/m, oo}))] for units a mod m (a = 0 when m = 1)."""
    sym = symbols
    w = sym.k - 2
    out = []
    residues = [0] if m == 1 else [a for a in range(1, m) if gcd(a, m) == 1]
    for a in residues:
        P = _twist_polynomial(w, j, m, a)
        out.append((a, coeff(sym, P, Fraction(a, m))))
    return out


def algebraic_l_value(form, j: int, phi, prof=None):
    """tau(phi) L(f, phi^-1, j) / ((2 pi i)^j Omega^sgn) as an exact symbol sum.

    ``form`` is an EigenSymbol, a {sign: EigenSymbol} mapping, or a
    StabilizedForm (then the L-function is that of f_alpha, whose Euler factor
    at p differs from the base by (1 - beta p^-j) for trivial phi).  ``phi`` is
    a finite-order PadicCharacter of p-power conductor (or None for trivial).
    Returns a CycloScalar at the level of the conductor of phi.
    """
    from .cyclo import CycloScalar, PadicCharacter
    from .padic import PadicScalar
    stab = form if isinstance(form, StabilizedForm) else None
    base = stab.base if stab else form
    k = (base.k if isinstance(base, EigenSymbol) else next(iter(base.values())).k)
    if not 1 <= j <= k - 1:
        raise SymbolError(f"j={j} outside the critical range 1..{k - 1}")
    p = stab.p if stab else (phi.p if phi is not None else (prof.p if prof else None))
    if phi is None:
        phi = PadicCharacter(p, 0)
    if phi.j:
        raise SymbolError("phi must be of finite order")
    prec = prof.cap_n if prof else 20
    sgn = sign_for(j, phi.parity)
    sym = _pick_symbol(base, sgn)
    m = phi.conductor
    terms = twisted_symbol_sum(sym, j, m, lambda s, P, r: s.value(P, r, INF))
    total = _sum_with_character(terms, phi, prec)
    scale = Fraction((-1) ** j, _factorial(j - 1))
    if stab is not None and m == 1:
        factor = 1 - stab.beta * Fraction(1, p ** j)
        total = total * factor.embed(stab.alpha_padic(prec + 2 * k))
    return total * CycloScalar.from_scalar(PadicScalar.from_rational(scale, phi.p, prec + k))


def twisted_value_by_operator(form, j: int, phi, prof=None):
    """Same quantity via the twisting operator sum_a phi(a) (m a; 0 m) applied to X^(j-1)Y^(k-1-j){0, oo}."""
    from .cyclo import CycloScalar, PadicCharacter
    from .padic import PadicScalar
    base = form
    k = base.k if isinstance(base, EigenSymbol) else next(iter(base.values())).k
    p = phi.p
    prec = prof.cap_n if prof else 20
    sym = _pick_symbol(base, sign_for(j, phi.parity))
    m = phi.conductor
    w = k - 2
    P0 = monomial(w, j - 1)
    residues = [0] if m == 1 else [a for a in range(1, m) if gcd(a, m) == 1]
    terms = []
    for a in residues:
        g = (m, a, 0, m)
        gP = [Fraction(x, m ** w) for x in act(g, P0)]
        terms.append((a, sym.value(gP, apply_cusp(g, Fraction(0)), apply_cusp(g, INF))))
    total = _sum_with_character(terms, phi, prec)
    scale = Fraction((-1) ** j, _factorial(j - 1))
    return total * CycloScalar.from_scalar(PadicScalar.from_rational(scale, p, prec + k))


def _sum_with_character(terms, phi, prec: int):
    from .cyclo import CycloScalar
    from .padic import PadicScalar, valuation
    p = phi.p
    margin = max([0] + [-valuation(v, p) for _, v in terms if v and valuation(v, p) < 0])
    hi = prec + margin
    total = CycloScalar.from_scalar(0, p, hi, phi.wild_level)
    for a, v in terms:
        if not v:
            continue
        chi = CycloScalar.from_scalar(1, p, hi, 0) if phi.conductor == 1 else phi.dirichlet_value(a, hi)
        total = total + chi * CycloScalar.from_scalar(PadicScalar.from_rational(v, p, hi))
    return total


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out
