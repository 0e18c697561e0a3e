import random
from fractions import Fraction

import pytest

from iwasawa_lp.padic_core import (CycloScalar, PadicCharacter, PadicScalar, PrecisionError,
                                   PrecisionProfile, QpPoly, QuadraticElement, finite_characters,
                                   gauss_sum, hecke_root, newton_slopes, principal_unit_logs,
                                   teichmuller, valuation)


def test_profile_rejects_bad_primes():
    with pytest.raises(ValueError):
        PrecisionProfile(2)
    with pytest.raises(ValueError):
        PrecisionProfile(9)


def test_scalar_field_laws_match_rationals():
    rng = random.Random(3)
    p, prec = 5, 15
    for _ in range(200):
        x = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 500))
        y = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 500))
        X, Y = PadicScalar.from_rational(x, p, prec), PadicScalar.from_rational(y, p, prec)
        assert X + Y == PadicScalar.from_rational(x + y, p, prec)
        assert X * Y == PadicScalar.from_rational(x * y, p, prec)
        assert (X / Y) * Y == X


def test_precision_is_tracked_through_division():
    p = 3
    x = PadicScalar.from_rational(1, p, 10)
    y = PadicScalar.from_rational(9, p, 10)
    q = x / y
    assert q.valuation == -2
    assert q.prec == 6          # relative precision of 9 is 8 digits


def test_valuation_of_rationals():
    assert valuation(Fraction(18, 5), 3) == 2
    assert valuation(Fraction(5, 27), 3) == -3
    assert valuation(0, 3) == float("inf")


@pytest.mark.parametrize("p", [3, 5, 7])
def test_teichmuller_is_root_of_unity(p):
    for a in range(1, p):
        w = teichmuller(a, p, 12)
        assert w ** (p - 1) == PadicScalar.from_rational(1, p, 12)
        assert w.residue(1) == a


def test_principal_unit_logs_are_a_bijection():
    p, n = 3, 2
    logs = principal_unit_logs(p, n)
    assert sorted(set(logs.values())) == list(range(p ** n))
    assert logs[1] == 0 and logs[1 + p] == 1


def test_qppoly_taylor_shift_roundtrip():
    rng = random.Random(5)
    for _ in range(20):
        c = [rng.randint(-50, 50) for _ in range(8)]
        f = QpPoly.from_ints(5, c, 12)
        assert f.to_t_basis().from_t_basis().equal_at(f)


def test_quadratic_element_ring():
    a, c = -1, 3
    alpha = QuadraticElement.generator(a, c)
    assert alpha * alpha == alpha * a - c
    x = alpha * 3 + 2
    assert x * x.inverse() == QuadraticElement.rational(1, a, c)
    assert (x * x.conjugate()).r1 == 0


def test_newton_slopes_examples():
    assert newton_slopes(-1, 3, 3) == (0, 1)
    assert newton_slopes(252, 3 ** 11, 3) == (2, 9)


def test_hecke_root_unit_root_for_11a():
    alpha = hecke_root(-1, 3, 3, 12, "unit")
    assert alpha.valuation == 0
    assert alpha.residue(1) == 2   # alpha = -1 mod 3
    assert alpha * alpha + alpha + 3 == PadicScalar.from_rational(0, 3, 12)


def test_hecke_root_failures():
    with pytest.raises(ValueError):
        hecke_root(2, 1, 3, 10)          # double root
    with pytest.raises(ValueError):
        hecke_root(252, 3 ** 11, 3, 10, "unit")
    with pytest.raises(PrecisionError):
        hecke_root(0, 3, 3, 10)          # ramified: roots +-sqrt(-3)


def test_characters_parity_and_conductor():
    p = 3
    chars = list(finite_characters(p, 2))
    assert len(chars) == 6                  # |(Z/9)^x|
    assert {c.conductor for c in chars} == {1, 3, 9}
    odd = [c for c in chars if c.parity == -1]
    assert len(odd) == 3


@pytest.mark.parametrize("p,m", [(3, 2), (5, 2), (3, 3)])
def test_gauss_sum_norm_identity(p, m):
    prof = PrecisionProfile(p, cap_n=12, cyclo_level=m)
    for phi in finite_characters(p, m):
        if phi.conductor == 1:
            continue
        lhs = gauss_sum(phi, prof) * gauss_sum(phi.conjugate(), prof)
        rhs = CycloScalar.from_scalar(PadicScalar.from_rational(phi.parity * phi.conductor, p, 12))
        assert lhs.equal_at(rhs, 10)


def test_gauss_sum_beyond_cyclotomic_level_is_refused():
    prof = PrecisionProfile(3, cap_n=8, cyclo_level=1)
    with pytest.raises(PrecisionError):
        gauss_sum(PadicCharacter(3, 0, 0, 1, 1), prof)


def test_dirichlet_values_are_multiplicative():
    p = 5
    for phi in finite_characters(p, 2):
        for a in (2, 3, 7):
            for b in (4, 6, 13):
                ab = phi.dirichlet_value(a * b, 10)
                assert ab.equal_at(phi.dirichlet_value(a, 10) * phi.dirichlet_value(b, 10), 9)
