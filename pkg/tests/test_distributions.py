import random
from fractions import Fraction

import pytest

from iwasawa_lp.distributions import (CongruenceGrid, GluingError, HhSeries, av_conditions_check,
                                      av_glue, ell, floor_bound, grid_from_series, hh_membership,
                                      in_hh_plus, omega_qp, reduce_by_division, reduce_mod_omega,
                                      uniqueness_test)
from iwasawa_lp.padic_core import QpPoly
from oracles import ell_by_digits


def random_hh_plus(rng, p, h, cap, prec=20):
    """A random element of H_h^+: ord(a_i) >= -h*ell(i)."""
    coeffs = [Fraction(rng.randrange(p ** prec), p ** (h * ell(i, p))) * p ** rng.randrange(2)
              for i in range(cap)]
    return QpPoly.from_rationals(p, coeffs, prec)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_ell_against_digit_count(p):
    assert [ell(i, p) for i in (0, 1, p - 1, p, p * p)] == [0, 1, 1, 2, 3]
    for i in range(5000):
        assert ell(i, p) == ell_by_digits(i, p)


def test_floor_bound_examples():
    p, cap = 3, 30
    boundary = QpPoly.from_rationals(p, [Fraction(1, p ** ell(i, p)) for i in range(cap)], 10)
    assert floor_bound(boundary, 1) == 0 and in_hh_plus(boundary, 1)
    outside = QpPoly.from_rationals(p, [Fraction(1, p ** (2 * ell(i, p))) for i in range(cap)], 10)
    assert floor_bound(outside, 1) == -ell(cap - 1, p)
    assert not in_hh_plus(outside, 1)
    assert hh_membership(QpPoly.zeros(p, 5, 10), 2) == (True, float("inf"))


def test_logarithm_is_in_h1_plus():
    p = 5
    log = QpPoly.from_rationals(p, [0] + [Fraction((-1) ** (i + 1), i) for i in range(1, 200)], 10)
    assert floor_bound(log, 1) >= 1
    assert not in_hh_plus(log, 0)


def test_h0_membership_is_integrality():
    rng = random.Random(4)
    for _ in range(300):
        c = [Fraction(rng.randint(-99, 99), rng.choice([1, 1, 2, 3, 9])) for _ in range(6)]
        integral = all(x.denominator % 3 for x in c)
        assert in_hh_plus(c, 0, p=3) == integral


@pytest.mark.parametrize("p,n,j", [(3, 1, 0), (3, 2, 1), (5, 1, 2), (3, 2, -1)])
def test_reduction_agrees_with_long_division(p, n, j):
    rng = random.Random(p * 100 + n * 10 + j)
    for _ in range(10):
        F = QpPoly.from_ints(p, [rng.randrange(p ** 12) for _ in range(rng.randrange(1, 4 * p ** n))], 12)
        assert reduce_mod_omega(F, n, j).equal_at(reduce_by_division(F, n, j))


def test_reduction_trivial_cases():
    p = 3
    assert reduce_mod_omega(omega_qp(p, 2, 1, 15), 2, 1).is_zero()
    X = QpPoly.from_ints(p, [0, 1], 15)
    assert reduce_mod_omega(X, 1, 0).equal_at(X.resize(p))


@pytest.mark.parametrize("p,h", [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2)])
def test_glue_round_trip(p, h):
    rng = random.Random(10 * p + h)
    n_max = 3 if p == 3 else 2
    F = random_hh_plus(rng, p, h, (h + 1) * p ** n_max)
    grid = grid_from_series(F, h, 1, n_max)
    assert av_conditions_check(grid).passed
    glued = av_glue(grid)
    assert glued.series.poly.equal_at(F.with_prec(glued.precision))
    assert glued.floor_bound >= 0
    # gluing the glued output again reproduces the grid
    again = grid_from_series(glued.series.poly, h, 1, n_max)
    for key in grid.entries:
        assert again[key].equal_at(grid[key].with_prec(glued.precision))


def test_constant_grid_glues_to_constant():
    p = 3
    c = QpPoly.from_ints(p, [7], 12)
    grid = CongruenceGrid(p, 0, 0, 0, 3, {(n, 0): c.resize(p ** n) for n in range(1, 4)})
    glued = av_glue(grid)
    assert glued.series.poly.equal_at(c.resize(len(glued.series.poly)))


def test_unit_perturbation_breaks_condition_ii():
    p, h = 3, 1
    F = random_hh_plus(random.Random(1), p, h, 2 * 27)
    grid = grid_from_series(F, h, 1, 3)
    bad = grid.perturbed(2, 2, QpPoly.from_ints(p, [1], 20))
    report = av_conditions_check(bad)
    assert report.failing() == ["ii"]
    assert (1, 2) in report.ii.details["failures"]
    with pytest.raises(GluingError) as err:
        av_glue(bad)
    assert err.value.report.failing() == ["ii"]


def test_declared_order_too_small_is_detected():
    p, n_max = 3, 4
    cap = p ** n_max
    F = QpPoly.from_rationals(p, [Fraction(1, p ** ell(i, p)) for i in range(cap)], 30)
    grid = grid_from_series(F, 0, 1, n_max)       # F lies in H_1^+ but not in H_0
    report = av_conditions_check(grid)
    assert not report.passed
    assert set(report.failing()) <= {"i", "iii"}
    assert av_conditions_check(grid_from_series(F, 1, 1, n_max)).passed


def test_monotonicity_in_h():
    p = 3
    F = random_hh_plus(random.Random(2), p, 1, 2 * 27)
    grid = grid_from_series(F, 1, 1, 3)
    for h in (1, 2, 3):
        assert av_conditions_check(grid, h).passed
    with pytest.raises(ValueError):
        av_conditions_check(grid, 0)


def test_uniqueness_examples():
    p = 3
    assert uniqueness_test(QpPoly.zeros(p, 30, 20), 1, 2, 2)
    assert not uniqueness_test(QpPoly.from_ints(p, [1], 20), 1, 2, 2)
    prod = omega_qp(p, 1, 1, 20).mul(omega_qp(p, 1, 2, 20), 20)
    assert uniqueness_test(prod, 1, 2, 1)
    assert not uniqueness_test(prod, 1, 2, 2)


def test_grid_json_round_trip():
    F = random_hh_plus(random.Random(3), 5, 1, 50)
    grid = grid_from_series(F, 1, 1, 2)
    text = grid.to_json()
    back = CongruenceGrid.from_json(text)
    assert back.to_json() == text
    assert all(back[k].equal_at(grid[k]) for k in grid.entries)


def test_hh_series_wraps_floor_bound():
    F = random_hh_plus(random.Random(5), 3, 2, 30)
    s = HhSeries(F, 2)
    assert s.in_plus() and s.floor_bound == floor_bound(F, 2)


def test_boundedness_rule_tolerates_an_accidentally_high_first_level():
    from iwasawa_lp.distributions import _bounded
    assert _bounded([2, 0, 0], 1)            # lucky extra divisibility at level 1, then a plateau
    assert not _bounded([-1, -2, -3], 1)     # linear decline: unbounded
    assert not _bounded([0, -1, -2, -3], 1)
    assert _bounded([3, 3, 2, 2], 1)
