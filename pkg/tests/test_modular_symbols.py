from fractions import Fraction

import pytest

from iwasawa_lp.modular_symbols import (BUILTIN, INF, NotFoundError, NotSeparatedError, SymbolError,
                                        algebraic_l_value, build_space, charpoly, find_eigensymbol,
                                        hecke_operator, load_form, mat_mul, p_stabilize,
                                        twisted_value_by_operator)
from iwasawa_lp.padic_core import PrecisionProfile, finite_characters
from oracles import (cusp_form_dimension, curve_11a_coefficients, l_value_11a_at_1, period_integral,
                     point_count_ap, ramanujan_tau, real_period_11a)


@pytest.fixture(scope="module")
def e11():
    return BUILTIN["11a"].symbols()


@pytest.fixture(scope="module")
def delta():
    return BUILTIN["Delta"].symbols()


@pytest.mark.parametrize("N,k", [(11, 2), (14, 2), (15, 2), (1, 12), (23, 2), (37, 2), (2, 8), (11, 4), (1, 24)])
def test_cuspidal_dimension_matches_formula(N, k):
    space = build_space(N, k)
    assert space.cuspidal_dimension == 2 * cusp_form_dimension(N, k)
    plus, minus = space.sign_dimensions()
    assert plus - minus in (0, 1, -1)


@pytest.mark.parametrize("ell", [2, 3, 5, 7, 13])
def test_11a_eigenvalues_match_point_counts(e11, ell):
    for sym in e11.values():
        assert sym.a(ell) == point_count_ap(ell)


def test_delta_eigenvalues_match_ramanujan_tau(delta):
    tau = ramanujan_tau(11)
    for ell in (2, 3, 5, 7, 11):
        assert delta[1].a(ell) == tau[ell]


@pytest.mark.parametrize("N,k", [(11, 2), (1, 12), (23, 2), (15, 2)])
def test_hecke_operators_commute(N, k):
    space = build_space(N, k)
    T2, T3, T5 = (hecke_operator(space, ell) for ell in (2, 3, 5))
    assert mat_mul(T2, T3) == mat_mul(T3, T2)
    assert mat_mul(T3, T5) == mat_mul(T5, T3)


def test_hecke_charpoly_on_level_11():
    space = build_space(11, 2)
    # eisenstein eigenvalue 1 + ell, cusp form eigenvalue a_ell, each with both signs
    assert charpoly(hecke_operator(space, 2)) == [Fraction(c) for c in (-12, -8, 1, 1)]
    assert charpoly(hecke_operator(space, 3)) == [Fraction(c) for c in (-4, -7, -2, 1)]


def test_eigensymbols_are_eigen(e11, delta):
    for syms in (e11, delta):
        for s, sym in syms.items():
            assert sym.sign == s
            assert sym.check()


def test_eigensymbol_errors():
    space = build_space(23, 2)
    with pytest.raises(NotSeparatedError):
        find_eigensymbol(space, {}, 1)
    with pytest.raises(NotFoundError):
        find_eigensymbol(space, {2: 5}, 1)
    with pytest.raises(SymbolError):
        build_space(11, 3)
    with pytest.raises(SymbolError):
        build_space(11, 2, character="quadratic")


def test_periods_match_complex_integration(e11):
    """Phi^+ and Phi^- are the real and imaginary parts of the period map up to constants."""
    a = curve_11a_coefficients(600)
    ratios_re, ratios_im = [], []
    for g in [(1, 0, 11, 1), (2, 1, 11, 6), (3, 1, 11, 4), (4, 1, 11, 3), (5, 2, 22, 9), (7, 3, 44, 19)]:
        z = period_integral(a, g)
        plus = e11[1].value([1], INF, Fraction(g[0], g[2]))
        minus = e11[-1].value([1], INF, Fraction(g[0], g[2]))
        if plus:
            ratios_re.append(z.real / float(plus))
        else:
            assert abs(z.real) < 1e-8
        if minus:
            ratios_im.append(z.imag / float(minus))
        else:
            assert abs(z.imag) < 1e-8
    assert len(ratios_re) >= 2 and len(ratios_im) >= 2
    assert max(ratios_re) - min(ratios_re) < 1e-8
    assert max(ratios_im) - min(ratios_im) < 1e-8


def test_central_value_normalization(e11):
    """Phi^+{oo,0} = L(E,1)/Omega_b for the package period Omega_b; rescaled to the Neron period it is 1/5."""
    a = curve_11a_coefficients(600)
    g = (2, 1, 11, 6)
    omega_b = period_integral(a, g).real / float(e11[1].value([1], INF, Fraction(g[0], g[2])))
    L1, omega = l_value_11a_at_1(), real_period_11a()
    central = e11[1].value([1], INF, Fraction(0))
    assert central == 1
    assert abs(float(central) * omega_b - L1) < 1e-10
    assert abs(L1 / omega - 0.2) < 1e-10
    assert abs(float(central) * omega_b / omega - 0.2) < 1e-10


def test_minus_symbol_vanishes_on_the_imaginary_axis(e11, delta):
    assert e11[-1].value([1], Fraction(0), INF) == 0
    for j in range(1, 12):
        P = [0] * 11
        P[j - 1] = 1
        sym = delta[(-1) ** (j - 1) * -1]
        assert sym.value(P, Fraction(0), INF) == 0


def test_delta_odd_critical_values_are_nonzero_rationals(delta):
    # odd j pair with the plus symbol; Delta has no vanishing critical values
    vals = [delta[1].value([0] * (j - 1) + [1] + [0] * (11 - j), Fraction(0), INF) for j in (1, 3, 5)]
    assert all(v != 0 for v in vals)
    assert all(isinstance(v, Fraction) for v in vals)


@pytest.mark.parametrize("label,p", [("11a", 3), ("11a", 5), ("Delta", 3)])
def test_twisted_sum_agrees_with_twisting_operator(label, p):
    syms = BUILTIN[label].symbols()
    k = BUILTIN[label].k
    prof = PrecisionProfile(p, cap_n=12, cyclo_level=2)
    for phi in finite_characters(p, 2):
        for j in range(1, min(k - 1, 3) + 1):
            lhs = algebraic_l_value(syms, j, phi, prof)
            rhs = twisted_value_by_operator(syms, j, phi, prof)
            assert lhs.equal_at(rhs, 10)


@pytest.mark.parametrize("label,p,root", [("11a", 3, "unit"), ("11a", 5, "small"), ("Delta", 3, "small"),
                                          ("Delta", 3, "large"), ("Delta", 5, "small")])
def test_stabilization_is_up_eigen(label, p, root):
    syms = BUILTIN[label].symbols()
    form = p_stabilize(syms[1], p, root)
    assert form.alpha * form.alpha == form.alpha * int(form.a_p) - form.c
    w = form.k - 2
    for r in (Fraction(0), Fraction(1, 3), Fraction(2, 7)):
        for i in (0, w):
            P = [0] * (w + 1)
            P[i] = 1
            assert form.up_defect(P, r, INF).is_zero()


def test_stabilization_slopes_and_refusals(delta, e11):
    assert p_stabilize(delta[1], 3, "small").slope == 2
    assert p_stabilize(delta[1], 3, "large").slope == 9
    assert p_stabilize(e11[1], 3, "unit").slope == 0
    with pytest.raises(SymbolError):
        p_stabilize(delta[1], 3, "unit")
    with pytest.raises(SymbolError):
        p_stabilize(e11[1], 11)


def test_load_form_from_json(tmp_path):
    path = tmp_path / "f.json"
    path.write_text('{"label": "e11", "N": 11, "k": 2, "eigenvalues": {"2": "-2"}}')
    fx = load_form(str(path))
    assert fx.N == 11 and fx.eigenvalues == {2: -2}
    with pytest.raises(FileNotFoundError):
        load_form(str(tmp_path / "missing.json"))
