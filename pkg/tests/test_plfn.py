import json
from fractions import Fraction

import pytest

from iwasawa_lp.forms import BUILTIN
from iwasawa_lp.iwasawa_algebra import LambdaCycElement, mu_lambda, mu_lambda_scan
from iwasawa_lp.modular_symbols import algebraic_l_value, p_stabilize
from iwasawa_lp.padic_core import (CycloScalar, PadicCharacter, PadicScalar, PrecisionProfile, QpPoly,
                                   finite_characters)
from iwasawa_lp.plfn import (InadmissibleError, MazurTateElement, PadicLFunction, branch_sign,
                             build_lp_finite_slope, build_lp_ordinary, check_interpolation,
                             euler_factor, euler_polynomial, forced_condition_report, mazur_tate,
                             mellin_sign, norm_compatibility_check, remove_euler_factors,
                             stabilize_pair)
from oracles import point_count_ap


@pytest.fixture(scope="module")
def e11_syms():
    return BUILTIN["11a"].symbols()


@pytest.fixture(scope="module")
def e11_forms(e11_syms):
    return stabilize_pair(e11_syms, 3, "unit")


@pytest.fixture(scope="module")
def e11_L(e11_forms):
    return build_lp_ordinary(e11_forms, 4, PrecisionProfile(3, cap_n=12))


@pytest.fixture(scope="module")
def delta_forms():
    return stabilize_pair(BUILTIN["Delta"].symbols(), 3, "small")


@pytest.fixture(scope="module")
def delta_L(delta_forms):
    return build_lp_finite_slope(delta_forms, 2, 4, PrecisionProfile(3, cap_n=30))


def _min_valuation(theta: MazurTateElement, form) -> int:
    alpha = form.alpha_padic(60)
    return min(v.embed(alpha).valuation for vals in theta.values.values() for v in vals if not v.is_zero())


# ---------------------------------------------------------------------------
# conventions

def test_sign_conventions():
    assert [mellin_sign(j) for j in (1, 2, 3, 4)] == [1, -1, 1, -1]
    assert [branch_sign(i) for i in (0, 1, 2, 3)] == [-1, 1, -1, 1]


# ---------------------------------------------------------------------------
# Mazur-Tate layers

@pytest.mark.parametrize("label,root,n_top", [("11a", "unit", 4), ("Delta", "small", 3)])
def test_distribution_relation_holds_exactly(label, root, n_top):
    syms = BUILTIN[label].symbols()
    for sym in syms.values():
        form = p_stabilize(sym, 3, root)
        layers = {n: mazur_tate(form, n) for n in range(1, n_top + 1)}
        for n in range(1, n_top):
            check = norm_compatibility_check(layers[n + 1], layers[n])
            assert check.ok and not check.defect


def test_perturbed_layer_has_a_localized_defect(e11_forms):
    form = e11_forms[1]
    lower, upper = mazur_tate(form, 2), mazur_tate(form, 3)
    values = {a: list(v) for a, v in upper.values.items()}
    values[4][0] = values[4][0] + 1
    bad = MazurTateElement(upper.p, upper.n, upper.sign, values)
    check = norm_compatibility_check(bad, lower)
    assert not check.ok
    assert set(check.defect) == {(4 % 9, 0)}


def test_wrong_root_on_one_layer_breaks_compatibility_everywhere(delta_forms):
    form = delta_forms[1]
    lower, upper = mazur_tate(form, 1), mazur_tate(form, 2)
    # the other root is the Galois conjugate of the exact layer
    swapped = MazurTateElement(upper.p, upper.n, upper.sign,
                               {a: [v.conjugate() for v in vals] for a, vals in upper.values.items()})
    check = norm_compatibility_check(swapped, lower)
    assert not check.ok
    assert {a for a, _ in check.defect} == set(lower.values)


def test_ordinary_layers_are_integral(e11_forms):
    for form in e11_forms.values():
        assert all(_min_valuation(mazur_tate(form, n), form) >= 0 for n in (1, 2, 3))


def test_slope_two_layers_lose_at_most_the_slope_per_level(delta_forms):
    form = delta_forms[1]
    vals = [_min_valuation(mazur_tate(form, n), form) for n in (1, 2, 3, 4)]
    assert all(b >= a - 2 for a, b in zip(vals, vals[1:]))
    assert vals[-1] < vals[0]            # the denominators really grow


def test_mazur_tate_relabel_moves_values(e11_forms):
    theta = mazur_tate(e11_forms[1], 2)
    moved = theta.relabel(2)
    assert moved.value(2) == theta.value(1)
    assert moved.value(4 * 2) == theta.value(4)


# ---------------------------------------------------------------------------
# the ordinary L-function of 11a

def test_ordinary_lp_is_integral_with_invariants(e11_L):
    assert e11_L.slope_class == "ordinary"
    assert all(b >= 0 for b in e11_L.floor_bounds)
    element = e11_L.element
    assert isinstance(element, LambdaCycElement)
    invariants = mu_lambda(element)
    assert invariants == [mu_lambda_scan(b) for b in element.branches]


@pytest.mark.parametrize("m", [0, 1, 2])
def test_ordinary_interpolation_at_small_conductors(e11_L, e11_forms, m):
    prof = PrecisionProfile(3, cap_n=12, cyclo_level=3)
    phis = [phi for phi in finite_characters(3, 3) if phi.conductor_exponent == m] or [PadicCharacter(3, 0)]
    for phi in phis:
        report = check_interpolation(e11_L, e11_forms, 1, phi, prof)
        assert report.verdict == "pass", report.to_record()
        assert report.certified_precision >= 3


def test_branch_selection(e11_L, e11_forms):
    """A character with tame part omega^i reads branch i only."""
    prof = PrecisionProfile(3, cap_n=12)
    branches = list(e11_L.branches)
    branches[0] = branches[0] + QpPoly.from_ints(3, [1], branches[0].prec)
    bad = PadicLFunction(3, "ordinary", 0, 1, 1, 4, tuple(branches), e11_L.reports)
    for phi in finite_characters(3, 2):
        verdict = check_interpolation(bad, e11_forms, 1, phi, prof).verdict
        expected = "fail" if (1 + phi.tame) % 2 == 0 else "pass"
        assert verdict == expected


def test_ordinary_paths_agree(e11_forms, e11_L):
    glued = build_lp_finite_slope(e11_forms, 0, 4, PrecisionProfile(3, cap_n=12))
    assert glued.slope_class == "ordinary"
    for a, b in zip(glued.branches, e11_L.branches):
        assert a.equal_at(b.resize(len(a)))


def test_ordinary_builder_refuses_positive_slope(delta_forms):
    with pytest.raises(InadmissibleError):
        build_lp_ordinary(delta_forms, 2)


def test_serialization_round_trip(e11_L, delta_L):
    for L in (e11_L, delta_L):
        text = L.to_json()
        back = PadicLFunction.from_record(json.loads(text))
        assert back.to_json() == text
        assert all(x.equal_at(y) for x, y in zip(back.branches, L.branches))


# ---------------------------------------------------------------------------
# the slope-2 L-function of Delta

def test_finite_slope_lp_builds_and_interpolates(delta_L, delta_forms):
    assert delta_L.slope_class == "finite_slope" and delta_L.h == 2
    assert all(r.passed for r in delta_L.reports)
    prof = PrecisionProfile(3, cap_n=30, cyclo_level=2)
    passed = 0
    for j in (1, 2, 3):
        for phi in finite_characters(3, 2):
            report = check_interpolation(delta_L, delta_forms, j, phi, prof)
            assert report.verdict == "pass", report.to_record()
            passed += 1
    assert passed == 18


def test_outside_the_window_is_indeterminate(delta_L, delta_forms):
    report = check_interpolation(delta_L, delta_forms, 6, PadicCharacter(3, 0, 1, 0, 0))
    assert report.verdict == "indeterminate"
    assert report.certified_precision is None


def test_shifted_window_reaches_the_centre(delta_forms):
    L = build_lp_finite_slope(delta_forms, 2, 3, PrecisionProfile(3, cap_n=30), l=5)
    prof = PrecisionProfile(3, cap_n=30)
    for phi in (PadicCharacter(3, 0), PadicCharacter(3, 0, 1, 0, 0)):
        assert check_interpolation(L, delta_forms, 6, phi, prof).verdict == "pass"


def test_declared_h_below_slope(delta_forms):
    with pytest.raises(InadmissibleError):
        build_lp_finite_slope(delta_forms, 1, 3)
    reports = forced_condition_report(delta_forms, 1, 4, PrecisionProfile(3, cap_n=30))
    assert any(not r.passed for r in reports)
    assert all(set(r.failing()) <= {"i", "iii"} for r in reports)


def test_window_must_stay_critical(delta_forms):
    with pytest.raises(InadmissibleError):
        build_lp_finite_slope(delta_forms, 2, 2, l=10)


# ---------------------------------------------------------------------------
# Euler factors

def test_euler_factor_examples(e11_syms):
    assert euler_factor(e11_syms[1], 1, PadicCharacter(3, 0)) == 2
    phi9 = next(phi for phi in finite_characters(3, 2) if phi.conductor == 9)
    assert euler_factor(e11_syms[1], 1, phi9) == 1
    delta = BUILTIN["Delta"].symbols()[1]
    assert euler_factor(delta, 1, phi9) == Fraction(1, 252 ** 2)
    assert euler_factor(delta, 3, phi9) == Fraction(81, 252 ** 2)
    # a_5(11a) = 1: the trivial-zero factor is a plain zero, not an error
    assert euler_factor(e11_syms[1], 1, PadicCharacter(5, 0)) == 0


def test_euler_factor_at_the_unit_root_is_a_unit(e11_forms):
    form = e11_forms[1]
    e = euler_factor(form, 1, None)
    assert e.embed(form.alpha_padic(10)).valuation == 0


def test_parity_mismatch_gives_zero(e11_syms):
    prof = PrecisionProfile(3, cap_n=10, cyclo_level=2)
    even = [phi for phi in finite_characters(3, 2) if phi.parity == 1]
    for phi in even:
        # j = 1 with an even character pairs with the plus symbol; the minus one gives 0
        assert algebraic_l_value(e11_syms[-1], 1, phi, prof).is_zero()


# ---------------------------------------------------------------------------
# Euler polynomials

def test_euler_polynomial_examples():
    assert euler_polynomial(2, -2).coefficients == (1, 2, 2)
    assert euler_polynomial(7, 0, 1, 4).coefficients == (1, 0, 7 ** 3)


@pytest.mark.parametrize("q", [2, 3, 7])
def test_euler_polynomial_matches_local_factor(q):
    a_q = point_count_ap(q)
    P = euler_polynomial(q, a_q)
    for s in (1, 2, 3):
        assert P.specialize(s) == P.classical_factor(s)
        # the inverse local factor counts points: q^s-power expansion of 1 - a q^-s + q^(1-2s)
        assert P.classical_factor(s) == 1 - Fraction(a_q, q ** s) + Fraction(q, q ** (2 * s))
    assert P.classical_factor(1) * q == q + 1 - a_q   # #E(F_q) / q


def test_remove_identity_and_refusals(e11_L, e11_forms):
    assert remove_euler_factors(e11_L, 1, e11_forms) is e11_L
    for r in (4, 3, 11, 22):
        with pytest.raises(ValueError):
            remove_euler_factors(e11_L, r, e11_forms)


@pytest.mark.parametrize("r", [2, 7, 14])
def test_removal_multiplies_evaluations(e11_L, e11_forms, e11_syms, r):
    Lr = remove_euler_factors(e11_L, r, e11_forms)
    primes = [q for q in (2, 7) if r % q == 0]
    polys = [euler_polynomial(q, e11_syms[1].a(q)) for q in primes]
    for phi in finite_characters(3, 2):
        chi = PadicCharacter(3, 1, phi.tame, phi.wild_level, phi.wild_exp)
        before, _ = e11_L.evaluate(chi)
        after, cert = Lr.evaluate(chi)
        factor = CycloScalar.from_scalar(1, 3, 12, phi.wild_level)
        for P in polys:
            factor = factor * P.specialize(1, phi, prec=12)
        assert after.equal_at(before * factor, min(cert, 10))
        # re-multiplication: dividing by a unit factor recovers L
        if factor.valuation() == 0:
            assert (after * _inverse(factor)).equal_at(before, min(cert, 10))


def _inverse(x: CycloScalar) -> CycloScalar:
    """Inverse of a unit by Newton iteration started from its residue (the value at zeta = 1)."""
    one = CycloScalar.from_scalar(1, x.p, x.prec, x.level)
    residue = sum((x.coefficient(i) for i in range(1, len(x.coeffs))), x.constant())
    inv = CycloScalar.from_scalar(residue.inverse()) * one
    for _ in range(12):
        inv = inv * (one + one - x * inv)
    return inv
