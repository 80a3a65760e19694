import json

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fraclab import powerlaw as pl
from fraclab.errors import DegenerateError, DomainError
from fraclab.powerlaw import EtaForm, Monomial, PowerSum
from fraclab.solutions import solve
from fraclab.symmetry import (
    BOUNDARY_X0,
    DIFFUSION,
    INITIAL_T0,
    THIRD_ORDER,
    Generator,
    apply_generator,
    boundary_condition_exponent,
    boundary_line_invariance,
    initial_line_invariance,
    intersect_power_law,
    invariant_surface_residual_thm31,
    mu_leading,
    similarity_form,
)

ALPHAS = (0.3, 0.5, 0.7)


def certified(equation, params):
    out = []
    for param in params:
        for alpha in ALPHAS:
            try:
                out.append(solve(equation, param, alpha))
            except DomainError:
                pass
    return out


DIFFUSION_SOLUTIONS = certified(DIFFUSION, (1.0, 2.0, -1.0, 0.5))
THIRD_SOLUTIONS = certified(THIRD_ORDER, (1.0, 2.0, -1.0, 1.5, -4.0))


def small(s, scale=1.0, tol=1e-10):
    return pl.as_powersum(s).max_abs_coeff() <= tol * scale


def test_generator_rejects_zero():
    with pytest.raises(DegenerateError):
        Generator()


def test_generator_mappings():
    g = Generator.diffusion(1.0, 2.0, 3.0, p=2.0, alpha=0.5)
    assert g.as_dict() == {"e0": 1.0, "e1": 0.5 + 6.0, "f0": 0.0, "f1": 2.0, "g1": 6.0}
    h = Generator.third_order(1.0, 2.0, 3.0, 4.0, q=2.0, alpha=0.5)
    assert h.as_dict() == {"e0": 2.0, "e1": 1.0, "f0": 4.0, "f1": 3.0, "g1": 0.75}


def test_apply_generator_examples():
    p, alpha, c = 2.0, 0.5, 1.3
    theta = Monomial(c, 2 / p, -alpha / p)
    assert apply_generator(Generator.X1(alpha), theta).is_zero
    assert apply_generator(Generator.X2(p), theta).is_zero
    assert apply_generator(Generator.X2(3.0), pl.X) == PowerSum(Monomial(-1.0, 1.0))


@pytest.mark.parametrize("sol", DIFFUSION_SOLUTIONS, ids=lambda s: f"p{s.param}-a{s.alpha}")
def test_diffusion_solutions_are_invariant(sol):
    for gen in (Generator.X1(sol.alpha), Generator.X2(sol.param)):
        assert small(apply_generator(gen, sol.monomial), sol.constant)


@pytest.mark.parametrize("sol", THIRD_SOLUTIONS, ids=lambda s: f"q{s.param}-a{s.alpha}")
def test_third_order_solutions_are_invariant(sol):
    for gen in (Generator.Y1(sol.param), Generator.Y2(sol.param, sol.alpha)):
        assert small(apply_generator(gen, sol.monomial), sol.constant)


def test_grids_are_not_empty():
    assert len(DIFFUSION_SOLUTIONS) >= 6
    assert len(THIRD_SOLUTIONS) >= 4


@given(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.5, 3),
    st.floats(-4, 4).filter(lambda v: abs(v) >= 1e-3),
)
def test_scaling_equivariance(e0, e1, f1, g1, c, lam):
    # keep λ·coefficient clear of underflow, which would zero the generator
    assume(max(map(abs, (e0, e1, f1, g1))) >= 1e-6)
    gen = Generator(e0, e1, 0.0, f1, g1)
    theta = PowerSum([Monomial(c, 1.5, -0.25), Monomial(2.0, 0.0, 1.0)])
    assert apply_generator(gen.scaled(lam), theta).allclose(lam * apply_generator(gen, theta), 1e-12, 1e-300)


# ---- line invariance -------------------------------------------------------------


def test_initial_line_invariance():
    assert initial_line_invariance(Generator(e1=1.0, f1=1.0)).required_zero == ()
    r = initial_line_invariance(Generator.third_order(1, 0, 1, 1, q=2, alpha=0.5))
    assert r.required_zero == ("c4",) and r.admissible
    assert initial_line_invariance(Generator(e1=1.0, f1=2.0, g1=3.0)).admissible


def test_boundary_line_invariance():
    r = boundary_line_invariance(Generator.diffusion(1, 1, 1, p=2, alpha=0.5))
    assert r.required_zero == ("c1",)
    r = boundary_line_invariance(Generator.third_order(1, 1, 1, 0, q=2, alpha=0.5))
    assert r.required_zero == ("c2",)
    assert boundary_line_invariance(Generator(e1=1.0)).required_zero == ()


def test_translation_only_is_not_admissible():
    assert not boundary_line_invariance(Generator(e0=1.0)).admissible
    assert not initial_line_invariance(Generator(f0=2.0)).admissible


def test_constraint_report_json():
    r = boundary_line_invariance(Generator.diffusion(1, 1, 1, p=2, alpha=0.5))
    assert json.loads(json.dumps(r.to_json())) == {"required_zero": ["c1"], "admissible": True}


coeff = st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3)


@given(coeff, coeff, coeff, coeff, st.sampled_from([0.5, 1.0, 2.0]))
def test_constraint_soundness(c1, c2, c3, c4, q):
    gen = Generator.third_order(c1, c2, c3, c4, q=q, alpha=0.5)
    names = initial_line_invariance(gen).required_zero + boundary_line_invariance(gen).required_zero
    fixed = gen.zeroed(names)
    assert initial_line_invariance(fixed).required_zero == ()
    assert boundary_line_invariance(fixed).required_zero == ()


# ---- boundary exponents ------------------------------------------------------------


def test_boundary_exponents_diffusion():
    gen = Generator.diffusion(0.0, 1.0, 1.0, p=2.0, alpha=0.5)
    assert boundary_condition_exponent(gen, BOUNDARY_X0) == 2.0
    g = Generator.diffusion(0.0, 0.7, 1.3, p=1.5, alpha=0.4)
    assert boundary_condition_exponent(g, INITIAL_T0) == pytest.approx(2 * 1.3 / (0.2 * 0.7 + 1.5 * 1.3))
    g0 = Generator.diffusion(0.0, 0.0, 1.0, p=1.5, alpha=0.4)
    assert boundary_condition_exponent(g0, INITIAL_T0) == pytest.approx(2 / 1.5)
    with pytest.raises(DegenerateError):
        boundary_condition_exponent(g0, BOUNDARY_X0)


@pytest.mark.parametrize("c1, c3, q, alpha", [(1.0, 1.0, 2.0, 0.5), (0.3, 2.0, -4.0, 0.7), (2.0, 0.5, 1.5, 0.3)])
def test_boundary_exponent_third_order(c1, c3, q, alpha):
    gen = Generator.third_order(c1, 0.0, c3, 0.0, q=q, alpha=alpha)
    assert boundary_condition_exponent(gen, BOUNDARY_X0) == pytest.approx(
        (3 * c1 - alpha * c3) / (c3 * q), rel=1e-15
    )


def test_boundary_exponent_needs_invariant_lines():
    with pytest.raises(DomainError):
        boundary_condition_exponent(Generator.diffusion(1.0, 1.0, 1.0, p=2, alpha=0.5), BOUNDARY_X0)


def test_matching_of_the_two_diffusion_ansatze():
    # boundary exponent of initial data at c2 = 0 reproduces x^(2/p);
    # X1 and X2 together pin t^(-α/p)
    p, alpha = 2.0, 0.5
    x_exp = boundary_condition_exponent(Generator.diffusion(0, 0, 1, p=p, alpha=alpha), INITIAL_T0)
    a, b = intersect_power_law(Generator.X1(alpha), Generator.X2(p))
    assert (a, b) == pytest.approx((2 / p, -alpha / p))
    assert x_exp == pytest.approx(a)


# ---- similarity forms --------------------------------------------------------------


def test_similarity_form_x1():
    alpha = 0.5
    form = similarity_form(Generator.X1(alpha))
    assert form.degenerate_axis is None
    assert form.u_t_exponent == 0.0
    assert form.z_exponent == (1.0, -alpha / 2)
    # z^(2/α) reparametrization: F(z) = z^k with z = x t^(-α/2) is the family f(x^(2/α) t^-1)
    for k in (0.5, 1.0, 4.0):
        assert apply_generator(Generator.X1(alpha), form.surface(k)).is_zero
    printed_z = Monomial(1.0, 2 / alpha, -1.0)
    assert apply_generator(Generator.X1(alpha), printed_z).is_zero


def test_similarity_form_x2_and_y1():
    p = 2.0
    form = similarity_form(Generator.X2(p))
    assert form.degenerate_axis == "t" and form.u_x_exponent == 2 / p
    assert form.u_t_exponent is None
    q = 1.5
    form = similarity_form(Generator.Y1(q))
    assert form.degenerate_axis == "t" and form.u_x_exponent == pytest.approx(3 / q)


@given(st.lists(st.tuples(st.floats(-3, 3), st.sampled_from([0.0, 0.5, 1.0, 2.0])), min_size=1, max_size=3))
def test_degenerate_form_accepts_any_profile(terms):
    form = similarity_form(Generator.X2(1.5))
    g = PowerSum(Monomial(c, 0, b) for c, b in terms)
    assert apply_generator(Generator.X2(1.5), form.surface(profile=g)).allclose(0, 0, 1e-12)


def test_similarity_form_time_only():
    form = similarity_form(Generator.Y2(2.0, 0.5))
    assert form.degenerate_axis == "x" and form.u_t_exponent == -0.25
    assert apply_generator(Generator.Y2(2.0, 0.5), form.surface(profile=pl.X * pl.X)).is_zero


def test_similarity_form_errors():
    with pytest.raises(DegenerateError):
        similarity_form(Generator(g1=1.0))
    with pytest.raises(DomainError):
        similarity_form(Generator(e0=1.0, e1=1.0))


def test_similarity_form_json():
    d = similarity_form(Generator.X1(0.5)).to_json()
    assert set(d) >= {"u_t_exponent", "z_exponent", "degenerate_axis"}


@pytest.mark.parametrize("sol", DIFFUSION_SOLUTIONS + THIRD_SOLUTIONS, ids=str)
def test_solution_exponents_are_the_intersection(sol):
    if sol.equation == DIFFUSION:
        a, b = intersect_power_law(Generator.X1(sol.alpha), Generator.X2(sol.param))
    else:
        a, b = intersect_power_law(Generator.Y1(sol.param), Generator.Y2(sol.param, sol.alpha))
    assert (a, b) == pytest.approx((sol.x_exp, sol.t_exp), rel=1e-14)


def test_intersection_degenerate():
    with pytest.raises(DegenerateError):
        intersect_power_law(Generator.X2(2.0), Generator.X2(2.0).scaled(3.0))


# ---- Theorem 3.1 residual -------------------------------------------------------------


@pytest.mark.parametrize("sol", DIFFUSION_SOLUTIONS, ids=str)
def test_thm31_agrees_with_apply_generator(sol):
    for gen in (Generator.X1(sol.alpha), Generator.X2(sol.param)):
        r = invariant_surface_residual_thm31(gen, sol.monomial, DIFFUSION, sol.param, sol.alpha, outer="rl")
        assert small(r, sol.constant)
        if sol.param > 0:
            r = invariant_surface_residual_thm31(gen, sol.monomial, DIFFUSION, sol.param, sol.alpha)
            assert small(r, sol.constant)


@pytest.mark.parametrize("sol", THIRD_SOLUTIONS, ids=str)
def test_thm31_third_order(sol):
    for gen in (Generator.Y1(sol.param), Generator.Y2(sol.param, sol.alpha)):
        for outer in ("caputo", "rl"):
            r = invariant_surface_residual_thm31(gen, sol.monomial, THIRD_ORDER, sol.param, sol.alpha, outer)
            assert small(r, sol.constant)


def test_thm31_caputo_outer_loses_constant_in_time_terms():
    # p = -1: g(ν) has t-exponent 0, which the Caputo outer operator annihilates
    sol = solve(DIFFUSION, -1.0, 0.5)
    r = invariant_surface_residual_thm31(Generator.X1(0.5), sol.monomial, DIFFUSION, -1.0, 0.5)
    assert not small(r, sol.constant)


def test_thm31_non_solution_differs():
    nu = Monomial(1.0, 1.0, 0.5)
    gen = Generator.X1(0.5)
    thm = invariant_surface_residual_thm31(gen, nu, DIFFUSION, 2.0, 0.5)
    assert not thm.allclose(apply_generator(gen, nu), 1e-6)
    # X2 has no ∂t part, so the two conditions coincide for any ν
    x2 = Generator.X2(2.0)
    assert invariant_surface_residual_thm31(x2, pl.X, DIFFUSION, 2.0, 0.5) == apply_generator(x2, pl.X)


# ---- Lemma 2.1 ----------------------------------------------------------------------


@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([0.25, 0.5, 0.75]))
def test_mu_vanishes_for_linear_eta(a, b, alpha):
    assert mu_leading(EtaForm.linear(a * pl.X, b * pl.T), alpha).is_zero


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_mu_for_quadratic_eta(alpha):
    mu = mu_leading(EtaForm({2: PowerSum.const(1.0)}), alpha)
    coeff = mu.coefficients[1]
    expected = -1.0 / float(mpmath.gamma(3 - alpha))
    assert coeff.coeff_of(0, 2 - alpha) == pytest.approx(expected, rel=1e-12)
    assert mu_leading(EtaForm(), alpha).is_zero


def test_mu_cubic_and_limit():
    mu = mu_leading(EtaForm({3: pl.X}), 0.5)
    assert set(mu.coefficients) == {2}
    with pytest.raises(DomainError):
        mu_leading(EtaForm({4: pl.ONE}), 0.5)
