import random
from fractions import Fraction

import pytest

from paramflow.boundary import BoundaryFactor, FactoredBoundary
from paramflow.homeq import (
    HomEquation,
    NoSolution,
    ResidueObstruction,
    SpecialSolution,
    build_homological,
    fibered_locus_generators,
    search_clearing_exponent,
    special_solve,
    verify_special,
)
from paramflow.rational import gr
from paramflow.series import (
    MultiSeries,
    derivative,
    integrate_x,
    mul,
    sub,
    unit_inverse,
)


def xsq_boundary(order=10):
    """f = x^2 over one parameter."""
    return FactoredBoundary([BoundaryFactor(MultiSeries.variable(0, 2, order), 2)])


def central_boundary(order=10):
    """f = (x2 - x*x1)^2, the multiplicity-two non-fibered example."""
    fac = MultiSeries(3, order, {(0, 0, 1): 1, (1, 1, 0): -1})
    return FactoredBoundary([BoundaryFactor(fac, 2)])


def test_build_homological_simple():
    b = xsq_boundary()
    one = MultiSeries.constant(1, 2, 10)
    u2 = unit_inverse(MultiSeries(2, 10, {(0, 0): 1, (2, 0): 1}))
    eq = build_homological(one, u2, b)
    # A = 1/u1 - 1/u2 = -x^2
    assert eq.numerator == MultiSeries(2, 10, {(2, 0): -1})
    assert eq.p_series == MultiSeries.constant(1, 2, 10)
    assert eq.q_series == MultiSeries.variable(0, 2, 10)
    assert eq.margin == 0
    res = special_solve(eq)
    assert isinstance(res, SpecialSolution)
    assert res.certified_order == 10
    assert verify_special(eq, res.beta, res.certified_order)


def test_rejects_non_units():
    b = xsq_boundary()
    x = MultiSeries.variable(0, 2, 10)
    with pytest.raises(Exception):
        build_homological(x, MultiSeries.constant(1, 2, 10), b)


def test_lambda_invariant():
    b = central_boundary()
    assert HomEquation(b, MultiSeries.constant(1, 3, 10)).lambda_invariant() == gr(1)
    assert HomEquation(b, MultiSeries(3, 10, {(0, 1, 1): 1})).lambda_invariant() == gr(0)
    assert HomEquation(b, MultiSeries(3, 10, {(2, 0, 0): 1})).lambda_invariant() is None


def test_central_refutes_constant():
    eq = HomEquation(central_boundary(), MultiSeries.constant(1, 3, 10))
    res = special_solve(eq)
    assert isinstance(res, NoSolution) and res.refuted
    assert res.witness == (0, 0, 0)


def test_central_refutes_ideal_member_with_bad_derivative():
    # A = x*x1 lies in (x1, x2) but dA/dx = x1 is not divisible by the factor
    eq = HomEquation(central_boundary(), MultiSeries(3, 10, {(1, 1, 0): 1}))
    res = special_solve(eq)
    assert isinstance(res, NoSolution) and res.refuted


def test_refutation_is_monotone_in_order():
    a = MultiSeries(3, 10, {(1, 1, 0): 1})
    for order in (3, 6, 9):
        eq = HomEquation(central_boundary(), a)
        res = special_solve(eq, order)
        assert isinstance(res, NoSolution) and res.refuted


def test_central_solves_parameter_product():
    eq = HomEquation(central_boundary(), MultiSeries(3, 10, {(0, 1, 1): 1}))
    res = special_solve(eq)
    assert isinstance(res, SpecialSolution)
    assert verify_special(eq, res.beta, res.certified_order)


def residue_free_numerator(rng, boundary, order):
    """A = integral of (factor * V) dx + parameter-only part: by design
    dA/dx is divisible by the factor and A has no pure-x terms."""
    fac = boundary.factors[0].series
    terms = {}
    for _ in range(5):
        exp = [0, 0, 0]
        for _ in range(rng.randrange(order - 3)):
            exp[rng.randrange(3)] += 1
        terms[tuple(exp)] = gr(Fraction(rng.randrange(-5, 6), rng.randrange(1, 4)))
    v = MultiSeries(3, order, terms)
    a0_terms = {(0, i, j): gr(rng.randrange(-4, 5))
                for i in range(3) for j in range(3) if i + j > 0}
    a0 = MultiSeries(3, order, a0_terms)
    return integrate_x(mul(fac, v)).truncate(order) + a0


def test_central_family_is_special():
    rng = random.Random(606)
    b = central_boundary()
    for _ in range(6):
        a = residue_free_numerator(rng, b, 10)
        res = special_solve(HomEquation(b, a), 8)
        assert isinstance(res, SpecialSolution), a
        assert res.certified_order == 8


def test_gamma_level_identity():
    # reconstruct gamma = beta * radical and check the underived equation
    # gamma * df/dx - f * dgamma/dx = A * f
    rng = random.Random(99)
    b = central_boundary(10)
    a = residue_free_numerator(rng, b, 10)
    res = special_solve(HomEquation(b, a))
    assert isinstance(res, SpecialSolution)
    rad = b.nonfibered_radical().with_order(14)
    f = b.product().with_order(14)
    gamma = mul(res.beta.with_order(14), rad)
    lhs = sub(mul(gamma, derivative(f, 0)), mul(f, derivative(gamma, 0)))
    rhs = mul(a, f)
    assert sub(lhs, rhs).truncate(res.certified_order).is_zero()


def test_multiplicity_one_direct_integration():
    # boundary x: the equation collapses to -beta' = A/x
    b = FactoredBoundary([BoundaryFactor(MultiSeries.variable(0, 2, 8))])
    one = MultiSeries.constant(1, 2, 8)
    u2 = unit_inverse(MultiSeries(2, 8, {(0, 0): 1, (1, 0): 2}))
    eq = build_homological(one, u2, b)  # A = -2x
    assert eq.rhs == MultiSeries.constant(-2, 2, 8)
    res = special_solve(eq)
    assert isinstance(res, SpecialSolution)
    assert res.beta == MultiSeries(2, 9, {(1, 0): 2})


def test_multiplicity_one_obstruction():
    b = FactoredBoundary([BoundaryFactor(MultiSeries.variable(0, 2, 8))])
    with pytest.raises(ResidueObstruction) as ei:
        HomEquation(b, MultiSeries.variable(1, 2, 8))
    assert ei.value.factor.series == MultiSeries.variable(0, 2, 8)


def test_fibered_factor_drops_out():
    # fibered factors scale the displacement but not the equation shape
    x = MultiSeries.variable(0, 3, 10)
    p1 = MultiSeries.variable(1, 3, 10)
    b = FactoredBoundary([BoundaryFactor(x, 2), BoundaryFactor(p1, 3)])
    eq = HomEquation(b, MultiSeries(3, 10, {(2, 0, 0): -1}))
    assert eq.p_series == MultiSeries.constant(1, 3, 10)
    assert eq.q_series == x
    assert isinstance(special_solve(eq), SpecialSolution)


def test_margin_positive():
    # factor x^2 - x1*x2 has order 2: equations reach one degree past beta
    fac = MultiSeries(3, 10, {(2, 0, 0): 1, (0, 1, 1): -1})
    b = FactoredBoundary([BoundaryFactor(fac, 2)])
    # beta = x solves for A = x^2 + x1*x2
    eq = HomEquation(b, MultiSeries(3, 10, {(2, 0, 0): 1, (0, 1, 1): 1}))
    assert eq.margin == 1
    res = special_solve(eq, 8)
    assert isinstance(res, SpecialSolution)
    assert res.certified_order == 9
    # and the parameter product alone is obstructed for this factor:
    # matching x^2 and x1*x2 rows forces contradictory values of beta_x
    bad = special_solve(HomEquation(b, MultiSeries(3, 10, {(0, 1, 1): 1})), 8)
    assert isinstance(bad, NoSolution) and bad.refuted


def test_locus_generators_central():
    gens = fibered_locus_generators(central_boundary())
    assert gens == [MultiSeries.variable(1, 3, 10),
                    MultiSeries.variable(2, 3, 10)]


def test_locus_generators_unit_and_empty():
    gens = fibered_locus_generators(xsq_boundary())
    assert gens == [MultiSeries.constant(1, 2, 10)]
    b = FactoredBoundary([
        BoundaryFactor(MultiSeries.variable(0, 2, 10)),        # mult 1
        BoundaryFactor(MultiSeries.variable(1, 2, 10), 2),     # fibered
    ])
    assert fibered_locus_generators(b) == []


def test_clearing_exponent():
    b = central_boundary()
    eq = HomEquation(b, MultiSeries.constant(1, 3, 10))
    # multiplying by x1*x2 lands in the solvable family at the first power
    assert search_clearing_exponent(eq, kmax=3, order=6) == 1
    eq0 = HomEquation(b, MultiSeries(3, 10, {(0, 1, 1): 1}))
    assert search_clearing_exponent(eq0, kmax=3, order=6) == 0
    # x^2 boundary: the locus ideal is the whole ring, clearing is useless
    bad = HomEquation(xsq_boundary(), MultiSeries.variable(0, 2, 10))
    assert search_clearing_exponent(bad, kmax=3) is None