import random
from fractions import Fraction

import pytest

from paramflow.diffeo import (
    NotNilpotentError,
    NotUnipotentError,
    ParamDiffeo,
    VerticalField,
    compose,
    conjugate,
    exp_vertical,
    flow,
    invert,
    linearize_1d,
    log_updiffeo,
    push_forward,
    unit_cofactor,
)
from paramflow.rational import gr
from paramflow.series import (
    MultiSeries,
    NotDivisibleError,
    SeriesError,
    mul,
)


def random_nilpotent_field(rng, nvars, order, nterms=6):
    """Zero constant term, zero pure-x-linear term."""
    terms = {}
    for _ in range(nterms):
        exp = [0] * nvars
        budget = rng.randrange(1, order + 1)
        for _ in range(budget):
            exp[rng.randrange(nvars)] += 1
        if exp[0] == 1 and sum(exp) == 1:
            exp[0] = 2
        terms[tuple(exp)] = terms.get(tuple(exp), gr(0)) + \
            gr(Fraction(rng.randrange(-6, 7), rng.randrange(1, 5)))
    terms = {e: c for e, c in terms.items() if c}
    return VerticalField(MultiSeries(nvars, order, terms))


def test_exp_quadratic_field_is_geometric():
    # flow of x^2 d/dx at time 1 is x/(1-x): every coefficient is 1
    X = VerticalField(MultiSeries(1, 12, {(2,): 1}))
    phi = exp_vertical(X)
    for k in range(1, 13):
        assert phi.xcomp.coeff((k,)) == gr(1)
    assert phi.valid_order == 12
    assert phi.is_unipotent()


def test_exp_parameter_translation():
    # fhat = x1: a rigid translation by the parameter
    X = VerticalField(MultiSeries.variable(1, 2, 6))
    phi = exp_vertical(X)
    assert phi.xcomp == MultiSeries(2, 6, {(1, 0): 1, (0, 1): 1})
    back = log_updiffeo(phi)
    assert back == X


def test_exp_rejects_linear_term():
    with pytest.raises(NotNilpotentError):
        exp_vertical(VerticalField(MultiSeries.variable(0, 2, 5)))


def test_log_rejects_non_unipotent():
    phi = ParamDiffeo(MultiSeries(1, 5, {(1,): 2, (2,): 1}))
    with pytest.raises(NotUnipotentError):
        log_updiffeo(phi)


def test_log_exp_round_trip():
    rng = random.Random(2026)
    for _ in range(8):
        nv = rng.choice([1, 2, 3])
        X = random_nilpotent_field(rng, nv, 8)
        assert log_updiffeo(exp_vertical(X)) == X


def test_exp_log_round_trip():
    # the other direction, starting from a hand-built unipotent family
    S = MultiSeries(2, 8, {(1, 0): 1, (2, 0): "1/2", (1, 1): -1, (0, 2): "1/3"})
    phi = ParamDiffeo(S)
    assert exp_vertical(log_updiffeo(phi)) == phi


def test_flow_group_law():
    rng = random.Random(17)
    X = random_nilpotent_field(rng, 2, 8)
    a, b = Fraction(1, 2), Fraction(1, 3)
    lhs = compose(flow(X, a), flow(X, b))
    assert lhs == flow(X, a + b)
    assert flow(X, 0) == ParamDiffeo.identity(2, 8)


def test_invert():
    phi = ParamDiffeo(MultiSeries(1, 10, {(1,): 1, (2,): 1}))
    psi = invert(phi)
    ident = ParamDiffeo.identity(1, 10)
    assert compose(phi, psi) == ident
    assert compose(psi, phi) == ident


def test_invert_non_unipotent():
    phi = ParamDiffeo(MultiSeries(2, 8, {(1, 0): 3, (2, 1): "1/2", (0, 2): 1}))
    psi = invert(phi)
    assert compose(phi, psi) == ParamDiffeo.identity(2, 8)


def test_conjugate_by_linear_scaling():
    # sigma = 2x conjugates the flow of x^2 d/dx into the flow of 2 x^2 d/dx
    X = VerticalField(MultiSeries(1, 10, {(2,): 1}))
    sigma = ParamDiffeo(MultiSeries(1, 10, {(1,): 2}))
    conj = conjugate(exp_vertical(X), sigma)
    doubled = VerticalField(MultiSeries(1, 10, {(2,): 2}))
    assert conj == exp_vertical(doubled)
    assert log_updiffeo(conj) == doubled


def test_push_forward_matches_conjugation():
    rng = random.Random(31)
    X = random_nilpotent_field(rng, 2, 8)
    sigma = ParamDiffeo(MultiSeries(2, 8, {(1, 0): 2, (2, 0): 1, (1, 1): "1/2"}))
    lhs = exp_vertical(push_forward(X, sigma))
    rhs = compose(sigma, compose(exp_vertical(X), invert(sigma)))
    assert lhs == rhs


def test_displacement_and_unit_cofactor():
    X = VerticalField(MultiSeries(1, 9, {(2,): 1}))
    phi = exp_vertical(X)
    u = unit_cofactor(phi, MultiSeries(1, 9, {(2,): 1}))
    # displacement x^2 + x^3 + ... over x^2: geometric unit
    assert u.is_unit()
    for k in range(u.valid_order + 1):
        assert u.coeff((k,)) == gr(1)
    with pytest.raises(NotDivisibleError):
        unit_cofactor(phi, MultiSeries(1, 9, {(3,): 1}))


def test_diffeo_validation():
    with pytest.raises(SeriesError):
        ParamDiffeo(MultiSeries.constant(1, 1, 4))
    with pytest.raises(SeriesError):
        ParamDiffeo(MultiSeries(1, 4, {(2,): 1}))


def test_pullback_is_ring_action():
    phi = ParamDiffeo(MultiSeries(2, 6, {(1, 0): 1, (2, 0): 1}))
    g = MultiSeries(2, 6, {(1, 1): 1})
    h = MultiSeries(2, 6, {(0, 1): 2, (1, 0): 1})
    assert phi(mul(g, h)) == mul(phi(g), phi(h))


def test_linearize_1d():
    phi = ParamDiffeo(MultiSeries(1, 8, {(1,): 2, (2,): 1}))
    sigma = linearize_1d(phi)
    assert sigma.xcomp.coeff((2,)) == gr(Fraction(1, 2))
    # sigma^(-1) o phi o sigma == 2x exactly
    assert conjugate(phi, sigma).xcomp == MultiSeries(1, 8, {(1,): 2})


def test_linearize_rejects_resonance():
    phi = ParamDiffeo(MultiSeries(1, 8, {(1,): -1, (2,): 1}))
    with pytest.raises(SeriesError):
        linearize_1d(phi)
    with pytest.raises(NotUnipotentError):
        linearize_1d(ParamDiffeo(MultiSeries(1, 8, {(1,): 1, (2,): 1})))


def test_multiplier_series_off_center():
    # multiplier can vary with the parameter while staying unipotent
    X = VerticalField(MultiSeries(2, 8, {(1, 1): 1}))  # x*x1 d/dx
    phi = exp_vertical(X)
    assert phi.is_unipotent()
    # x o phi = x * exp(x1)
    assert phi.xcomp.coeff((1, 2)) == gr(Fraction(1, 2))
    assert phi.xcomp.coeff((1, 3)) == gr(Fraction(1, 6))
    assert log_updiffeo(phi) == X
