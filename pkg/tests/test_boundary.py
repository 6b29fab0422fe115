import pytest

from paramflow.boundary import (
    BoundaryError,
    BoundaryFactor,
    FactoredBoundary,
    boundary_from_json,
    boundary_to_json,
)
from paramflow.series import MultiSeries, mul


def x_sq_minus_p(order=8):
    return MultiSeries(2, order, {(2, 0): 1, (0, 1): -1})


def test_factor_validation():
    with pytest.raises(BoundaryError):
        BoundaryFactor(MultiSeries.zero(2, 4))
    with pytest.raises(BoundaryError):
        BoundaryFactor(MultiSeries.constant(1, 2, 4))
    with pytest.raises(BoundaryError):
        BoundaryFactor(MultiSeries.variable(0, 2, 4), multiplicity=0)


def test_fibered_detection():
    assert BoundaryFactor(MultiSeries.variable(1, 2, 4)).fibered
    assert not BoundaryFactor(MultiSeries.variable(0, 2, 4)).fibered
    assert not BoundaryFactor(x_sq_minus_p()).fibered


def test_distinctness_enforced():
    f = MultiSeries.variable(0, 2, 6)
    g = f * 3
    with pytest.raises(BoundaryError):
        FactoredBoundary([BoundaryFactor(f), BoundaryFactor(g, 2)])


def test_products_and_split():
    # f = x^2 * (x^2 - x1) * x1^3
    b = FactoredBoundary([
        BoundaryFactor(MultiSeries.variable(0, 2, 10), multiplicity=2),
        BoundaryFactor(x_sq_minus_p(10)),
        BoundaryFactor(MultiSeries.variable(1, 2, 10), multiplicity=3),
    ])
    assert len(b.nonfibered()) == 2
    assert len(b.fibered()) == 1
    x = MultiSeries.variable(0, 2, 10)
    p = MultiSeries.variable(1, 2, 10)
    assert b.nonfibered_product() == mul(mul(x, x), x_sq_minus_p(10))
    assert b.fibered_product() == mul(mul(p, p), p)
    assert b.product() == mul(b.nonfibered_product(), b.fibered_product())
    assert b.nonfibered_radical() == mul(x, x_sq_minus_p(10))


def test_valid_order_is_min():
    b = FactoredBoundary([
        BoundaryFactor(MultiSeries.variable(0, 2, 9)),
        BoundaryFactor(x_sq_minus_p(5)),
    ])
    assert b.valid_order == 5
    assert b.product().valid_order == 5


def test_needs_a_factor():
    with pytest.raises(BoundaryError):
        FactoredBoundary([])


def test_json_round_trip():
    b = FactoredBoundary([
        BoundaryFactor(x_sq_minus_p(), multiplicity=2),
        BoundaryFactor(MultiSeries.variable(1, 2, 8)),
    ])
    assert boundary_from_json(boundary_to_json(b)) == b
