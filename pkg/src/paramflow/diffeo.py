"""Vertical vector fields, parameterized diffeomorphisms, exp and log.

A vertical field X = fhat(x, params) d/dx generates a flow inside each
fiber.  When every term of fhat has weight at least two for the grading
w(x) = 1, w(param) = 2, the field is nilpotent on each truncation class
and its time-one flow is a well-defined unipotent family; conversely a
unipotent family has a nilpotent logarithm.  Both directions are exact
and terminate: the weight of the j-th iterate grows linearly in j, so
past 2N iterations nothing of total degree <= N survives.

Series arithmetic degrades valid orders by default.  The iterations
below re-assert the working order after each step; that is justified
because fhat has positive order, hence degree <= N terms of fhat * dg/dx
are determined by degree <= N terms of g, and composition with a series
of positive order likewise never pulls information down from degrees
above N.
"""
from __future__ import annotations

from fractions import Fraction

from .rational import GaussianRational
from .series import (
    MultiSeries,
    SeriesError,
    add,
    compose_x,
    derivative,
    divide_once,
    mul,
    scale,
    series_from_json,
    series_to_json,
    sub,
)


class NotNilpotentError(ValueError):
    pass


class NotUnipotentError(ValueError):
    pass


def _pure_x_coeff(s: MultiSeries) -> GaussianRational:
    return s.coeff((1,) + (0,) * (s.nvars - 1))


class VerticalField:
    """fhat * d/dx with fhat vanishing at the origin."""

    __slots__ = ("fhat",)

    def __init__(self, fhat: MultiSeries):
        if fhat.constant_term():
            raise SeriesError("vertical field coefficient must vanish at the origin")
        object.__setattr__(self, "fhat", fhat)

    def __setattr__(self, name, value):
        raise AttributeError("VerticalField is immutable")

    @property
    def nvars(self) -> int:
        return self.fhat.nvars

    @property
    def valid_order(self) -> int:
        return self.fhat.valid_order

    def is_nilpotent(self) -> bool:
        """No c*x term: every monomial then has w-weight >= 2."""
        return not _pure_x_coeff(self.fhat)

    def apply(self, g: MultiSeries) -> MultiSeries:
        """Directional derivative X(g) = fhat * dg/dx."""
        return mul(self.fhat, derivative(g, 0))

    def __eq__(self, other):
        if not isinstance(other, VerticalField):
            return NotImplemented
        return self.fhat == other.fhat

    def __repr__(self):
        return f"<VerticalField {self.fhat!r}>"


class ParamDiffeo:
    """Family of fiber diffeomorphisms, stored as the series x o phi.

    The family must fix the origin of the total space and be invertible
    there: zero constant term and nonzero coefficient on the pure x term.
    Unipotence (multiplier one on the central fiber) is a property, not a
    construction requirement; conjugating changes of coordinates are
    generally not unipotent.
    """

    __slots__ = ("xcomp",)

    def __init__(self, xcomp: MultiSeries):
        if xcomp.constant_term():
            raise SeriesError("diffeomorphism must fix the origin")
        if not _pure_x_coeff(xcomp):
            raise SeriesError("not invertible: x-derivative vanishes at the origin")
        object.__setattr__(self, "xcomp", xcomp)

    def __setattr__(self, name, value):
        raise AttributeError("ParamDiffeo is immutable")

    @classmethod
    def identity(cls, nvars: int, order: int) -> "ParamDiffeo":
        return cls(MultiSeries.variable(0, nvars, order))

    @property
    def nvars(self) -> int:
        return self.xcomp.nvars

    @property
    def valid_order(self) -> int:
        return self.xcomp.valid_order

    @property
    def multiplier(self) -> GaussianRational:
        """dphi/dx at the origin of the central fiber."""
        return _pure_x_coeff(self.xcomp)

    def is_unipotent(self) -> bool:
        return self.multiplier == 1

    def displacement(self) -> MultiSeries:
        """x o phi - x; vanishes exactly on the boundary the family preserves."""
        return sub(self.xcomp, MultiSeries.variable(0, self.nvars, self.valid_order))

    def __call__(self, g: MultiSeries) -> MultiSeries:
        """Pull back a series: g o phi."""
        return compose_x(g, self.xcomp)

    def __eq__(self, other):
        if not isinstance(other, ParamDiffeo):
            return NotImplemented
        return self.xcomp == other.xcomp

    def __repr__(self):
        return f"<ParamDiffeo {self.xcomp!r}>"


# ---------------------------------------------------------------------------
# exp and log
# ---------------------------------------------------------------------------


def flow(field: VerticalField, t) -> ParamDiffeo:
    """Time-t flow of a nilpotent vertical field: sum_j t^j X^j(x) / j!."""
    if not field.is_nilpotent():
        raise NotNilpotentError(
            "field has a c*x term; its flow is not unipotent and the "
            "iteration does not terminate")
    fhat = field.fhat
    N = fhat.valid_order
    t = GaussianRational.coerce(t)
    x = MultiSeries.variable(0, fhat.nvars, N)
    total = x
    h = x
    coeff = GaussianRational(1)
    for j in range(1, 2 * N + 2):
        # relabeling the derivative to N is sound: it has no degree-N
        # terms, and fhat's positive order keeps the product exact there
        h = mul(fhat, derivative(h, 0).with_order(N))
        if h.is_zero():
            break
        coeff = coeff * t * Fraction(1, j)
        total = add(total, scale(h, coeff))
    else:  # unreachable for nilpotent fields by the weight bound
        raise NotNilpotentError("flow iteration failed to terminate")
    return ParamDiffeo(total)


def exp_vertical(field: VerticalField) -> ParamDiffeo:
    """Time-one flow."""
    return flow(field, 1)


def log_updiffeo(phi: ParamDiffeo) -> VerticalField:
    """Logarithm of a unipotent family.

    Iterates the finite-difference operator D(g) = g o phi - g starting
    from D(x) and sums the alternating series sum_k (-1)^(k+1) D^k(x) / k.
    Each application of D raises the w-weight, so the sum is finite on a
    truncation class.
    """
    if not phi.is_unipotent():
        raise NotUnipotentError(
            f"multiplier is {phi.multiplier}, not 1; logarithm of a "
            f"non-unipotent family is not a nilpotent vertical field")
    S = phi.xcomp
    N = S.valid_order
    d = phi.displacement()
    total = MultiSeries.zero(S.nvars, N)
    k = 1
    while not d.is_zero():
        total = add(total, scale(d, Fraction(1 if k % 2 else -1, k)))
        if k > 2 * N + 1:  # unreachable: weight of d grows with k
            raise NotUnipotentError("logarithm iteration failed to terminate")
        d = sub(compose_x(d, S), d).with_order(N)
        k += 1
    return VerticalField(total)


# ---------------------------------------------------------------------------
# the group operations
# ---------------------------------------------------------------------------


def compose(outer: ParamDiffeo, inner: ParamDiffeo) -> ParamDiffeo:
    """outer o inner (inner acts first)."""
    return ParamDiffeo(compose_x(outer.xcomp, inner.xcomp))


def invert(phi: ParamDiffeo) -> ParamDiffeo:
    """Compositional inverse, by a contraction that gains one w-weight per step."""
    S = phi.xcomp
    N = S.valid_order
    x = MultiSeries.variable(0, S.nvars, N)
    ainv = phi.multiplier.inverse()
    T = scale(x, ainv)
    for _ in range(2 * N + 2):
        err = sub(x, compose_x(S, T)).with_order(N)
        if err.is_zero():
            break
        T = add(T, scale(err, ainv)).with_order(N)
    else:
        raise SeriesError("inversion failed to converge")
    return ParamDiffeo(T)


def conjugate(phi: ParamDiffeo, sigma: ParamDiffeo) -> ParamDiffeo:
    """sigma^(-1) o phi o sigma."""
    return compose(invert(sigma), compose(phi, sigma))


def push_forward(field: VerticalField, sigma: ParamDiffeo) -> VerticalField:
    """Transport a field: (sigma_* X)(g) = X(g o sigma) o sigma^(-1).

    Satisfies flow(sigma_* X, t) = sigma o flow(X, t) o sigma^(-1).
    """
    cap = min(field.valid_order, sigma.valid_order)
    dsig = derivative(sigma.xcomp, 0).with_order(cap)  # no degree-cap terms
    g = mul(dsig, field.fhat)
    return VerticalField(compose_x(g, invert(sigma).xcomp))


def unit_cofactor(phi: ParamDiffeo, f: MultiSeries) -> MultiSeries:
    """The cofactor u with x o phi - x = u * f.

    Raises NotDivisibleError when f does not divide the displacement.
    The result is a unit exactly when phi moves points off the zero set
    of f at the slowest rate f allows; callers that need a unit check
    ``is_unit()`` on the result.
    """
    return divide_once(phi.displacement(), f)


# ---------------------------------------------------------------------------
# one-variable helpers (no parameters)
# ---------------------------------------------------------------------------


def linearize_1d(phi: ParamDiffeo) -> ParamDiffeo:
    """Formal linearization of a one-variable germ with non-resonant multiplier.

    Returns the tangent-to-identity coordinate change sigma with
    sigma^(-1) o phi o sigma = a*x.  Requires a^k != a for
    2 <= k <= valid_order (in particular a != 0, 1 and a not a root of
    unity up to that order).
    """
    if phi.nvars != 1:
        raise SeriesError("linearization expects a one-variable germ")
    a = phi.multiplier
    if a == 1:
        raise NotUnipotentError(
            "multiplier 1: a unipotent germ has no hyperbolic linearization")
    S = phi.xcomp
    N = S.valid_order
    x = MultiSeries.variable(0, 1, N)
    ax = scale(x, a)
    sigma = x
    for k in range(2, N + 1):
        ak = a ** k
        if ak == a:
            raise SeriesError(f"resonant multiplier: a^{k} == a")
        # defect of the conjugacy equation phi o sigma = sigma o (a x)
        g = sub(compose_x(S, sigma), compose_x(sigma, ax))
        c = g.coeff((k,))
        if c:
            sigma = add(sigma, MultiSeries(1, N, {(k,): c / (ak - a)}))
    assert sub(compose_x(S, sigma), compose_x(sigma, ax)).is_zero()
    return ParamDiffeo(sigma)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def field_to_json(field: VerticalField) -> dict:
    return {"fhat": series_to_json(field.fhat)}


def field_from_json(data: dict) -> VerticalField:
    return VerticalField(series_from_json(data["fhat"]))


def diffeo_to_json(phi: ParamDiffeo) -> dict:
    return {"xcomp": series_to_json(phi.xcomp)}


def diffeo_from_json(data: dict) -> ParamDiffeo:
    return ParamDiffeo(series_from_json(data["xcomp"]))
