"""The homological equation of the conjugacy problem.

Two unipotent families with logarithms u1*f*d/dx and u2*f*d/dx along the
same factored boundary f are formally conjugate by the flow of a path
field exactly when a series gamma solves

    gamma * df/dx - f * dgamma/dx = A * f,      A = 1/u1 - 1/u2.

Writing gamma = beta * (product of the non-fibered factors, once each)
clears the poles, the fibered part of f drops out, and after canceling
the multiplicity-one factors (A must be divisible by them, a residue
condition) the equation becomes

    beta * P - dbeta/dx * Q = A',

    P = sum over non-fibered factors with l_j >= 2 of
        (l_j - 1) * df_j/dx * prod_{k != j, l_k >= 2} f_k,
    Q = prod over non-fibered factors with l_k >= 2 of f_k,
    A' = A / prod over non-fibered multiplicity-one factors.

``special_solve`` decides solvability order by order as one exact sparse
linear system over the monomial coefficients of beta.  Unknowns run
through degrees <= N; matched equations run through degrees
<= N + min(ord P, ord Q - 1), which unknown beta terms of degree > N
provably cannot reach, so a solution certifies the identity to that
order and an inconsistency refutes solvability outright, at any order.
"""
from __future__ import annotations

from collections import namedtuple
from typing import List, Optional

from .boundary import FactoredBoundary
from .linalg import solve_linear
from .rational import GaussianRational
from .residue import FreeOfResidues
from .residue import free_of_residues as _series_free_of_residues
from .series import (
    MultiSeries,
    NotDivisibleError,
    SeriesError,
    add,
    derivative,
    divide_once,
    integrate_x,
    mul,
    scale,
    sub,
    unit_inverse,
)

GR0 = GaussianRational(0)


class HomEquation:
    """beta * P - dbeta/dx * Q = A', together with its provenance."""

    __slots__ = ("boundary", "numerator", "rhs", "p_series", "q_series",
                 "margin")

    def __init__(self, boundary: FactoredBoundary, numerator: MultiSeries):
        if numerator.nvars != boundary.nvars:
            raise SeriesError("numerator lives in a different ring than the boundary")
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "numerator", numerator)
        rhs = numerator
        for fac in boundary.nonfibered():
            if fac.multiplicity == 1:
                try:
                    rhs = divide_once(rhs, fac.series)
                except NotDivisibleError as exc:
                    raise ResidueObstruction(fac, exc.witness) from exc
        multi = [f for f in boundary.nonfibered() if f.multiplicity >= 2]
        nv = boundary.nvars
        cap = boundary.valid_order
        q = MultiSeries.constant(1, nv, cap)
        for fac in multi:
            q = mul(q, fac.series)
        p = MultiSeries.zero(nv, cap)
        for j, fac in enumerate(multi):
            # factors are exact polynomial data, so re-asserting the cap
            # on the derivative loses nothing and keeps degree-cap terms
            term = scale(derivative(fac.series, 0).with_order(cap),
                         fac.multiplicity - 1)
            for k, other in enumerate(multi):
                if k != j:
                    term = mul(term, other.series)
            p = add(p, term)
        if multi and q.is_zero():
            raise SeriesError(
                "valid order too small to hold the multiple-factor product")
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "p_series", p)
        object.__setattr__(self, "q_series", q)
        p_ord = p.order()
        q_ord = q.order()
        margin = min(p_ord if p_ord is not None else q_ord,
                     q_ord - 1)
        object.__setattr__(self, "margin", max(margin, 0))

    def __setattr__(self, name, value):
        raise AttributeError("HomEquation is immutable")

    @property
    def nvars(self) -> int:
        return self.boundary.nvars

    def lambda_invariant(self) -> Optional[GaussianRational]:
        """Constant part of the numerator, when the x-axis restriction
        is constant; None otherwise (the invariant is undefined)."""
        lam = self.numerator.constant_term()
        for exp, c in self.numerator.terms():
            if any(exp[1:]):
                continue
            if sum(exp) > 0 and c:
                return None
        return lam

    def free_of_residues(self, **kwargs) -> FreeOfResidues:
        """Numeric residue check of the 1-form numerator/f dx."""
        return _series_free_of_residues(self.numerator, self.boundary, **kwargs)


class ResidueObstruction(SeriesError):
    """A multiplicity-one factor fails to divide the numerator."""

    def __init__(self, factor, witness):
        self.factor = factor
        self.witness = witness
        super().__init__(
            "numerator is not divisible by a multiplicity-one factor: "
            "the pair carries a residue along it")


def build_homological(u1: MultiSeries, u2: MultiSeries,
                      boundary: FactoredBoundary) -> HomEquation:
    """Equation for the pair with field cofactors u1, u2 (both units)."""
    if not (u1.is_unit() and u2.is_unit()):
        raise SeriesError("cofactors must be units")
    a = sub(unit_inverse(u1), unit_inverse(u2))
    return HomEquation(boundary, a)


SpecialSolution = namedtuple("SpecialSolution", ["beta", "certified_order", "equation"])

NoSolution = namedtuple("NoSolution", ["refuted", "reason", "witness", "order"])


def _poly_exponents(nvars: int, max_deg: int):
    if nvars == 1:
        for d in range(max_deg + 1):
            yield (d,)
        return
    for d in range(max_deg + 1):
        for head in range(d, -1, -1):
            for rest in _poly_exponents(nvars - 1, d - head):
                if sum(rest) == d - head:
                    yield (head,) + rest


def verify_special(eq: HomEquation, beta: MultiSeries, order: int) -> bool:
    """Independent check of beta * P - beta' * Q = A' through the order."""
    b = beta.with_order(order)  # beta is a polynomial: relabeling is exact
    lhs = sub(mul(b, eq.p_series.with_order(order)),
              mul(derivative(b, 0).with_order(order),
                  eq.q_series.with_order(order)))
    return sub(lhs, eq.rhs.truncate(order)).is_zero()


def special_solve(eq: HomEquation, order: Optional[int] = None):
    """Solve the homological equation for beta, or refute it.

    Returns SpecialSolution(beta, certified_order, eq) with the identity
    re-verified through certified_order, or NoSolution.  A NoSolution
    with refuted=True is definitive: no beta of any degree can satisfy
    the equation, because the inconsistent rows only involve
    coefficients the truncation fully controls.
    """
    rhs = eq.rhs
    if order is None:
        order = rhs.valid_order - eq.margin
    if order < 0:
        return NoSolution(False, "order too small for this boundary", None, order)
    g_max = order + eq.margin
    if g_max > rhs.valid_order:
        return NoSolution(False,
                          f"insufficient valid order: need {g_max}, "
                          f"have {rhs.valid_order}", None, order)
    p, q = eq.p_series, eq.q_series
    if p.is_zero() and all(f.multiplicity == 1 for f in eq.boundary.nonfibered()):
        # no multiple factors: the equation collapses to -beta' = A'
        beta = scale(integrate_x(rhs.truncate(g_max)), -1)
        assert verify_special(eq, beta, g_max)
        return SpecialSolution(beta, g_max, eq)
    rows: dict = {}
    rhs_map: dict = {}
    pts = list(p.terms())
    qts = list(q.terms())
    for e in _poly_exponents(eq.nvars, order):
        for m, c in pts:
            r = tuple(a + b for a, b in zip(e, m))
            if sum(r) <= g_max:
                row = rows.setdefault(r, {})
                row[e] = row.get(e, GR0) + c
        if e[0] >= 1:
            shifted = (e[0] - 1,) + e[1:]
            for m, c in qts:
                r = tuple(a + b for a, b in zip(shifted, m))
                if sum(r) <= g_max:
                    row = rows.setdefault(r, {})
                    row[e] = row.get(e, GR0) - c * e[0]
    for exp, c in rhs.terms():
        if sum(exp) <= g_max:
            rhs_map[exp] = c
            rows.setdefault(exp, {})
    solution, bad_row = solve_linear(rows, rhs_map)
    if solution is None:
        return NoSolution(True,
                          "coefficient system is inconsistent: no series "
                          "solution exists at any order", bad_row, order)
    beta = MultiSeries(eq.nvars, order,
                       {e: v for e, v in solution.items() if v})
    if not verify_special(eq, beta, g_max):
        raise AssertionError("solver produced a non-solution; this is a bug")
    return SpecialSolution(beta, g_max, eq)


def fibered_locus_generators(boundary: FactoredBoundary) -> List[MultiSeries]:
    """Parameter-space series cut out by the multiple non-fibered factors.

    For each non-fibered factor of multiplicity >= 2, every coefficient
    series of its expansion in powers of x is a generator; generators are
    normalized to leading coefficient one, deduplicated, and sorted.  The
    common zero locus is where those factors degenerate as fiber germs.
    """
    gens: List[MultiSeries] = []
    for fac in boundary.nonfibered():
        if fac.multiplicity < 2:
            continue
        bydeg: dict = {}
        for exp, c in fac.series.terms():
            key = exp[0]
            rest = (0,) + exp[1:]
            bydeg.setdefault(key, {})[rest] = c
        for xdeg in sorted(bydeg):
            g = MultiSeries(boundary.nvars, fac.series.valid_order, bydeg[xdeg])
            if g.is_zero():
                continue
            lead = next(iter(g.terms()))[1]
            g = scale(g, lead.inverse())
            if g not in gens:
                gens.append(g)
    gens.sort(key=lambda s: [(sum(e), tuple(-v for v in e), c.to_strings())
                             for e, c in s.terms()])
    return gens


def search_clearing_exponent(eq: HomEquation, kmax: int = 8,
                             order: Optional[int] = None) -> Optional[int]:
    """Smallest k <= kmax making the equation solvable after multiplying
    the numerator by the k-th power of the locus-generator product.

    Returns None when no such k exists in range.  k = 0 means the
    equation is already solvable.
    """
    gens = fibered_locus_generators(eq.boundary)
    h = MultiSeries.constant(1, eq.nvars, eq.numerator.valid_order)
    for g in gens:
        h = mul(h, g.with_order(h.valid_order))
    trivial = h == MultiSeries.constant(1, eq.nvars, h.valid_order)
    num = eq.numerator
    for k in range(kmax + 1):
        try:
            trial = HomEquation(eq.boundary, num)
        except ResidueObstruction:
            trial = None
        if trial is not None:
            res = special_solve(trial, order)
            if isinstance(res, SpecialSolution):
                return k
        if trivial:
            break
        num = mul(num, h)
    return None
