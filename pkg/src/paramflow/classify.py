"""Classification of unipotent pairs and explicit conjugations.

Given two unipotent families preserving the same factored boundary, with
logarithms u1*f*d/dx and u2*f*d/dx, the pair is conjugate by the time-one
flow of the suspended path field

    W = HF(x, params, z) d/dx + d/dz,
    HF = u_path(z) * beta * R,

where R is the product of the non-fibered factors taken once, beta
solves the homological equation, and 1/u_path interpolates linearly
between 1/u1 and 1/u2 in the path coordinate z.  Transport of a frozen
field X along the flow of W obeys dF/dz = [F, Y_z], so matching the
z-derivative of the interpolated family forces the path multiplier to
be -beta.  The x-component of the flow restricted to the starting slice
is the conjugating map sigma, normalized so that
sigma o phi1 = phi2 o sigma.

Everything is exact.  The path field acts on polynomials in z with
truncated-series coefficients; because the homological solution forces
A = 1/u1 - 1/u2 to vanish at the origin, the z^k coefficient of HF
always carries total degree >= k+1, so capping the z-degree at the
working order discards nothing of total degree within range and the
iteration terminates.

When beta * R has a constant or pure-x-linear term the path field is
not nilpotent and the flow coefficients leave the Gaussian rationals
(they involve genuine exponentials); the constructor refuses such input
instead of producing wrong series.
"""
from __future__ import annotations

from collections import namedtuple
from fractions import Fraction
from typing import List, Optional

from .boundary import FactoredBoundary
from .diffeo import (
    NotNilpotentError,
    NotUnipotentError,
    ParamDiffeo,
    compose,
    log_updiffeo,
)
from .homeq import (
    NoSolution,
    ResidueObstruction,
    SpecialSolution,
    build_homological,
    special_solve,
)
from .rational import GaussianRational
from .series import (
    MultiSeries,
    NotDivisibleError,
    SeriesError,
    add,
    derivative,
    divide_once,
    mul,
    scale,
    sub,
    unit_inverse,
)


class ZSeries:
    """Polynomial in the path coordinate z with series coefficients."""

    __slots__ = ("coeffs", "nvars")

    def __init__(self, coeffs: List[MultiSeries]):
        if not coeffs:
            raise SeriesError("ZSeries needs at least one coefficient")
        nv = coeffs[0].nvars
        if any(c.nvars != nv for c in coeffs):
            raise SeriesError("ZSeries coefficients live in different rings")
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        self.coeffs = list(coeffs)
        self.nvars = nv

    @classmethod
    def zero(cls, nvars: int, order: int) -> "ZSeries":
        return cls([MultiSeries.zero(nvars, order)])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def zdeg(self) -> int:
        return len(self.coeffs) - 1

    def z0(self) -> MultiSeries:
        return self.coeffs[0]

    def zadd(self, other: "ZSeries") -> "ZSeries":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else None
            b = other.coeffs[k] if k < len(other.coeffs) else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(add(a, b))
        return ZSeries(out)

    def zmul(self, other: "ZSeries", zmax: int) -> "ZSeries":
        out = [MultiSeries.zero(self.nvars, self.coeffs[0].valid_order)
               for _ in range(min(self.zdeg() + other.zdeg(), zmax) + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > zmax:
                    break
                if not b.is_zero():
                    out[i + j] = add(out[i + j], mul(a, b))
        return ZSeries(out)

    def dx(self) -> "ZSeries":
        # relabeling to the input order is sound here: a derivative has no
        # top-degree terms, and consumers multiply by positive-order series
        n = self.coeffs[0].valid_order
        return ZSeries([derivative(c, 0).with_order(min(n, c.valid_order))
                        for c in self.coeffs])

    def dz(self) -> "ZSeries":
        if len(self.coeffs) == 1:
            return ZSeries([MultiSeries.zero(self.nvars,
                                             self.coeffs[0].valid_order)])
        return ZSeries([scale(c, k + 1)
                        for k, c in enumerate(self.coeffs[1:])])


def _zgeometric_inverse(c0: MultiSeries, c1: MultiSeries, zmax: int) -> ZSeries:
    """Inverse of c0 + c1*z as a z-polynomial, sound when ord(c1) >= 1.

    v_k = (-1)^k c0^(-k-1) c1^k; each step gains total order, so the
    series is finite on the truncation class and the z-cap is exact.
    """
    v0 = unit_inverse(c0)
    out = [v0]
    step = scale(mul(v0, c1), -1)
    cur = v0
    for _ in range(zmax):
        cur = mul(cur, step)
        if cur.is_zero():
            break
        out.append(cur)
    return ZSeries(out)


ConjugationCertificate = namedtuple(
    "ConjugationCertificate", ["sigma", "order", "beta", "legs"])

Verdict = namedtuple(
    "Verdict", ["kind", "order", "lam", "certificate", "details"])

KIND_SPECIAL = "special-conjugate"
KIND_RESIDUES = "refuted-residues"
KIND_HOMOLOGICAL = "refuted-homological"
KIND_INCONCLUSIVE = "inconclusive"


def field_cofactor(phi: ParamDiffeo, boundary: FactoredBoundary) -> MultiSeries:
    """u with log(phi) = u * f * d/dx; raises when the family does not
    preserve the boundary or the cofactor is not a unit."""
    fhat = log_updiffeo(phi).fhat
    try:
        u = divide_once(fhat, boundary.product())
    except NotDivisibleError as exc:
        raise SeriesError(
            "the family does not preserve this boundary: its logarithm is "
            "not divisible by the product") from exc
    if not u.is_unit():
        raise SeriesError(
            "the logarithm vanishes to higher order than the boundary: "
            "cofactor is not a unit")
    return u


def _flow_of_path(hf: ZSeries, order: int, zmax: int) -> MultiSeries:
    """x-component at the starting slice of the time-one flow of
    W = hf d/dx + d/dz."""
    nv = hf.nvars
    x = MultiSeries.variable(0, nv, order)
    g = ZSeries([x])
    total = x
    fact = 1
    limit = 2 * order * (order + 1) + 4
    for j in range(1, limit + 1):
        g = hf.zmul(g.dx(), zmax).zadd(g.dz())
        if g.is_zero():
            break
        fact *= j
        total = add(total, scale(g.z0(), Fraction(1, fact)))
    else:
        raise NotNilpotentError("path-field iteration failed to terminate")
    return total


def _leg_flow(u_start: MultiSeries, numerator: MultiSeries, h: MultiSeries,
              order: int) -> ParamDiffeo:
    """One straight path leg: 1/u(z) = 1/u_start - z*numerator, field
    coefficient u(z) * h."""
    upath = _zgeometric_inverse(unit_inverse(u_start), scale(numerator, -1),
                                order)
    hf = upath.zmul(ZSeries([h]), order)
    return ParamDiffeo(_flow_of_path(hf, order, order))


def build_conjugation(phi1: ParamDiffeo, phi2: ParamDiffeo,
                      boundary: FactoredBoundary, *,
                      beta: Optional[MultiSeries] = None,
                      order: Optional[int] = None) -> ConjugationCertificate:
    """Construct sigma with sigma o phi1 = phi2 o sigma, exactly.

    beta defaults to a fresh homological solution.  Raises
    NotNilpotentError when the path field fails the nilpotency test (the
    conjugation then needs transcendental coefficients), ValueError when
    the pair is not special.
    """
    if order is None:
        order = min(phi1.valid_order, phi2.valid_order, boundary.valid_order)
    u1 = field_cofactor(phi1, boundary)
    u2 = field_cofactor(phi2, boundary)
    if beta is None:
        eq = build_homological(u1, u2, boundary)
        res = special_solve(eq)
        if not isinstance(res, SpecialSolution):
            raise ValueError(f"pair is not special: {res.reason}")
        beta = res.beta
    # beta solves the homological equation only through its own validity;
    # past it the transported flow would drift from phi2
    order = min(order, beta.valid_order)
    a = sub(unit_inverse(u1), unit_inverse(u2)).truncate(order)
    if a.is_zero():
        return ConjugationCertificate(ParamDiffeo.identity(a.nvars, order),
                                      order, beta, 1)
    h = mul(beta.with_order(order), boundary.nonfibered_radical())
    if h.constant_term() or h.coeff((1,) + (0,) * (h.nvars - 1)):
        raise NotNilpotentError(
            "beta times the radical has a constant or pure-x-linear term: "
            "the path field is not nilpotent, and the conjugating map "
            "(which exists, but rescales x) has coefficients outside the "
            "exact ring")
    if a.constant_term():
        # the cofactor value at the origin is invariant under unipotent
        # conjugation, and the path expansion in z only truncates when
        # the interpolation numerator vanishes at the origin
        raise SeriesError(
            "cofactor constant terms differ: no unipotent conjugation "
            "exists for this pair")
    # when the straight interpolation crosses a non-unit the path must
    # detour through complex z; that crossing needs distinct cofactor
    # constants, which the origin gate above already rejects, so for
    # exact unipotent data the detour never fires.  It is kept because
    # it is the correct continuation of the construction.
    c10, c20 = u1.constant_term(), u2.constant_term()
    legs = 1
    if c10 != c20:
        c = c20 / (c20 - c10)
        detour = c.is_real() and Fraction(0) <= c.re <= Fraction(1)
    else:
        detour = False
    hpath = scale(h, -1)
    if not detour:
        sigma = _leg_flow(u1, a, hpath, order)
    else:
        # straight path crosses a non-unit: route through 1+i instead,
        # scaling the homological data by i and then 1-i
        legs = 2
        i_const = GaussianRational(0, 1)
        first = _leg_flow(u1, scale(a, i_const), scale(hpath, i_const), order)
        inv_mid = sub(unit_inverse(u1), scale(a, i_const))
        u_mid = unit_inverse(inv_mid)
        rest = GaussianRational(1) - i_const
        second = _leg_flow(u_mid, scale(a, rest), scale(hpath, rest), order)
        sigma = compose(second, first)
    if compose(sigma, phi1) != compose(phi2, sigma):
        raise AssertionError(
            "constructed map fails the exact conjugation identity; the "
            "homological data does not match the pair")
    return ConjugationCertificate(sigma, sigma.valid_order, beta, legs)


def verify_conjugation(phi1: ParamDiffeo, phi2: ParamDiffeo,
                       sigma: ParamDiffeo) -> bool:
    """Exact check of sigma o phi1 = phi2 o sigma on the common truncation."""
    return compose(sigma, phi1) == compose(phi2, sigma)


def classify_pair(phi1: ParamDiffeo, phi2: ParamDiffeo,
                  boundary: FactoredBoundary, *, order: Optional[int] = None,
                  samples: int = 6, tol: float = 1e-8, seed: int = 0) -> Verdict:
    """Decide the conjugacy class of a unipotent pair along a boundary.

    Pipeline: compare residue profiles on sampled fibers, build the
    homological equation (exact residue obstructions surface here), try
    to solve it, and on success construct and verify the conjugating
    map.  Verdict kinds: special-conjugate (with certificate),
    refuted-residues, refuted-homological (with the invariant lam when
    it is defined), inconclusive.
    """
    if not (phi1.is_unipotent() and phi2.is_unipotent()):
        raise NotUnipotentError(
            "classification expects unipotent families; compare hyperbolic "
            "multiplier residues instead")
    if order is None:
        order = min(phi1.valid_order, phi2.valid_order, boundary.valid_order)
    u1 = field_cofactor(phi1, boundary)
    u2 = field_cofactor(phi2, boundary)
    evidence = {
        "second_derivative_1": phi1.xcomp.coeff((2,) + (0,) * (phi1.nvars - 1)) * 2,
        "second_derivative_2": phi2.xcomp.coeff((2,) + (0,) * (phi2.nvars - 1)) * 2,
    }
    try:
        eq = build_homological(u1, u2, boundary)
    except ResidueObstruction as exc:
        return Verdict(KIND_RESIDUES, order, None, None, {
            "factor": exc.factor.series, "witness": exc.witness, **evidence})
    # numeric residue screen on the exact cofactor difference; graded
    # tiny scales keep divisor points inside the trust radius and push
    # the truncation tail of the difference far below tol
    ladder = [Fraction(1, 64 ** (j + 1)) for j in range(boundary.nvars - 1)]
    screen = eq.free_of_residues(nsamples=samples, seed=seed, tol=tol,
                                 scale=ladder)
    evidence["residue_gap"] = screen.max_abs if screen.checked else None
    if screen.status is False:
        return Verdict(KIND_RESIDUES, order, None, None, {
            "witness": screen.witness, **evidence})
    lam = eq.lambda_invariant()
    res = special_solve(eq)
    if isinstance(res, NoSolution):
        if res.refuted:
            return Verdict(KIND_HOMOLOGICAL, order, lam, None, {
                "witness": res.witness, "reason": res.reason, **evidence})
        return Verdict(KIND_INCONCLUSIVE, order, lam, None, {
            "reason": res.reason, **evidence})
    try:
        cert = build_conjugation(phi1, phi2, boundary, beta=res.beta,
                                 order=order)
    except NotNilpotentError as exc:
        # solvable, but the flow leaves the exact coefficient field
        return Verdict(KIND_SPECIAL, res.certified_order, lam, None, {
            "reason": str(exc), "beta": res.beta, **evidence})
    assert verify_conjugation(phi1, phi2, cert.sigma)
    return Verdict(KIND_SPECIAL, res.certified_order, lam, cert, evidence)
