"""Residue invariants along the boundary divisor.

The displacement of a unipotent family vanishes exactly on the boundary;
restricted to a generic fiber it is a one-variable germ V, and the
residues of the time form dz/V at the points where the fiber meets the
divisor do not change under fibered conjugation.  This module computes
them two ways:

* exactly, for one-variable polynomial data recentred at a rational
  root (``residue_1d``, ``residue_at``);
* numerically, sampling fibers over a low-discrepancy rational grid and
  locating divisor points with a companion-matrix root finder
  (``fiber_residue_profile``, ``free_of_residues``).

Numeric paths guard against degenerate samples (colliding roots, leading
coefficient drop, vanishing unit part) and skip them rather than trust
the arithmetic; a run where every sample was skipped reports an
inconclusive status instead of a verdict.
"""
from __future__ import annotations

import cmath
from collections import namedtuple
from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence

import numpy as np

from .boundary import FactoredBoundary
from .rational import GaussianRational
from .series import InsufficientOrderError, MultiSeries, SeriesError, unit_inverse

GR0 = GaussianRational(0)

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _halton(index: int, base: int) -> Fraction:
    f = Fraction(1, base)
    r = Fraction(0)
    while index:
        r += f * (index % base)
        index //= base
        f /= base
    return r


def sample_grid(nparams: int, count: int, seed: int = 0,
                scale=Fraction(1)) -> List[tuple]:
    """Rational low-discrepancy samples, coordinates in [scale/8, 3*scale/8).

    ``scale`` may be a single Fraction or one per parameter; grading the
    scales downward keeps divisor points of mixed monomials (ratios of
    consecutive parameters) small.  The grid stays away from the origin
    and from coordinate collisions, which keeps generic fibers generic;
    exact Fractions let callers restrict polynomial data without
    rounding.  Shrink the scales when the restricted data is a genuine
    truncation: the dropped tail at a divisor point of size r
    contributes about r^(order+1), which must stay below the degeneracy
    guard of the residue routines.
    """
    if nparams == 0:
        return [()]
    if nparams > len(_PRIMES):
        raise SeriesError(f"at most {len(_PRIMES)} parameters supported")
    try:
        scales = [Fraction(s) for s in scale]
        if len(scales) != nparams:
            raise SeriesError(f"need {nparams} scales, got {len(scales)}")
    except TypeError:
        scales = [Fraction(scale)] * nparams
    return [
        tuple(si * (Fraction(1, 8) + _halton(seed + 1 + k, _PRIMES[i]) / 4)
              for i, si in enumerate(scales))
        for k in range(count)
    ]


# ---------------------------------------------------------------------------
# fiber restriction
# ---------------------------------------------------------------------------


def fiber_restrict(s: MultiSeries, sample: Sequence) -> MultiSeries:
    """Restrict to the fiber over an exact parameter point.

    Exact for polynomial data.  For a genuine truncation the x^k
    coefficient of the restriction absorbs dropped terms of parameter
    order above valid_order - k, so treat high coefficients accordingly.
    """
    if len(sample) != s.nvars - 1:
        raise SeriesError("sample dimension must match the parameter count")
    vals = [GaussianRational.coerce(v) for v in sample]
    out: dict = {}
    for exp, c in s.terms():
        w = c
        for v, e in zip(vals, exp[1:]):
            if e:
                w = w * v ** e
        key = (exp[0],)
        w = out.get(key, GR0) + w
        if w:
            out[key] = w
        elif key in out:
            del out[key]
    return MultiSeries(1, s.valid_order, out)


def fiber_restrict_numeric(s: MultiSeries, sample: Sequence) -> np.ndarray:
    """Complex coefficient vector (by x-degree) of the fiber restriction."""
    if len(sample) != s.nvars - 1:
        raise SeriesError("sample dimension must match the parameter count")
    pt = [complex(v) for v in sample]
    coeffs = np.zeros(s.valid_order + 1, dtype=complex)
    for exp, c in s.terms():
        z = complex(c)
        for v, e in zip(pt, exp[1:]):
            if e:
                z *= v ** e
        coeffs[exp[0]] += z
    return coeffs


def contact_order(f1d: MultiSeries) -> int:
    """Vanishing order at 0 of a one-variable germ."""
    if f1d.nvars != 1:
        raise SeriesError("contact order expects a one-variable germ")
    nu = f1d.order()
    if nu is None:
        raise SeriesError("germ is identically zero at this order")
    return nu


# ---------------------------------------------------------------------------
# exact one-variable residues
# ---------------------------------------------------------------------------


def residue_1d(f: MultiSeries) -> GaussianRational:
    """Residue at 0 of the 1-form dz/f, for f = z^nu * unit.

    Equals the z^(nu-1) coefficient of the inverse unit; needs
    valid_order >= 2 nu - 1.
    """
    nu = contact_order(f)
    if nu == 0:
        raise SeriesError("f does not vanish at 0: no pole there")
    N = f.valid_order
    if N < 2 * nu - 1:
        raise InsufficientOrderError(
            f"residue at a contact-{nu} point needs order >= {2 * nu - 1}, "
            f"have {N}")
    u = MultiSeries(1, N - nu, {(e - nu,): c for (e,), c in f.terms()})
    return unit_inverse(u).coeff((nu - 1,))


def shift_1d(f: MultiSeries, root) -> MultiSeries:
    """Exact recentering z -> z + root of one-variable polynomial data."""
    if f.nvars != 1:
        raise SeriesError("shift expects a one-variable germ")
    r = GaussianRational.coerce(root)
    out: dict = {}
    for (e,), c in f.terms():
        for t in range(e + 1):
            w = c * comb(e, t) * r ** (e - t)
            key = (t,)
            w = out.get(key, GR0) + w
            if w:
                out[key] = w
            elif key in out:
                del out[key]
    return MultiSeries(1, f.valid_order, out)


def residue_at(f: MultiSeries, root) -> GaussianRational:
    """Exact residue of dz/f at a rational root of polynomial data."""
    return residue_1d(shift_1d(f, root))


def residue_nonunipotent(multiplier) -> complex:
    """Residue invariant of a hyperbolic fixed point: 1 / log(multiplier).

    Principal branch; rejects multipliers 0 and 1.
    """
    z = complex(GaussianRational.coerce(multiplier)) \
        if not isinstance(multiplier, complex) else multiplier
    if z == 0:
        raise ValueError("multiplier 0 is not invertible")
    if z == 1:
        raise ValueError("multiplier 1 is unipotent; use the vanishing-order residues")
    return 1.0 / cmath.log(z)


# ---------------------------------------------------------------------------
# numeric fiber profiles
# ---------------------------------------------------------------------------

ResiduePoint = namedtuple("ResiduePoint", ["root", "contact", "residue"])

FreeOfResidues = namedtuple(
    "FreeOfResidues", ["status", "max_abs", "checked", "skipped", "witness"])


def _taylor_shift(coeffs: Sequence[complex], r: complex) -> list:
    c = list(coeffs)
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] += r * c[j + 1]
    return c


def _inverse_unit_coeffs(u: Sequence[complex], count: int) -> list:
    inv = [1.0 / u[0]]
    for k in range(1, count):
        s = 0j
        for j in range(1, min(k, len(u) - 1) + 1):
            s += u[j] * inv[k - j]
        inv.append(-s / u[0])
    return inv


def _laurent_residue(num: Sequence[complex], den: Sequence[complex],
                     nu: int, guard: float) -> Optional[complex]:
    """Residue at 0 of (num/den) dz when den has an order-nu zero at 0.

    Returns None when the numerics look degenerate: the low den
    coefficients are not negligibly small, or the unit part nearly
    vanishes.
    """
    scale = max(abs(c) for c in den)
    if scale == 0.0:
        return None
    if any(abs(den[i]) > guard * scale for i in range(min(nu, len(den)))):
        return None
    u = list(den[nu:])
    if not u or abs(u[0]) <= guard * scale:
        return None
    inv = _inverse_unit_coeffs(u, nu)
    res = 0j
    for j in range(min(nu, len(num))):
        res += num[j] * inv[nu - 1 - j]
    return res


def _nonfibered_roots(boundary: FactoredBoundary, sample: Sequence, *,
                      guard: float, root_radius: float):
    """(root, contact) pairs on the fiber, or None for a degenerate sample."""
    points = []
    for fac in boundary.nonfibered():
        coeffs = fiber_restrict_numeric(fac.series, sample)
        deg = fac.series.max_degree_in(0)
        scale = max(abs(coeffs))
        if scale == 0.0 or abs(coeffs[deg]) <= guard * scale:
            return None  # x-degree dropped: sample is not generic
        roots = np.roots(coeffs[deg::-1]) if deg >= 1 else []
        for r in roots:
            if abs(r) <= root_radius:
                points.append((complex(r), fac.multiplicity))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i][0] - points[j][0]) < 1e-6:
                return None  # colliding divisor points
    points.sort(key=lambda p: (p[0].real, p[0].imag))
    return points


def fiber_residue_profile(den: MultiSeries, boundary: FactoredBoundary,
                          sample: Sequence, *, numerator: MultiSeries = None,
                          guard: float = 1e-9, root_radius: float = 0.75):
    """Residues of (numerator/den) dz on one fiber, at the divisor points.

    den restricts to the fiber denominator (typically a displacement or
    the boundary product); the divisor points and their contact orders
    come from the boundary factorization.  Returns a list of
    ResiduePoint sorted by root, or None when the sample is degenerate.
    """
    points = _nonfibered_roots(boundary, sample, guard=guard,
                               root_radius=root_radius)
    if points is None:
        return None
    den_c = fiber_restrict_numeric(den, sample)
    num_c = [1.0 + 0j] if numerator is None \
        else list(fiber_restrict_numeric(numerator, sample))
    out = []
    for r, nu in points:
        ds = _taylor_shift(den_c, r)
        ns = _taylor_shift(num_c, r) if len(num_c) > 1 else num_c
        res = _laurent_residue(ns, ds, nu, guard)
        if res is None:
            return None
        out.append(ResiduePoint(r, nu, res))
    return out


def compare_profiles(p1, p2) -> Optional[float]:
    """Largest residue discrepancy between two profiles on the same fiber.

    Profiles must pair up root by root; None when either is degenerate
    or the root patterns disagree.
    """
    if p1 is None or p2 is None or len(p1) != len(p2):
        return None
    worst = 0.0
    for a, b in zip(p1, p2):
        if abs(a.root - b.root) > 1e-6 or a.contact != b.contact:
            return None
        worst = max(worst, abs(a.residue - b.residue))
    return worst


def free_of_residues(numerator: MultiSeries, boundary: FactoredBoundary, *,
                     nsamples: int = 12, seed: int = 0, tol: float = 1e-8,
                     root_radius: float = 0.75,
                     scale=Fraction(1)) -> FreeOfResidues:
    """Check that the 1-form numerator/product dz has no residues.

    Samples fibers over the rational grid and tests every divisor point.
    status True: all residues below tol on every checked sample.
    status False: a residue exceeded tol (witness records sample, root,
    value).  status None: every sample was degenerate, nothing checked.
    Pass graded ``scale`` values when the numerator is truncated, so the
    dropped tail stays below tol at the divisor points.
    """
    den = boundary.product()
    samples = sample_grid(boundary.nvars - 1, nsamples, seed, scale=scale)
    checked = skipped = 0
    worst = 0.0
    for sample in samples:
        prof = fiber_residue_profile(den, boundary, sample,
                                     numerator=numerator,
                                     root_radius=root_radius)
        if prof is None:
            skipped += 1
            continue
        checked += 1
        for pt in prof:
            mag = abs(pt.residue)
            worst = max(worst, mag)
            if mag > tol:
                return FreeOfResidues(False, mag, checked, skipped,
                                      (sample, pt.root, pt.residue))
    if checked == 0:
        return FreeOfResidues(None, worst, 0, skipped, None)
    return FreeOfResidues(True, worst, checked, skipped, None)
