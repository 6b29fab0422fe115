"""Acceptance suite: eight golden-value and property criteria.

Each criterion prints one PASS/FAIL line with its tolerance; run with
-s (or -rP) to see the lines on success.  Total runtime is a few
seconds.
"""
import random
import subprocess
import sys
from fractions import Fraction

import importlib.resources as resources

from paramflow.boundary import BoundaryFactor, FactoredBoundary
from paramflow.classify import build_conjugation, verify_conjugation
from paramflow.diffeo import (
    VerticalField,
    conjugate,
    exp_vertical,
    log_updiffeo,
)
from paramflow.homeq import (
    HomEquation,
    NoSolution,
    SpecialSolution,
    fibered_locus_generators,
    special_solve,
    verify_special,
)
from paramflow.rational import GaussianRational
from paramflow.residue import (
    compare_profiles,
    fiber_residue_profile,
    sample_grid,
)
from paramflow.series import (
    MultiSeries,
    add,
    derivative,
    integrate_x,
    mul,
    scale,
    sub,
    unit_inverse,
)

FIXTURES = resources.files("paramflow") / "fixtures"


def _report(n: int, ok: bool, label: str):
    print(f"acceptance criterion {n}: {'PASS' if ok else 'FAIL'} ({label})")
    assert ok, f"criterion {n} failed: {label}"


def _central_boundary(order: int) -> FactoredBoundary:
    x = MultiSeries.variable(0, 3, order)
    x1 = MultiSeries.variable(1, 3, order)
    x2 = MultiSeries.variable(2, 3, order)
    return FactoredBoundary([BoundaryFactor(sub(x2, mul(x, x1)), 2)])


def test_criterion_1_sampled_residue_golden_values():
    order = 10
    x = MultiSeries.variable(0, 2, order)
    y = MultiSeries.variable(1, 2, order)
    f = mul(mul(x, x), mul(sub(x, y), sub(x, y)))
    fhat = log_updiffeo(exp_vertical(VerticalField(f))).fhat
    boundary = FactoredBoundary([BoundaryFactor(x, 2),
                                 BoundaryFactor(sub(x, y), 2)])
    worst = 0.0
    for yval, want in [(Fraction(1, 2), 16.0), (Fraction(1), 2.0),
                       (Fraction(1, 3), 54.0)]:
        prof = fiber_residue_profile(fhat, boundary, (yval,))
        assert prof is not None
        at_zero = next(pt for pt in prof if abs(pt.root) < 1e-12)
        worst = max(worst, abs(at_zero.residue - want))
    _report(1, worst < 1e-9,
            f"residues 16, 2, 54 at y = 1/2, 1, 1/3; "
            f"max error {worst:.2e}, tol 1e-9")


def test_criterion_2_geometric_flow_coefficients():
    x = MultiSeries.variable(0, 1, 16)
    phi = exp_vertical(VerticalField(mul(x, x)))
    ok = all(phi.xcomp.coeff((k,)) == 1 for k in range(1, 17))
    _report(2, ok, "x + x^2 + ... + x^16 exactly, all ones")


def test_criterion_3_log_exp_roundtrip():
    rng = random.Random(2026)
    order = 10
    good = 0
    for _ in range(50):
        terms = {}
        for _ in range(rng.randint(3, 7)):
            while True:
                e = tuple(rng.randint(0, 4) for _ in range(3))
                if sum(e) <= 4 and e not in ((0, 0, 0), (1, 0, 0)):
                    break
            c = GaussianRational(
                Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                Fraction(rng.randint(-2, 2), rng.randint(1, 2)))
            if c:
                terms[e] = c
        if not terms:
            terms[(2, 0, 0)] = GaussianRational(1)
        field = VerticalField(MultiSeries(3, order, terms))
        if log_updiffeo(exp_vertical(field)).fhat == field.fhat:
            good += 1
    _report(3, good == 50,
            f"log(exp(X)) = X exactly at order 10 for {good}/50 fields")


def test_criterion_4_solvability_dichotomy():
    order = 12
    boundary = _central_boundary(order)
    x1 = MultiSeries.variable(1, 3, order)
    x2 = MultiSeries.variable(2, 3, order)
    x = MultiSeries.variable(0, 3, order)
    qfac = sub(x2, mul(x, x1))
    one = MultiSeries.constant(1, 3, order)
    rng = random.Random(515)

    # residue-free numerators are exactly p(params) + d/dx-primitives of
    # multiples of the boundary factor; the dichotomy is decided by the
    # restriction to the x-axis
    agree = 0
    for trial in range(50):
        pterms = {}
        for _ in range(rng.randint(1, 4)):
            e = (0, rng.randint(0, 4), rng.randint(0, 4))
            if sum(e) > 4:
                continue
            c = GaussianRational(Fraction(rng.randint(-3, 3),
                                          rng.randint(1, 2)))
            if c:
                pterms[e] = c
        p = MultiSeries(3, order, pterms)
        if trial % 2 == 0:
            p = add(p, one)
        else:
            p = sub(p, MultiSeries.constant(p.constant_term(), 3, order))
        hterms = {}
        for _ in range(rng.randint(0, 3)):
            e = tuple(rng.randint(0, 1) for _ in range(3))
            c = GaussianRational(Fraction(rng.randint(-2, 2)))
            if c:
                hterms[e] = c
        numerator = add(p, integrate_x(mul(qfac, MultiSeries(3, order,
                                                             hterms))))
        expected = all(e[1:] != (0, 0) for e, _ in numerator.terms())
        eq = HomEquation(boundary, numerator)
        res = special_solve(eq, 8)
        got = isinstance(res, SpecialSolution)
        if got == expected and (not got or verify_special(eq, res.beta, 8)):
            agree += 1
    part_a = agree == 50

    res = special_solve(HomEquation(boundary, one), 1)
    part_b = isinstance(res, NoSolution) and res.refuted

    # cleared-denominator form of d/dx (1/(x1 (x2 - x x1))) = 1/(x2 - x x1)^2
    g = mul(x1, qfac)
    f = mul(qfac, qfac)
    lhs = mul(scale(derivative(g, 0).with_order(order), -1), f)
    part_c = lhs == mul(g, g)

    _report(4, part_a and part_b and part_c,
            f"dichotomy on {agree}/50 residue-free numerators; "
            f"constant refuted at order 1: {part_b}; "
            f"primitive identity exact at order 10: {part_c}")


def test_criterion_5_fibered_locus_generators():
    boundary = _central_boundary(8)
    gens = fibered_locus_generators(boundary)
    x1 = MultiSeries.variable(1, 3, 8)
    x2 = MultiSeries.variable(2, 3, 8)
    ok = len(gens) == 2 and x1 in gens and x2 in gens
    _report(5, ok, "generators of the degeneracy locus are {x1, x2}")


def test_criterion_6_conjugation_pairs_exact():
    order = 10
    target = 8
    pairs = []

    x = MultiSeries.variable(0, 1, order)
    one1 = MultiSeries.constant(1, 1, order)
    half1 = MultiSeries.constant(Fraction(1, 2), 1, order)
    f = mul(x, x)
    phi1 = exp_vertical(VerticalField(mul(add(one1, x), f)))
    sigma0 = exp_vertical(VerticalField(mul(add(half1, x), f)))
    pairs.append((phi1, conjugate(phi1, sigma0),
                  FactoredBoundary([BoundaryFactor(x, 2)])))

    boundary = _central_boundary(order)
    f0 = boundary.product()
    one = MultiSeries.constant(1, 3, order)
    x = MultiSeries.variable(0, 3, order)
    x1 = MultiSeries.variable(1, 3, order)
    x2 = MultiSeries.variable(2, 3, order)

    phi1 = exp_vertical(VerticalField(f0))
    phi2 = exp_vertical(VerticalField(mul(unit_inverse(sub(one, x1)), f0)))
    pairs.append((phi1, phi2, boundary))

    phi1 = exp_vertical(VerticalField(mul(add(one, mul(x1, x2)), f0)))
    witness = add(MultiSeries.constant(Fraction(1, 3), 3, order), add(x, x1))
    sigma0 = exp_vertical(VerticalField(mul(witness, f0)))
    pairs.append((phi1, conjugate(phi1, sigma0), boundary))

    xp = MultiSeries.variable(0, 2, order)
    sp = MultiSeries.variable(1, 2, order)
    onep = MultiSeries.constant(1, 2, order)
    fp = mul(xp, xp)
    phi1 = exp_vertical(VerticalField(mul(add(onep, sp), fp)))
    wp = add(MultiSeries.constant(Fraction(1, 4), 2, order), add(xp, sp))
    sigma0 = exp_vertical(VerticalField(mul(wp, fp)))
    pairs.append((phi1, conjugate(phi1, sigma0),
                  FactoredBoundary([BoundaryFactor(xp, 2)])))

    ihalf = MultiSeries.constant(GaussianRational(0, Fraction(1, 2)), 3,
                                 order)
    iunit = MultiSeries.constant(GaussianRational(0, 1), 3, order)
    phi1 = exp_vertical(VerticalField(mul(add(one, mul(iunit, x2)), f0)))
    sigma0 = exp_vertical(VerticalField(mul(add(ihalf, x), f0)))
    pairs.append((phi1, conjugate(phi1, sigma0), boundary))

    good = 0
    for p1, p2, bdy in pairs:
        cert = build_conjugation(p1, p2, bdy, order=target)
        if cert.order == target and verify_conjugation(p1, p2, cert.sigma):
            good += 1
    _report(6, good == len(pairs),
            f"{good}/{len(pairs)} conjugations exact at order 8")


def test_criterion_7_residue_invariance_under_conjugation():
    order = 12
    x = MultiSeries.variable(0, 2, order)
    y = MultiSeries.variable(1, 2, order)
    one = MultiSeries.constant(1, 2, order)
    f0 = mul(mul(x, x), mul(sub(x, y), sub(x, y)))
    boundary = FactoredBoundary([BoundaryFactor(x, 2),
                                 BoundaryFactor(sub(x, y), 2)])
    rng = random.Random(714)

    def rand_poly(maxdeg, allow_const):
        out = MultiSeries.zero(2, order)
        for e0 in range(maxdeg + 1):
            for e1 in range(maxdeg + 1 - e0):
                if not allow_const and e0 == e1 == 0:
                    continue
                if rng.random() < 0.5:
                    continue
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                if c:
                    out = add(out, scale(MultiSeries(2, order,
                                                     {(e0, e1): 1}), c))
        return out

    worst = 0.0
    checked = 0
    for trial in range(10):
        u = add(one, rand_poly(2, True))
        m = rand_poly(1, True)
        phi = exp_vertical(VerticalField(mul(u, f0)))
        sigma = exp_vertical(VerticalField(mul(m, f0)))
        f1 = log_updiffeo(phi).fhat
        f2 = log_updiffeo(conjugate(phi, sigma)).fhat
        for sample in sample_grid(1, 5, seed=trial, scale=Fraction(1, 8)):
            gap = compare_profiles(
                fiber_residue_profile(f1, boundary, sample),
                fiber_residue_profile(f2, boundary, sample))
            assert gap is not None
            worst = max(worst, gap)
            checked += 1
    _report(7, worst < 1e-8 and checked == 50,
            f"residues of phi and its special conjugate agree over "
            f"{checked} fiber profiles; max gap {worst:.2e}, tol 1e-8")


def test_criterion_8_cli_verdicts_and_exit_codes():
    def run_cli(fixture):
        return subprocess.run(
            [sys.executable, "-m", "paramflow.cli", "classify",
             str(FIXTURES / fixture)],
            capture_output=True, text=True)

    proc = run_cli("classify_refuted.json")
    part_a = (proc.returncode == 3 and "lambda = 1" in proc.stdout
              and "refuted-homological" in proc.stdout)
    proc = run_cli("classify_special.json")
    part_b = (proc.returncode == 0 and "lambda = 0" in proc.stdout
              and "verified exactly = True" in proc.stdout)
    _report(8, part_a and part_b,
            f"exit 3 with lambda 1: {part_a}; "
            f"exit 0 with verified certificate: {part_b}")
