"""Regenerate the JSON fixtures shipped with the package.

Every fixture is validated against the library before it is written, so
a fixture on disk always demonstrates the behavior its name promises.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction

from paramflow import (
    BoundaryFactor,
    FactoredBoundary,
    HomEquation,
    KIND_HOMOLOGICAL,
    KIND_SPECIAL,
    MultiSeries,
    NoSolution,
    SpecialSolution,
    VerticalField,
    add,
    boundary_to_json,
    classify_pair,
    diffeo_to_json,
    exp_vertical,
    free_of_residues,
    mul,
    residue_1d,
    scale,
    series_to_json,
    special_solve,
    sub,
    unit_inverse,
    verify_conjugation,
)

OUT = os.path.join(os.path.dirname(__file__), os.pardir,
                   "src", "paramflow", "fixtures")


def write(name: str, doc: dict) -> None:
    path = os.path.join(OUT, name)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print("wrote", os.path.normpath(path))


def central_boundary(order: int) -> FactoredBoundary:
    x = MultiSeries.variable(0, 3, order)
    x1 = MultiSeries.variable(1, 3, order)
    x2 = MultiSeries.variable(2, 3, order)
    return FactoredBoundary([BoundaryFactor(sub(x2, mul(x, x1)), 2)])


def make_geometric() -> None:
    z = MultiSeries.variable(0, 1, 16)
    z2 = mul(z, z)
    f = sub(z2, mul(z2, z))
    assert residue_1d(f) == 1
    write("geometric.json", {"series": series_to_json(f)})


def make_profile_demo() -> None:
    order = 12
    z = MultiSeries.variable(0, 2, order)
    y = MultiSeries.variable(1, 2, order)
    boundary = FactoredBoundary([BoundaryFactor(z, 2),
                                 BoundaryFactor(sub(z, y), 2)])
    one = MultiSeries.constant(1, 2, order)
    # residues of dz/(z^2 (z-y)^2) are +-2/y^3: visibly nonzero
    res = free_of_residues(one, boundary, nsamples=4, scale=Fraction(1, 4))
    assert res.status is False
    write("residue_profile_demo.json", {
        "numerator": series_to_json(one),
        "boundary": boundary_to_json(boundary),
    })


def make_homeq_pair() -> None:
    order = 10
    boundary = central_boundary(order)
    one = MultiSeries.constant(1, 3, order)
    x1 = MultiSeries.variable(1, 3, order)
    x2 = MultiSeries.variable(2, 3, order)

    # cofactors with 1/u1 - 1/u2 = -x1 - x2, solved by beta = 1 + x
    u1 = one
    u2 = unit_inverse(add(one, add(x1, x2)))
    eq = HomEquation(boundary, sub(unit_inverse(u1), unit_inverse(u2)))
    result = special_solve(eq)
    assert isinstance(result, SpecialSolution)
    write("homeq_solvable.json", {
        "u1": series_to_json(u1),
        "u2": series_to_json(u2),
        "boundary": boundary_to_json(boundary),
    })

    # cofactors 1/2 and 1: the difference is the constant 1, which no
    # beta can reach because both equation coefficients vanish at 0
    half = MultiSeries.constant(Fraction(1, 2), 3, order)
    eq = HomEquation(boundary, sub(unit_inverse(half), unit_inverse(one)))
    result = special_solve(eq)
    assert isinstance(result, NoSolution) and result.refuted
    write("homeq_refuted.json", {
        "u1": series_to_json(half),
        "u2": series_to_json(one),
        "boundary": boundary_to_json(boundary),
    })


def make_classify_pairs() -> None:
    order = 10
    boundary = central_boundary(order)
    f0 = boundary.product()
    one = MultiSeries.constant(1, 3, order)
    x1 = MultiSeries.variable(1, 3, order)

    # cofactor difference 1/u1 - 1/u2 = x1, solved by beta = -1
    phi1 = exp_vertical(VerticalField(f0))
    phi2 = exp_vertical(VerticalField(mul(unit_inverse(sub(one, x1)), f0)))
    assert phi2 != phi1
    verdict = classify_pair(phi1, phi2, boundary)
    assert verdict.kind == KIND_SPECIAL and verdict.certificate is not None
    assert verify_conjugation(phi1, phi2, verdict.certificate.sigma)
    write("classify_special.json", {
        "phi1": diffeo_to_json(phi1),
        "phi2": diffeo_to_json(phi2),
        "boundary": boundary_to_json(boundary),
    })

    phia = exp_vertical(VerticalField(scale(f0, Fraction(1, 2))))
    phib = exp_vertical(VerticalField(f0))
    verdict = classify_pair(phia, phib, boundary)
    assert verdict.kind == KIND_HOMOLOGICAL
    write("classify_refuted.json", {
        "phi1": diffeo_to_json(phia),
        "phi2": diffeo_to_json(phib),
        "boundary": boundary_to_json(boundary),
    })


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    make_geometric()
    make_profile_demo()
    make_homeq_pair()
    make_classify_pairs()
