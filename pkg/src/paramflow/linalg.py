"""Exact sparse linear solving over the Gaussian rationals.

Small systems (a few hundred unknowns) arising from coefficient matching
in truncated series equations.  Straight Gaussian elimination with exact
arithmetic; rows are processed sparsest first and pivots are chosen to
limit fill-in.  No scaling or tolerance anywhere: a zero is a zero.
"""
from __future__ import annotations

from typing import Dict, Hashable, Optional, Tuple

from .rational import GaussianRational


def solve_linear(rows: Dict[Hashable, Dict[Hashable, GaussianRational]],
                 rhs: Dict[Hashable, GaussianRational]
                 ) -> Tuple[Optional[dict], Optional[Hashable]]:
    """Solve the sparse system  sum_c rows[r][c] * x_c = rhs.get(r, 0).

    Returns (solution, None) with one particular solution (free unknowns
    set to zero), or (None, r) where r is the key of a row that reduced
    to  0 = nonzero , certifying inconsistency.
    """
    pivots: dict = {}  # pivot column -> (row dict with pivot coeff 1, rhs value)
    order: dict = {}   # pivot column -> creation index
    row_items = sorted(rows.items(), key=lambda kv: (len(kv[1]), _key(kv[0])))
    for rkey, row in row_items:
        row = {c: v for c, v in row.items() if v}
        b = rhs.get(rkey, GaussianRational(0))
        while True:
            hit = None
            for c in row:
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            coeff = row.pop(hit)
            prow, pb = pivots[hit]
            for c, v in prow.items():
                if c == hit:
                    continue
                w = row.get(c, GaussianRational(0)) - coeff * v
                if w:
                    row[c] = w
                elif c in row:
                    del row[c]
            b = b - coeff * pb
        if not row:
            if b:
                return None, rkey
            continue
        pcol = min(row, key=_key)
        inv = row[pcol].inverse()
        prow = {c: v * inv for c, v in row.items()}
        pivots[pcol] = (prow, b * inv)
        order[pcol] = len(order)
    solution: dict = {}
    for pcol in sorted(pivots, key=lambda c: -order[c]):
        prow, b = pivots[pcol]
        val = b
        for c, v in prow.items():
            if c != pcol:
                val = val - v * solution.get(c, GaussianRational(0))
        if val:
            solution[pcol] = val
    return solution, None


def _key(k):
    # stable ordering for heterogeneous hashable keys
    return (str(type(k)), repr(k))
