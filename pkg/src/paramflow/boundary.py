"""Factored boundary divisors.

The dynamics live on germs (C^{1+n}, 0) fibered over the parameter
space; the boundary is a principal divisor cut out by a product
f = prod f_j^{l_j}.  A factor is *fibered* when its series does not
involve x at all (it is pulled back from the parameter space), and
non-fibered otherwise.  The two kinds play different roles: non-fibered
factors meet each fiber in isolated points that carry residues, fibered
factors act as unit scalars on a generic fiber.
"""
from __future__ import annotations

from typing import Iterable, Iterator, List

from .series import MultiSeries, SeriesError, mul, series_from_json, series_to_json


class BoundaryError(ValueError):
    pass


class BoundaryFactor:
    """One irreducible-by-assumption factor with its multiplicity."""

    __slots__ = ("series", "multiplicity")

    def __init__(self, series: MultiSeries, multiplicity: int = 1):
        if not isinstance(multiplicity, int) or multiplicity < 1:
            raise BoundaryError("multiplicity must be a positive integer")
        if series.is_zero():
            raise BoundaryError("boundary factor must be nonzero")
        if series.constant_term():
            raise BoundaryError("boundary factor must vanish at the origin")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "multiplicity", multiplicity)

    def __setattr__(self, name, value):
        raise AttributeError("BoundaryFactor is immutable")

    @property
    def fibered(self) -> bool:
        """True when x does not occur: the factor lives on the parameter space."""
        return self.series.max_degree_in(0) == 0

    def __eq__(self, other):
        if not isinstance(other, BoundaryFactor):
            return NotImplemented
        return (self.series, self.multiplicity) == (other.series, other.multiplicity)

    def __hash__(self):
        return hash((self.series, self.multiplicity))

    def __repr__(self):
        kind = "fibered" if self.fibered else "non-fibered"
        return f"<BoundaryFactor mult={self.multiplicity} {kind} {self.series!r}>"


def _proportional(a: MultiSeries, b: MultiSeries) -> bool:
    ta = list(a.terms())
    tb = list(b.terms())
    if len(ta) != len(tb) or not ta:
        return False
    if [e for e, _ in ta] != [e for e, _ in tb]:
        return False
    ratio = ta[0][1] / tb[0][1]
    return all(ca == ratio * cb for (_, ca), (_, cb) in zip(ta, tb))


class FactoredBoundary:
    """An ordered list of distinct factors; the divisor is their product."""

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[BoundaryFactor]):
        factors = list(factors)
        if not factors:
            raise BoundaryError("boundary needs at least one factor")
        nv = factors[0].series.nvars
        for fac in factors:
            if fac.series.nvars != nv:
                raise BoundaryError("factors live in different rings")
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                if _proportional(factors[i].series, factors[j].series):
                    raise BoundaryError(
                        f"factors {i} and {j} are proportional; merge them "
                        f"into one factor with summed multiplicity")
        object.__setattr__(self, "factors", tuple(factors))

    def __setattr__(self, name, value):
        raise AttributeError("FactoredBoundary is immutable")

    def __iter__(self) -> Iterator[BoundaryFactor]:
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    @property
    def nvars(self) -> int:
        return self.factors[0].series.nvars

    @property
    def valid_order(self) -> int:
        return min(f.series.valid_order for f in self.factors)

    def nonfibered(self) -> List[BoundaryFactor]:
        return [f for f in self.factors if not f.fibered]

    def fibered(self) -> List[BoundaryFactor]:
        return [f for f in self.factors if f.fibered]

    def _product_of(self, facs: List[BoundaryFactor]) -> MultiSeries:
        out = MultiSeries.constant(1, self.nvars, self.valid_order)
        for fac in facs:
            for _ in range(fac.multiplicity):
                out = mul(out, fac.series)
        return out

    def product(self) -> MultiSeries:
        return self._product_of(list(self.factors))

    def nonfibered_product(self) -> MultiSeries:
        return self._product_of(self.nonfibered())

    def fibered_product(self) -> MultiSeries:
        return self._product_of(self.fibered())

    def nonfibered_radical(self) -> MultiSeries:
        """Product of the non-fibered factors, each taken once."""
        out = MultiSeries.constant(1, self.nvars, self.valid_order)
        for fac in self.nonfibered():
            out = mul(out, fac.series)
        return out

    def __eq__(self, other):
        if not isinstance(other, FactoredBoundary):
            return NotImplemented
        return self.factors == other.factors

    def __repr__(self):
        return f"<FactoredBoundary {list(self.factors)!r}>"


def boundary_to_json(b: FactoredBoundary) -> dict:
    return {
        "factors": [
            {"series": series_to_json(f.series), "multiplicity": f.multiplicity}
            for f in b.factors
        ]
    }


def boundary_from_json(doc: dict) -> FactoredBoundary:
    try:
        factors = [
            BoundaryFactor(series_from_json(f["series"]), int(f["multiplicity"]))
            for f in doc["factors"]
        ]
    except (KeyError, TypeError) as exc:
        raise SeriesError(f"malformed boundary document: {exc}") from exc
    return FactoredBoundary(factors)
