"""Truncated multivariate formal power series with exact coefficients.

A series lives in C[[x, x1, ..., xn]] where variable index 0 is the
distinguished coordinate x and the remaining indices are parameters.
Only finitely many terms are stored, together with ``valid_order``: the
total degree through which the coefficients are meaningful.  Stored
terms of degree above ``valid_order`` are dropped on construction, so a
series is always a faithful representative of a truncation class.

Order propagation is deliberately conservative and fixed per operation:
min for add/mul/compose, minus one for d/dx, plus one for the x-integral.
Internal algorithms that can justify sharper truncation bookkeeping
(exponentials of nilpotent fields, Weierstrass division) manage caps
explicitly on raw term dictionaries and re-wrap the result.

Exponent vectors are packed into a single integer, eight bits per
variable, so term keys hash fast and exponent addition is integer
addition.  Multiplication extracts integer numerators over a common
denominator and convolves in machine/big integers; coefficients are
re-normalized to exact rationals once per product.
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from math import comb, lcm
from typing import Iterator, Mapping, Sequence

from .rational import GaussianRational

GR0 = GaussianRational(0)
GR1 = GaussianRational(1)

# eight bits per exponent; keep sums of two exponents below 256
MAX_ORDER = 120
_SHIFT = 8
_MASK = 255


class SeriesError(ValueError):
    pass


class NotXRegularError(SeriesError):
    """Divisor vanishes identically on the division axis."""

    def __init__(self, var: int, order: int):
        self.var = var
        self.order = order
        super().__init__(
            f"divisor restricted to the axis of variable {var} vanishes "
            f"identically at order {order}; Weierstrass division needs a "
            f"regular divisor"
        )


class NotDivisibleError(SeriesError):
    """Exact division failed; carries the first offending remainder term."""

    def __init__(self, witness_exp, witness_coeff, order: int):
        self.witness = (witness_exp, witness_coeff)
        self.order = order
        super().__init__(
            f"not divisible at order {order}: first nonzero remainder term "
            f"{witness_coeff} * {witness_exp}"
        )


class InsufficientOrderError(SeriesError):
    pass


def _pack(exp: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exp):
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, nvars: int) -> tuple:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(nvars))


def _deg(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _SHIFT
    return d


def _sort_key(exp: Sequence[int]):
    # graded lexicographic, x (index 0) most significant, x-heavy first
    return (sum(exp), tuple(-e for e in exp))


# ---------------------------------------------------------------------------
# raw term-dict kernels (packed-int keys -> GaussianRational values)
# ---------------------------------------------------------------------------


def _int_form(terms: dict):
    """Common-denominator integer view, sorted by total degree."""
    den = 1
    for c in terms.values():
        den = lcm(den, c.re.denominator)
        if c.im:
            den = lcm(den, c.im.denominator)
    entries = []
    real = True
    for k, c in terms.items():
        zr = c.re.numerator * (den // c.re.denominator)
        if c.im:
            zi = c.im.numerator * (den // c.im.denominator)
            real = False
        else:
            zi = 0
        entries.append((_deg(k), k, zr, zi))
    entries.sort(key=lambda t: t[0])
    return den, entries, real


def _mul_terms(ta: dict, tb: dict, cap: int) -> dict:
    """Convolution of term dicts, truncated to total degree <= cap."""
    if not ta or not tb or cap < 0:
        return {}
    if len(tb) < len(ta):
        ta, tb = tb, ta
    dena, ea, reala = _int_form(ta)
    denb, eb, realb = _int_form(tb)
    degs_b = [t[0] for t in eb]
    out: dict = {}
    if reala and realb:
        for da, ka, ra, _ in ea:
            if da > cap:
                break
            cut = bisect_right(degs_b, cap - da)
            for i in range(cut):
                _, kb, rb, _ = eb[i]
                k = ka + kb
                v = out.get(k)
                if v is None:
                    out[k] = [ra * rb, 0]
                else:
                    v[0] += ra * rb
    else:
        for da, ka, ra, ia in ea:
            if da > cap:
                break
            cut = bisect_right(degs_b, cap - da)
            for i in range(cut):
                _, kb, rb, ib = eb[i]
                k = ka + kb
                zr = ra * rb - ia * ib
                zi = ra * ib + ia * rb
                v = out.get(k)
                if v is None:
                    out[k] = [zr, zi]
                else:
                    v[0] += zr
                    v[1] += zi
    den = dena * denb
    res = {}
    for k, (zr, zi) in out.items():
        if zr or zi:
            res[k] = GaussianRational(Fraction(zr, den), Fraction(zi, den))
    return res


def _add_terms(ta: dict, tb: dict) -> dict:
    out = dict(ta)
    for k, c in tb.items():
        cur = out.get(k)
        if cur is None:
            out[k] = c
        else:
            s = cur + c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def _scale_terms(t: dict, c: GaussianRational) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in t.items()}


def _trunc_terms(t: dict, cap: int) -> dict:
    return {k: c for k, c in t.items() if _deg(k) <= cap}


# ---------------------------------------------------------------------------
# the series class
# ---------------------------------------------------------------------------


class MultiSeries:
    """Sparse truncated power series over the Gaussian rationals.

    Equality compares the variable count and the stored terms; the
    ``valid_order`` bookkeeping is asserted separately where it matters.
    Instances are immutable; all operations return new series.
    """

    __slots__ = ("nvars", "valid_order", "_terms")

    def __init__(self, nvars: int, valid_order: int, terms: Mapping | None = None,
                 *, _packed: bool = False):
        if nvars < 1:
            raise SeriesError("need at least the distinguished variable x")
        if not 0 <= valid_order <= MAX_ORDER:
            raise SeriesError(f"valid_order must lie in [0, {MAX_ORDER}]")
        store: dict = {}
        if terms:
            if _packed:
                for k, c in terms.items():
                    if c and _deg(k) <= valid_order:
                        store[k] = c
            else:
                for exp, c in terms.items():
                    if isinstance(exp, int):
                        exp = (exp,)
                    if len(exp) != nvars:
                        raise SeriesError(
                            f"exponent {exp} has {len(exp)} entries, expected {nvars}")
                    if any(e < 0 or e > _MASK for e in exp):
                        raise SeriesError(f"exponent {exp} out of range")
                    c = GaussianRational.coerce(c)
                    if c and sum(exp) <= valid_order:
                        key = _pack(exp)
                        prev = store.get(key)
                        c = c if prev is None else prev + c
                        if c:
                            store[key] = c
                        elif key in store:
                            del store[key]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "valid_order", valid_order)
        object.__setattr__(self, "_terms", store)

    def __setattr__(self, name, value):
        raise AttributeError("MultiSeries is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, order: int) -> "MultiSeries":
        return cls(nvars, order)

    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "MultiSeries":
        return cls(nvars, order, {(0,) * nvars: GaussianRational.coerce(value)})

    @classmethod
    def variable(cls, index: int, nvars: int, order: int) -> "MultiSeries":
        exp = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, order, {exp: GR1})

    # -- inspection -------------------------------------------------------

    def terms(self) -> Iterator[tuple]:
        """Yield (exponent tuple, coefficient) in graded-lex order."""
        items = [(_unpack(k, self.nvars), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: _sort_key(t[0]))
        return iter(items)

    def coeff(self, exp: Sequence[int]) -> GaussianRational:
        return self._terms.get(_pack(exp), GR0)

    def constant_term(self) -> GaussianRational:
        return self._terms.get(0, GR0)

    def is_zero(self) -> bool:
        return not self._terms

    def order(self):
        """Lowest total degree of a stored term, or None for the zero series."""
        if not self._terms:
            return None
        return min(_deg(k) for k in self._terms)

    def max_degree_in(self, var: int) -> int:
        shift = _SHIFT * var
        if not self._terms:
            return 0
        return max((k >> shift) & _MASK for k in self._terms)

    def truncate(self, order: int) -> "MultiSeries":
        order = min(order, self.valid_order)
        return MultiSeries(self.nvars, order, _trunc_terms(self._terms, order),
                           _packed=True)

    def with_order(self, order: int) -> "MultiSeries":
        """Re-declare the valid order (caller asserts the extension is exact)."""
        return MultiSeries(self.nvars, order, _trunc_terms(self._terms, order),
                           _packed=True)

    def is_unit(self) -> bool:
        return bool(self.constant_term())

    # -- arithmetic dunders ------------------------------------------------

    def _check_same_ring(self, other: "MultiSeries"):
        if self.nvars != other.nvars:
            raise SeriesError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if isinstance(other, MultiSeries):
            return add(self, other)
        return add(self, MultiSeries.constant(other, self.nvars, self.valid_order))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, MultiSeries):
            return sub(self, other)
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return MultiSeries(self.nvars, self.valid_order,
                           _scale_terms(self._terms, -GR1), _packed=True)

    def __mul__(self, other):
        if isinstance(other, MultiSeries):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        parts = []
        for exp, c in list(self.terms())[:8]:
            mono = "*".join(
                f"v{i}^{e}" if e > 1 else f"v{i}"
                for i, e in enumerate(exp) if e) or "1"
            parts.append(f"({c})*{mono}")
        body = " + ".join(parts) if parts else "0"
        if len(self._terms) > 8:
            body += " + ..."
        return f"<MultiSeries[{self.nvars} vars, N={self.valid_order}] {body}>"


# ---------------------------------------------------------------------------
# ring operations
# ---------------------------------------------------------------------------


def add(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    a._check_same_ring(b)
    cap = min(a.valid_order, b.valid_order)
    return MultiSeries(a.nvars, cap,
                       _add_terms(_trunc_terms(a._terms, cap),
                                  _trunc_terms(b._terms, cap)),
                       _packed=True)


def sub(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return add(a, -b)


def scale(a: MultiSeries, c) -> MultiSeries:
    c = GaussianRational.coerce(c)
    return MultiSeries(a.nvars, a.valid_order, _scale_terms(a._terms, c),
                       _packed=True)


def mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    a._check_same_ring(b)
    cap = min(a.valid_order, b.valid_order)
    return MultiSeries(a.nvars, cap, _mul_terms(a._terms, b._terms, cap),
                       _packed=True)


def unit_inverse(u: MultiSeries) -> MultiSeries:
    """Multiplicative inverse of a unit, via Newton iteration on v(2 - uv)."""
    c = u.constant_term()
    if not c:
        raise SeriesError("unit_inverse needs a nonzero constant term")
    order = 0
    v = {0: c.inverse()}
    two = {0: GaussianRational(2)}
    while order < u.valid_order:
        order = min(2 * order + 1, u.valid_order)
        uv = _mul_terms(u._terms, v, order)
        w = _add_terms(two, _scale_terms(uv, -GR1))
        v = _mul_terms(v, w, order)
    return MultiSeries(u.nvars, u.valid_order, v, _packed=True)


def derivative(a: MultiSeries, var: int) -> MultiSeries:
    if not 0 <= var < a.nvars:
        raise SeriesError(f"variable index {var} out of range")
    shift = _SHIFT * var
    out = {}
    for k, c in a._terms.items():
        e = (k >> shift) & _MASK
        if e:
            out[k - (1 << shift)] = c * e
    return MultiSeries(a.nvars, max(a.valid_order - 1, 0), out, _packed=True)


def integrate_x(a: MultiSeries) -> MultiSeries:
    """Term-wise antiderivative in x with zero constant of integration."""
    out = {}
    for k, c in a._terms.items():
        e = k & _MASK
        out[k + 1] = c * Fraction(1, e + 1)
    return MultiSeries(a.nvars, min(a.valid_order + 1, MAX_ORDER), out,
                       _packed=True)


def compose_x(a: MultiSeries, s: MultiSeries) -> MultiSeries:
    """Substitute x -> s(x, params); parameters pass through unchanged."""
    a._check_same_ring(s)
    if s.constant_term():
        raise SeriesError("substitution series must have zero constant term")
    cap = min(a.valid_order, s.valid_order)
    if a.is_zero():
        return MultiSeries(a.nvars, cap)
    groups: dict = {}
    for k, c in a._terms.items():
        xd = k & _MASK
        groups.setdefault(xd, {})[k - xd] = c
    top = max(groups)
    acc = dict(groups.get(top, {}))
    for xd in range(top - 1, -1, -1):
        acc = _mul_terms(acc, s._terms, cap)
        g = groups.get(xd)
        if g:
            acc = _add_terms(acc, g)
    return MultiSeries(a.nvars, cap, _trunc_terms(acc, cap), _packed=True)


def eval_numeric(a: MultiSeries, point: Sequence[complex]) -> complex:
    """Evaluate the truncated polynomial at a numeric point."""
    if len(point) != a.nvars:
        raise SeriesError("point dimension mismatch")
    pt = [complex(z) for z in point]
    total = 0j
    for k, c in a._terms.items():
        v = complex(c)
        kk = k
        i = 0
        while kk:
            e = kk & _MASK
            if e:
                v *= pt[i] ** e
            kk >>= _SHIFT
            i += 1
        total += v
    return total


def shear_to_x(a: MultiSeries, coeffs: Sequence[int]) -> MultiSeries:
    """Linear substitution x_j -> x_j + c_j * x for parameter indices j >= 1.

    Degree-preserving ring automorphism; the inverse is the negated
    coefficient vector.  Used to make a divisor x-regular.
    """
    if len(coeffs) != a.nvars:
        raise SeriesError("coefficient vector dimension mismatch")
    out: dict = {}
    for k, c in a._terms.items():
        partial = {k & _MASK: c}  # start from the x-part of the exponent
        kk = k >> _SHIFT
        j = 1
        while kk:
            e = kk & _MASK
            if e:
                cj = coeffs[j]
                shift = _SHIFT * j
                if cj:
                    nxt: dict = {}
                    for key, val in partial.items():
                        for t in range(e + 1):
                            # (x_j + c_j x)^e term: C(e,t) c_j^t x^t x_j^(e-t)
                            w = val * (comb(e, t) * cj ** t)
                            nk = key + t + ((e - t) << shift)
                            cur = nxt.get(nk)
                            nxt[nk] = w if cur is None else cur + w
                    partial = nxt
                else:
                    partial = {key + (e << shift): val for key, val in partial.items()}
            kk >>= _SHIFT
            j += 1
        for key, val in partial.items():
            if val:
                cur = out.get(key)
                s = val if cur is None else cur + val
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
    return MultiSeries(a.nvars, a.valid_order, out, _packed=True)


# ---------------------------------------------------------------------------
# Weierstrass division
# ---------------------------------------------------------------------------


class WeierstrassQuotRem:
    """Result of dividing g by an x-regular f: g = q*f + r, deg_x r < d."""

    __slots__ = ("quotient", "remainder", "d")

    def __init__(self, quotient: MultiSeries, remainder: MultiSeries, d: int):
        self.quotient = quotient
        self.remainder = remainder
        self.d = d

    def __iter__(self):
        return iter((self.quotient, self.remainder))


def _weierstrass_var(g: MultiSeries, f: MultiSeries, var: int) -> WeierstrassQuotRem:
    """Formal Weierstrass division along the given variable.

    Works order by order in the complementary grading: writing
    f = f_axis + f', with f_axis the restriction to the var-axis
    (a unit times var^d) and f' the part involving the other variables,
    the pieces of q and r of complementary degree p are obtained from a
    one-variable division of the known right-hand side at stage p.
    """
    g._check_same_ring(f)
    N = min(g.valid_order, f.valid_order)
    shift = _SHIFT * var
    axis: dict = {}
    fprime: dict = {}
    for k, c in f._terms.items():
        vd = (k >> shift) & _MASK
        if k == vd << shift:
            axis[vd] = c
        else:
            fprime.setdefault(_deg(k) - vd, {})[k] = c
    if not axis:
        raise NotXRegularError(var, N)
    d = min(axis)
    if d == 0:
        # unit divisor: plain multiplication by the inverse
        q = mul(g, unit_inverse(f))
        return WeierstrassQuotRem(q, MultiSeries(g.nvars, N), 0)
    cap = N - d
    if cap < 0:
        raise InsufficientOrderError(
            f"valid order {N} below divisor {var}-order {d}")
    e0inv = axis[d].inverse()
    q_by_p: dict = {}
    q_all: dict = {}
    r_all: dict = {}
    g_by_p: dict = {}
    for k, c in g._terms.items():
        vd = (k >> shift) & _MASK
        g_by_p.setdefault(_deg(k) - vd, {})[k] = c
    for p in range(cap + 1):
        rhs = dict(g_by_p.get(p, {}))
        for j, fp in fprime.items():
            if j < 1 or j > p:
                continue
            qprev = q_by_p.get(p - j)
            if qprev:
                rhs = _add_terms(rhs, _scale_terms(_mul_terms(fp, qprev, N), -GR1))
        # group by the complementary monomial, divide each var-coefficient list
        by_mono: dict = {}
        for k, c in rhs.items():
            vd = (k >> shift) & _MASK
            by_mono.setdefault(k - (vd << shift), {})[vd] = c
        q_p: dict = {}
        for mono, avals in by_mono.items():
            for i, c in avals.items():
                if i < d:
                    r_all[mono + (i << shift)] = c
            mmax = cap - p
            qc = []
            for m in range(mmax + 1):
                val = avals.get(d + m, GR0)
                for j in range(1, m + 1):
                    ej = axis.get(d + j)
                    if ej is not None and qc[m - j]:
                        val = val - ej * qc[m - j]
                qc.append(val * e0inv)
            for m, val in enumerate(qc):
                if val:
                    q_p[mono + (m << shift)] = val
        if q_p:
            q_by_p[p] = q_p
            q_all.update(q_p)
    q = MultiSeries(g.nvars, cap, q_all, _packed=True)
    r = MultiSeries(g.nvars, cap, r_all, _packed=True)
    return WeierstrassQuotRem(q, r, d)


def weierstrass_divide(g: MultiSeries, f: MultiSeries) -> WeierstrassQuotRem:
    """Divide g by an x-regular f: g = q*f + r with deg_x r < d.

    f must satisfy f(x, 0, ..., 0) != 0 at the working order; the x-order
    of that restriction is d.  Quotient and remainder are valid to
    min(valid orders) - d.
    """
    return _weierstrass_var(g, f, 0)


def adic_expansion(u: MultiSeries, g: MultiSeries, count: int) -> list:
    """First ``count`` digits of the g-adic expansion u = sum u_j g^j.

    Each digit has x-degree below the x-order of g; digit j is the
    Weierstrass remainder at stage j of the iterated division by g.
    """
    digits = []
    cur = u
    for _ in range(count):
        quot, rem = weierstrass_divide(cur, g)
        digits.append(rem)
        cur = quot
    return digits


# ---------------------------------------------------------------------------
# exact division (zero remainder expected)
# ---------------------------------------------------------------------------

_SHEAR_CANDIDATES = (1, 2, 3, 5, 7, 11)


def _find_shear(f: MultiSeries):
    """Find integer shear coefficients making f x-regular."""
    n = f.nvars
    for c in _SHEAR_CANDIDATES:
        for j in range(1, n):
            vec = [0] * n
            vec[j] = c
            fs = shear_to_x(f, vec)
            if any(k == (k & _MASK) for k in fs._terms):
                return vec, fs
    for c in _SHEAR_CANDIDATES:
        vec = [0] + [c * (i + 1) for i in range(n - 1)]
        fs = shear_to_x(f, vec)
        if any(k == (k & _MASK) for k in fs._terms):
            return vec, fs
    raise SeriesError("could not find a regularizing linear substitution")


def divide_once(g: MultiSeries, f: MultiSeries) -> MultiSeries:
    """Exact quotient g / f; raises NotDivisibleError when the remainder
    is nonzero at the working order.

    Tries Weierstrass division along each variable in which f is regular;
    when f is regular in none (e.g. x2 - x*x1), applies a degree-preserving
    linear substitution sending parameters into x, divides, and maps back.
    """
    g._check_same_ring(f)
    if f.is_zero():
        raise SeriesError("division by the zero series")
    for var in range(f.nvars):
        shift = _SHIFT * var
        if any(k == ((k >> shift & _MASK) << shift) for k in f._terms):
            quot, rem = _weierstrass_var(g, f, var)
            if not rem.is_zero():
                exp, coeff = min(
                    ((_unpack(k, g.nvars), c) for k, c in rem._terms.items()),
                    key=lambda t: _sort_key(t[0]))
                raise NotDivisibleError(exp, coeff, rem.valid_order)
            return quot
    vec, fs = _find_shear(f)
    gs = shear_to_x(g, vec)
    quot, rem = _weierstrass_var(gs, fs, 0)
    if not rem.is_zero():
        back = shear_to_x(rem, [-c for c in vec])
        exp, coeff = min(
            ((_unpack(k, g.nvars), c) for k, c in back._terms.items()),
            key=lambda t: _sort_key(t[0]))
        raise NotDivisibleError(exp, coeff, rem.valid_order)
    return shear_to_x(quot, [-c for c in vec])


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def series_to_json(a: MultiSeries) -> dict:
    """Canonical JSON document: terms in graded-lex order, exact strings."""
    return {
        "nvars": a.nvars,
        "order": a.valid_order,
        "terms": [
            {"c": c.to_strings(), "e": list(exp)}
            for exp, c in a.terms()
        ],
    }


def series_from_json(doc: dict) -> MultiSeries:
    try:
        nvars = int(doc["nvars"])
        order = int(doc["order"])
        terms = {
            tuple(int(e) for e in t["e"]): GaussianRational.from_strings(t["c"])
            for t in doc["terms"]
        }
    except (KeyError, TypeError, IndexError) as exc:
        raise SeriesError(f"malformed series document: {exc}") from exc
    return MultiSeries(nvars, order, terms)
